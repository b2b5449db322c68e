#include <doctest.h>

#include "specindex/contour.hpp"
#include "specindex/random.hpp"

using namespace specindex;
using contour::Contour;
using contour::HoloMatFun;

namespace {

CMatrix scalar(Complex v) { return CMatrix::Constant(1, 1, v); }

/// diag((z - 1)^2 / (z + 1), (z - 3i) / (z - 2))
HoloMatFun rational() {
  return HoloMatFun(
      [](Complex z) {
        CMatrix m = CMatrix::Zero(2, 2);
        m(0, 0) = (z - 1.0) * (z - 1.0) / (z + 1.0);
        m(1, 1) = (z - Complex(0.0, 3.0)) / (z - 2.0);
        return m;
      },
      [](Complex z) {
        CMatrix m = CMatrix::Zero(2, 2);
        m(0, 0) = (z - 1.0) * (z + 3.0) / ((z + 1.0) * (z + 1.0));
        m(1, 1) = (Complex(0.0, 3.0) - 2.0) / ((z - 2.0) * (z - 2.0));
        return m;
      });
}

}  // namespace

TEST_CASE("contour validation") {
  CHECK_THROWS_AS((Contour{0.0, 0.0, 64}).validate(), Error);
  CHECK_THROWS_AS((Contour{0.0, 1.0, 7}).validate(), Error);
  CHECK_NOTHROW((Contour{0.0, 1.0, 8}).validate());
  CHECK((Contour{0.0, 1.0, 8}).encloses(Complex(0.5, 0.5)));
}

TEST_CASE("cauchy integrals of simple functions") {
  HoloMatFun inv([](Complex z) { return scalar(1.0 / z); });
  CHECK(std::abs(contour::cauchy_integral(inv, {0.0, 1.0, 32}, 0)(0, 0) - 1.0) < 1e-14);
  HoloMatFun entire([](Complex z) { return scalar(std::exp(z)); });
  CHECK(std::abs(contour::cauchy_integral(entire, {0.0, 1.0, 32}, 0)(0, 0)) < 1e-14);
  // (1/2 pi i) \oint e^z z^-3 dz = 1/2
  CHECK(std::abs(contour::cauchy_integral(entire, {0.0, 1.0, 64}, -3)(0, 0) - 0.5) < 1e-14);
  const auto checked = contour::cauchy_integral_checked(inv, {0.0, 1.0, 32}, 0);
  CHECK(checked.refinement_gap < 1e-14);
}

TEST_CASE("generalized index counts zeros minus poles") {
  const auto f = rational();
  CHECK(contour::generalized_index(f, {1.0, 0.5, 64}).rounded == 2);
  CHECK(contour::generalized_index(f, {-1.0, 0.5, 64}).rounded == -1);
  CHECK(contour::generalized_index(f, {2.0, 0.5, 64}).rounded == -1);
  CHECK(contour::generalized_index(f, {0.0, 1.5, 128}).rounded == 1);
  const auto r = contour::generalized_index(f, {Complex(0.0, 3.0), 0.5, 64});
  CHECK(r.rounded == 1);
  CHECK(r.accepted());
  CHECK(r.nodes == 64);
  const auto both = contour::generalized_index_with_winding(f, {1.0, 0.5, 64});
  CHECK(both.winding.rounded == 2);
  CHECK(contour::winding_det(f, {2.0, 0.5, 64}).rounded == -1);
}

TEST_CASE("finite-difference fallback matches the analytic derivative") {
  const auto f = rational();
  HoloMatFun value_only([](Complex z) { return rational()(z); });
  CHECK_FALSE(value_only.has_derivative());
  const Contour c{1.0, 0.5, 64};
  CHECK(contour::generalized_index(value_only, c).rounded == 2);
  const Complex z(0.3, 0.4);
  const CMatrix fd = contour::finite_difference_derivative([&](Complex s) { return f(s); }, z, 1e-3);
  CHECK(max_abs(fd - f.jet(z, 1.0).derivative) < 1e-9);
}

TEST_CASE("declared poles on the contour are rejected") {
  HoloMatFun f([](Complex z) { return scalar(1.0 / (z - 1.0)); });
  f.declare_pole(1.0);
  try {
    contour::generalized_index(f, {0.0, 1.0, 32});
    FAIL("expected NearSingularContour");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NearSingularContour);
  }
}

TEST_CASE("riesz projection and multiplicity of a jordan block") {
  CMatrix t = CMatrix::Zero(3, 3);
  t(0, 0) = t(1, 1) = 2.0;
  t(0, 1) = 1.0;
  t(2, 2) = -1.0;
  const auto res = contour::resolvent_of(t);
  const CMatrix p = contour::riesz_projection(res, {2.0, 1.0, 64});
  CMatrix expected = CMatrix::Zero(3, 3);
  expected(0, 0) = expected(1, 1) = 1.0;
  CHECK(max_abs(p - expected) < 1e-12);
  CHECK(contour::algebraic_multiplicity(t, {2.0, 1.0, 64}).rounded == 2);
  CHECK(contour::riesz_trace(numkit::ResolventTrace(t), {-1.0, 1.0, 64}).rounded == 1);
  CHECK(contour::riesz_trace(res, {10.0, 1.0, 64}).rounded == 0);
}

TEST_CASE("principal part of a resolvent") {
  CMatrix t = CMatrix::Zero(2, 2);
  t(0, 1) = 1.0;  // J_2(0)
  const auto pp = contour::principal_part(contour::resolvent_of(t), {0.0, 1.0, 64}, 3);
  REQUIRE(pp.terms.size() == 3);
  CHECK(max_abs(pp.terms[0].coefficient + CMatrix::Identity(2, 2)) < 1e-12);
  CHECK(max_abs(pp.terms[1].coefficient + t) < 1e-12);
  CHECK(pp.terms[0].rank == 2);
  CHECK(pp.terms[1].rank == 1);
  CHECK(pp.terms[2].rank == 0);
  CHECK(pp.truncation_ok());
}

TEST_CASE("trace cyclicity of contour integrals") {
  Rng rng(6);
  const CMatrix a = rng.gaussian_matrix(3, 2);
  const CMatrix b = rng.gaussian_matrix(2, 3);
  HoloMatFun m1([&](Complex z) { return CMatrix(a / (z - 0.5)); });
  HoloMatFun m2([&](Complex z) { return CMatrix(b * std::exp(z)); });
  CHECK(contour::trace_cyclicity_check(m1, m2, {0.0, 1.0, 64}) < 1e-12);
}

TEST_CASE("report acceptance thresholds") {
  const auto r = contour::IndexReport::from_values(Complex(1.0, 0.0), Complex(1.0 + 1e-9, 0.0), 64);
  CHECK(r.rounded == 1);
  CHECK(r.refinement_gap == doctest::Approx(1e-9));
  CHECK(r.accepted());
  const auto bad = contour::IndexReport::from_values(Complex(0.6, 0.0), Complex(0.6, 0.0), 64);
  CHECK_FALSE(bad.accepted());
}
