#include <doctest.h>

#include "specindex/btriple.hpp"

using namespace specindex;
using namespace specindex::btriple;

TEST_CASE("model validation") {
  CMatrix a = CMatrix::Identity(3, 3);
  CMatrix v = CMatrix::Zero(3, 1);
  v(0, 0) = 1.0;
  CHECK_NOTHROW(DonoghueModel(a, v));
  a(0, 1) = 1.0;
  CHECK_THROWS_AS(DonoghueModel(a, v), Error);
  CHECK_THROWS_AS(DonoghueModel(CMatrix::Identity(3, 3), 2.0 * v), Error);
  CHECK_THROWS_AS(DonoghueModel(CMatrix::Identity(2, 2), CMatrix::Identity(2, 3)), Error);
}

TEST_CASE("scalar model: closed forms") {
  // n = m = 1, A = a, V = 1: M(z) = (1 + a z) / (a - z), B = (a Theta - 1) / (Theta + a)
  const double a = 0.7;
  const DonoghueModel model(CMatrix::Constant(1, 1, a), CMatrix::Constant(1, 1, 1.0));
  const Complex z(0.2, 0.9);
  CHECK(std::abs(weyl(model, z)(0, 0) - (1.0 + a * z) / (a - z)) < 1e-14);
  const Complex theta(0.3, -0.4);
  const Complex b = (a * theta - 1.0) / (theta + a);
  const CMatrix th = CMatrix::Constant(1, 1, theta);
  CHECK(std::abs(extension_operator(model, th)(0, 0) - b) < 1e-13);
  CHECK(std::abs(extension_matrix_from_bc(model, th)(0, 0) - b) < 1e-13);
  const DonoghueIndexProblem problem(model, th, th);
  const auto at_b = problem.check({b, 0.1, 128});
  CHECK(at_b.index1.rounded == 1);
  const auto at_a = problem.check({a, 0.1, 128});
  CHECK(at_a.index1.rounded == -1);
  CHECK(at_a.agree);
}

TEST_CASE("green identities") {
  Rng rng(20);
  const auto model = DonoghueModel::random(6, 2, rng);
  CHECK(green_matrix_residual(model) < 1e-12);
  const DomainElement f{rng.gaussian_matrix(6, 1), rng.gaussian_matrix(2, 1)};
  const DomainElement g{rng.gaussian_matrix(6, 1), rng.gaussian_matrix(2, 1)};
  CHECK(green_residual(model, f, g) < 1e-12);
  const CVector phi = rng.gaussian_matrix(2, 1), psi = rng.gaussian_matrix(2, 1);
  const auto lifted = boundary_maps(model, boundary_lift(model, phi, psi));
  CHECK(max_abs(lifted.gamma0 - phi) < 1e-13);
  CHECK(max_abs(lifted.gamma1 - psi) < 1e-12);
}

TEST_CASE("weyl identities and nevanlinna property") {
  Rng rng(21);
  const auto model = DonoghueModel::random(8, 3, rng);
  const auto report = weyl_identity_residuals(model, Complex(0.4, 1.2), Complex(-1.0, 0.3));
  for (const auto& item : report.items) {
    CAPTURE(item.name);
    CHECK(item.passed());
  }
  CHECK(nevanlinna_min_eigenvalue(model, Complex(3.0, 0.1)) > 0.0);
  CHECK(nevanlinna_min_eigenvalue(model, Complex(3.0, -0.1)) > 0.0);
  CHECK_THROWS_AS(nevanlinna_min_eigenvalue(model, Complex(1.0, 0.0)), Error);
  CHECK(max_abs(gamma(model, kI) - model.v()) == 0.0);
}

TEST_CASE("krein formula against the extension resolvent") {
  Rng rng(22);
  const auto model = DonoghueModel::random(7, 2, rng);
  const CMatrix theta = rng.matrix_with_norm(2, 2, 2.0);
  CMatrix b = extension_operator(model, theta);
  const Complex z(0.5, 2.0);
  b.diagonal().array() -= z;
  CHECK(relative_difference(krein_resolvent(model, theta, z), numkit::inverse(b)) < 1e-10);
}

TEST_CASE("index difference on random contours around every eigenvalue") {
  Rng rng(23);
  const auto model = DonoghueModel::random(5, 2, rng);
  const CMatrix t1 = rng.matrix_with_norm(2, 2, 1.5), t2 = rng.matrix_with_norm(2, 2, 4.0);
  const DonoghueIndexProblem problem(model, t1, t2);
  std::vector<Complex> points;
  for (const auto* list : {&problem.spectrum1(), &problem.spectrum2(), &problem.base_spectrum()}) {
    for (const auto& e : *list) points.push_back(e.value);
  }
  for (const Complex p : points) {
    double gap = 1.0;
    for (const Complex q : points) {
      if (q != p) gap = std::min(gap, std::abs(q - p));
    }
    const auto v = problem.check({p, gap / 4.0, 128});
    CAPTURE(v.detail);
    CHECK(v.agree);
  }
}
