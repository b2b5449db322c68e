#include <doctest.h>

#include "specindex/numkit.hpp"
#include "specindex/random.hpp"

using namespace specindex;

TEST_CASE("lu solves and its transpose solve agree with the matrix") {
  Rng rng(1);
  const CMatrix a = rng.gaussian_matrix(7, 7);
  const CMatrix b = rng.gaussian_matrix(7, 3);
  const numkit::LuFactorization lu(a);
  CHECK(max_abs(a * lu.solve(b) - b) < 1e-12);
  CHECK(max_abs(a.transpose() * lu.solve_transpose(b) - b) < 1e-12);
  CHECK(max_abs(a * lu.inverse() - CMatrix::Identity(7, 7)) < 1e-12);
  CHECK(std::abs(lu.determinant() - a.determinant()) < 1e-10 * std::abs(a.determinant()));
}

TEST_CASE("lu rejects singular and malformed input") {
  CMatrix s = CMatrix::Ones(3, 3);
  CHECK_THROWS_AS(numkit::LuFactorization{s}, Error);
  try {
    numkit::LuFactorization lu(s);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SingularMatrix);
  }
  CHECK_THROWS_AS(numkit::LuFactorization(CMatrix::Ones(2, 3)), Error);
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(0, 1) = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(numkit::LuFactorization{bad}, Error);
}

TEST_CASE("banded lu matches dense solve") {
  Rng rng(2);
  const Index n = 20;
  CMatrix a = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = std::max<Index>(0, i - 3); j <= std::min<Index>(n - 1, i + 2); ++j) a(i, j) = rng.complex_normal();
  }
  const CMatrix b = rng.gaussian_matrix(n, 4);
  const numkit::BandLuFactorization band(a);
  CHECK(band.lower() == 3);
  CHECK(band.upper() == 2);
  CHECK(max_abs(band.solve(b) - numkit::lu_solve(a, b)) < 1e-10);
  const numkit::BandLuFactorization given(a, 3, 2);
  CHECK(max_abs(given.solve(b) - band.solve(b)) == 0.0);
}

TEST_CASE("eigenvalue clustering and disk counts") {
  CMatrix j = CMatrix::Zero(4, 4);
  j(0, 0) = j(1, 1) = 1.0;
  j(0, 1) = 1.0;
  j(2, 2) = 3.0;
  j(3, 3) = Complex(0.0, 2.0);
  const auto eigs = numkit::eig_cluster(j, 1e-6);
  REQUIRE(eigs.size() == 3);
  CHECK(eigs[0].multiplicity == 2);
  CHECK(std::abs(eigs[0].value - 1.0) < 1e-6);
  CHECK(numkit::multiplicity_in_disk(eigs, 1.0, 0.5) == 2);
  CHECK(numkit::multiplicity_in_disk(eigs, 0.0, 10.0) == 4);
  CHECK(numkit::distance_to_circle(eigs, 3.0, 0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(numkit::eig_cluster(j, 0.0), Error);
}

TEST_CASE("rank helpers") {
  Rng rng(3);
  const CMatrix u = rng.gaussian_matrix(6, 2);
  const CMatrix low = u * rng.gaussian_matrix(2, 6);
  CHECK(numkit::rank_tol(low, 1e-10) == 2);
  CHECK(numkit::rank_above(low, 1e-8) == 2);
  CHECK(numkit::rank_tol(CMatrix::Zero(3, 3), 1e-10) == 0);
}

TEST_CASE("hessenberg form is similar to the input") {
  Rng rng(4);
  const CMatrix a = rng.gaussian_matrix(6, 6);
  const CMatrix h = numkit::hessenberg_form(a);
  for (Index j = 0; j < 6; ++j) {
    for (Index i = j + 2; i < 6; ++i) CHECK(std::abs(h(i, j)) == 0.0);
  }
  CHECK(std::abs(h.trace() - a.trace()) < 1e-12);
  CHECK(std::abs(numkit::trace(h * h) - numkit::trace(a * a)) < 1e-10);
}

TEST_CASE("resolvent trace equals tr((T - z)^-1)") {
  Rng rng(5);
  const CMatrix t = rng.gaussian_matrix(9, 9);
  const numkit::ResolventTrace rt(t);
  for (const Complex z : {Complex(0.3, 0.7), Complex(-2.0, 0.1), Complex(5.0, -4.0)}) {
    CMatrix shifted = t;
    shifted.diagonal().array() -= z;
    CHECK(std::abs(rt(z) - numkit::inverse(shifted).trace()) < 1e-10);
  }
  CMatrix d = CMatrix::Zero(3, 3);
  d.diagonal() << 1.0, 2.0, 3.0;
  const numkit::ResolventTrace diag_trace(d);
  CHECK_THROWS_AS(diag_trace(2.0), Error);
}

TEST_CASE("rng is reproducible and builds the requested shapes") {
  Rng a(9), b(9);
  CHECK(a.uniform() == b.uniform());
  CHECK(max_abs(a.gaussian_matrix(3, 3) - b.gaussian_matrix(3, 3)) == 0.0);
  const CMatrix v = a.orthonormal_columns(5, 2);
  CHECK(max_abs(v.adjoint() * v - CMatrix::Identity(2, 2)) < 1e-13);
  const CMatrix h = a.hermitian_matrix(4);
  CHECK(max_abs(h - h.adjoint()) < 1e-13);
  const CMatrix m = a.matrix_with_norm(4, 4, 2.5);
  CHECK(Eigen::JacobiSVD<CMatrix>(m).singularValues()(0) == doctest::Approx(2.5));
  CHECK(std::abs(a.in_disk(3.0)) <= 3.0);
}
