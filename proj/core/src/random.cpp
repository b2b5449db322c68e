#include "specindex/random.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace specindex {

double Rng::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex Rng::in_disk(double radius) {
  const double r = radius * std::sqrt(uniform());
  return std::polar(r, 2.0 * std::numbers::pi * uniform());
}

CMatrix Rng::gaussian_matrix(Index rows, Index cols) {
  CMatrix m(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = complex_normal();
  }
  return m;
}

CMatrix Rng::matrix_with_norm(Index rows, Index cols, double norm) {
  CMatrix m = gaussian_matrix(rows, cols);
  const double sigma = Eigen::JacobiSVD<CMatrix>(m).singularValues()(0);
  if (sigma > 0.0) m *= norm / sigma;
  return m;
}

CMatrix Rng::hermitian_matrix(Index n) {
  CMatrix g = gaussian_matrix(n, n);
  return (g + g.adjoint()) / 2.0;
}

CMatrix Rng::orthonormal_columns(Index n, Index m) {
  CMatrix g = gaussian_matrix(n, m);
  Eigen::HouseholderQR<CMatrix> qr(g);
  return qr.householderQ() * CMatrix::Identity(n, m);
}

}  // namespace specindex
