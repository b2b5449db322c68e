#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace specindex {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2.0;

enum class Errc {
  InvalidArgument,
  SingularMatrix,
  NoConvergence,
  NearSingularContour,
  EvalFailure,
  Rejected,
  OrderMismatch,
  PhaseJumpTooLarge,
  InvalidGrid,
  BoundaryEliminationSingular,
  SingularSolve,
  SingularPerturbation,
  SingularResolvent,
  DegenerateDecomposition,
  InvalidModel,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// message names the operation and the quantity that tripped the check.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// True when no entry is NaN or infinite.
bool all_finite(const CMatrix& a);

/// Largest entry modulus; zero for empty matrices.
double max_abs(const CMatrix& a);

/// ||a - b||_F / max(||a||_F, ||b||_F), zero when both vanish.
double relative_difference(const CMatrix& a, const CMatrix& b);

}  // namespace specindex
