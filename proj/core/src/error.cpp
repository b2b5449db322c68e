#include "specindex/types.hpp"

#include <cmath>

namespace specindex {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::NearSingularContour: return "NearSingularContour";
    case Errc::EvalFailure: return "EvalFailure";
    case Errc::Rejected: return "Rejected";
    case Errc::OrderMismatch: return "OrderMismatch";
    case Errc::PhaseJumpTooLarge: return "PhaseJumpTooLarge";
    case Errc::InvalidGrid: return "InvalidGrid";
    case Errc::BoundaryEliminationSingular: return "BoundaryEliminationSingular";
    case Errc::SingularSolve: return "SingularSolve";
    case Errc::SingularPerturbation: return "SingularPerturbation";
    case Errc::SingularResolvent: return "SingularResolvent";
    case Errc::DegenerateDecomposition: return "DegenerateDecomposition";
    case Errc::InvalidModel: return "InvalidModel";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

bool all_finite(const CMatrix& a) {
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    }
  }
  return true;
}

double max_abs(const CMatrix& a) {
  return a.size() == 0 ? 0.0 : std::sqrt(a.cwiseAbs2().maxCoeff());
}

double relative_difference(const CMatrix& a, const CMatrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  if (scale == 0.0) return 0.0;
  return (a - b).norm() / scale;
}

}  // namespace specindex
