#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "specindex/numkit.hpp"
#include "specindex/types.hpp"

/// Trapezoid quadrature on counterclockwise circles: Cauchy and Laurent
/// coefficient integrals, Riesz projections, the generalized index
/// tr((1/2 pi i) \oint M'(z) M(z)^{-1} dz) and a determinant-winding oracle.
///
/// Every integral is evaluated on 2N equispaced nodes; the even nodes give the
/// N-node rule, and the difference between the two rules is reported as the
/// refinement gap. The returned value is always the 2N-node one.
namespace specindex::contour {

inline constexpr int kDefaultNodes = 256;
inline constexpr double kAcceptResidual = 1e-6;
inline constexpr double kAcceptRefinement = 1e-8;
inline constexpr double kOrderTolerance = 1e-8;
/// Node values larger than this multiple of the contour median mean a pole
/// sits on or next to the circle.
inline constexpr double kHealthRatio = 1e12;

struct Contour {
  Complex center{0.0, 0.0};
  double radius = 1.0;
  int nodes = kDefaultNodes;

  /// Throws Errc::InvalidArgument unless radius > 0, nodes >= 8 and the
  /// center is finite.
  void validate() const;

  bool encloses(Complex z) const { return std::abs(z - center) < radius; }
};

struct MatJet {
  CMatrix value;
  CMatrix derivative;
};

/// Holomorphic matrix-valued function z -> M(z) with optional analytic
/// derivative. Without one, derivatives come from validated central
/// differences with step radius * 2^-20.
class HoloMatFun {
 public:
  using Value = std::function<CMatrix(Complex)>;
  using Jet = std::function<MatJet(Complex)>;

  explicit HoloMatFun(Value value);
  HoloMatFun(Value value, Value derivative);

  /// Value and derivative from one evaluator (shares factorizations).
  static HoloMatFun from_jet(Value value, Jet jet);

  CMatrix operator()(Complex z) const { return value_(z); }

  bool has_derivative() const { return static_cast<bool>(jet_) || static_cast<bool>(derivative_); }

  MatJet jet(Complex z, double radius) const;

  /// Points the caller asserts may be poles; contours passing through one
  /// are rejected before any evaluation.
  HoloMatFun& declare_pole(Complex z);
  const std::vector<Complex>& declared_poles() const { return poles_; }

 private:
  Value value_;
  Value derivative_;
  Jet jet_;
  std::vector<Complex> poles_;
};

/// z -> (T - z)^{-1}, with analytic derivative (T - z)^{-2}.
HoloMatFun resolvent_of(const CMatrix& t);

/// Central differences at step, step/2, step/4 combined by Richardson
/// extrapolation. Throws Errc::EvalFailure unless the successive differences
/// shrink (or sit below the roundoff floor).
CMatrix finite_difference_derivative(const HoloMatFun::Value& f, Complex z, double step);

struct IndexReport {
  Complex raw{0.0, 0.0};
  long rounded = 0;
  double residual = 0.0;
  double refinement_gap = 0.0;
  int nodes = 0;

  bool accepted() const {
    return residual < kAcceptResidual && refinement_gap < kAcceptRefinement;
  }

  /// Builds a report from the N-node (coarse) and 2N-node (fine) values.
  static IndexReport from_values(Complex coarse, Complex fine, int nodes);
};

struct LaurentTerm {
  int order = -1;  // k in M_k(z0), always negative
  CMatrix coefficient;
  int rank = 0;
};

struct LaurentCoeffs {
  std::vector<LaurentTerm> terms;  // orders -1, -2, ..., -max_order
  double tail_norm = 0.0;          // max |entry| of M_{-max_order-1}
  double scale = 0.0;              // max |entry| of f on the contour
  double refinement_gap = 0.0;

  /// Coefficient beyond the declared order is negligible.
  bool truncation_ok(double rel_tol = 1e-8) const {
    return tail_norm <= rel_tol * std::max(scale, 1.0);
  }
};

/// (1/2 pi i) \oint f(z) (z - z0)^power dz.
CMatrix cauchy_integral(const HoloMatFun& f, const Contour& c, int power);

struct CauchyResult {
  CMatrix value;
  double refinement_gap = 0.0;
};

CauchyResult cauchy_integral_checked(const HoloMatFun& f, const Contour& c, int power);

/// P = -(1/2 pi i) \oint (T - z)^{-1} dz.
CMatrix riesz_projection(const HoloMatFun& resolvent, const Contour& c);

/// Report for the trace of the Riesz projection, whether accepted or not.
IndexReport riesz_trace(const HoloMatFun& resolvent, const Contour& c);

/// Same quantity for an explicit matrix, integrating tr((T - z)^{-1}) from a
/// Hessenberg reduction instead of full resolvents.
IndexReport riesz_trace(const numkit::ResolventTrace& t, const Contour& c);

/// riesz_trace, but throws Errc::Rejected when the report is not accepted.
IndexReport algebraic_multiplicity(const HoloMatFun& resolvent, const Contour& c);
IndexReport algebraic_multiplicity(const numkit::ResolventTrace& t, const Contour& c);
IndexReport algebraic_multiplicity(const CMatrix& t, const Contour& c);

/// tr((1/2 pi i) \oint M'(z) M(z)^{-1} dz), cross-checked against the
/// M^{-1} M' ordering (Errc::OrderMismatch beyond 1e-8).
IndexReport generalized_index(const HoloMatFun& m, const Contour& c);

LaurentCoeffs principal_part(const HoloMatFun& f, const Contour& c, int max_order);

/// |tr \oint M1 M2 - tr \oint M2 M1| with the 1/(2 pi i) normalization.
double trace_cyclicity_check(const HoloMatFun& m1, const HoloMatFun& m2, const Contour& c);

struct IndexWithWinding {
  IndexReport index;
  IndexReport winding;
};

/// generalized_index and winding_det from one pass over the nodes: each
/// node's LU of M(z) also yields log det M(z). Falls back to winding_det
/// (with its node doubling) when the phase steps are too coarse.
IndexWithWinding generalized_index_with_winding(const HoloMatFun& m, const Contour& c);

/// Winding number of det M(z) around 0. Node count doubles (at most 4 times)
/// until every unwrapped phase step is below pi/2.
IndexReport winding_det(const HoloMatFun& m, const Contour& c);

}  // namespace specindex::contour
