#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "specindex/contour.hpp"
#include "specindex/report.hpp"
#include "specindex/types.hpp"

/// Finite-difference Schrodinger operators -Delta + q with complex q on an
/// interval or a rectangle, their Dirichlet/Neumann/Robin realizations,
/// Poisson operators and Dirichlet-to-Neumann maps.
///
/// Grid conventions:
///   * interval: nodes x_k = k h, k = 0..n+1; boundary nodes 0 and n+1.
///   * rectangle: nodes (i hx, j hy), i = 0..nx+1, j = 0..ny+1, corners
///     dropped (the 5-point stencil never reaches them). Nodes are numbered
///     with i running fastest.
///   * gamma_D f = f on boundary nodes; gamma_N f = (f_b - f_a) / h_b where a
///     is the interior neighbour of b and h_b the spacing normal to the side.
///   * interior weight h (resp. hx hy); boundary weight 1 (resp. the spacing
///     along the side). With these the discrete Green identity is exact.
namespace specindex::schrodinger {

enum class GridKind { Interval, Rectangle };

/// q(x, y); y is 0 on intervals. Sampled at interior nodes only.
using PotentialSampler = std::function<Complex(double, double)>;

class SchrodingerModel {
 public:
  GridKind kind() const { return kind_; }
  Index interior_count() const { return static_cast<Index>(interior_.size()); }
  Index boundary_count() const { return static_cast<Index>(boundary_.size()); }
  Index grid_count() const { return grid_count_; }

  /// Grid positions of interior / boundary nodes, in unknown order.
  const std::vector<Index>& interior_nodes() const { return interior_; }
  const std::vector<Index>& boundary_nodes() const { return boundary_; }
  /// Interior neighbour (as an interior unknown index) of each boundary node.
  const std::vector<Index>& neighbour() const { return neighbour_; }

  const std::vector<Index>& sizes() const { return sizes_; }
  const std::vector<double>& spacings() const { return spacings_; }

  const CVector& potential() const { return q_; }

  double interior_weight() const { return interior_weight_; }
  const Eigen::VectorXd& boundary_weights() const { return boundary_weights_; }
  const Eigen::VectorXd& normal_spacing() const { return normal_spacing_; }

  /// K_II = -Delta_h + diag(q) (q conjugated on request), interior x interior.
  CMatrix interior_operator(bool conjugated = false) const;
  /// K_IB: coupling of interior equations to boundary values.
  const CMatrix& coupling() const { return coupling_; }
  /// E: boundary x interior selection of the interior neighbour.
  CMatrix neighbour_selection() const;

  /// L = [K_II | K_IB] scattered onto grid columns: interior x grid.
  CMatrix grid_operator(bool conjugated = false) const;
  CMatrix interior_restriction() const;  // interior x grid
  CMatrix dirichlet_trace() const;       // boundary x grid
  CMatrix neumann_trace() const;         // boundary x grid

  /// Adjoint of X: boundary -> interior under the weighted inner products.
  CMatrix adjoint_to_boundary(const CMatrix& x) const;
  /// Adjoint of Y: boundary -> boundary under the boundary weight.
  CMatrix boundary_adjoint(const CMatrix& y) const;

  friend SchrodingerModel build(GridKind kind, const std::vector<Index>& sizes,
                                const std::vector<double>& lengths, const PotentialSampler& q);

 private:
  SchrodingerModel() = default;

  GridKind kind_ = GridKind::Interval;
  std::vector<Index> sizes_;
  std::vector<double> spacings_;
  Index grid_count_ = 0;
  std::vector<Index> interior_;
  std::vector<Index> boundary_;
  std::vector<Index> neighbour_;
  CVector q_;
  CMatrix laplacian_;
  CMatrix coupling_;
  double interior_weight_ = 0.0;
  Eigen::VectorXd boundary_weights_;
  Eigen::VectorXd normal_spacing_;
};

/// Throws Errc::InvalidGrid for nonpositive sizes or lengths, or a size list
/// that does not match the kind; Errc::InvalidArgument for non-finite q.
SchrodingerModel build(GridKind kind, const std::vector<Index>& sizes,
                       const std::vector<double>& lengths, const PotentialSampler& q);

SchrodingerModel build_interval(Index n, double length, const PotentialSampler& q);
SchrodingerModel build_rectangle(Index nx, Index ny, double lx, double ly,
                                 const PotentialSampler& q);

struct Dirichlet {};
struct Neumann {};
struct Robin {
  CMatrix theta;
};
using BoundaryCondition = std::variant<Dirichlet, Neumann, Robin>;

/// Theta* = W_B^{-1} Theta^H W_B, the adjoint under the boundary weight.
CMatrix theta_adjoint(const SchrodingerModel& model, const CMatrix& theta);

/// Realization on the interior space. Robin data Theta gamma_D f = gamma_N f
/// is eliminated as f_B = (I - H Theta)^{-1} E f_I. With conjugated = true the
/// adjoint family is returned: q -> conj(q), Theta -> Theta*.
/// Throws Errc::BoundaryEliminationSingular when I - H Theta is singular.
CMatrix assemble(const SchrodingerModel& model, const BoundaryCondition& bc,
                 bool conjugated = false);

/// Full-grid solution operator of (L - z) f = 0, gamma_D f = phi.
/// Throws Errc::SingularSolve when z is numerically a Dirichlet eigenvalue.
CMatrix poisson(const SchrodingerModel& model, Complex z, bool conjugated = false);

/// Interior rows of poisson(): the map into the state space.
CMatrix poisson_interior(const SchrodingerModel& model, Complex z, bool conjugated = false);

/// D(z) = gamma_N P(z).
CMatrix dtn(const SchrodingerModel& model, Complex z, bool conjugated = false);

/// D'(z) = -(P~(conj z))* P(z) from the adjoint Poisson operator.
CMatrix dtn_prime(const SchrodingerModel& model, Complex z, bool conjugated = false);

/// D(z) and D'(z) from one banded factorization of K_II - z. With
/// G = (K - z)^{-1} E^T and K_IB = E^T Lambda (one coupling per boundary node):
///   D = H^{-1}(I + E G Lambda),  D' = H^{-1} G^T G Lambda,
/// the last form using K^T = K (true for both families; checked, with a
/// second solve as fallback).
class DtnEvaluator {
 public:
  explicit DtnEvaluator(const SchrodingerModel& model, bool conjugated = false);

  CMatrix value(Complex z) const;
  contour::MatJet jet(Complex z) const;

 private:
  CMatrix solve_neighbours(const numkit::BandLuFactorization& lu) const;

  CMatrix interior_;
  std::vector<Index> neighbour_;
  CVector lambda_;
  Eigen::VectorXd inv_normal_;
  Index lower_ = 0, upper_ = 0;  // bandwidths of K_II
  bool symmetric_ = true;
};

/// z -> D(z) - Theta (or D~(z) - Theta* when conjugated), with analytic
/// derivative.
contour::HoloMatFun dtn_minus_theta(const SchrodingerModel& model, const CMatrix& theta,
                                    bool conjugated = false);

/// Full-grid solution operator of (L - z) f = 0, gamma_N f - Theta gamma_D f = phi,
/// from one (interior + boundary) solve. Throws Errc::SingularSolve.
CMatrix robin_poisson(const SchrodingerModel& model, const CMatrix& theta, Complex z,
                      bool conjugated = false);

/// Max entry of
///   R_I^H W_I L - L~^H W_I R_I - Gamma_N^H W_B Gamma_D + Gamma_D^H W_B Gamma_N
/// relative to the largest entry among the four terms.
double green_matrix_residual(const SchrodingerModel& model);

/// Relative residual of
///   (A_Theta - z)^{-1} = (A_D - z)^{-1} + P(z)(D(z) - Theta)^{-1} P~(conj z)*
/// (or its adjoint-family counterpart).
double krein_residual(const SchrodingerModel& model, const CMatrix& theta, Complex z,
                      bool conjugated = false);

/// Largest distance between conj sigma(A_Theta) and sigma(A~_{Theta*}),
/// eigenvalues paired greedily by nearest unused partner, each distance
/// divided by max(1, |lambda|).
double conjugate_spectrum_mismatch(const SchrodingerModel& model, const CMatrix& theta);

inline constexpr double kIdentityTolerance = 1e-10;
inline constexpr double kGreenTolerance = 1e-12;

/// Green identity, Poisson adjoint, DtN difference, Robin inverse difference,
/// Poisson and Robin propagation, derivative routes and the Krein formula at
/// consecutive pairs of sample points. The self-adjoint specialization is
/// included when q is real and Theta is Hermitian under the boundary weight.
ResidualReport verify_identities(const SchrodingerModel& model, const CMatrix& theta,
                                 const std::vector<Complex>& points);

struct IndexVerdict {
  contour::IndexReport index;
  contour::IndexReport winding;
  contour::IndexReport ma_robin;
  contour::IndexReport ma_dirichlet;
  int oracle_robin = 0;
  int oracle_dirichlet = 0;
  bool agree = false;
  std::string detail;
};

/// Everything index_vs_multiplicity needs that does not depend on the
/// contour, built once per (model, Theta, family).
class RobinIndexProblem {
 public:
  RobinIndexProblem(const SchrodingerModel& model, const CMatrix& theta, bool conjugated = false);

  const CMatrix& robin_operator() const { return a_theta_; }
  const CMatrix& dirichlet_operator() const { return a_d_; }
  const numkit::EigList& robin_spectrum() const { return eig_theta_; }
  const numkit::EigList& dirichlet_spectrum() const { return eig_d_; }
  const contour::HoloMatFun& function() const { return fun_; }

  IndexVerdict check(const contour::Contour& c) const;

 private:
  CMatrix a_theta_;
  CMatrix a_d_;
  numkit::ResolventTrace trace_theta_;
  numkit::ResolventTrace trace_d_;
  numkit::EigList eig_theta_;
  numkit::EigList eig_d_;
  contour::HoloMatFun fun_;
};

/// Index of D(.) - Theta over c against m_a(A_Theta) - m_a(A_D), with the
/// multiplicities from Riesz traces and from the eigenvalue oracle.
/// conjugated = true checks the adjoint family (q~, Theta*) instead.
IndexVerdict index_vs_multiplicity(const SchrodingerModel& model, const CMatrix& theta,
                                   const contour::Contour& c, bool conjugated = false);

}  // namespace specindex::schrodinger
