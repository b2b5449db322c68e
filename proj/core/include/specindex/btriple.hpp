#pragma once

#include <string>
#include <vector>

#include "specindex/contour.hpp"
#include "specindex/random.hpp"
#include "specindex/report.hpp"
#include "specindex/types.hpp"

/// Finite-dimensional Donoghue boundary triples.
///
/// A Hermitian n x n matrix A plays the fixed self-adjoint extension and an
/// n x m matrix V with orthonormal columns spans the defect subspace at i.
/// dom(S*) is modelled as pairs (u, phi) representing f = u + V phi, with
///   S*(u, phi) = A u + i V phi,  Gamma_0 = phi,  Gamma_1 = V^H (A + i) u + i phi.
/// There is no symmetric restriction S itself: in finite dimensions it would
/// already be self-adjoint.
namespace specindex::btriple {

class DonoghueModel {
 public:
  /// Throws Errc::InvalidModel unless A is Hermitian (1e-12 relative), V has
  /// orthonormal columns (1e-12) and m <= n.
  DonoghueModel(CMatrix a, CMatrix v);

  /// A Hermitian Gaussian, V from a QR of a Gaussian block.
  static DonoghueModel random(Index n, Index m, Rng& rng);

  const CMatrix& a() const { return a_; }
  const CMatrix& v() const { return v_; }
  Index dim() const { return a_.rows(); }
  Index boundary_dim() const { return v_.cols(); }

 private:
  CMatrix a_;
  CMatrix v_;
};

struct DomainElement {
  CVector u;    // component in dom(A)
  CVector phi;  // defect coordinates in the basis V

  CVector vector(const DonoghueModel& model) const { return u + model.v() * phi; }
};

struct BoundaryValues {
  CVector gamma0;
  CVector gamma1;
};

CVector star_action(const DonoghueModel& model, const DomainElement& e);

BoundaryValues boundary_maps(const DonoghueModel& model, const DomainElement& e);

/// Element with prescribed (Gamma_0, Gamma_1) = (phi, psi):
/// u = (A + i)^{-1} V (psi - i phi).
DomainElement boundary_lift(const DonoghueModel& model, const CVector& phi, const CVector& psi);

/// |(S*f, g) - (f, S*g) - (Gamma_1 f, Gamma_0 g) + (Gamma_0 f, Gamma_1 g)|.
double green_residual(const DonoghueModel& model, const DomainElement& f, const DomainElement& g);

/// F^H S - S^H F = G0^H G1 - G1^H G0 over the whole (n + m)-dimensional pair
/// space, with F = [I V], S = [A iV], G0 = [0 I], G1 = [V^H(A + i) iI].
/// Max entry residual relative to the largest term.
double green_matrix_residual(const DonoghueModel& model);

/// gamma(z) = (I + (z - i)(A - z)^{-1}) V. Throws Errc::SingularSolve on sigma(A).
CMatrix gamma(const DonoghueModel& model, Complex z);

/// gamma(z) propagated from gamma(zeta) instead of the anchor at i.
CMatrix gamma_from(const DonoghueModel& model, Complex z, Complex zeta);

/// M(z) = z I + (z^2 + 1) V^H (A - z)^{-1} V.
CMatrix weyl(const DonoghueModel& model, Complex z);

/// M'(z) = I + 2z V^H (A - z)^{-1} V + (z^2 + 1) V^H (A - z)^{-2} V.
CMatrix weyl_derivative(const DonoghueModel& model, Complex z);

inline constexpr double kWeylTolerance = 1e-10;

/// Residuals of M(z) - M(w)* = (z - conj w) gamma(w)* gamma(z), its expanded
/// form through (A - z)^{-1}, M' = gamma(conj z)* gamma(z) (against both the
/// closed form and a finite-difference M'), M(conj z) = M(z)*, and
/// Im M(z) = Im z gamma(z)* gamma(z). For Im z != 0 the item "nevanlinna"
/// carries minus the smallest eigenvalue of Im M(z) / Im z with tolerance 0,
/// so it passes exactly when that eigenvalue is positive.
ResidualReport weyl_identity_residuals(const DonoghueModel& model, Complex z, Complex w);

/// Smallest eigenvalue of Im M(z) / Im z. Throws Errc::InvalidArgument for real z.
double nevanlinna_min_eigenvalue(const DonoghueModel& model, Complex z);

/// (A - z)^{-1} + gamma(z)(Theta - M(z))^{-1} gamma(conj z)*.
/// Throws Errc::SingularPerturbation when Theta - M(z) is singular and
/// Errc::SingularSolve on sigma(A).
CMatrix krein_resolvent(const DonoghueModel& model, const CMatrix& theta, Complex z);

/// B_Theta = R_Theta(z_ref)^{-1} + z_ref. Throws Errc::SingularResolvent when
/// R_Theta(z_ref) is singular.
CMatrix extension_operator(const DonoghueModel& model, const CMatrix& theta, Complex z_ref);

/// Same, trying a fixed list of non-real reference points until one works.
CMatrix extension_operator(const DonoghueModel& model, const CMatrix& theta);

/// S* restricted to ker(Gamma_1 - Theta Gamma_0), applied to x: solve
/// (Theta + V^H A V) phi = V^H (A + i) x, u = x - V phi, return A u + i V phi.
/// Throws Errc::DegenerateDecomposition when Theta + V^H A V is singular.
CVector extension_from_bc(const DonoghueModel& model, const CMatrix& theta, const CVector& x);

/// extension_from_bc applied to every column of the identity.
CMatrix extension_matrix_from_bc(const DonoghueModel& model, const CMatrix& theta);

/// z -> Theta - M(z) with analytic derivative -M'(z).
contour::HoloMatFun theta_minus_weyl(const DonoghueModel& model, const CMatrix& theta);

struct DifferenceVerdict {
  contour::IndexReport index1, index2;
  contour::IndexReport winding1, winding2;
  contour::IndexReport ma_b1, ma_b2, ma_a;
  int oracle_b1 = 0, oracle_b2 = 0, oracle_a = 0;
  bool corollary1 = false;  // ind(Theta_1 - M) = m_a(B_1) - m_a(A)
  bool corollary2 = false;
  bool difference = false;  // ind1 - ind2 = m_a(B_1) - m_a(B_2)
  bool agree = false;
  std::string detail;
};

/// Contour-independent part of index_difference_check, built once.
/// Contract: each enclosed point lies in the discrete spectrum or the
/// resolvent set of A, B_1 and B_2; in finite dimensions this always holds.
class DonoghueIndexProblem {
 public:
  DonoghueIndexProblem(const DonoghueModel& model, const CMatrix& theta1, const CMatrix& theta2);

  const CMatrix& extension1() const { return b1_; }
  const CMatrix& extension2() const { return b2_; }
  const numkit::EigList& spectrum1() const { return eig_b1_; }
  const numkit::EigList& spectrum2() const { return eig_b2_; }
  const numkit::EigList& base_spectrum() const { return eig_a_; }

  DifferenceVerdict check(const contour::Contour& c) const;

 private:
  CMatrix b1_, b2_;
  numkit::ResolventTrace trace_b1_, trace_b2_, trace_a_;
  numkit::EigList eig_b1_, eig_b2_, eig_a_;
  contour::HoloMatFun f1_, f2_;
};

DifferenceVerdict index_difference_check(const DonoghueModel& model, const CMatrix& theta1,
                                         const CMatrix& theta2, const contour::Contour& c);

}  // namespace specindex::btriple
