#pragma once

#include <vector>

#include "specindex/types.hpp"

/// Dense complex linear algebra used by the rest of the library. Everything
/// here is unblocked and meant for dimensions up to a few hundred.
namespace specindex::numkit {

/// Determinant kept as log-modulus plus unit phase so large boundary
/// matrices never overflow.
struct LogDet {
  double log_abs = 0.0;
  Complex phase{1.0, 0.0};
};

/// LU factorization with partial pivoting, PA = LU.
///
/// Throws Errc::SingularMatrix when a pivot falls below
/// dim * unit_roundoff * max|A_ij|.
class LuFactorization {
 public:
  explicit LuFactorization(CMatrix a);

  Index dim() const { return lu_.rows(); }

  /// Solves A X = B.
  CMatrix solve(const CMatrix& b) const;

  /// Solves A^T X = B with the same factors.
  CMatrix solve_transpose(const CMatrix& b) const;

  CMatrix inverse() const;

  LogDet log_det() const;

  Complex determinant() const;

 private:
  CMatrix lu_;
  std::vector<Index> pivots_;
  int parity_ = 1;
};

/// Partial-pivoting LU restricted to the band of a banded matrix. Lower and
/// upper bandwidths are read off the nonzero pattern; pivoting widens the
/// upper band of U by the lower bandwidth. Same singularity test as
/// LuFactorization.
class BandLuFactorization {
 public:
  explicit BandLuFactorization(CMatrix a);
  /// Caller-supplied bandwidths; entries outside the band must be zero.
  BandLuFactorization(CMatrix a, Index lower, Index upper);

  Index dim() const { return lu_.rows(); }
  Index lower() const { return lower_; }
  Index upper() const { return upper_; }
  /// Upper bandwidth of U after pivoting, between upper() and upper() + lower().
  Index fill() const { return fill_; }

  CMatrix solve(const CMatrix& b) const;

 private:
  void factorize();

  CMatrix lu_;
  std::vector<Index> pivots_;
  Index lower_ = 0;
  Index upper_ = 0;
  Index fill_ = 0;
};

CMatrix lu_solve(const CMatrix& a, const CMatrix& b);

CMatrix inverse(const CMatrix& a);

Complex trace(const CMatrix& a);

struct EigCluster {
  Complex value;  // mean of the clustered eigenvalues
  int multiplicity = 0;
};

using EigList = std::vector<EigCluster>;

/// All eigenvalues of a dense square matrix (Hessenberg reduction followed by
/// shifted QR). Used as an oracle only.
std::vector<Complex> eigenvalues(const CMatrix& a);

/// Eigenvalues greedily clustered within `tol`, processed in order of
/// increasing modulus with (re, im) tie-breaking. Each cluster is anchored at
/// its first member; the reported value is the cluster mean.
EigList eig_cluster(const CMatrix& a, double tol);

/// Sum of multiplicities of clusters whose value lies strictly inside the
/// disk |z - center| < radius.
int multiplicity_in_disk(const EigList& eigs, Complex center, double radius);

/// Distance from the circle |z - center| = radius to the nearest cluster.
double distance_to_circle(const EigList& eigs, Complex center, double radius);

/// Number of singular values above tol * sigma_max.
int rank_tol(const CMatrix& a, double tol);

/// Number of singular values above an absolute threshold.
int rank_above(const CMatrix& a, double threshold);

/// Upper Hessenberg matrix unitarily similar to `a` (Householder reduction).
CMatrix hessenberg_form(const CMatrix& a);

/// Evaluates z -> tr((T - z)^{-1}) in O(n^2) per point: T is reduced to
/// Hessenberg form once, and the trace is recovered as minus the derivative
/// of log det(H - z) carried through a pivoted Hessenberg elimination.
class ResolventTrace {
 public:
  explicit ResolventTrace(const CMatrix& t);

  Index dim() const { return rows_.rows(); }

  /// Throws Errc::SingularMatrix when z is numerically an eigenvalue.
  Complex operator()(Complex z) const;

 private:
  CMatrix rows_;  // Hessenberg form, transposed so rows are contiguous
  double threshold_ = 0.0;
  double scale_ = 0.0;
};

}  // namespace specindex::numkit
