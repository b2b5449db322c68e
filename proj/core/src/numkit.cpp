#include "specindex/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace specindex::numkit {

namespace {

void require_square(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw Error(Errc::InvalidArgument,
                std::string(what) + ": matrix is " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + ", expected square");
  }
}

}  // namespace

LuFactorization::LuFactorization(CMatrix a) : lu_(std::move(a)) {
  require_square(lu_, "lu");
  if (!all_finite(lu_)) throw Error(Errc::InvalidArgument, "lu: non-finite entries");

  const Index n = lu_.rows();
  const double threshold = static_cast<double>(n) * kUnitRoundoff * max_abs(lu_);
  pivots_.resize(static_cast<std::size_t>(n));

  for (Index k = 0; k < n; ++k) {
    Index p = 0;
    lu_.col(k).tail(n - k).cwiseAbs2().maxCoeff(&p);
    p += k;
    pivots_[static_cast<std::size_t>(k)] = p;
    if (p != k) {
      lu_.row(k).swap(lu_.row(p));
      parity_ = -parity_;
    }
    const Complex pivot = lu_(k, k);
    if (!(std::abs(pivot) > threshold)) {
      throw Error(Errc::SingularMatrix, "lu: pivot " + std::to_string(std::abs(pivot)) +
                                            " at step " + std::to_string(k) +
                                            " below threshold " + std::to_string(threshold));
    }
    const Index rest = n - k - 1;
    if (rest > 0) {
      lu_.col(k).tail(rest) /= pivot;
      lu_.bottomRightCorner(rest, rest).noalias() -=
          lu_.col(k).tail(rest) * lu_.row(k).tail(rest);
    }
  }
}

CMatrix LuFactorization::solve(const CMatrix& b) const {
  if (b.rows() != dim()) {
    throw Error(Errc::InvalidArgument, "lu solve: right-hand side has " +
                                           std::to_string(b.rows()) + " rows, expected " +
                                           std::to_string(dim()));
  }
  CMatrix x = b;
  for (Index k = 0; k < dim(); ++k) {
    const Index p = pivots_[static_cast<std::size_t>(k)];
    if (p != k) x.row(k).swap(x.row(p));
  }
  lu_.triangularView<Eigen::UnitLower>().solveInPlace(x);
  lu_.triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

CMatrix LuFactorization::solve_transpose(const CMatrix& b) const {
  if (b.rows() != dim()) {
    throw Error(Errc::InvalidArgument, "lu solve_transpose: right-hand side has wrong row count");
  }
  // A^T = U^T L^T P
  CMatrix x = b;
  lu_.triangularView<Eigen::Upper>().transpose().solveInPlace(x);
  lu_.triangularView<Eigen::UnitLower>().transpose().solveInPlace(x);
  for (Index k = dim() - 1; k >= 0; --k) {
    const Index p = pivots_[static_cast<std::size_t>(k)];
    if (p != k) x.row(k).swap(x.row(p));
  }
  return x;
}

CMatrix LuFactorization::inverse() const { return solve(CMatrix::Identity(dim(), dim())); }

LogDet LuFactorization::log_det() const {
  LogDet d;
  d.phase = Complex(parity_, 0.0);
  for (Index k = 0; k < dim(); ++k) {
    const double m = std::abs(lu_(k, k));
    d.log_abs += std::log(m);
    d.phase *= lu_(k, k) / m;
  }
  return d;
}

Complex LuFactorization::determinant() const {
  const LogDet d = log_det();
  return std::exp(d.log_abs) * d.phase;
}

BandLuFactorization::BandLuFactorization(CMatrix a) : lu_(std::move(a)) {
  require_square(lu_, "band lu");
  const Index n = lu_.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (lu_(i, j) == Complex(0.0, 0.0)) continue;
      lower_ = std::max(lower_, i - j);
      upper_ = std::max(upper_, j - i);
    }
  }
  factorize();
}

BandLuFactorization::BandLuFactorization(CMatrix a, Index lower, Index upper)
    : lu_(std::move(a)), lower_(lower), upper_(upper) {
  require_square(lu_, "band lu");
  if (lower < 0 || upper < 0) throw Error(Errc::InvalidArgument, "band lu: negative bandwidth");
  factorize();
}

void BandLuFactorization::factorize() {
  if (!all_finite(lu_)) throw Error(Errc::InvalidArgument, "band lu: non-finite entries");
  const Index n = lu_.rows();
  const double threshold = static_cast<double>(n) * kUnitRoundoff * max_abs(lu_);
  pivots_.resize(static_cast<std::size_t>(n));
  // Last column each row can reach; swaps and elimination propagate it.
  std::vector<Index> reach(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) reach[static_cast<std::size_t>(i)] = std::min(n - 1, i + upper_);
  fill_ = upper_;

  for (Index k = 0; k < n; ++k) {
    const Index last_row = std::min(n - 1, k + lower_);
    Index p = 0;
    lu_.col(k).segment(k, last_row - k + 1).cwiseAbs2().maxCoeff(&p);
    p += k;
    pivots_[static_cast<std::size_t>(k)] = p;
    if (p != k) {
      const Index swap_end = std::max(reach[static_cast<std::size_t>(k)], reach[static_cast<std::size_t>(p)]);
      for (Index j = k; j <= swap_end; ++j) std::swap(lu_(k, j), lu_(p, j));
      std::swap(reach[static_cast<std::size_t>(k)], reach[static_cast<std::size_t>(p)]);
    }
    const Index last_col = reach[static_cast<std::size_t>(k)];
    fill_ = std::max(fill_, last_col - k);
    const Complex pivot = lu_(k, k);
    if (!(std::abs(pivot) > threshold)) {
      throw Error(Errc::SingularMatrix, "band lu: pivot " + std::to_string(std::abs(pivot)) +
                                            " at step " + std::to_string(k) +
                                            " below threshold " + std::to_string(threshold));
    }
    if (last_row == k) continue;
    // Raw loops: the blocks are tiny and expression overhead dominates.
    Complex* lcol = &lu_(0, k);
    const Complex inv = 1.0 / pivot;
    for (Index i = k + 1; i <= last_row; ++i) {
      lcol[i] *= inv;
      if (lcol[i] != Complex(0.0, 0.0)) {
        reach[static_cast<std::size_t>(i)] = std::max(reach[static_cast<std::size_t>(i)], last_col);
      }
    }
    for (Index j = k + 1; j <= last_col; ++j) {
      Complex* col = &lu_(0, j);
      const Complex u = col[k];
      if (u == Complex(0.0, 0.0)) continue;
      for (Index i = k + 1; i <= last_row; ++i) col[i] -= u * lcol[i];
    }
  }
}

CMatrix BandLuFactorization::solve(const CMatrix& b) const {
  if (b.rows() != dim()) {
    throw Error(Errc::InvalidArgument, "band lu solve: right-hand side has wrong row count");
  }
  const Index n = dim();
  // Work on the transpose so each row operation touches a contiguous column.
  CMatrix xt = b.transpose();
  for (Index k = 0; k < n; ++k) {
    const Index p = pivots_[static_cast<std::size_t>(k)];
    if (p != k) xt.col(k).swap(xt.col(p));
    const Index last = std::min(n - 1, k + lower_);
    for (Index i = k + 1; i <= last; ++i) xt.col(i) -= lu_(i, k) * xt.col(k);
  }
  for (Index k = n - 1; k >= 0; --k) {
    xt.col(k) /= lu_(k, k);
    for (Index i = std::max<Index>(0, k - fill_); i < k; ++i) xt.col(i) -= lu_(i, k) * xt.col(k);
  }
  return xt.transpose();
}

CMatrix lu_solve(const CMatrix& a, const CMatrix& b) {
  require_square(a, "lu_solve");
  if (b.rows() != a.rows()) {
    throw Error(Errc::InvalidArgument, "lu_solve: dimension mismatch between A and B");
  }
  return LuFactorization(a).solve(b);
}

CMatrix inverse(const CMatrix& a) { return LuFactorization(a).inverse(); }

Complex trace(const CMatrix& a) {
  require_square(a, "trace");
  return a.diagonal().sum();
}

std::vector<Complex> eigenvalues(const CMatrix& a) {
  require_square(a, "eigenvalues");
  if (a.rows() == 0) return {};
  if (!all_finite(a)) throw Error(Errc::InvalidArgument, "eigenvalues: non-finite entries");
  Eigen::ComplexEigenSolver<CMatrix> solver;
  solver.setMaxIterations(60 * a.rows());  // total budget, 60 sweeps per eigenvalue
  solver.compute(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::NoConvergence, "eigenvalues: shifted QR did not converge");
  }
  const CVector& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

EigList eig_cluster(const CMatrix& a, double tol) {
  if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "eig_cluster: tol must be positive");
  std::vector<Complex> ev = eigenvalues(a);
  std::sort(ev.begin(), ev.end(), [](Complex x, Complex y) {
    const double ax = std::abs(x), ay = std::abs(y);
    if (ax != ay) return ax < ay;
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });

  struct Work {
    Complex anchor;
    Complex sum;
    int count;
  };
  std::vector<Work> clusters;
  for (const Complex& lambda : ev) {
    auto it = std::find_if(clusters.begin(), clusters.end(),
                           [&](const Work& w) { return std::abs(w.anchor - lambda) <= tol; });
    if (it == clusters.end()) {
      clusters.push_back({lambda, lambda, 1});
    } else {
      it->sum += lambda;
      ++it->count;
    }
  }

  EigList out;
  out.reserve(clusters.size());
  for (const auto& w : clusters) out.push_back({w.sum / static_cast<double>(w.count), w.count});
  return out;
}

int multiplicity_in_disk(const EigList& eigs, Complex center, double radius) {
  int total = 0;
  for (const auto& e : eigs) {
    if (std::abs(e.value - center) < radius) total += e.multiplicity;
  }
  return total;
}

double distance_to_circle(const EigList& eigs, Complex center, double radius) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& e : eigs) d = std::min(d, std::abs(std::abs(e.value - center) - radius));
  return d;
}

int rank_tol(const CMatrix& a, double tol) {
  if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "rank_tol: tol must be positive");
  if (a.size() == 0) return 0;
  const Eigen::VectorXd s = Eigen::JacobiSVD<CMatrix>(a).singularValues();
  if (s(0) == 0.0) return 0;
  return static_cast<int>((s.array() > tol * s(0)).count());
}

int rank_above(const CMatrix& a, double threshold) {
  if (a.size() == 0) return 0;
  const Eigen::VectorXd s = Eigen::JacobiSVD<CMatrix>(a).singularValues();
  return static_cast<int>((s.array() > threshold).count());
}

CMatrix hessenberg_form(const CMatrix& a) {
  require_square(a, "hessenberg_form");
  CMatrix h = a;
  const Index n = h.rows();
  for (Index k = 0; k + 2 < n; ++k) {
    const Index len = n - k - 1;
    CVector v = h.col(k).tail(len);
    const double xnorm = v.norm();
    if (xnorm == 0.0) continue;
    const Complex x0 = v(0);
    const Complex unit = std::abs(x0) == 0.0 ? Complex(1.0, 0.0) : x0 / std::abs(x0);
    v(0) += unit * xnorm;  // v = x - alpha e1 with alpha = -unit * |x|
    const double vnorm = v.norm();
    if (vnorm == 0.0) continue;
    v /= vnorm;
    // Similarity with the reflector I - 2 v v^H on indices k+1..n-1.
    const Eigen::RowVectorXcd left = v.adjoint() * h.bottomRows(len);
    h.bottomRows(len) -= 2.0 * v * left;
    const CVector right = h.rightCols(len) * v;
    h.rightCols(len) -= 2.0 * right * v.adjoint();
    h.col(k).tail(len - 1).setZero();
  }
  return h;
}

ResolventTrace::ResolventTrace(const CMatrix& t) : rows_(hessenberg_form(t).transpose()) {
  threshold_ = static_cast<double>(std::max<Index>(dim(), 1)) * kUnitRoundoff;
  scale_ = max_abs(rows_);
}

Complex ResolventTrace::operator()(Complex z) const {
  const Index n = dim();
  if (n == 0) return {0.0, 0.0};
  // Gaussian elimination of H - z with adjacent-row pivoting. Row k + 1 of a
  // Hessenberg matrix only meets the row being eliminated, so two row buffers
  // suffice; d/dz of each entry is carried alongside (it starts at -I).
  // Raw loops: Eigen segment expressions were four times slower here.
  std::vector<Complex> buffers(4 * static_cast<std::size_t>(n));
  Complex* cur = buffers.data();
  Complex* next = cur + n;
  Complex* dcur = next + n;
  Complex* dnext = dcur + n;
  const Complex* first = &rows_(0, 0);
  for (Index i = 0; i < n; ++i) cur[i] = first[i];
  cur[0] -= z;
  dcur[0] = -1.0;
  const double threshold = threshold_ * std::max(scale_, std::abs(z));

  Complex dlogdet{0.0, 0.0};
  for (Index k = 0; k < n; ++k) {
    const Index rest = n - k - 1;
    if (rest > 0) {
      const Complex* src = &rows_(0, k + 1);
      for (Index i = k; i < n; ++i) {
        next[i] = src[i];
        dnext[i] = 0.0;
      }
      next[k + 1] -= z;
      dnext[k + 1] = -1.0;
      if (std::norm(next[k]) > std::norm(cur[k])) {
        std::swap(cur, next);
        std::swap(dcur, dnext);
      }
    }
    const Complex pivot = cur[k];
    if (!(std::abs(pivot) > threshold)) {
      throw Error(Errc::SingularMatrix, "resolvent trace: z is numerically an eigenvalue");
    }
    const Complex inv = 1.0 / pivot;
    dlogdet += dcur[k] * inv;
    if (rest > 0) {
      const Complex l = next[k] * inv;
      const Complex dl = (dnext[k] - l * dcur[k]) * inv;
      for (Index i = k + 1; i < n; ++i) {
        dnext[i] -= dl * cur[i] + l * dcur[i];
        next[i] -= l * cur[i];
      }
      std::swap(cur, next);
      std::swap(dcur, dnext);
    }
  }
  // tr((H - z)^{-1}) = -d/dz log det(H - z)
  return -dlogdet;
}

}  // namespace specindex::numkit
