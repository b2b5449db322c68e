#include "specindex/btriple.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace specindex::btriple {

namespace {

numkit::LuFactorization factor(CMatrix a, Errc code, const char* what) {
  try {
    return numkit::LuFactorization(std::move(a));
  } catch (const Error& e) {
    if (e.code() == Errc::SingularMatrix) throw Error(code, std::string(what) + ": " + e.what());
    throw;
  }
}

CMatrix shifted(CMatrix a, Complex z) {
  a.diagonal().array() -= z;
  return a;
}

void check_element(const DonoghueModel& model, const DomainElement& e) {
  if (e.u.size() != model.dim() || e.phi.size() != model.boundary_dim()) {
    throw Error(Errc::InvalidArgument, "domain element has wrong component sizes");
  }
}

void check_theta(const DonoghueModel& model, const CMatrix& theta) {
  const Index m = model.boundary_dim();
  if (theta.rows() != m || theta.cols() != m) {
    throw Error(Errc::InvalidArgument, "theta must be " + std::to_string(m) + "x" + std::to_string(m));
  }
  if (!all_finite(theta)) throw Error(Errc::InvalidArgument, "theta has non-finite entries");
}

CMatrix hermitian_part_over(const CMatrix& m, Complex z) {
  // Im M(z) / Im z with Im M = (M - M^H) / 2i
  return (m - m.adjoint()) / (2.0 * kI * z.imag());
}

}  // namespace

DonoghueModel::DonoghueModel(CMatrix a, CMatrix v) : a_(std::move(a)), v_(std::move(v)) {
  if (a_.rows() != a_.cols() || a_.rows() == 0) throw Error(Errc::InvalidModel, "A must be square");
  if (v_.rows() != a_.rows()) throw Error(Errc::InvalidModel, "V must have as many rows as A");
  if (v_.cols() < 1 || v_.cols() > v_.rows()) throw Error(Errc::InvalidModel, "need 1 <= m <= n");
  if (!all_finite(a_) || !all_finite(v_)) throw Error(Errc::InvalidModel, "non-finite entries");
  const double anorm = std::max(a_.norm(), 1.0);
  if ((a_ - a_.adjoint()).norm() >= 1e-12 * anorm) {
    throw Error(Errc::InvalidModel, "A is not Hermitian");
  }
  const Index m = v_.cols();
  if ((v_.adjoint() * v_ - CMatrix::Identity(m, m)).norm() >= 1e-12) {
    throw Error(Errc::InvalidModel, "V does not have orthonormal columns");
  }
}

DonoghueModel DonoghueModel::random(Index n, Index m, Rng& rng) {
  CMatrix a = rng.hermitian_matrix(n);
  a = (a + a.adjoint()).eval() / 2.0;
  CMatrix v = rng.orthonormal_columns(n, m);
  return DonoghueModel(std::move(a), std::move(v));
}

CVector star_action(const DonoghueModel& model, const DomainElement& e) {
  check_element(model, e);
  return model.a() * e.u + kI * (model.v() * e.phi);
}

BoundaryValues boundary_maps(const DonoghueModel& model, const DomainElement& e) {
  check_element(model, e);
  const CVector shifted_u = model.a() * e.u + kI * e.u;
  return {e.phi, model.v().adjoint() * shifted_u + kI * e.phi};
}

DomainElement boundary_lift(const DonoghueModel& model, const CVector& phi, const CVector& psi) {
  if (phi.size() != model.boundary_dim() || psi.size() != model.boundary_dim()) {
    throw Error(Errc::InvalidArgument, "boundary data has wrong size");
  }
  const CVector rhs = model.v() * (psi - kI * phi);
  const CVector u = factor(shifted(model.a(), -kI), Errc::SingularSolve, "boundary_lift").solve(rhs);
  return {u, phi};
}

double green_residual(const DonoghueModel& model, const DomainElement& f, const DomainElement& g) {
  const CVector sf = star_action(model, f), sg = star_action(model, g);
  const CVector vf = f.vector(model), vg = g.vector(model);
  const BoundaryValues bf = boundary_maps(model, f), bg = boundary_maps(model, g);
  // (x, y) = y^H x
  const Complex lhs = vg.dot(sf) - sg.dot(vf);
  const Complex rhs = bg.gamma0.dot(bf.gamma1) - bg.gamma1.dot(bf.gamma0);
  return std::abs(lhs - rhs);
}

double green_matrix_residual(const DonoghueModel& model) {
  const Index n = model.dim(), m = model.boundary_dim();
  const CMatrix& a = model.a();
  const CMatrix& v = model.v();
  CMatrix f(n, n + m), s(n, n + m), g0 = CMatrix::Zero(m, n + m), g1(m, n + m);
  f << CMatrix::Identity(n, n), v;
  s << a, kI * v;
  g0.rightCols(m).setIdentity();
  g1 << v.adjoint() * shifted(a, -kI), kI * CMatrix::Identity(m, m);
  const CMatrix t1 = f.adjoint() * s, t2 = s.adjoint() * f;
  const CMatrix t3 = g0.adjoint() * g1, t4 = g1.adjoint() * g0;
  const double scale = std::max({max_abs(t1), max_abs(t2), max_abs(t3), max_abs(t4)});
  return scale == 0.0 ? 0.0 : max_abs(t1 - t2 - t3 + t4) / scale;
}

CMatrix gamma_from(const DonoghueModel& model, Complex z, Complex zeta) {
  const CMatrix anchor = zeta == kI ? model.v() : gamma(model, zeta);
  const CMatrix r = factor(shifted(model.a(), z), Errc::SingularSolve, "gamma").solve(anchor);
  return anchor + (z - zeta) * r;
}

CMatrix gamma(const DonoghueModel& model, Complex z) {
  if (z == kI) return model.v();
  return gamma_from(model, z, kI);
}

CMatrix weyl(const DonoghueModel& model, Complex z) {
  const Index m = model.boundary_dim();
  const CMatrix x = factor(shifted(model.a(), z), Errc::SingularSolve, "weyl").solve(model.v());
  return z * CMatrix::Identity(m, m) + (z * z + 1.0) * (model.v().adjoint() * x);
}

CMatrix weyl_derivative(const DonoghueModel& model, Complex z) {
  const Index m = model.boundary_dim();
  const auto lu = factor(shifted(model.a(), z), Errc::SingularSolve, "weyl_derivative");
  const CMatrix x = lu.solve(model.v());
  const CMatrix y = lu.solve(x);
  const CMatrix vh = model.v().adjoint();
  return CMatrix::Identity(m, m) + 2.0 * z * (vh * x) + (z * z + 1.0) * (vh * y);
}

double nevanlinna_min_eigenvalue(const DonoghueModel& model, Complex z) {
  if (z.imag() == 0.0) throw Error(Errc::InvalidArgument, "Nevanlinna check needs Im z != 0");
  const CMatrix h = hermitian_part_over(weyl(model, z), z);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

ResidualReport weyl_identity_residuals(const DonoghueModel& model, Complex z, Complex w) {
  ResidualReport report;
  const Index n = model.dim();
  const CMatrix mz = weyl(model, z), mw = weyl(model, w);
  const CMatrix gz = gamma(model, z), gw = gamma(model, w);

  report.add("weyl_difference", relative_difference(mz - mw.adjoint(), (z - std::conj(w)) * gw.adjoint() * gz),
             kWeylTolerance);

  const CMatrix prop =
      CMatrix::Identity(n, n) +
      (z - w) * factor(shifted(model.a(), z), Errc::SingularSolve, "weyl").inverse();
  report.add("weyl_expansion",
             relative_difference(mz, mw.adjoint() + (z - std::conj(w)) * gw.adjoint() * prop * gw),
             kWeylTolerance);

  const CMatrix gbar = gamma(model, std::conj(z));
  const CMatrix product = gbar.adjoint() * gz;
  report.add("weyl_derivative", relative_difference(weyl_derivative(model, z), product),
             kWeylTolerance);
  const double step = 1e-3 * std::max(1.0, std::abs(z));
  const CMatrix fd = contour::finite_difference_derivative(
      [&](Complex s) { return weyl(model, s); }, z, step);
  report.add("weyl_derivative_fd", relative_difference(fd, product), kWeylTolerance);

  report.add("conjugate_symmetry", relative_difference(weyl(model, std::conj(z)), mz.adjoint()),
             kWeylTolerance);

  if (z.imag() != 0.0) {
    report.add("imaginary_part", relative_difference(hermitian_part_over(mz, z), gz.adjoint() * gz),
               kWeylTolerance);
    report.add("nevanlinna", -nevanlinna_min_eigenvalue(model, z), 0.0);
  }
  return report;
}

CMatrix krein_resolvent(const DonoghueModel& model, const CMatrix& theta, Complex z) {
  check_theta(model, theta);
  const CMatrix r0 = factor(shifted(model.a(), z), Errc::SingularSolve, "krein").inverse();
  const CMatrix gz = gamma(model, z);
  const CMatrix gbar_adj = gamma(model, std::conj(z)).adjoint();
  const CMatrix middle =
      factor(theta - weyl(model, z), Errc::SingularPerturbation, "krein").solve(gbar_adj);
  return r0 + gz * middle;
}

CMatrix extension_operator(const DonoghueModel& model, const CMatrix& theta, Complex z_ref) {
  const CMatrix r = krein_resolvent(model, theta, z_ref);
  CMatrix b = factor(r, Errc::SingularResolvent, "extension_operator").inverse();
  b.diagonal().array() += z_ref;
  return b;
}

CMatrix extension_operator(const DonoghueModel& model, const CMatrix& theta) {
  static constexpr std::array<Complex, 5> kRefs = {
      Complex(0.0, 1.0), Complex(1.0, 2.0), Complex(-1.0, -3.0), Complex(0.5, 5.0),
      Complex(-2.0, 0.7)};
  for (const Complex& z : kRefs) {
    try {
      return extension_operator(model, theta, z);
    } catch (const Error& e) {
      if (e.code() != Errc::SingularPerturbation && e.code() != Errc::SingularResolvent &&
          e.code() != Errc::SingularSolve) {
        throw;
      }
    }
  }
  throw Error(Errc::SingularResolvent, "no reference point gave an invertible Krein resolvent");
}

CVector extension_from_bc(const DonoghueModel& model, const CMatrix& theta, const CVector& x) {
  if (x.size() != model.dim()) throw Error(Errc::InvalidArgument, "x has wrong size");
  return extension_matrix_from_bc(model, theta) * x;
}

CMatrix extension_matrix_from_bc(const DonoghueModel& model, const CMatrix& theta) {
  check_theta(model, theta);
  const CMatrix& a = model.a();
  const CMatrix& v = model.v();
  const CMatrix vh = v.adjoint();
  // x = u + V phi with V^H (A + i) u + i phi = Theta phi reduces to
  // (Theta + V^H A V) phi = V^H (A + i) x.
  const CMatrix phi = factor(theta + vh * a * v, Errc::DegenerateDecomposition, "extension_from_bc")
                          .solve(vh * shifted(a, -kI));
  return a - shifted(a, kI) * v * phi;
}

contour::HoloMatFun theta_minus_weyl(const DonoghueModel& model, const CMatrix& theta) {
  check_theta(model, theta);
  const CMatrix a = model.a(), v = model.v(), th = theta;
  const Index m = model.boundary_dim();
  auto value = [a, v, th, m](Complex z) {
    const CMatrix x = factor(shifted(a, z), Errc::SingularSolve, "weyl").solve(v);
    return CMatrix(th - z * CMatrix::Identity(m, m) - (z * z + 1.0) * (v.adjoint() * x));
  };
  auto jet = [a, v, th, m](Complex z) {
    const auto lu = factor(shifted(a, z), Errc::SingularSolve, "weyl");
    const CMatrix x = lu.solve(v);
    const CMatrix y = lu.solve(x);
    const CMatrix vx = v.adjoint() * x;
    const CMatrix eye = CMatrix::Identity(m, m);
    return contour::MatJet{th - z * eye - (z * z + 1.0) * vx,
                           -(eye + 2.0 * z * vx + (z * z + 1.0) * (v.adjoint() * y))};
  };
  return contour::HoloMatFun::from_jet(value, jet);
}

namespace {

double oracle_tolerance(const CMatrix& a) { return 1e-8 * std::max(1.0, max_abs(a)); }

}  // namespace

DonoghueIndexProblem::DonoghueIndexProblem(const DonoghueModel& model, const CMatrix& theta1,
                                           const CMatrix& theta2)
    : b1_(extension_operator(model, theta1)),
      b2_(extension_operator(model, theta2)),
      trace_b1_(b1_),
      trace_b2_(b2_),
      trace_a_(model.a()),
      eig_b1_(numkit::eig_cluster(b1_, oracle_tolerance(b1_))),
      eig_b2_(numkit::eig_cluster(b2_, oracle_tolerance(b2_))),
      eig_a_(numkit::eig_cluster(model.a(), oracle_tolerance(model.a()))),
      f1_(theta_minus_weyl(model, theta1)),
      f2_(theta_minus_weyl(model, theta2)) {}

DifferenceVerdict DonoghueIndexProblem::check(const contour::Contour& c) const {
  DifferenceVerdict v;
  const auto first = contour::generalized_index_with_winding(f1_, c);
  const auto second = contour::generalized_index_with_winding(f2_, c);
  v.index1 = first.index;
  v.index2 = second.index;
  v.winding1 = first.winding;
  v.winding2 = second.winding;
  v.ma_b1 = contour::riesz_trace(trace_b1_, c);
  v.ma_b2 = contour::riesz_trace(trace_b2_, c);
  v.ma_a = contour::riesz_trace(trace_a_, c);
  v.oracle_b1 = numkit::multiplicity_in_disk(eig_b1_, c.center, c.radius);
  v.oracle_b2 = numkit::multiplicity_in_disk(eig_b2_, c.center, c.radius);
  v.oracle_a = numkit::multiplicity_in_disk(eig_a_, c.center, c.radius);

  const bool accepted = v.index1.accepted() && v.index2.accepted() && v.ma_b1.accepted() &&
                        v.ma_b2.accepted() && v.ma_a.accepted();
  v.corollary1 = v.index1.rounded == v.ma_b1.rounded - v.ma_a.rounded;
  v.corollary2 = v.index2.rounded == v.ma_b2.rounded - v.ma_a.rounded;
  v.difference = v.index1.rounded - v.index2.rounded == v.ma_b1.rounded - v.ma_b2.rounded;
  const bool oracles = v.ma_b1.rounded == v.oracle_b1 && v.ma_b2.rounded == v.oracle_b2 &&
                       v.ma_a.rounded == v.oracle_a;
  const bool windings =
      v.winding1.rounded == v.index1.rounded && v.winding2.rounded == v.index2.rounded;
  v.agree = accepted && v.corollary1 && v.corollary2 && v.difference && oracles && windings;

  std::ostringstream os;
  os << "ind1=" << v.index1.rounded << " ind2=" << v.index2.rounded << " m_a(B1)=" << v.ma_b1.rounded
     << "/" << v.oracle_b1 << " m_a(B2)=" << v.ma_b2.rounded << "/" << v.oracle_b2
     << " m_a(A)=" << v.ma_a.rounded << "/" << v.oracle_a << " winding=" << v.winding1.rounded
     << "," << v.winding2.rounded;
  v.detail = os.str();
  return v;
}

DifferenceVerdict index_difference_check(const DonoghueModel& model, const CMatrix& theta1,
                                         const CMatrix& theta2, const contour::Contour& c) {
  return DonoghueIndexProblem(model, theta1, theta2).check(c);
}

}  // namespace specindex::btriple
