#include "specindex/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace specindex::schrodinger {

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

const CMatrix& check_theta(const SchrodingerModel& model, const CMatrix& theta) {
  const Index m = model.boundary_count();
  if (theta.rows() != m || theta.cols() != m) {
    throw Error(Errc::InvalidArgument, "theta must be " + std::to_string(m) + "x" +
                                           std::to_string(m) + ", got " +
                                           std::to_string(theta.rows()) + "x" +
                                           std::to_string(theta.cols()));
  }
  if (!all_finite(theta)) throw Error(Errc::InvalidArgument, "theta has non-finite entries");
  return theta;
}

CMatrix family_theta(const SchrodingerModel& model, const CMatrix& theta, bool conjugated) {
  check_theta(model, theta);
  return conjugated ? theta_adjoint(model, theta) : theta;
}

CMatrix scatter(const SchrodingerModel& model, const CMatrix& interior, const CMatrix& boundary) {
  CMatrix full = CMatrix::Zero(model.grid_count(), interior.cols());
  for (Index k = 0; k < model.interior_count(); ++k) {
    full.row(model.interior_nodes()[static_cast<std::size_t>(k)]) = interior.row(k);
  }
  for (Index b = 0; b < model.boundary_count(); ++b) {
    full.row(model.boundary_nodes()[static_cast<std::size_t>(b)]) = boundary.row(b);
  }
  return full;
}

CMatrix interior_rows(const SchrodingerModel& model, const CMatrix& full) {
  CMatrix out(model.interior_count(), full.cols());
  for (Index k = 0; k < model.interior_count(); ++k) {
    out.row(k) = full.row(model.interior_nodes()[static_cast<std::size_t>(k)]);
  }
  return out;
}

CMatrix boundary_rows(const SchrodingerModel& model, const CMatrix& full) {
  CMatrix out(model.boundary_count(), full.cols());
  for (Index b = 0; b < model.boundary_count(); ++b) {
    out.row(b) = full.row(model.boundary_nodes()[static_cast<std::size_t>(b)]);
  }
  return out;
}

CMatrix inv_normal(const SchrodingerModel& model) {
  return model.normal_spacing().cwiseInverse().cast<Complex>().asDiagonal();
}

}  // namespace

CMatrix SchrodingerModel::interior_operator(bool conjugated) const {
  CMatrix k = laplacian_;
  k.diagonal() += conjugated ? CVector(q_.conjugate()) : q_;
  return k;
}

CMatrix SchrodingerModel::neighbour_selection() const {
  CMatrix e = CMatrix::Zero(boundary_count(), interior_count());
  for (Index b = 0; b < boundary_count(); ++b) e(b, neighbour_[static_cast<std::size_t>(b)]) = 1.0;
  return e;
}

CMatrix SchrodingerModel::grid_operator(bool conjugated) const {
  CMatrix l = CMatrix::Zero(interior_count(), grid_count_);
  const CMatrix k = interior_operator(conjugated);
  for (Index j = 0; j < interior_count(); ++j) l.col(interior_[static_cast<std::size_t>(j)]) = k.col(j);
  for (Index b = 0; b < boundary_count(); ++b) {
    l.col(boundary_[static_cast<std::size_t>(b)]) = coupling_.col(b);
  }
  return l;
}

CMatrix SchrodingerModel::interior_restriction() const {
  CMatrix r = CMatrix::Zero(interior_count(), grid_count_);
  for (Index k = 0; k < interior_count(); ++k) r(k, interior_[static_cast<std::size_t>(k)]) = 1.0;
  return r;
}

CMatrix SchrodingerModel::dirichlet_trace() const {
  CMatrix g = CMatrix::Zero(boundary_count(), grid_count_);
  for (Index b = 0; b < boundary_count(); ++b) g(b, boundary_[static_cast<std::size_t>(b)]) = 1.0;
  return g;
}

CMatrix SchrodingerModel::neumann_trace() const {
  CMatrix g = CMatrix::Zero(boundary_count(), grid_count_);
  for (Index b = 0; b < boundary_count(); ++b) {
    const auto bi = static_cast<std::size_t>(b);
    const double inv_h = 1.0 / normal_spacing_(b);
    g(b, boundary_[bi]) = inv_h;
    g(b, interior_[static_cast<std::size_t>(neighbour_[bi])]) = -inv_h;
  }
  return g;
}

CMatrix SchrodingerModel::adjoint_to_boundary(const CMatrix& x) const {
  return boundary_weights_.cwiseInverse().cast<Complex>().asDiagonal() * x.adjoint() *
         interior_weight_;
}

CMatrix SchrodingerModel::boundary_adjoint(const CMatrix& y) const {
  const auto w = boundary_weights_.cast<Complex>();
  return w.cwiseInverse().asDiagonal() * y.adjoint() * w.asDiagonal();
}

SchrodingerModel build(GridKind kind, const std::vector<Index>& sizes,
                       const std::vector<double>& lengths, const PotentialSampler& q) {
  const std::size_t axes = kind == GridKind::Interval ? 1 : 2;
  if (sizes.size() != axes || lengths.size() != axes) {
    throw Error(Errc::InvalidGrid, "expected " + std::to_string(axes) + " size(s) and length(s)");
  }
  for (std::size_t a = 0; a < axes; ++a) {
    if (sizes[a] < 1) throw Error(Errc::InvalidGrid, "interior node count must be >= 1");
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
      throw Error(Errc::InvalidGrid, "side length must be positive");
    }
  }
  if (!q) throw Error(Errc::InvalidArgument, "potential sampler is empty");

  SchrodingerModel m;
  m.kind_ = kind;
  m.sizes_ = sizes;
  const Index nx = sizes[0];
  const Index ny = axes == 2 ? sizes[1] : 1;
  const double hx = lengths[0] / static_cast<double>(nx + 1);
  const double hy = axes == 2 ? lengths[1] / static_cast<double>(ny + 1) : 1.0;
  m.spacings_ = axes == 2 ? std::vector<double>{hx, hy} : std::vector<double>{hx};

  // Enumerate grid positions; the interval is the rectangle's single row j = 1
  // with no top/bottom sides.
  struct Node {
    Index i, j;
  };
  std::vector<Node> nodes;
  const Index jlo = axes == 2 ? 0 : 1, jhi = axes == 2 ? ny + 1 : 1;
  for (Index j = jlo; j <= jhi; ++j) {
    for (Index i = 0; i <= nx + 1; ++i) {
      const bool edge_i = i == 0 || i == nx + 1;
      const bool edge_j = axes == 2 && (j == 0 || j == ny + 1);
      if (edge_i && edge_j) continue;
      nodes.push_back({i, j});
    }
  }
  m.grid_count_ = static_cast<Index>(nodes.size());

  auto is_interior = [&](Index i, Index j) {
    return i >= 1 && i <= nx && (axes == 1 || (j >= 1 && j <= ny));
  };
  auto unknown = [&](Index i, Index j) { return (j - 1) * nx + (i - 1); };

  std::vector<Index> boundary_of(static_cast<std::size_t>((nx + 2) * (jhi + 1)), -1);
  for (Index g = 0; g < m.grid_count_; ++g) {
    const Node& n = nodes[static_cast<std::size_t>(g)];
    if (is_interior(n.i, n.j)) {
      m.interior_.push_back(g);
    } else {
      boundary_of[static_cast<std::size_t>(n.j * (nx + 2) + n.i)] = static_cast<Index>(m.boundary_.size());
      m.boundary_.push_back(g);
    }
  }

  const Index ni = m.interior_count(), nb = m.boundary_count();
  m.q_.resize(ni);
  m.laplacian_ = CMatrix::Zero(ni, ni);
  m.coupling_ = CMatrix::Zero(ni, nb);
  m.neighbour_.assign(static_cast<std::size_t>(nb), 0);
  m.boundary_weights_.resize(nb);
  m.normal_spacing_.resize(nb);
  m.interior_weight_ = axes == 2 ? hx * hy : hx;

  const double cx = 1.0 / (hx * hx), cy = axes == 2 ? 1.0 / (hy * hy) : 0.0;
  for (Index g : m.interior_) {
    const Node& n = nodes[static_cast<std::size_t>(g)];
    const Index k = unknown(n.i, n.j);
    const Complex qv = q(static_cast<double>(n.i) * hx, axes == 2 ? static_cast<double>(n.j) * hy : 0.0);
    if (!std::isfinite(qv.real()) || !std::isfinite(qv.imag())) {
      throw Error(Errc::InvalidArgument, "potential sampler returned a non-finite value");
    }
    m.q_(k) = qv;
    m.laplacian_(k, k) = 2.0 * cx + 2.0 * cy;

    std::vector<std::pair<Node, double>> around = {{{n.i - 1, n.j}, cx}, {{n.i + 1, n.j}, cx}};
    if (axes == 2) {
      around.push_back({{n.i, n.j - 1}, cy});
      around.push_back({{n.i, n.j + 1}, cy});
    }
    for (const auto& [nb_node, c] : around) {
      if (is_interior(nb_node.i, nb_node.j)) {
        m.laplacian_(k, unknown(nb_node.i, nb_node.j)) = -c;
      } else {
        const Index b = boundary_of[static_cast<std::size_t>(nb_node.j * (nx + 2) + nb_node.i)];
        const auto bi = static_cast<std::size_t>(b);
        m.coupling_(k, b) = -c;
        m.neighbour_[bi] = k;
        const bool x_side = nb_node.i == 0 || nb_node.i == nx + 1;
        m.normal_spacing_(b) = x_side ? hx : hy;
        m.boundary_weights_(b) = axes == 1 ? 1.0 : (x_side ? hy : hx);
      }
    }
  }
  return m;
}

SchrodingerModel build_interval(Index n, double length, const PotentialSampler& q) {
  return build(GridKind::Interval, {n}, {length}, q);
}

SchrodingerModel build_rectangle(Index nx, Index ny, double lx, double ly,
                                 const PotentialSampler& q) {
  return build(GridKind::Rectangle, {nx, ny}, {lx, ly}, q);
}

CMatrix theta_adjoint(const SchrodingerModel& model, const CMatrix& theta) {
  return model.boundary_adjoint(check_theta(model, theta));
}

CMatrix assemble(const SchrodingerModel& model, const BoundaryCondition& bc, bool conjugated) {
  CMatrix k = model.interior_operator(conjugated);
  if (std::holds_alternative<Dirichlet>(bc)) return k;

  const Index m = model.boundary_count();
  CMatrix th = CMatrix::Zero(m, m);
  if (const auto* robin = std::get_if<Robin>(&bc)) th = family_theta(model, robin->theta, conjugated);

  // Theta f_B = H^{-1}(f_B - E f_I)  =>  (I - H Theta) f_B = E f_I
  CMatrix g = CMatrix::Identity(m, m) - model.normal_spacing().cast<Complex>().asDiagonal() * th;
  const CMatrix fb = factor(std::move(g), Errc::BoundaryEliminationSingular, "boundary elimination")
                         .solve(model.neighbour_selection());
  return k + model.coupling() * fb;
}

CMatrix poisson_interior(const SchrodingerModel& model, Complex z, bool conjugated) {
  return -factor(shifted(model.interior_operator(conjugated), z), Errc::SingularSolve, "poisson")
              .solve(model.coupling());
}

CMatrix poisson(const SchrodingerModel& model, Complex z, bool conjugated) {
  const Index m = model.boundary_count();
  return scatter(model, poisson_interior(model, z, conjugated), CMatrix::Identity(m, m));
}

CMatrix dtn(const SchrodingerModel& model, Complex z, bool conjugated) {
  return model.neumann_trace() * poisson(model, z, conjugated);
}

CMatrix dtn_prime(const SchrodingerModel& model, Complex z, bool conjugated) {
  const CMatrix tilde = poisson_interior(model, std::conj(z), !conjugated);
  return -model.adjoint_to_boundary(tilde) * poisson_interior(model, z, conjugated);
}

DtnEvaluator::DtnEvaluator(const SchrodingerModel& model, bool conjugated)
    : interior_(model.interior_operator(conjugated)),
      neighbour_(model.neighbour()),
      lambda_(model.boundary_count()),
      inv_normal_(model.normal_spacing().cwiseInverse()) {
  for (Index b = 0; b < model.boundary_count(); ++b) {
    lambda_(b) = model.coupling()(neighbour_[static_cast<std::size_t>(b)], b);
  }
  symmetric_ = max_abs(interior_ - interior_.transpose()) == 0.0;
  const Index n = interior_.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (interior_(i, j) == Complex(0.0, 0.0)) continue;
      lower_ = std::max(lower_, i - j);
      upper_ = std::max(upper_, j - i);
    }
  }
}

CMatrix DtnEvaluator::solve_neighbours(const numkit::BandLuFactorization& lu) const {
  const Index n = interior_.rows(), m = static_cast<Index>(neighbour_.size());
  CMatrix et = CMatrix::Zero(n, m);
  for (Index b = 0; b < m; ++b) et(neighbour_[static_cast<std::size_t>(b)], b) = 1.0;
  return lu.solve(et);
}

namespace {

numkit::BandLuFactorization band_factor(CMatrix a, Index lower, Index upper) {
  try {
    return numkit::BandLuFactorization(std::move(a), lower, upper);
  } catch (const Error& e) {
    if (e.code() == Errc::SingularMatrix) throw Error(Errc::SingularSolve, std::string("dtn: ") + e.what());
    throw;
  }
}

}  // namespace

CMatrix DtnEvaluator::value(Complex z) const {
  const CMatrix g = solve_neighbours(band_factor(shifted(interior_, z), lower_, upper_));
  const Index m = static_cast<Index>(neighbour_.size());
  CMatrix d(m, m);
  for (Index b = 0; b < m; ++b) d.row(b) = g.row(neighbour_[static_cast<std::size_t>(b)]);
  d = d * lambda_.asDiagonal();
  d.diagonal().array() += 1.0;
  return inv_normal_.cast<Complex>().asDiagonal() * d;
}

contour::MatJet DtnEvaluator::jet(Complex z) const {
  const auto lu = band_factor(shifted(interior_, z), lower_, upper_);
  const CMatrix g = solve_neighbours(lu);
  const Index m = static_cast<Index>(neighbour_.size());
  const auto hinv = inv_normal_.cast<Complex>().asDiagonal();
  CMatrix d(m, m);
  for (Index b = 0; b < m; ++b) d.row(b) = g.row(neighbour_[static_cast<std::size_t>(b)]);
  d = d * lambda_.asDiagonal();
  d.diagonal().array() += 1.0;

  CMatrix dp;
  if (symmetric_) {
    // G^T G is complex symmetric: form one triangle and mirror it.
    dp.resize(m, m);
    dp.triangularView<Eigen::Upper>() = g.transpose() * g;
    dp.triangularView<Eigen::StrictlyLower>() = dp.transpose();
  } else {
    const CMatrix y = lu.solve(g);
    dp.resize(m, m);
    for (Index b = 0; b < m; ++b) dp.row(b) = y.row(neighbour_[static_cast<std::size_t>(b)]);
  }
  return {hinv * d, hinv * (dp * lambda_.asDiagonal())};
}

contour::HoloMatFun dtn_minus_theta(const SchrodingerModel& model, const CMatrix& theta,
                                    bool conjugated) {
  auto eval = std::make_shared<const DtnEvaluator>(model, conjugated);
  const CMatrix th = family_theta(model, theta, conjugated);
  return contour::HoloMatFun::from_jet(
      [eval, th](Complex z) { return CMatrix(eval->value(z) - th); },
      [eval, th](Complex z) {
        contour::MatJet j = eval->jet(z);
        j.value -= th;
        return j;
      });
}

CMatrix robin_poisson(const SchrodingerModel& model, const CMatrix& theta, Complex z,
                      bool conjugated) {
  const CMatrix th = family_theta(model, theta, conjugated);
  const Index n = model.interior_count(), m = model.boundary_count();
  const CMatrix hinv = inv_normal(model);
  CMatrix sys(n + m, n + m);
  sys.topLeftCorner(n, n) = shifted(model.interior_operator(conjugated), z);
  sys.topRightCorner(n, m) = model.coupling();
  sys.bottomLeftCorner(m, n) = -hinv * model.neighbour_selection();
  sys.bottomRightCorner(m, m) = hinv - th;
  CMatrix rhs = CMatrix::Zero(n + m, m);
  rhs.bottomRows(m).setIdentity();
  const CMatrix sol = factor(std::move(sys), Errc::SingularSolve, "robin_poisson").solve(rhs);
  return scatter(model, sol.topRows(n), sol.bottomRows(m));
}

double green_matrix_residual(const SchrodingerModel& model) {
  const CMatrix ri = model.interior_restriction();
  const CMatrix gd = model.dirichlet_trace();
  const CMatrix gn = model.neumann_trace();
  const CMatrix wb = model.boundary_weights().cast<Complex>().asDiagonal();
  const double wi = model.interior_weight();
  const CMatrix t1 = wi * ri.adjoint() * model.grid_operator(false);
  const CMatrix t2 = wi * model.grid_operator(true).adjoint() * ri;
  const CMatrix t3 = gn.adjoint() * wb * gd;
  const CMatrix t4 = gd.adjoint() * wb * gn;
  const double scale = std::max({max_abs(t1), max_abs(t2), max_abs(t3), max_abs(t4)});
  return scale == 0.0 ? 0.0 : max_abs(t1 - t2 - t3 + t4) / scale;
}

double krein_residual(const SchrodingerModel& model, const CMatrix& theta, Complex z,
                      bool conjugated) {
  const CMatrix th = family_theta(model, theta, conjugated);
  const CMatrix a_theta = assemble(model, Robin{theta}, conjugated);
  const CMatrix lhs = factor(shifted(a_theta, z), Errc::SingularSolve, "krein").inverse();
  const CMatrix rd = factor(shifted(model.interior_operator(conjugated), z), Errc::SingularSolve,
                            "krein")
                         .inverse();
  const CMatrix p = poisson_interior(model, z, conjugated);
  const CMatrix pt_adj = model.adjoint_to_boundary(poisson_interior(model, std::conj(z), !conjugated));
  const CMatrix middle =
      factor(dtn(model, z, conjugated) - th, Errc::SingularSolve, "krein").solve(pt_adj);
  const CMatrix rhs = rd + p * middle;
  return relative_difference(lhs, rhs);
}

double conjugate_spectrum_mismatch(const SchrodingerModel& model, const CMatrix& theta) {
  const auto direct = numkit::eigenvalues(assemble(model, Robin{theta}));
  auto adjoint = numkit::eigenvalues(assemble(model, Robin{theta}, true));
  std::vector<bool> used(adjoint.size(), false);
  double worst = 0.0;
  for (const Complex& lambda : direct) {
    const Complex target = std::conj(lambda);
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < adjoint.size(); ++k) {
      if (used[k]) continue;
      const double d = std::abs(adjoint[k] - target);
      if (d < best_dist) {
        best_dist = d;
        best = k;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_dist / std::max(1.0, std::abs(lambda)));
  }
  return worst;
}

ResidualReport verify_identities(const SchrodingerModel& model, const CMatrix& theta,
                                 const std::vector<Complex>& points) {
  if (points.size() < 2) throw Error(Errc::InvalidArgument, "verify_identities needs >= 2 points");
  check_theta(model, theta);
  ResidualReport report;
  report.add("green", green_matrix_residual(model), kGreenTolerance);

  const Index n = model.interior_count();
  const CMatrix eye_n = CMatrix::Identity(n, n);
  const CMatrix a_theta = assemble(model, Robin{theta});
  const CMatrix a_d = assemble(model, Dirichlet{});
  const CMatrix e = model.neighbour_selection();
  const CMatrix hinv = inv_normal(model);
  const DtnEvaluator fast(model);

  const bool real_q = model.potential().imag().cwiseAbs().maxCoeff() == 0.0;
  const bool hermitian_theta =
      relative_difference(theta, theta_adjoint(model, theta)) < 1e-14 || max_abs(theta) == 0.0;

  for (std::size_t k = 0; k < points.size(); ++k) {
    const Complex z1 = points[k];
    const Complex z2 = points[(k + 1) % points.size()];
    const CMatrix p1 = poisson_interior(model, z1);
    const CMatrix p2 = poisson_interior(model, z2);

    {
      const CMatrix rt = factor(shifted(model.interior_operator(true), std::conj(z1)),
                                Errc::SingularSolve, "poisson adjoint")
                             .inverse();
      report.add("poisson_adjoint", relative_difference(model.adjoint_to_boundary(p1), hinv * e * rt),
                 kIdentityTolerance);
    }
    {
      const CMatrix lhs = dtn(model, z1) - dtn(model, std::conj(z2));
      const CMatrix rhs =
          (std::conj(z2) - z1) * model.adjoint_to_boundary(poisson_interior(model, z2, true)) * p1;
      report.add("dtn_difference", relative_difference(lhs, rhs), kIdentityTolerance);
    }
    {
      const CMatrix inv1 = factor(dtn(model, z1) - theta, Errc::SingularSolve, "robin").inverse();
      const CMatrix inv2 =
          factor(dtn(model, std::conj(z2)) - theta, Errc::SingularSolve, "robin").inverse();
      const CMatrix pr1 = interior_rows(model, robin_poisson(model, theta, z1));
      const CMatrix prt2 = interior_rows(model, robin_poisson(model, theta, z2, true));
      const CMatrix rhs = (z1 - std::conj(z2)) * model.adjoint_to_boundary(prt2) * pr1;
      report.add("robin_inverse_difference", relative_difference(inv1 - inv2, rhs),
                 kIdentityTolerance);
      report.add("robin_trace",
                 relative_difference(boundary_rows(model, robin_poisson(model, theta, z1)), inv1),
                 kIdentityTolerance);
    }
    {
      const CMatrix prop = (eye_n + (z1 - z2) * factor(shifted(a_d, z1), Errc::SingularSolve,
                                                       "poisson propagation")
                                                    .inverse()) *
                           p2;
      report.add("poisson_propagation", relative_difference(p1, prop), kIdentityTolerance);
    }
    {
      const CMatrix pr1 = interior_rows(model, robin_poisson(model, theta, z1));
      const CMatrix pr2 = interior_rows(model, robin_poisson(model, theta, z2));
      const CMatrix prop = (eye_n + (z1 - z2) * factor(shifted(a_theta, z1), Errc::SingularSolve,
                                                       "robin propagation")
                                                    .inverse()) *
                           pr2;
      report.add("robin_propagation", relative_difference(pr1, prop), kIdentityTolerance);
    }
    report.add("dtn_prime_routes", relative_difference(dtn_prime(model, z1), fast.jet(z1).derivative),
               kIdentityTolerance);
    report.add("dtn_routes", relative_difference(dtn(model, z1), fast.value(z1)), kIdentityTolerance);
    report.add("krein", krein_residual(model, theta, z1), kIdentityTolerance);
    report.add("krein_adjoint", krein_residual(model, theta, std::conj(z1), true),
               kIdentityTolerance);
    if (real_q && hermitian_theta) {
      report.add("self_adjoint",
                 relative_difference(dtn(model, std::conj(z1)), model.boundary_adjoint(dtn(model, z1))),
                 kIdentityTolerance);
    }
  }
  return report;
}

namespace {

double oracle_tolerance(const CMatrix& a) { return 1e-8 * std::max(1.0, max_abs(a)); }

}  // namespace

RobinIndexProblem::RobinIndexProblem(const SchrodingerModel& model, const CMatrix& theta,
                                     bool conjugated)
    : a_theta_(assemble(model, Robin{theta}, conjugated)),
      a_d_(assemble(model, Dirichlet{}, conjugated)),
      trace_theta_(a_theta_),
      trace_d_(a_d_),
      eig_theta_(numkit::eig_cluster(a_theta_, oracle_tolerance(a_theta_))),
      eig_d_(numkit::eig_cluster(a_d_, oracle_tolerance(a_d_))),
      fun_(dtn_minus_theta(model, theta, conjugated)) {}

IndexVerdict RobinIndexProblem::check(const contour::Contour& c) const {
  IndexVerdict v;
  const auto both = contour::generalized_index_with_winding(fun_, c);
  v.index = both.index;
  v.winding = both.winding;
  v.ma_robin = contour::riesz_trace(trace_theta_, c);
  v.ma_dirichlet = contour::riesz_trace(trace_d_, c);
  v.oracle_robin = numkit::multiplicity_in_disk(eig_theta_, c.center, c.radius);
  v.oracle_dirichlet = numkit::multiplicity_in_disk(eig_d_, c.center, c.radius);

  const bool accepted = v.index.accepted() && v.ma_robin.accepted() && v.ma_dirichlet.accepted();
  const long expected = v.ma_robin.rounded - v.ma_dirichlet.rounded;
  v.agree = accepted && v.index.rounded == expected && v.winding.rounded == v.index.rounded &&
            v.ma_robin.rounded == v.oracle_robin && v.ma_dirichlet.rounded == v.oracle_dirichlet;

  std::ostringstream os;
  os << "index=" << v.index.rounded << " (residual " << v.index.residual << ", gap "
     << v.index.refinement_gap << ") winding=" << v.winding.rounded
     << " m_a(A_Theta)=" << v.ma_robin.rounded << "/" << v.oracle_robin
     << " m_a(A_D)=" << v.ma_dirichlet.rounded << "/" << v.oracle_dirichlet;
  v.detail = os.str();
  return v;
}

IndexVerdict index_vs_multiplicity(const SchrodingerModel& model, const CMatrix& theta,
                                   const contour::Contour& c, bool conjugated) {
  return RobinIndexProblem(model, theta, conjugated).check(c);
}

}  // namespace specindex::schrodinger
