#include "specindex/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>

namespace specindex::contour {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Offset z_j - z0 of node j on a rule with `count` nodes.
Complex node_offset(const Contour& c, int j, int count) {
  return std::polar(c.radius, kTwoPi * static_cast<double>(j) / count);
}

/// Trapezoid weight for (1/2 pi i) \oint f (z - z0)^power dz at node j:
/// (1/count) * (z_j - z0)^(power + 1). The angle is reduced modulo 2 pi
/// exactly before evaluation.
Complex weight(const Contour& c, int j, int count, int power) {
  const long long turns = static_cast<long long>(j) * (power + 1);
  long long reduced = turns % count;
  if (reduced < 0) reduced += count;
  const double modulus = std::pow(c.radius, power + 1);
  return std::polar(modulus, kTwoPi * static_cast<double>(reduced) / count) /
         static_cast<double>(count);
}

bool singular_code(Errc code) {
  return code == Errc::SingularMatrix || code == Errc::SingularSolve ||
         code == Errc::SingularPerturbation || code == Errc::SingularResolvent;
}

/// Runs one node evaluation, mapping singular solves to NearSingularContour
/// and anything else to EvalFailure.
template <class Fn>
auto guarded(Fn&& fn, Complex z) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (singular_code(e.code()) || e.code() == Errc::NearSingularContour) {
      throw Error(Errc::NearSingularContour,
                  "singular evaluation at node (" + std::to_string(z.real()) + ", " +
                      std::to_string(z.imag()) + "): " + e.what());
    }
    throw Error(Errc::EvalFailure, e.what());
  } catch (const std::exception& e) {
    throw Error(Errc::EvalFailure, e.what());
  }
}

void check_declared_poles(const HoloMatFun& f, const Contour& c) {
  for (const Complex& p : f.declared_poles()) {
    if (std::abs(std::abs(p - c.center) - c.radius) <= 1e-9 * c.radius) {
      throw Error(Errc::NearSingularContour, "declared pole lies on the contour");
    }
  }
}

void check_health(std::vector<double> norms) {
  for (double v : norms) {
    if (!std::isfinite(v)) throw Error(Errc::NearSingularContour, "non-finite integrand value");
  }
  const double peak = *std::max_element(norms.begin(), norms.end());
  auto mid = norms.begin() + static_cast<std::ptrdiff_t>(norms.size() / 2);
  std::nth_element(norms.begin(), mid, norms.end());
  const double median = *mid;
  if (median > 0.0 && peak > kHealthRatio * median) {
    throw Error(Errc::NearSingularContour, "integrand peak " + std::to_string(peak) +
                                               " exceeds 1e12 x contour median " +
                                               std::to_string(median));
  }
}

CMatrix checked_value(const HoloMatFun& f, Complex z) {
  CMatrix v = guarded([&] { return f(z); }, z);
  if (!all_finite(v)) throw Error(Errc::NearSingularContour, "non-finite function value");
  return v;
}

struct PowerSums {
  std::vector<CMatrix> coarse;
  std::vector<CMatrix> fine;
  double scale = 0.0;
};

/// Coarse (N) and fine (2N) trapezoid sums of f (z - z0)^p for
/// p = first_power .. first_power + powers - 1 from a single sweep.
PowerSums integrate_powers(const HoloMatFun& f, const Contour& c, int first_power, int powers) {
  c.validate();
  check_declared_poles(f, c);
  const int fine_count = 2 * c.nodes;
  std::vector<double> norms(static_cast<std::size_t>(fine_count));
  PowerSums sums;
  Index rows = -1, cols = -1;

  for (int j = 0; j < fine_count; ++j) {
    const Complex z = c.center + node_offset(c, j, fine_count);
    const CMatrix v = checked_value(f, z);
    if (rows < 0) {
      rows = v.rows();
      cols = v.cols();
      sums.coarse.assign(static_cast<std::size_t>(powers), CMatrix::Zero(rows, cols));
      sums.fine.assign(static_cast<std::size_t>(powers), CMatrix::Zero(rows, cols));
    } else if (v.rows() != rows || v.cols() != cols) {
      throw Error(Errc::EvalFailure, "function changed dimensions along the contour");
    }
    norms[static_cast<std::size_t>(j)] = max_abs(v);
    for (int k = 0; k < powers; ++k) {
      const int p = first_power + k;
      sums.fine[static_cast<std::size_t>(k)] += weight(c, j, fine_count, p) * v;
      if (j % 2 == 0) sums.coarse[static_cast<std::size_t>(k)] += weight(c, j / 2, c.nodes, p) * v;
    }
  }
  sums.scale = *std::max_element(norms.begin(), norms.end());
  check_health(std::move(norms));
  return sums;
}

/// Coarse and fine sums of a scalar integrand g(z) (power 0).
template <class Eval>
std::pair<Complex, Complex> integrate_scalar(const Contour& c, Eval&& eval) {
  c.validate();
  const int fine_count = 2 * c.nodes;
  std::vector<double> norms(static_cast<std::size_t>(fine_count));
  Complex coarse{0.0, 0.0}, fine{0.0, 0.0};
  for (int j = 0; j < fine_count; ++j) {
    const Complex z = c.center + node_offset(c, j, fine_count);
    const Complex g = guarded([&] { return eval(z); }, z);
    norms[static_cast<std::size_t>(j)] = std::abs(g);
    fine += weight(c, j, fine_count, 0) * g;
    if (j % 2 == 0) coarse += weight(c, j / 2, c.nodes, 0) * g;
  }
  check_health(std::move(norms));
  return {coarse, fine};
}

void require_accepted(const IndexReport& r, const char* what) {
  if (!r.accepted()) {
    throw Error(Errc::Rejected, std::string(what) + ": raw=(" + std::to_string(r.raw.real()) +
                                    ", " + std::to_string(r.raw.imag()) +
                                    ") residual=" + std::to_string(r.residual) +
                                    " refinement_gap=" + std::to_string(r.refinement_gap));
  }
}

/// Winding report from log-determinants on 2 * count equispaced nodes, or
/// nothing when some unwrapped phase step reaches pi/2.
std::optional<IndexReport> winding_from(const std::vector<numkit::LogDet>& dets, int count) {
  std::vector<double> logs;
  logs.reserve(dets.size());
  for (const auto& d : dets) logs.push_back(d.log_abs);
  std::vector<double> sorted = logs;
  auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  const double median = *mid;
  const double limit = std::log(kHealthRatio);
  for (double l : logs) {
    if (!std::isfinite(l) || std::abs(l - median) > limit) {
      throw Error(Errc::NearSingularContour, "det M varies by more than 1e12 along the contour");
    }
  }

  const auto fine_count = static_cast<int>(dets.size());
  auto total_phase = [&](int stride, double& max_jump) {
    double total = 0.0;
    max_jump = 0.0;
    for (int j = 0; j < fine_count; j += stride) {
      const int next = (j + stride) % fine_count;
      const double step = std::arg(dets[static_cast<std::size_t>(next)].phase /
                                   dets[static_cast<std::size_t>(j)].phase);
      max_jump = std::max(max_jump, std::abs(step));
      total += step;
    }
    return total;
  };
  double fine_jump = 0.0, coarse_jump = 0.0;
  const double fine = total_phase(1, fine_jump);
  if (fine_jump >= std::numbers::pi / 2.0) return std::nullopt;
  const double coarse = total_phase(2, coarse_jump);
  return IndexReport::from_values(Complex(coarse / kTwoPi, 0.0), Complex(fine / kTwoPi, 0.0), count);
}

struct IndexSweep {
  IndexReport index;
  std::vector<numkit::LogDet> dets;
};

/// One pass over the 2N nodes: trace integrals in both orders plus the
/// log-determinant of each node's factorization.
IndexSweep index_sweep(const HoloMatFun& m, const Contour& c) {
  c.validate();
  check_declared_poles(m, c);
  const int fine_count = 2 * c.nodes;
  std::vector<double> norms(static_cast<std::size_t>(fine_count));
  IndexSweep out;
  out.dets.resize(static_cast<std::size_t>(fine_count));
  Complex left_coarse{}, left_fine{}, right_fine{};

  for (int j = 0; j < fine_count; ++j) {
    const Complex z = c.center + node_offset(c, j, fine_count);
    const MatJet jet = guarded([&] { return m.jet(z, c.radius); }, z);
    if (!all_finite(jet.value) || !all_finite(jet.derivative)) {
      throw Error(Errc::NearSingularContour, "non-finite function value");
    }
    // M^{-1} M' from M X = M'; (M' M^{-1})^T from M^T Y = M'^T.
    const auto lu = guarded([&] { return numkit::LuFactorization(jet.value); }, z);
    const CMatrix right = lu.solve(jet.derivative);
    const CMatrix left_t = lu.solve_transpose(jet.derivative.transpose());
    out.dets[static_cast<std::size_t>(j)] = lu.log_det();
    norms[static_cast<std::size_t>(j)] = max_abs(right);
    const Complex w = weight(c, j, fine_count, 0);
    left_fine += w * left_t.trace();
    right_fine += w * right.trace();
    if (j % 2 == 0) left_coarse += weight(c, j / 2, c.nodes, 0) * left_t.trace();
  }
  check_health(std::move(norms));

  if (std::abs(left_fine - right_fine) > kOrderTolerance * std::max(1.0, std::abs(left_fine))) {
    throw Error(Errc::OrderMismatch, "tr(M'M^-1) and tr(M^-1 M') integrals differ by " +
                                         std::to_string(std::abs(left_fine - right_fine)));
  }
  out.index = IndexReport::from_values(left_coarse, left_fine, c.nodes);
  return out;
}

}  // namespace

void Contour::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(Errc::InvalidArgument, "contour radius must be positive");
  }
  if (nodes < 8) throw Error(Errc::InvalidArgument, "contour needs at least 8 nodes");
  if (!std::isfinite(center.real()) || !std::isfinite(center.imag())) {
    throw Error(Errc::InvalidArgument, "contour center must be finite");
  }
}

HoloMatFun::HoloMatFun(Value value) : value_(std::move(value)) {}

HoloMatFun::HoloMatFun(Value value, Value derivative)
    : value_(std::move(value)), derivative_(std::move(derivative)) {}

HoloMatFun HoloMatFun::from_jet(Value value, Jet jet) {
  HoloMatFun f(std::move(value));
  f.jet_ = std::move(jet);
  return f;
}

MatJet HoloMatFun::jet(Complex z, double radius) const {
  if (jet_) return jet_(z);
  if (derivative_) return {value_(z), derivative_(z)};
  return {value_(z), finite_difference_derivative(value_, z, radius * 0x1.0p-20)};
}

HoloMatFun& HoloMatFun::declare_pole(Complex z) {
  poles_.push_back(z);
  return *this;
}

HoloMatFun resolvent_of(const CMatrix& t) {
  if (t.rows() != t.cols()) throw Error(Errc::InvalidArgument, "resolvent_of: T must be square");
  auto shifted = [t](Complex z) {
    CMatrix a = t;
    a.diagonal().array() -= z;
    return numkit::LuFactorization(std::move(a));
  };
  return HoloMatFun::from_jet(
      [shifted](Complex z) { return shifted(z).inverse(); },
      [shifted](Complex z) {
        const CMatrix r = shifted(z).inverse();
        return MatJet{r, r * r};
      });
}

CMatrix finite_difference_derivative(const HoloMatFun::Value& f, Complex z, double step) {
  if (!(step > 0.0)) throw Error(Errc::InvalidArgument, "finite difference step must be positive");
  double scale = 0.0;
  auto central = [&](double h) {
    const CMatrix plus = f(z + h), minus = f(z - h);
    scale = std::max({scale, max_abs(plus), max_abs(minus)});
    return CMatrix((plus - minus) / (2.0 * h));
  };
  const CMatrix d1 = central(step);
  const CMatrix d2 = central(step / 2.0);
  const CMatrix d3 = central(step / 4.0);
  const double e1 = max_abs(d1 - d2);
  const double e2 = max_abs(d2 - d3);
  const double floor = 100.0 * kUnitRoundoff * (scale / (step / 4.0) + max_abs(d3));
  if (!(e2 <= e1 || e2 <= floor)) {
    throw Error(Errc::EvalFailure, "finite-difference derivative not converging under halving");
  }
  return (4.0 * d3 - d2) / 3.0;
}

IndexReport IndexReport::from_values(Complex coarse, Complex fine, int nodes) {
  IndexReport r;
  r.raw = fine;
  r.rounded = std::lround(fine.real());
  r.residual = std::abs(fine - static_cast<double>(r.rounded));
  r.refinement_gap = std::abs(fine - coarse);
  r.nodes = nodes;
  return r;
}

CauchyResult cauchy_integral_checked(const HoloMatFun& f, const Contour& c, int power) {
  PowerSums s = integrate_powers(f, c, power, 1);
  return {s.fine[0], max_abs(s.fine[0] - s.coarse[0])};
}

CMatrix cauchy_integral(const HoloMatFun& f, const Contour& c, int power) {
  return cauchy_integral_checked(f, c, power).value;
}

CMatrix riesz_projection(const HoloMatFun& resolvent, const Contour& c) {
  return -cauchy_integral(resolvent, c, 0);
}

IndexReport riesz_trace(const HoloMatFun& resolvent, const Contour& c) {
  PowerSums s = integrate_powers(resolvent, c, 0, 1);
  return IndexReport::from_values(-numkit::trace(s.coarse[0]), -numkit::trace(s.fine[0]), c.nodes);
}

IndexReport riesz_trace(const numkit::ResolventTrace& t, const Contour& c) {
  auto [coarse, fine] = integrate_scalar(c, [&](Complex z) { return -t(z); });
  return IndexReport::from_values(coarse, fine, c.nodes);
}

IndexReport algebraic_multiplicity(const HoloMatFun& resolvent, const Contour& c) {
  IndexReport r = riesz_trace(resolvent, c);
  require_accepted(r, "algebraic_multiplicity");
  return r;
}

IndexReport algebraic_multiplicity(const numkit::ResolventTrace& t, const Contour& c) {
  IndexReport r = riesz_trace(t, c);
  require_accepted(r, "algebraic_multiplicity");
  return r;
}

IndexReport algebraic_multiplicity(const CMatrix& t, const Contour& c) {
  return algebraic_multiplicity(numkit::ResolventTrace(t), c);
}

IndexReport generalized_index(const HoloMatFun& m, const Contour& c) {
  return index_sweep(m, c).index;
}

IndexWithWinding generalized_index_with_winding(const HoloMatFun& m, const Contour& c) {
  IndexSweep sweep = index_sweep(m, c);
  if (auto w = winding_from(sweep.dets, c.nodes)) return {sweep.index, *w};
  return {sweep.index, winding_det(m, c)};
}

LaurentCoeffs principal_part(const HoloMatFun& f, const Contour& c, int max_order) {
  if (max_order < 1) throw Error(Errc::InvalidArgument, "principal_part: max_order must be >= 1");
  // M_k = (1/2 pi i) \oint f (z - z0)^(-k-1) dz, so k = -1 .. -(max_order+1)
  // needs powers 0 .. max_order; the last one is the truncation check.
  PowerSums s = integrate_powers(f, c, 0, max_order + 1);
  LaurentCoeffs out;
  out.scale = s.scale;
  double largest = 0.0;
  for (int p = 0; p < max_order; ++p) largest = std::max(largest, max_abs(s.fine[static_cast<std::size_t>(p)]));
  const double rank_threshold = 1e-8 * std::max(largest, 1e-300);
  for (int p = 0; p < max_order; ++p) {
    const auto idx = static_cast<std::size_t>(p);
    LaurentTerm term;
    term.order = -(p + 1);
    term.coefficient = s.fine[idx];
    term.rank = numkit::rank_above(term.coefficient, rank_threshold);
    out.refinement_gap = std::max(out.refinement_gap, max_abs(s.fine[idx] - s.coarse[idx]));
    out.terms.push_back(std::move(term));
  }
  out.tail_norm = max_abs(s.fine.back());
  return out;
}

double trace_cyclicity_check(const HoloMatFun& m1, const HoloMatFun& m2, const Contour& c) {
  HoloMatFun forward([&](Complex z) { return CMatrix(m1(z) * m2(z)); });
  HoloMatFun backward([&](Complex z) { return CMatrix(m2(z) * m1(z)); });
  for (const auto* m : {&m1, &m2}) {
    for (const Complex& p : m->declared_poles()) {
      forward.declare_pole(p);
      backward.declare_pole(p);
    }
  }
  const CMatrix a = cauchy_integral(forward, c, 0);
  const CMatrix b = cauchy_integral(backward, c, 0);
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw Error(Errc::InvalidArgument, "trace_cyclicity_check: products must be square");
  }
  return std::abs(a.trace() - b.trace());
}

IndexReport winding_det(const HoloMatFun& m, const Contour& c) {
  c.validate();
  check_declared_poles(m, c);
  int count = c.nodes;
  for (int attempt = 0; attempt <= 4; ++attempt, count *= 2) {
    const int fine_count = 2 * count;
    std::vector<numkit::LogDet> dets(static_cast<std::size_t>(fine_count));
    for (int j = 0; j < fine_count; ++j) {
      const Complex z = c.center + node_offset(c, j, fine_count);
      const CMatrix v = checked_value(m, z);
      dets[static_cast<std::size_t>(j)] =
          guarded([&] { return numkit::LuFactorization(v).log_det(); }, z);
    }
    if (auto w = winding_from(dets, count)) return *w;
  }
  throw Error(Errc::PhaseJumpTooLarge, "det phase steps stay above pi/2 after 4 doublings");
}

}  // namespace specindex::contour
