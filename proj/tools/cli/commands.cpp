#include "cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "specindex/random.hpp"

namespace specindex::cli {

namespace {

constexpr double kCorruptShift = 0.25;  // corrupt_theta perturbation, times I
constexpr int kKreinPoints = 20;
constexpr int kIdentityPoints = 4;
constexpr int kWeylPoints = 5;

const char* boolean(bool b) { return b ? "true" : "false"; }

class CsvWriter {
 public:
  explicit CsvWriter(std::ostringstream& os) : os_(os) {}

  CsvWriter& operator<<(double v) { return cell(format_real(v)); }
  CsvWriter& operator<<(long v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(int v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(bool v) { return cell(boolean(v)); }
  CsvWriter& operator<<(const std::string& v) { return cell(v); }
  CsvWriter& operator<<(const char* v) { return cell(v); }
  CsvWriter& operator<<(Complex z) {
    cell(format_real(z.real()));
    return cell(format_real(z.imag()));
  }

  void end() {
    os_ << '\n';
    first_ = true;
  }

 private:
  CsvWriter& cell(const std::string& v) {
    if (!first_) os_ << ',';
    os_ << v;
    first_ = false;
    return *this;
  }

  std::ostringstream& os_;
  bool first_ = true;
};

CommandResult not_requested(Task t) {
  return {kExitConfig, "", "tasks: scenario does not request '" + std::string(task_name(t)) + "'"};
}

CommandResult numerical(const Error& e, const std::string& where) {
  return {kExitNumerical, "", where + ": " + std::string(to_string(e.code())) + ": " + e.what()};
}

std::string target_name(const char* stem, std::size_t k) { return stem + std::to_string(k + 1); }

contour::HoloMatFun family_function(const Scenario& s, const CMatrix& theta) {
  if (const auto* m = s.schrodinger()) return schrodinger::dtn_minus_theta(*m, theta);
  return btriple::theta_minus_weyl(*s.donoghue(), theta);
}

double oracle_tolerance(const CMatrix& a) { return 1e-8 * std::max(1.0, max_abs(a)); }

struct Target {
  std::string name;
  CMatrix op;
};

std::vector<Target> realizations(const Scenario& s) {
  std::vector<Target> out;
  if (const auto* m = s.schrodinger()) {
    for (std::size_t k = 0; k < s.theta.size(); ++k) {
      out.push_back({target_name("A_theta", k), schrodinger::assemble(*m, schrodinger::Robin{s.theta[k]})});
    }
    out.push_back({"A_D", schrodinger::assemble(*m, schrodinger::Dirichlet{})});
  } else {
    const auto& d = *s.donoghue();
    for (std::size_t k = 0; k < s.theta.size(); ++k) {
      out.push_back({target_name("B", k), btriple::extension_operator(d, s.theta[k])});
    }
    out.push_back({"A", d.a()});
  }
  return out;
}

/// Residual of an index-theorem item: distance of the raw index to the
/// predicted integer, forced to >= 1 when any cross-check disagrees.
double index_item(Complex raw, long expected, bool agree) {
  const double dist = std::abs(raw - Complex(static_cast<double>(expected), 0.0));
  return agree ? dist : std::max(1.0, dist);
}

/// Worst residual per item name, first-appearance order.
ResidualReport collapse(const ResidualReport& r, const std::string& suffix) {
  ResidualReport out;
  std::map<std::string, std::size_t> where;
  for (const auto& it : r.items) {
    auto [pos, fresh] = where.emplace(it.name, out.items.size());
    if (fresh) {
      out.add(it.name + suffix, it.residual, it.tolerance);
    } else {
      auto& dst = out.items[pos->second];
      dst.residual = std::max(dst.residual, it.residual);
    }
  }
  return out;
}

void append(ResidualReport& into, const ResidualReport& from) {
  into.items.insert(into.items.end(), from.items.begin(), from.items.end());
}

Complex sample_point(Rng& rng) {
  const double im = rng.uniform(0.2, 3.0);
  return {rng.uniform(-5.0, 5.0), rng.uniform() < 0.5 ? im : -im};
}

std::string suffix_for(const Scenario& s, std::size_t k) {
  return s.theta.size() > 1 ? "/theta" + std::to_string(k + 1) : "";
}

std::string contour_tag(std::size_t k) { return "[contour " + std::to_string(k) + "]"; }

CMatrix corrupted(const CMatrix& theta) {
  return theta + kCorruptShift * CMatrix::Identity(theta.rows(), theta.cols());
}

void verify_schrodinger(const Scenario& s, Rng& rng, ResidualReport& report) {
  const auto& model = *s.schrodinger();
  for (std::size_t k = 0; k < s.theta.size(); ++k) {
    const CMatrix& theta = s.theta[k];
    const std::string sfx = suffix_for(s, k);
    std::vector<Complex> points;
    for (int p = 0; p < kIdentityPoints; ++p) points.push_back(sample_point(rng));
    append(report, collapse(schrodinger::verify_identities(model, theta, points), sfx));

    double krein = 0.0, krein_adj = 0.0;
    for (int p = 0; p < kKreinPoints; ++p) {
      const Complex z = sample_point(rng);
      krein = std::max(krein, schrodinger::krein_residual(model, theta, z));
      krein_adj = std::max(krein_adj, schrodinger::krein_residual(model, theta, std::conj(z), true));
    }
    report.add("krein_formula" + sfx, krein, 1e-9);
    report.add("krein_formula_adjoint" + sfx, krein_adj, 1e-9);
    report.add("conjugate_spectrum" + sfx, schrodinger::conjugate_spectrum_mismatch(model, theta), 1e-8);

    const CMatrix index_theta = s.corrupt_theta ? corrupted(theta) : theta;
    for (int conj = 0; conj < 2; ++conj) {
      const bool adjoint = conj == 1;
      const schrodinger::RobinIndexProblem problem(model, theta, adjoint);
      const auto fun = schrodinger::dtn_minus_theta(model, index_theta, adjoint);
      for (std::size_t c = 0; c < s.contours.size(); ++c) {
        contour::Contour circle = s.contours[c];
        if (adjoint) circle.center = std::conj(circle.center);
        schrodinger::IndexVerdict v = problem.check(circle);
        if (s.corrupt_theta) {
          const auto both = contour::generalized_index_with_winding(fun, circle);
          v.index = both.index;
          v.winding = both.winding;
        }
        const long expected = v.ma_robin.rounded - v.ma_dirichlet.rounded;
        const bool agree = v.index.accepted() && v.ma_robin.accepted() && v.ma_dirichlet.accepted() &&
                           v.index.rounded == expected && v.winding.rounded == v.index.rounded &&
                           v.ma_robin.rounded == v.oracle_robin &&
                           v.ma_dirichlet.rounded == v.oracle_dirichlet;
        report.add((adjoint ? "index_theorem_adjoint" : "index_theorem") + contour_tag(c) + sfx,
                   index_item(v.index.raw, expected, agree), contour::kAcceptResidual);
      }
    }
  }
}

void verify_donoghue(const Scenario& s, Rng& rng, ResidualReport& report) {
  const auto& model = *s.donoghue();
  report.add("green_matrix", btriple::green_matrix_residual(model), 1e-12);
  ResidualReport weyl;
  for (int p = 0; p < kWeylPoints; ++p) {
    const Complex z = sample_point(rng);
    const Complex w = sample_point(rng);
    append(weyl, btriple::weyl_identity_residuals(model, z, w));
  }
  append(report, collapse(weyl, ""));

  for (std::size_t k = 0; k < s.theta.size(); ++k) {
    const CMatrix& theta = s.theta[k];
    const std::string sfx = suffix_for(s, k);
    const CMatrix b = btriple::extension_operator(model, theta);
    report.add("extension_routes" + sfx,
               relative_difference(btriple::extension_matrix_from_bc(model, theta), b), 1e-10);
    double krein = 0.0;
    for (int p = 0; p < kKreinPoints; ++p) {
      const Complex z = sample_point(rng);
      CMatrix shifted = b;
      shifted.diagonal().array() -= z;
      krein = std::max(krein, relative_difference(btriple::krein_resolvent(model, theta, z),
                                                  numkit::inverse(shifted)));
    }
    report.add("krein_formula" + sfx, krein, 1e-9);
  }

  const CMatrix& theta1 = s.theta.front();
  const CMatrix& theta2 = s.theta.back();
  const btriple::DonoghueIndexProblem problem(model, theta1, theta2);
  const auto fun1 = btriple::theta_minus_weyl(model, corrupted(theta1));
  for (std::size_t c = 0; c < s.contours.size(); ++c) {
    btriple::DifferenceVerdict v = problem.check(s.contours[c]);
    if (s.corrupt_theta) {
      const auto both = contour::generalized_index_with_winding(fun1, s.contours[c]);
      v.index1 = both.index;
      v.winding1 = both.winding;
      v.corollary1 = v.index1.rounded == v.ma_b1.rounded - v.ma_a.rounded;
      v.difference = v.index1.rounded - v.index2.rounded == v.ma_b1.rounded - v.ma_b2.rounded;
      v.agree = v.agree && v.index1.accepted() && v.corollary1 && v.difference &&
                v.winding1.rounded == v.index1.rounded;
    }
    const long expected = v.ma_b1.rounded - v.ma_a.rounded;
    report.add("index_difference" + contour_tag(c), index_item(v.index1.raw, expected, v.agree),
               contour::kAcceptResidual);
  }
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CommandResult cmd_index(const Scenario& s) {
  if (!s.wants(Task::Index)) return not_requested(Task::Index);
  std::ostringstream os;
  CsvWriter csv(os);
  csv << "task" << "center_re" << "center_im" << "radius" << "raw_re" << "raw_im" << "rounded"
      << "residual" << "refinement_gap" << "accepted" << "winding_rounded" << "target";
  csv.end();
  try {
    for (std::size_t k = 0; k < s.theta.size(); ++k) {
      const auto fun = family_function(s, s.theta[k]);
      for (const auto& c : s.contours) {
        const auto both = contour::generalized_index_with_winding(fun, c);
        const auto& r = both.index;
        csv << "index" << c.center << c.radius << r.raw << r.rounded << r.residual
            << r.refinement_gap << r.accepted() << both.winding.rounded << target_name("theta", k);
        csv.end();
      }
    }
  } catch (const Error& e) {
    return numerical(e, "index");
  }
  return {kExitOk, os.str(), ""};
}

CommandResult cmd_mult(const Scenario& s) {
  if (!s.wants(Task::Multiplicity)) return not_requested(Task::Multiplicity);
  std::ostringstream os;
  CsvWriter csv(os);
  csv << "task" << "center_re" << "center_im" << "radius" << "raw_re" << "raw_im" << "rounded"
      << "residual" << "refinement_gap" << "accepted" << "oracle" << "target";
  csv.end();
  try {
    for (const auto& t : realizations(s)) {
      const numkit::ResolventTrace trace(t.op);
      const auto eigs = numkit::eig_cluster(t.op, oracle_tolerance(t.op));
      for (const auto& c : s.contours) {
        const auto r = contour::riesz_trace(trace, c);
        csv << "mult" << c.center << c.radius << r.raw << r.rounded << r.residual << r.refinement_gap
            << r.accepted() << numkit::multiplicity_in_disk(eigs, c.center, c.radius) << t.name;
        csv.end();
      }
    }
  } catch (const Error& e) {
    return numerical(e, "mult");
  }
  return {kExitOk, os.str(), ""};
}

CommandResult cmd_verify(const Scenario& s) {
  if (!s.wants(Task::Verify)) return not_requested(Task::Verify);
  const std::uint64_t sample_seed = s.seed + 1;
  Rng rng(sample_seed);
  ResidualReport report;
  try {
    if (s.schrodinger()) {
      verify_schrodinger(s, rng, report);
    } else {
      verify_donoghue(s, rng, report);
    }
  } catch (const Error& e) {
    return numerical(e, "verify");
  }

  std::ostringstream os;
  os << "# specindex verify\n";
  os << "# model " << kind_name(s.kind) << ", boundary dimension " << s.boundary_dim() << ", "
     << s.theta.size() << " theta, " << s.contours.size() << " contours\n";
  os << "# rng " << Rng::kName << " seed " << s.seed << " (model draws), seed " << sample_seed
     << " (sample points)\n";
  if (s.corrupt_theta) os << "# self_test corrupt_theta: index side uses theta + 0.25 I\n";
  CsvWriter csv(os);
  csv << "item" << "residual" << "tolerance" << "passed";
  csv.end();
  std::string first_failure;
  for (const auto& it : report.items) {
    csv << it.name << it.residual << it.tolerance << it.passed();
    csv.end();
    if (!it.passed() && first_failure.empty()) first_failure = it.name;
  }
  os << "# verdict " << (first_failure.empty() ? "pass" : "fail") << "\n";
  if (!first_failure.empty()) {
    return {kExitDisagreement, os.str(), "verify: " + first_failure + " failed"};
  }
  return {kExitOk, os.str(), ""};
}

CommandResult cmd_scan(const Scenario& s) {
  if (!s.wants(Task::Scan)) return not_requested(Task::Scan);
  const ScanWindow& w = *s.scan;
  std::ostringstream os;
  CsvWriter csv(os);
  csv << "center_re" << "center_im" << "rounded" << "residual" << "refinement_gap" << "accepted"
      << "near_singular";
  csv.end();
  const auto fun = family_function(s, s.theta.front());
  const double nan = std::nan("");
  for (const Complex& z : w.centers()) {
    csv << z;
    try {
      const auto r = contour::generalized_index(fun, {z, w.radius, w.nodes});
      csv << r.rounded << r.residual << r.refinement_gap << r.accepted() << false;
    } catch (const Error&) {
      csv << 0L << nan << nan << false << true;
    }
    csv.end();
  }
  return {kExitOk, os.str(), ""};
}

}  // namespace specindex::cli
