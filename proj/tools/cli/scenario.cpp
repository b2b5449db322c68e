#include "cli/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "specindex/random.hpp"

namespace specindex::cli {

using json = nlohmann::json;

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "." + key; }

std::string item(const std::string& path, std::size_t k) {
  return path + "[" + std::to_string(k) + "]";
}

const json& field(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(child(path, key), "missing");
  return *it;
}

const json* optional_field(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double real_value(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = real_value(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be > 0");
  return v;
}

int integer(const json& j, const std::string& path, int min) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < min || v > 1'000'000) {
    throw ConfigError(path, "must be in [" + std::to_string(min) + ", 1000000]");
  }
  return static_cast<int>(v);
}

Complex complex_value(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected a [re, im] pair");
  return {real_value(j[0], item(path, 0)), real_value(j[1], item(path, 1))};
}

CMatrix explicit_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of rows");
  const auto rows = static_cast<Index>(j.size());
  Index cols = -1;
  CMatrix m;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const json& row = j[r];
    const std::string rp = item(path, r);
    if (!row.is_array() || row.empty()) throw ConfigError(rp, "expected a non-empty row");
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Index>(row.size()) != cols) {
      throw ConfigError(rp, "row length differs from the first row");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = complex_value(row[c], item(rp, c));
    }
  }
  return m;
}

/// Matrix entry of a square boundary-sized block: explicit rows,
/// {"random_norm": s} or {"scalar": [re, im]}.
CMatrix square_matrix(const json& j, const std::string& path, Index dim, Rng& rng) {
  if (j.is_object()) {
    if (const json* s = optional_field(j, "random_norm")) {
      return rng.matrix_with_norm(dim, dim, positive(*s, child(path, "random_norm")));
    }
    if (const json* s = optional_field(j, "scalar")) {
      return complex_value(*s, child(path, "scalar")) * CMatrix::Identity(dim, dim);
    }
    throw ConfigError(path, "expected rows, {\"random_norm\": s} or {\"scalar\": [re, im]}");
  }
  CMatrix m = explicit_matrix(j, path);
  if (m.rows() != dim || m.cols() != dim) {
    throw ConfigError(path, "must be " + std::to_string(dim) + "x" + std::to_string(dim) +
                                " to match the boundary dimension, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  return m;
}

std::vector<Complex> potential_values(const json& j, const std::string& path, Index count,
                                      Rng& rng) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  if (const json* c = optional_field(j, "constant")) {
    return std::vector<Complex>(static_cast<std::size_t>(count), complex_value(*c, child(path, "constant")));
  }
  if (const json* v = optional_field(j, "values")) {
    const std::string vp = child(path, "values");
    if (!v->is_array() || static_cast<Index>(v->size()) != count) {
      throw ConfigError(vp, "expected " + std::to_string(count) + " [re, im] pairs, one per interior node");
    }
    std::vector<Complex> out;
    for (std::size_t k = 0; k < v->size(); ++k) out.push_back(complex_value((*v)[k], item(vp, k)));
    return out;
  }
  if (const json* r = optional_field(j, "random")) {
    const std::string rp = child(path, "random");
    const double bound = positive(field(*r, rp, "max_abs"), child(rp, "max_abs"));
    std::vector<Complex> out;
    for (Index k = 0; k < count; ++k) out.push_back(rng.in_disk(bound));
    return out;
  }
  throw ConfigError(path, "expected one of constant, values, random");
}

/// q at interior node (i, j) (1-based) from values listed with i fastest.
schrodinger::PotentialSampler lookup(std::vector<Complex> values, Index nx, double hx, double hy) {
  return [values = std::move(values), nx, hx, hy](double x, double y) {
    const auto i = static_cast<Index>(std::lround(x / hx)) - 1;
    const auto j = hy > 0.0 ? static_cast<Index>(std::lround(y / hy)) - 1 : 0;
    return values[static_cast<std::size_t>(i + j * nx)];
  };
}

schrodinger::SchrodingerModel parse_schrodinger(const json& m, ModelKind kind, Rng& rng) {
  const std::string path = "model";
  std::vector<Index> sizes;
  std::vector<double> lengths;
  if (kind == ModelKind::Schrodinger1d) {
    sizes.push_back(integer(field(m, path, "n"), child(path, "n"), 1));
    lengths.push_back(positive(field(m, path, "length"), child(path, "length")));
  } else {
    sizes.push_back(integer(field(m, path, "nx"), child(path, "nx"), 1));
    sizes.push_back(integer(field(m, path, "ny"), child(path, "ny"), 1));
    lengths.push_back(positive(field(m, path, "lx"), child(path, "lx")));
    lengths.push_back(positive(field(m, path, "ly"), child(path, "ly")));
  }
  Index count = 1;
  for (Index s : sizes) count *= s;
  if (count > 4096) throw ConfigError(path, "more than 4096 interior nodes");
  std::vector<Complex> q = potential_values(field(m, path, "potential"), child(path, "potential"), count, rng);
  const double hx = lengths[0] / static_cast<double>(sizes[0] + 1);
  const double hy = sizes.size() > 1 ? lengths[1] / static_cast<double>(sizes[1] + 1) : 0.0;
  const auto sampler = lookup(std::move(q), sizes[0], hx, hy);
  try {
    return schrodinger::build(kind == ModelKind::Schrodinger1d ? schrodinger::GridKind::Interval
                                                               : schrodinger::GridKind::Rectangle,
                              sizes, lengths, sampler);
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

btriple::DonoghueModel parse_donoghue(const json& m, Rng& rng) {
  const std::string path = "model";
  if (const json* r = optional_field(m, "random")) {
    const std::string rp = child(path, "random");
    const int n = integer(field(*r, rp, "n"), child(rp, "n"), 1);
    const int k = integer(field(*r, rp, "m"), child(rp, "m"), 1);
    if (n > 512) throw ConfigError(child(rp, "n"), "must be <= 512");
    if (k > n) throw ConfigError(child(rp, "m"), "must not exceed n");
    return btriple::DonoghueModel::random(n, k, rng);
  }
  CMatrix a = explicit_matrix(field(m, path, "a"), child(path, "a"));
  CMatrix v = explicit_matrix(field(m, path, "v"), child(path, "v"));
  try {
    return btriple::DonoghueModel(std::move(a), std::move(v));
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

contour::Contour parse_contour(const json& j, const std::string& path) {
  contour::Contour c;
  c.center = complex_value(field(j, path, "center"), child(path, "center"));
  c.radius = positive(field(j, path, "radius"), child(path, "radius"));
  c.nodes = integer(field(j, path, "nodes"), child(path, "nodes"), 8);
  return c;
}

ScanWindow parse_scan(const json& j) {
  const std::string path = "scan";
  ScanWindow w;
  auto range = [&](const char* key, double& lo, double& hi) {
    const std::string rp = child(path, key);
    const json& r = field(j, path, key);
    if (!r.is_array() || r.size() != 2) throw ConfigError(rp, "expected [lo, hi]");
    lo = real_value(r[0], item(rp, 0));
    hi = real_value(r[1], item(rp, 1));
    if (hi < lo) throw ConfigError(rp, "hi must be >= lo");
  };
  range("re", w.re_lo, w.re_hi);
  range("im", w.im_lo, w.im_hi);
  const std::string sp = child(path, "steps");
  const json& steps = field(j, path, "steps");
  if (!steps.is_array() || steps.size() != 2) throw ConfigError(sp, "expected [re_steps, im_steps]");
  w.re_steps = integer(steps[0], item(sp, 0), 1);
  w.im_steps = integer(steps[1], item(sp, 1), 1);
  if (w.re_steps * static_cast<long long>(w.im_steps) > 100000) {
    throw ConfigError(sp, "more than 100000 grid points");
  }
  w.radius = positive(field(j, path, "radius"), child(path, "radius"));
  if (const json* n = optional_field(j, "nodes")) w.nodes = integer(*n, child(path, "nodes"), 8);
  // Adjacent probe disks must overlap.
  const double dre = w.re_steps > 1 ? (w.re_hi - w.re_lo) / (w.re_steps - 1) : 0.0;
  const double dim = w.im_steps > 1 ? (w.im_hi - w.im_lo) / (w.im_steps - 1) : 0.0;
  if (dre > w.radius || dim > w.radius) {
    throw ConfigError(child(path, "radius"), "grid step exceeds the probe radius");
  }
  return w;
}

Task parse_task(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a task name");
  const auto s = j.get<std::string>();
  if (s == "index") return Task::Index;
  if (s == "multiplicity") return Task::Multiplicity;
  if (s == "verify") return Task::Verify;
  if (s == "scan") return Task::Scan;
  throw ConfigError(path, "unknown task \"" + s + "\" (index, multiplicity, verify, scan)");
}

}  // namespace

std::string_view task_name(Task t) {
  switch (t) {
    case Task::Index: return "index";
    case Task::Multiplicity: return "multiplicity";
    case Task::Verify: return "verify";
    case Task::Scan: return "scan";
  }
  return "?";
}

std::string_view kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Schrodinger1d: return "schrodinger1d";
    case ModelKind::Schrodinger2d: return "schrodinger2d";
    case ModelKind::Donoghue: return "donoghue";
  }
  return "?";
}

std::vector<Complex> ScanWindow::centers() const {
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(re_steps) * static_cast<std::size_t>(im_steps));
  auto at = [](double lo, double hi, int steps, int k) {
    return steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (steps - 1);
  };
  for (int b = 0; b < im_steps; ++b) {
    for (int a = 0; a < re_steps; ++a) {
      out.emplace_back(at(re_lo, re_hi, re_steps, a), at(im_lo, im_hi, im_steps, b));
    }
  }
  return out;
}

bool Scenario::wants(Task t) const { return std::find(tasks.begin(), tasks.end(), t) != tasks.end(); }

const schrodinger::SchrodingerModel* Scenario::schrodinger() const {
  return std::get_if<schrodinger::SchrodingerModel>(&model);
}

const btriple::DonoghueModel* Scenario::donoghue() const {
  return std::get_if<btriple::DonoghueModel>(&model);
}

Index Scenario::boundary_dim() const {
  if (const auto* s = schrodinger()) return s->boundary_count();
  if (const auto* d = donoghue()) return d->boundary_dim();
  return 0;
}

Scenario parse_scenario_text(std::string_view text, const ParseOptions& options) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario", std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("scenario", "top level must be an object");

  Scenario s;
  if (const json* seed = optional_field(root, "seed")) {
    if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<long long>() >= 0)) {
      throw ConfigError("seed", "expected a non-negative integer");
    }
    s.seed = seed->get<std::uint64_t>();
  }
  if (options.seed) s.seed = *options.seed;
  Rng rng(s.seed);

  const json& model = field(root, "scenario", "model");
  const json& kind = field(model, "model", "kind");
  const std::string kind_s = kind.is_string() ? kind.get<std::string>() : "";
  if (kind_s == "schrodinger1d") {
    s.kind = ModelKind::Schrodinger1d;
  } else if (kind_s == "schrodinger2d") {
    s.kind = ModelKind::Schrodinger2d;
  } else if (kind_s == "donoghue") {
    s.kind = ModelKind::Donoghue;
  } else {
    throw ConfigError("model.kind", "expected schrodinger1d, schrodinger2d or donoghue");
  }
  if (s.kind == ModelKind::Donoghue) {
    s.model = parse_donoghue(model, rng);
  } else {
    s.model = parse_schrodinger(model, s.kind, rng);
  }

  const json& theta = field(root, "scenario", "theta");
  if (!theta.is_array() || theta.empty() || theta.size() > 2) {
    throw ConfigError("theta", "expected a list of one or two matrices");
  }
  for (std::size_t k = 0; k < theta.size(); ++k) {
    s.theta.push_back(square_matrix(theta[k], item("theta", k), s.boundary_dim(), rng));
  }

  if (const json* contours = optional_field(root, "contours")) {
    if (!contours->is_array()) throw ConfigError("contours", "expected a list");
    for (std::size_t k = 0; k < contours->size(); ++k) {
      s.contours.push_back(parse_contour((*contours)[k], item("contours", k)));
    }
  }

  const json& tasks = field(root, "scenario", "tasks");
  if (!tasks.is_array() || tasks.empty()) throw ConfigError("tasks", "expected a non-empty list");
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const Task t = parse_task(tasks[k], item("tasks", k));
    if (!s.wants(t)) s.tasks.push_back(t);
  }

  if (const json* scan = optional_field(root, "scan")) s.scan = parse_scan(*scan);
  if (s.wants(Task::Scan) && !s.scan) throw ConfigError("scan", "missing (the scan task needs a window)");
  if ((s.wants(Task::Index) || s.wants(Task::Multiplicity)) && s.contours.empty()) {
    throw ConfigError("contours", "the index and multiplicity tasks need at least one contour");
  }

  if (const json* self_test = optional_field(root, "self_test")) {
    if (const json* c = optional_field(*self_test, "corrupt_theta")) {
      if (!c->is_boolean()) throw ConfigError("self_test.corrupt_theta", "expected true or false");
      s.corrupt_theta = c->get<bool>();
    }
  }

  if (options.nodes) {
    if (*options.nodes < 8) throw ConfigError("nodes", "must be >= 8");
    for (auto& c : s.contours) c.nodes = *options.nodes;
    if (s.scan) s.scan->nodes = *options.nodes;
  }
  return s;
}

Scenario parse_scenario(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("scenario", "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), options);
}

}  // namespace specindex::cli
