#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "specindex/btriple.hpp"
#include "specindex/contour.hpp"
#include "specindex/schrodinger.hpp"

namespace specindex::cli {

/// Bad scenario input. path() is the JSON field path, e.g. "contours[1].radius".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class Task { Index, Multiplicity, Verify, Scan };

std::string_view task_name(Task t);

struct ScanWindow {
  double re_lo = 0.0, re_hi = 0.0;
  double im_lo = 0.0, im_hi = 0.0;
  int re_steps = 1, im_steps = 1;  // grid points per axis, ends included
  double radius = 0.0;
  int nodes = 64;

  std::vector<Complex> centers() const;  // row-major: im outer, re inner
};

enum class ModelKind { Schrodinger1d, Schrodinger2d, Donoghue };

std::string_view kind_name(ModelKind k);

struct Scenario {
  ModelKind kind = ModelKind::Schrodinger1d;
  std::variant<std::monostate, schrodinger::SchrodingerModel, btriple::DonoghueModel> model;
  std::vector<CMatrix> theta;  // one or two
  std::vector<contour::Contour> contours;
  std::vector<Task> tasks;
  std::optional<ScanWindow> scan;
  std::uint64_t seed = 0;
  bool corrupt_theta = false;

  bool wants(Task t) const;
  Index boundary_dim() const;
  const schrodinger::SchrodingerModel* schrodinger() const;
  const btriple::DonoghueModel* donoghue() const;
};

struct ParseOptions {
  std::optional<std::uint64_t> seed;  // overrides the scenario's seed
  std::optional<int> nodes;           // overrides every contour and the scan
};

/// JSON scenario text. Random entries ("random_norm", "random") draw from
/// mt19937_64 seeded with the scenario seed, in field order: potential or
/// model, then theta.
Scenario parse_scenario_text(std::string_view text, const ParseOptions& options = {});

/// Throws ConfigError with path "scenario" when the file cannot be read.
Scenario parse_scenario(const std::string& path, const ParseOptions& options = {});

}  // namespace specindex::cli
