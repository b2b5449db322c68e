// specindex index|verify|scan|mult --scenario <path> [--out <path>] [--nodes N] [--seed S]

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/scenario.hpp"

namespace {

using specindex::cli::CommandResult;

int emit(const CommandResult& r, const std::string& out_path) {
  if (!r.output.empty()) {
    if (out_path.empty()) {
      std::cout << r.output;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        std::cerr << "out: cannot write " << out_path << "\n";
        return specindex::cli::kExitConfig;
      }
      out << r.output;
    }
  }
  if (!r.diagnostic.empty()) std::cerr << r.diagnostic << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized index of meromorphic matrix functions by contour quadrature"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_path;
  std::optional<int> nodes;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    sub->add_option("--out", out_path, "write the report here instead of stdout");
    sub->add_option("--nodes", nodes, "override the node count of every contour and scan probe");
    sub->add_option("--seed", seed, "override the scenario seed");
  };
  CLI::App* index = app.add_subcommand("index", "generalized index over each contour");
  CLI::App* verify = app.add_subcommand("verify", "itemized identity and index-theorem checks");
  CLI::App* scan = app.add_subcommand("scan", "local index over a grid of probe centers");
  CLI::App* mult = app.add_subcommand("mult", "algebraic multiplicities inside each contour");
  for (CLI::App* sub : {index, verify, scan, mult}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : specindex::cli::kExitConfig;
  }

  specindex::cli::Scenario s;
  try {
    s = specindex::cli::parse_scenario(scenario_path, {seed, nodes});
  } catch (const specindex::cli::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return specindex::cli::kExitConfig;
  }

  if (index->parsed()) return emit(specindex::cli::cmd_index(s), out_path);
  if (verify->parsed()) return emit(specindex::cli::cmd_verify(s), out_path);
  if (scan->parsed()) return emit(specindex::cli::cmd_scan(s), out_path);
  return emit(specindex::cli::cmd_mult(s), out_path);
}
