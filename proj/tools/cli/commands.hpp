#pragma once

#include <string>

#include "cli/scenario.hpp"

namespace specindex::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNumerical = 2,
  kExitDisagreement = 3,
};

struct CommandResult {
  int exit_code = kExitOk;
  std::string output;      // report body; written even on exit 3
  std::string diagnostic;  // one line for stderr, empty on success
};

/// One row per (contour, theta):
///   task,center_re,center_im,radius,raw_re,raw_im,rounded,residual,
///   refinement_gap,accepted,winding_rounded,target
CommandResult cmd_index(const Scenario& s);

/// Riesz-trace multiplicities of the realizations inside each contour, with
/// the eigenvalue-cluster count alongside:
///   task,center_re,center_im,radius,raw_re,raw_im,rounded,residual,
///   refinement_gap,accepted,oracle,target
CommandResult cmd_mult(const Scenario& s);

/// Itemized identity and index checks. Header lines start with '#', then
///   item,residual,tolerance,passed
/// Exit 3 names the first failing item.
CommandResult cmd_verify(const Scenario& s);

/// Local index of the first theta family over the scan grid:
///   center_re,center_im,rounded,residual,refinement_gap,accepted,near_singular
/// Probes that hit a singularity are reported with near_singular=true.
CommandResult cmd_scan(const Scenario& s);

/// 17 significant digits, "inf"/"nan" spelled out.
std::string format_real(double v);

}  // namespace specindex::cli
