#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ptt/config.hpp"

namespace ptt {

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitConfigError = 2, kExitRuntimeError = 3 };

struct CheckResult {
  std::string name;
  bool passed = false;
  bool asserted = true;  // INFO, not PASS/FAIL, when false
  std::string detail;
};

struct ScenarioResult {
  int exit_code = kExitPass;
  std::vector<CheckResult> checks;
  std::string error;  // set for exit codes 2 and 3
};

/// Runs one scenario and writes its artifacts into cfg.output_dir:
///  - blowup: energies.csv, trajectories.csv, summary.txt, initial.pttf, final.pttf
///  - global: energies.csv, trajectories.csv, summary.txt, initial.pttf, final.pttf
///  - linear: energies.csv, semigroup.csv, summary.txt, initial.pttf, final.pttf
///  - verify: summary.txt
/// summary.txt ends with one "check <name> PASS|FAIL|INFO <detail>" line per check.
/// Progress lines go to log when given.
ScenarioResult run_scenario(const ScenarioConfig& cfg, std::ostream* log = nullptr);

}  // namespace ptt
