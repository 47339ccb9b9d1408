#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fracbayes/app/config.hpp"

namespace fracbayes::app {

enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 1,
  exit_numerical_error = 2,
  exit_verification_failed = 3,
};

struct CheckResult {
  std::string name;
  double value;
  std::string relation;  // "<=", ">=" or "<"
  double bound;
  bool pass;
  std::string note;
};

/// Runs the verification suite without touching the filesystem.
std::vector<CheckResult> verification_checks(const RunConfig& config, std::ostream& log);

// Each command writes its files under config.out only after every computation
// has succeeded. Return value is an ExitCode.
int cmd_synth(const RunConfig& config, std::ostream& log);
int cmd_posterior_grid(const RunConfig& config, std::ostream& log);
int cmd_mcmc(const RunConfig& config, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& log);
int cmd_hellinger_sweep(const RunConfig& config, std::ostream& log);

/// Full command-line entry point: parses arguments, maps exceptions to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fracbayes::app
