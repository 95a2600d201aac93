#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace sirq::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kConfigError = 2,
  kNumericalFailure = 3,
};

struct CommandOptions {
  std::filesystem::path out_dir = "out";
  std::optional<Schedule> schedule_override;
  std::optional<TauGrid> grid;
  unsigned threads = 0;
};

int cmd_simulate(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_plan(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_verify(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_oracle(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);

// Full command line entry point; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// %.17g
std::string format_number(double v);

}  // namespace sirq::cli
