#ifndef MCSIM_CLI_COMMANDS_HPP
#define MCSIM_CLI_COMMANDS_HPP

#include <iosfwd>
#include <string>

#include "config.hpp"
#include "mcsim/mcsim.h"

namespace mcsim_cli {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitNotConverged = 3 };

struct CommandResult {
  mcsim_ledger ledger{0, 0, 0.0};
  int exit_code = kExitOk;
};

/// Text form used for every CSV number: 17 significant digits.
std::string format_number(double value);

CommandResult cmd_simulate(const ExperimentConfig& config, std::ostream& csv);
CommandResult cmd_predict(const ExperimentConfig& config, std::ostream& csv);
CommandResult cmd_measure(const ExperimentConfig& config, std::ostream& csv);
CommandResult cmd_asymptote(const ExperimentConfig& config, std::ostream& out);
CommandResult cmd_threshold_sweep(const ExperimentConfig& config, std::ostream& csv);

/// Manifest next to a CSV: "runs/a.csv" -> "runs/a.manifest.json".
std::string manifest_path_for(const std::string& csv_path);

void write_manifest(const std::string& path, const ExperimentConfig& config,
                    const mcsim_ledger& ledger, double elapsed_s);

}  // namespace mcsim_cli

#endif
