#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "sitrec/run_config.hpp"

namespace sitrec {

enum class Command { Run, Sweep, Validate };

struct CliInvocation {
    Command command = Command::Run;
    std::string config_path;
    std::string output_dir;
    std::optional<std::uint64_t> seed_override;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int validation = 1;
inline constexpr int runtime = 2;
}  // namespace exit_code

/// Prints every issue of the bundle and "N errors". Returns the exit code.
int cmd_validate(const std::string& config_path, std::ostream& out);

/// Writes comparison.csv and summary.txt into `output_dir`.
ComparisonTable cmd_run(const std::string& config_path, const std::string& output_dir,
                        std::optional<std::uint64_t> seed_override, std::ostream& log);

/// Writes sweep.csv and prints the optimal threshold.
SweepResult cmd_sweep(const std::string& config_path, const std::string& output_dir,
                      std::optional<std::uint64_t> seed_override, std::ostream& out);

/// Human-readable report of a comparison.
std::string format_summary(const RunConfig& cfg, const ComparisonTable& table);

/// Runs a command, mapping failures to exit codes and messages on `err`.
int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err);

}  // namespace sitrec
