#pragma once

// Subcommands: parameter validation, computation and output. Each command
// validates every physical parameter before any computation starts.

#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "cli/output.hpp"

namespace thermoswitch::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int config = 2;
inline constexpr int io = 3;
inline constexpr int integrator = 4;
inline constexpr int monotonicity = 5;
}  // namespace exit_code

/// Per-step increase beyond this counts as a monotonicity violation.
inline constexpr double monotone_slack = 1e-8;

struct CommandResult {
  Table table;
  std::optional<Json> document;         // replaces the table in JSON output (work)
  std::vector<std::string> violations;  // monotonicity breaches, one line each
};

/// One line per row where a column from first_column on grows by more than
/// monotone_slack over the previous row; column 0 is the time.
std::vector<std::string> nonincreasing_violations(const Table& table, std::size_t first_column);

CommandResult run_bound(const RunConfig& cfg);
CommandResult run_kinetics(const RunConfig& cfg);
CommandResult run_lz(const RunConfig& cfg);
CommandResult run_monotone(const RunConfig& cfg);
CommandResult run_work(const RunConfig& cfg);
CommandResult run_clock(const RunConfig& cfg);

CommandResult compute(const RunConfig& cfg);

/// Text exactly as written by execute.
std::string render_result(const CommandResult& result, const RunConfig& cfg);

/// compute + write, reporting violations on stderr; returns the exit code.
/// Throws ConfigError, IoError and library errors for main to map.
int execute(const RunConfig& cfg);

/// Full command-line entry point; never throws.
int main(int argc, const char* const* argv);

}  // namespace thermoswitch::cli
