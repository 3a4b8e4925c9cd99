#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stubborn/catalan.hpp"
#include "stubborn/closed_form.hpp"
#include "stubborn/mining_params.hpp"
#include "stubborn/sweep.hpp"

namespace stubborn::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitValidationFailed = 3,
  kExitIo = 4,
};

struct EvalCommand {
  StrategyKind kind;
  MiningParams params;
  GammaZero gamma_zero = GammaZero::Reject;
};

struct SimulateCommand {
  StrategyKind kind;
  MiningParams params;
  std::uint64_t n_cycles;
  std::uint64_t seed;
};

struct ValidateCommand {
  StrategyKind kind;
  MiningParams params;
  std::uint64_t n_cycles;
  std::uint64_t seed;
  double sigmas;
  GammaZero gamma_zero = GammaZero::Reject;
};

struct DistCommand {
  CatalanKind kind;
  double p;
  std::uint64_t n_max;
  std::uint64_t n_cycles;
  std::uint64_t seed;
};

struct MapCommand {
  GridSpec grid;
  SmMode sm;
  MapFormat format;
  std::string output;
};

using Command =
    std::variant<EvalCommand, SimulateCommand, ValidateCommand, DistCommand, MapCommand>;

/// Result of parsing an argument vector: either a validated command, or an
/// exit code plus text (help goes to stdout, errors to stderr).
struct ParseOutcome {
  std::optional<Command> command;
  int exit_code = kExitOk;
  std::string help;
  std::string error;
};

ParseOutcome parse(const std::vector<std::string>& args);

struct RunOptions {
  unsigned workers = 0;
};

/// Executes a parsed command, writing its report to `out`.
int run(const Command& command, std::ostream& out, const RunOptions& options = {});

/// Worker cap from STUBBORN_LAB_THREADS (0 or unset = all cores).
unsigned workers_from_environment();

/// Full program: parse, run, map exceptions to exit codes.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stubborn::cli
