#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "json.hpp"

namespace summlab {

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  /// Explicit seed; when absent SUMMLAB_SEED, then the config's "seed", then 42.
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::uint64_t tuple_budget = 100'000'000;
};

/// Exit codes of `run`.
enum RunStatus : int { kRunPassed = 0, kRunFailed = 1, kRunBadConfig = 2 };

/// Executes every experiment in the config and writes results.json,
/// metadata.json, bounds.csv, slopes.csv and one <name>.dat per slope
/// experiment into `options.out`. Diagnostics go to `log`.
int run(const RunOptions& options, std::ostream& log);

/// Same, for an already parsed config; `results` receives what is written to
/// results.json.
int run_config(const nlohmann::json& config, const RunOptions& options, std::ostream& log,
               nlohmann::json* results = nullptr);

/// Seed resolution: explicit flag, SUMMLAB_SEED, config "seed", 42.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const nlohmann::json& config);

}  // namespace summlab
