#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "summlab/errors.hpp"
#include "summlab/index_lab.hpp"
#include "summlab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"summlab: summing-quotient experiments and bound tables"};
  app.require_subcommand(1);

  summlab::RunOptions options;
  options.threads = std::max(1u, std::thread::hardware_concurrency());
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run the experiments declared in a JSON config");
  run->add_option("--config", options.config, "Experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", options.out, "Output directory")->required();
  run->add_option("--seed", seed, "Global seed (default: SUMMLAB_SEED, then config, then 42)");
  run->add_option("--threads", options.threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--tuple-budget", options.tuple_budget, "Largest n^m evaluated")
      ->check(CLI::PositiveNumber);

  std::size_t m = 1;
  double p = 0.0;
  double q = 0.0;
  std::optional<double> r;
  auto* bounds = app.add_subcommand("bounds", "Print every bound that applies to (m, p, q[, r])");
  bounds->add_option("--m", m, "Degree / arity")->required()->check(CLI::PositiveNumber);
  bounds->add_option("--p", p, "Summing exponent p")->required()->check(CLI::PositiveNumber);
  bounds->add_option("--q", q, "Weak exponent q")->required()->check(CLI::PositiveNumber);
  bounds->add_option("--r", r, "Cotype of the target space (>= 2)")->check(CLI::Range(2.0, 1e308));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : summlab::kRunBadConfig;
  }

  if (*run) {
    options.seed = seed;
    try {
      return summlab::run(options, std::cerr);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return summlab::kRunFailed;
    }
  }
  try {
    const auto table = summlab::bound_table(m, p, q, r);
    std::cout << summlab::format_bound_table(table);
  } catch (const summlab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return summlab::kRunBadConfig;
  }
  return 0;
}
