#pragma once

#include <cstdint>
#include <string>

#include "eb/bridge.hpp"
#include "eb/montecarlo.hpp"
#include "eb/strategy.hpp"

namespace eb {

/// Out-of-the-box defaults shared by the CLI and the acceptance runs.
struct Defaults {
  static constexpr int strategy_steps = 512;
  static constexpr int sim_paths = 10000;
  static constexpr std::uint64_t sim_seed = 42;
  static constexpr double eps_term_factor = 1e-6;  // eps_term = 1e-6 * T
  static constexpr double dt_divisor = 2048.0;     // dt = T / 2048
};

/// Fully resolved grid settings.
struct GridOptions {
  int steps;
  double eps_term;
};

/// A parsed problem file: the bridge problem plus resolved sim/grid options.
struct ProblemSpec {
  BridgeProblem problem;
  SimConfig sim;
  GridOptions grid;
};

namespace io {

/// Parses a JSON problem document; errors name the offending key.
ProblemSpec parse_problem_json(const std::string& text);

/// Loads and parses a problem file from disk.
ProblemSpec load_problem_file(const std::string& path);

/// Shortest round-trip decimal (17 significant digits), C locale.
std::string format_g17(double value);

/// Writes content to path via a temp file and atomic rename; no partial
/// files are left behind on failure.
void write_file_atomic(const std::string& path, const std::string& content);

/// CSV serializations (LF line endings, 17 significant digits).
std::string supply_csv(const SupplyBreakdown& supply);
std::string strategy_csv(const StrategyPath& path, Eigen::Index n, Eigen::Index m);
std::string simulate_csv(const SimResult& sim, double mean_err_norm, double cov_err_fro,
                         double j_closed_form);

}  // namespace io

}  // namespace eb
