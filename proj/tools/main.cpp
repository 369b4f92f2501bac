#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "eb/bridge.hpp"
#include "eb/montecarlo.hpp"
#include "eb/problem_io.hpp"
#include "eb/strategy.hpp"
#include "eb/verify.hpp"

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;
constexpr int kExitConditioning = 3;
constexpr int kExitStatistical = 4;

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    eb::io::write_file_atomic(out_path, content);
  }
}

int cmd_supply(const std::string& file, const std::string& out_path) {
  const eb::ProblemSpec spec = eb::io::load_problem_file(file);
  const eb::SupplyBreakdown supply = eb::bridge::total_supply(spec.problem);
  std::cout << "mean_part=" << eb::io::format_g17(supply.mean_part) << "\n"
            << "cov_part=" << eb::io::format_g17(supply.cov_part) << "\n"
            << "total=" << eb::io::format_g17(supply.total) << "\n";
  if (!out_path.empty()) {
    eb::io::write_file_atomic(out_path, eb::io::supply_csv(supply));
  }
  return 0;
}

int cmd_strategy(const std::string& file, int steps_flag, double eps_flag,
                 const std::string& out_path) {
  const eb::ProblemSpec spec = eb::io::load_problem_file(file);
  const int steps = steps_flag > 0 ? steps_flag : spec.grid.steps;
  const double eps = eps_flag > 0.0 ? eps_flag : spec.grid.eps_term;
  const eb::StrategyPath path = eb::strategy::integrate_bridge(spec.problem, steps, eps);
  emit(eb::io::strategy_csv(path, spec.problem.model.n(), spec.problem.model.m()), out_path);
  return 0;
}

int cmd_simulate(const std::string& file, int paths_flag, double dt_flag,
                 std::int64_t seed_flag, const std::string& out_path) {
  const eb::ProblemSpec spec = eb::io::load_problem_file(file);
  eb::SimConfig config = spec.sim;
  if (paths_flag > 0) {
    config.paths = paths_flag;
  }
  if (dt_flag > 0.0) {
    config.dt = dt_flag;
  }
  if (seed_flag >= 0) {
    config.seed = static_cast<std::uint64_t>(seed_flag);
  }

  const eb::StrategyPath path =
      eb::strategy::integrate_bridge(spec.problem, spec.grid.steps, spec.grid.eps_term);
  const eb::SimResult sim = eb::montecarlo::simulate(spec.problem, path, config);
  const eb::SupplyBreakdown supply = eb::bridge::total_supply(spec.problem);

  const double mean_err = (sim.mean_hat - spec.problem.theta.alpha).norm();
  const double cov_err = (sim.cov_hat - spec.problem.theta.Pi.mat()).norm();
  emit(eb::io::simulate_csv(sim, mean_err, cov_err, supply.total), out_path);

  const bool consistent = std::abs(sim.supply_hat - supply.total) <= 3.0 * sim.supply_stderr;
  return consistent ? 0 : kExitStatistical;
}

int cmd_verify(const std::string& file, const std::string& which) {
  const eb::ProblemSpec spec = eb::io::load_problem_file(file);
  eb::verify::CheckList checks;
  const eb::BridgeProblem* problem = &spec.problem;

  const auto add = [&](const eb::verify::CheckResult& r) { checks.push_back(r); };
  const auto add_all = [&](const eb::verify::CheckList& list) {
    checks.insert(checks.end(), list.begin(), list.end());
  };

  if (which == "boundary" || which == "all") {
    add(eb::verify::check_boundary());
  }
  if (which == "hje" || which == "all") {
    add_all(eb::verify::check_hje(problem));
  }
  if (which == "gradient" || which == "all") {
    add(eb::verify::check_gradient(problem));
  }
  if (which == "oracle" || which == "all") {
    add_all(eb::verify::check_oracle(problem));
  }
  if (which == "dissipation" || which == "all") {
    add_all(eb::verify::check_dissipation(problem));
  }
  if (which == "markov" || which == "all") {
    add_all(eb::verify::check_markov());
  }
  if (checks.empty()) {
    throw eb::ValidationError("verify: unknown check '" + which +
                              "' (expected hje, boundary, gradient, oracle, dissipation, "
                              "markov or all)");
  }

  bool all_pass = true;
  for (const auto& check : checks) {
    all_pass = all_pass && check.pass;
    std::cout << (check.pass ? "PASS" : "FAIL") << ": " << check.name << " — " << check.detail
              << "\n";
  }
  return all_pass ? 0 : kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum relative-entropy noise supply for linear Gaussian bridges"};
  app.require_subcommand(1);

  std::string file;
  std::string out_path;
  std::string which = "all";
  int steps = 0;
  double eps_term = 0.0;
  int paths = 0;
  double dt = 0.0;
  std::int64_t seed = -1;

  CLI::App* supply = app.add_subcommand("supply", "Closed-form minimum supply");
  supply->add_option("file", file, "problem JSON file")->required();
  supply->add_option("--out", out_path, "optional CSV output path");

  CLI::App* strat = app.add_subcommand("strategy", "Optimal strategy trajectory CSV");
  strat->add_option("file", file, "problem JSON file")->required();
  strat->add_option("--steps", steps, "grid steps (default from file or 512)");
  strat->add_option("--eps-term", eps_term, "terminal layer width (default 1e-6*T)");
  strat->add_option("--out", out_path, "CSV output path (stdout if omitted)");

  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo validation run");
  sim->add_option("file", file, "problem JSON file")->required();
  sim->add_option("--paths", paths, "number of sample paths");
  sim->add_option("--dt", dt, "Euler-Maruyama step");
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_option("--out", out_path, "CSV output path (stdout if omitted)");

  CLI::App* verify = app.add_subcommand("verify", "Run verification checks");
  verify->add_option("file", file, "problem JSON file")->required();
  verify->add_option("which", which,
                     "hje | boundary | gradient | oracle | dissipation | markov | all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (supply->parsed()) {
      return cmd_supply(file, out_path);
    }
    if (strat->parsed()) {
      return cmd_strategy(file, steps, eps_term, out_path);
    }
    if (sim->parsed()) {
      return cmd_simulate(file, paths, dt, seed, out_path);
    }
    if (verify->parsed()) {
      return cmd_verify(file, which);
    }
  } catch (const eb::ConditioningError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConditioning;
  } catch (const eb::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitValidation;
}
