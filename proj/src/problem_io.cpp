#include "eb/problem_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace eb::io {

namespace {

using nlohmann::json;

[[noreturn]] void key_error(const std::string& key, const std::string& what) {
  throw ValidationError("problem file key '" + key + "': " + what);
}

const json& require_key(const json& doc, const std::string& key) {
  const auto it = doc.find(key);
  if (it == doc.end()) {
    key_error(key, "missing");
  }
  return *it;
}

double get_number(const json& doc, const std::string& key) {
  const json& v = require_key(doc, key);
  if (!v.is_number()) {
    key_error(key, "expected a number");
  }
  return v.get<double>();
}

Vector get_vector(const json& doc, const std::string& key) {
  const json& v = require_key(doc, key);
  if (!v.is_array() || v.empty()) {
    key_error(key, "expected a nonempty array of numbers");
  }
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      key_error(key, "expected a nonempty array of numbers");
    }
    out(i) = v[i].get<double>();
  }
  return out;
}

Matrix get_matrix(const json& doc, const std::string& key) {
  const json& v = require_key(doc, key);
  if (!v.is_array() || v.empty() || !v[0].is_array() || v[0].empty()) {
    key_error(key, "expected an array of equally sized rows");
  }
  const std::size_t rows = v.size();
  const std::size_t cols = v[0].size();
  Matrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!v[r].is_array() || v[r].size() != cols) {
      key_error(key, "expected an array of equally sized rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!v[r][c].is_number()) {
        key_error(key, "expected numeric entries");
      }
      out(r, c) = v[r][c].get<double>();
    }
  }
  return out;
}

SpdMatrix get_spd(const json& doc, const std::string& key) {
  const Matrix m = get_matrix(doc, key);
  try {
    return SpdMatrix(m);
  } catch (const NotPositiveDefiniteError&) {
    key_error(key, "matrix is not positive definite");
  } catch (const ValidationError& e) {
    key_error(key, e.what());
  }
}

}  // namespace

ProblemSpec parse_problem_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("problem file: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ValidationError("problem file: top level must be a JSON object");
  }

  const Matrix a = get_matrix(doc, "A");
  const Matrix b = get_matrix(doc, "B");
  const Vector mu = get_vector(doc, "mu");
  SystemModel model(a, b, mu);  // its own messages already name A/B/mu

  const double horizon = get_number(doc, "T");
  if (!(horizon > 0.0)) {
    key_error("T", "must be positive");
  }

  const Vector alpha0 = get_vector(doc, "alpha0");
  const SpdMatrix pi0 = get_spd(doc, "Pi0");
  const Vector alphaT = get_vector(doc, "alphaT");
  const SpdMatrix piT = get_spd(doc, "PiT");
  if (alpha0.size() != model.n()) {
    key_error("alpha0", "length disagrees with A");
  }
  if (alphaT.size() != model.n()) {
    key_error("alphaT", "length disagrees with A");
  }
  if (pi0.dim() != model.n()) {
    key_error("Pi0", "dimension disagrees with A");
  }
  if (piT.dim() != model.n()) {
    key_error("PiT", "dimension disagrees with A");
  }

  BridgeProblem problem(std::move(model), horizon, GaussianState(alpha0, pi0),
                        GaussianState(alphaT, piT));

  SimConfig sim;
  sim.paths = Defaults::sim_paths;
  sim.dt = horizon / Defaults::dt_divisor;
  sim.seed = Defaults::sim_seed;
  sim.eps_term = Defaults::eps_term_factor * horizon;
  if (doc.contains("sim")) {
    const json& s = doc["sim"];
    if (!s.is_object()) {
      key_error("sim", "expected an object");
    }
    if (s.contains("paths")) {
      if (!s["paths"].is_number_integer()) {
        key_error("sim.paths", "expected an integer");
      }
      sim.paths = s["paths"].get<int>();
    }
    if (s.contains("dt")) {
      if (!s["dt"].is_number()) {
        key_error("sim.dt", "expected a number");
      }
      sim.dt = s["dt"].get<double>();
    }
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned() && !s["seed"].is_number_integer()) {
        key_error("sim.seed", "expected an integer");
      }
      sim.seed = s["seed"].get<std::uint64_t>();
    }
  }

  GridOptions grid{Defaults::strategy_steps, Defaults::eps_term_factor * horizon};
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    if (!g.is_object()) {
      key_error("grid", "expected an object");
    }
    if (g.contains("steps")) {
      if (!g["steps"].is_number_integer()) {
        key_error("grid.steps", "expected an integer");
      }
      grid.steps = g["steps"].get<int>();
    }
    if (g.contains("eps_term")) {
      if (!g["eps_term"].is_number()) {
        key_error("grid.eps_term", "expected a number");
      }
      grid.eps_term = g["eps_term"].get<double>();
    }
  }

  return ProblemSpec{std::move(problem), sim, grid};
}

ProblemSpec load_problem_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("problem file: cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_problem_json(buffer.str());
}

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ValidationError("cannot open '" + tmp + "' for writing");
    }
    out << content;
    if (!out.good()) {
      std::filesystem::remove(tmp);
      throw SolverError("short write to '" + tmp + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw SolverError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
  }
}

std::string supply_csv(const SupplyBreakdown& supply) {
  std::string out = "mean_part,cov_part,total\n";
  out += format_g17(supply.mean_part) + "," + format_g17(supply.cov_part) + "," +
         format_g17(supply.total) + "\n";
  return out;
}

std::string strategy_csv(const StrategyPath& path, Eigen::Index n, Eigen::Index m) {
  std::string out = "t";
  for (Eigen::Index i = 1; i <= n; ++i) {
    out += ",alpha_" + std::to_string(i);
  }
  for (Eigen::Index r = 1; r <= n; ++r) {
    for (Eigen::Index c = 1; c <= n; ++c) {
      out += ",Pi_" + std::to_string(r) + std::to_string(c);
    }
  }
  for (Eigen::Index i = 1; i <= m; ++i) {
    out += ",beta_" + std::to_string(i);
  }
  for (Eigen::Index r = 1; r <= m; ++r) {
    for (Eigen::Index c = 1; c <= n; ++c) {
      out += ",K_" + std::to_string(r) + std::to_string(c);
    }
  }
  out += ",cum_mean_cost,cum_cov_cost\n";

  for (std::size_t k = 0; k < path.size(); ++k) {
    out += format_g17(path.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) {
      out += "," + format_g17(path.alpha[k](i));
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        out += "," + format_g17(path.Pi[k](r, c));
      }
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      out += "," + format_g17(path.beta[k](i));
    }
    for (Eigen::Index r = 0; r < m; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        out += "," + format_g17(path.K[k](r, c));
      }
    }
    out += "," + format_g17(path.cum_mean_cost[k]) + "," + format_g17(path.cum_cov_cost[k]);
    out += "\n";
  }
  return out;
}

std::string simulate_csv(const SimResult& sim, double mean_err_norm, double cov_err_fro,
                         double j_closed_form) {
  std::string out = "supply_hat,supply_stderr,mean_err_norm,cov_err_fro,J_closed_form\n";
  out += format_g17(sim.supply_hat) + "," + format_g17(sim.supply_stderr) + "," +
         format_g17(mean_err_norm) + "," + format_g17(cov_err_fro) + "," +
         format_g17(j_closed_form) + "\n";
  return out;
}

}  // namespace eb::io
