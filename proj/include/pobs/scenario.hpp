// Scenario configs and the trajectory runner behind `pobs run`.
//
// Config schema (JSON):
//
//   name          string, required
//   n, epsilon    canonical pair on 2n levels, binds Q and P (optional)
//   hbar          positive real, default 1
//   dim           matrix dimension when no canonical pair is given
//   operators     {"name": "pauli_x" | "pauli_y" | "pauli_z" | "identity"
//                          | matrix literal | {"file": path}}   (Hermitian)
//   constants     {"name": real}
//   hamiltonian   expression string, required
//   initial_state {"basis_index": k} | {"amplitudes": [[re, im], ...]}
//                 | {"gaussian": {"center": x0, "width": w, "momentum": k}}
//                 | {"density_file": path}
//                 The gaussian packet exp(-(x_j - x0)^2 / (2 w^2) + i k x_j / hbar)
//                 lives on the coordinate levels x_j = j epsilon.
//   grid          {"tau": real > 0, "steps": int > 0, "t0": real}
//   observables   {"column": expression}   (written order is kept)
//   picture       "heisenberg" | "schrodinger", default heisenberg
//   seed          integer, default 0
//   halvings      integer in [0, 12], default 3; 0 skips the tau-halving study
//
// Relative file paths resolve against the config file's directory.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pobs/core_algebra.hpp"
#include "pobs/errors.hpp"
#include "pobs/evolution.hpp"
#include "pobs/report.hpp"

namespace pobs {

struct ScenarioConfig {
  std::string name;
  std::optional<int> n;
  double epsilon = 1.0;
  double hbar = 1.0;
  Index dim = 0;
  std::vector<std::pair<std::string, Matrix>> operators;
  std::vector<std::pair<std::string, double>> constants;
  std::string hamiltonian;
  std::optional<Index> basis_index;
  std::optional<Vector> amplitudes;
  std::optional<Matrix> density;
  TimeGrid grid;
  std::vector<std::pair<std::string, std::string>> observables;
  Picture picture = Picture::Heisenberg;
  std::uint64_t seed = 0;
  int halvings = 3;
};

/// Throws ConfigError carrying the JSON path of the offending field.
ScenarioConfig parse_scenario(const nlohmann::ordered_json& j, const std::filesystem::path& base_dir = ".");
ScenarioConfig load_scenario(const std::filesystem::path& file);

struct ScenarioResult {
  std::string name;
  std::vector<std::string> columns;   // step, t, observables..., residual columns
  std::vector<std::vector<double>> rows;
  std::vector<CheckReport> checks;

  bool pass() const;
  std::string trace_csv() const;
  nlohmann::ordered_json audit_json() const;
};

/// Builds the engine (canonical pair, bindings, Hamiltonian) for a config.
EvolutionEngine make_engine(const ScenarioConfig& cfg);

/// Runs the trajectory and the invariant suite. Evaluation failures during
/// stepping are rethrown as RuntimeFailure naming the step index.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

class RuntimeFailure : public Error {
 public:
  RuntimeFailure(long step, const std::string& message)
      : Error("step " + std::to_string(step) + ": " + message), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace pobs
