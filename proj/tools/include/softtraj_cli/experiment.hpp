/*
 Copyright 2026 The softtraj Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// Experiment execution: run, compare, plot-data export and derivative
// checks, each producing files under a run directory.

#ifndef SOFTTRAJ_CLI_EXPERIMENT_HPP
#define SOFTTRAJ_CLI_EXPERIMENT_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "softtraj_cli/artifacts.hpp"
#include "softtraj_cli/config.hpp"

namespace softtraj::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitArtifacts = 4;

/// Terminal swing-up test on the revolute joints.
struct SwingUpCheck {
  double angle_error = 0.0;  // max |q_j(t_f) - target_j| over revolute joints
  double speed_norm = 0.0;   // |qdot(t_f)|
  double angle_tolerance = 0.1;
  double speed_tolerance = 0.5;
  bool controls_within_bounds = true;
  /// Soft systems must also come to rest; the rigid test is angle only.
  bool check_speed = true;
  bool met() const;
  nlohmann::json to_json() const;
};

SwingUpCheck check_swing_up(const ExperimentConfig& cfg, const OcpProblem& prob,
                            const std::vector<VectorXd>& xs, const std::vector<VectorXd>& us);

/// time, q..., q..._dot, u_<joint>..., link<i>.mean_{kappa,stretch,shear}.
/// The last row has no control and leaves those fields empty.
Table trajectory_table(const GvsModel& model, double h, const std::vector<VectorXd>& xs,
                       const std::vector<VectorXd>& us);
Table trace_table(const SolverTrace& trace);

/// Root for relative output directories: $SOFTTRAJ_OUTPUT_ROOT or ".".
fs::path output_root();
fs::path resolve_run_dir(const ExperimentConfig& cfg, const std::optional<fs::path>& override_dir);

struct RunOutcome {
  int exit_code = kExitOk;
  fs::path dir;
  std::string status;
  std::string error;
  /// Trace of the solve being reported (the final stage for a ladder).
  SolverTrace trace;
  nlohmann::json metadata;
};

/// Executes the configured experiment and writes trajectory.csv, trace.csv
/// and metadata.json into `dir`. Solver failures are reported through
/// exit_code and metadata, not exceptions.
RunOutcome run_experiment(const ExperimentConfig& cfg, const fs::path& dir);

/// Throws ConfigError unless both configs pose the same problem.
void check_comparable(const ExperimentConfig& a, const ExperimentConfig& b);

struct CompareOutcome {
  RunOutcome a;
  RunOutcome b;
  nlohmann::json summary;
};

/// Runs a then b (sequentially) under dir/a and dir/b and writes
/// compare.csv plus summary.json.
CompareOutcome compare_experiments(const ExperimentConfig& a, const ExperimentConfig& b,
                                   const fs::path& dir);

/// Writes plot_data/ with one series file per panel and plot_index.json.
/// Returns the written file names. Throws ArtifactError.
std::vector<std::string> export_plot_data(const fs::path& run_dir);

/// Sampling box for derivative checks: joints over a full turn (or a
/// metre), strain coefficients within moderate deformation.
DerivativeCheckOptions derivative_check_options(const ChainLayout& layout, double u_max,
                                                int samples, std::uint64_t seed);

}  // namespace softtraj::cli

#endif  // SOFTTRAJ_CLI_EXPERIMENT_HPP
