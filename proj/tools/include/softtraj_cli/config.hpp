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

// Declarative experiment configuration.
//
// A config is one JSON document. Fields that are absent take their defaults;
// the fully resolved document (every default filled in) is what a run
// echoes into its metadata, so it alone reproduces the run.

#ifndef SOFTTRAJ_CLI_CONFIG_HPP
#define SOFTTRAJ_CLI_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "softtraj/box_iddp.hpp"
#include "softtraj/collocation.hpp"
#include "softtraj/gvs.hpp"
#include "softtraj/nmpc.hpp"
#include "softtraj/warmstart.hpp"

namespace softtraj::cli {

using nlohmann::json;

enum class SolverKind { box_iddp, dc, nmpc };
std::string to_string(SolverKind kind);

struct DisturbanceConfig {
  int step = -1;  // plant step after which the kick lands; -1 disables
  double magnitude = 0.0;
  std::vector<std::string> coordinates;  // velocity entries, by coordinate name
  bool active() const { return step >= 0 && magnitude > 0.0; }
};

struct ExperimentConfig {
  std::string name;
  std::string preset;
  ChainLayout layout;
  SwingUpSpec task;
  SolverKind solver = SolverKind::box_iddp;
  BoxIddpSettings iddp;
  AlmSettings alm;
  NmpcSettings nmpc;
  DisturbanceConfig disturbance;
  bool ladder = false;
  bool split_linear_modes = false;
  bool feedback_lift = false;
  std::string init = "zeros";  // zeros | pseudo-random
  double init_fraction = 0.1;
  std::uint64_t seed = 1;
  std::string output_dir;
  /// The fully resolved document.
  json resolved;

  /// Swing-up tolerance on revolute joints: tighter for the rigid system.
  double angle_tolerance() const;
};

/// Validates `doc` and fills in defaults. Throws ConfigError whose message
/// starts with the offending field path, e.g. "horizon.t_f: required".
ExperimentConfig parse_config(const json& doc, std::optional<std::uint64_t> seed_override = {});

/// Reads and parses a config file; unreadable or non-JSON files are
/// ConfigErrors as well.
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override = {});

/// Layout of a named preset with the given rod and strain orders.
ChainLayout preset_layout(const std::string& preset, const StrainBasis& basis,
                          const SoftLinkParams& rod, double joint_damping, double cart_mass,
                          int quadrature_order);

}  // namespace softtraj::cli

#endif  // SOFTTRAJ_CLI_CONFIG_HPP
