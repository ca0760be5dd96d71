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

// softtraj command-line driver.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "softtraj_cli/config.hpp"
#include "softtraj_cli/experiment.hpp"

namespace {

using namespace softtraj;
using namespace softtraj::cli;


std::array<int, kStrainModes> parse_orders(const std::string& text) {
  std::array<int, kStrainModes> out{};
  std::stringstream ss(text);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= kStrainModes) throw ConfigError("--orders: expected three comma-separated integers");
    try {
      std::size_t used = 0;
      out[i] = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--orders: '" + item + "' is not an integer");
    }
    ++i;
  }
  if (i != kStrainModes) throw ConfigError("--orders: expected three comma-separated integers");
  return out;
}

int do_run(const std::string& path, std::optional<std::uint64_t> seed,
           const std::optional<fs::path>& out_dir) {
  const ExperimentConfig cfg = load_config(path, seed);
  const RunOutcome r = run_experiment(cfg, resolve_run_dir(cfg, out_dir));
  const json& res = r.metadata.at("results");
  std::cout << "run " << cfg.name << ": status=" << r.status << " iterations="
            << res.value("iterations", 0) << " dir=" << r.dir.string();
  if (res.contains("criterion")) {
    std::cout << " criterion=" << (res["criterion"].value("met", false) ? "met" : "not-met");
  }
  std::cout << "\n";
  if (!r.error.empty()) std::cerr << "solver error: " << r.error << "\n";
  return r.exit_code;
}

int do_compare(const std::string& pa, const std::string& pb, std::optional<std::uint64_t> seed,
               const std::optional<fs::path>& out_dir) {
  const ExperimentConfig a = load_config(pa, seed);
  const ExperimentConfig b = load_config(pb, seed);
  const fs::path dir = out_dir ? *out_dir : output_root() / "compare" / (a.name + "_vs_" + b.name);
  const CompareOutcome c = compare_experiments(a, b, dir);
  std::cout << c.summary.dump(2) << "\n";
  return std::max(c.a.exit_code, c.b.exit_code);
}

int do_export(const std::string& run_dir) {
  const std::vector<std::string> files = export_plot_data(run_dir);
  for (const std::string& f : files) std::cout << (fs::path(run_dir) / "plot_data" / f).string() << "\n";
  return kExitOk;
}

int do_check(const std::string& system, const std::string& orders, int samples,
             std::uint64_t seed, double jac_tol, double hess_tol, bool hessian) {
  ChainLayout layout;
  double u_max = 0.0;
  std::string name = system;
  if (fs::is_regular_file(system)) {
    const ExperimentConfig cfg = load_config(system);
    layout = cfg.layout;
    u_max = cfg.task.u_max;
    name = cfg.preset;
  } else {
    const std::array<int, kStrainModes> o = parse_orders(orders);
    layout = preset_layout(system, StrainBasis{o}, SoftLinkParams{}, 0.05, 1.0, 8);
    u_max = system == "soft-pendubot" ? 10.0 : 200.0;
  }
  if (samples < 1) throw ConfigError("--samples: must be >= 1");
  const GvsModel model(layout, name);
  DerivativeCheckOptions opt = derivative_check_options(layout, u_max, samples, seed);
  opt.check_hessian = hessian;
  const DerivativeCheckReport rep = check_derivatives(model, opt);
  const bool pass = rep.max_jacobian_error < jac_tol &&
                    (!rep.hessian_checked || rep.max_hessian_error < hess_tol);
  const json out{{"system", name},
                 {"n", layout.n()},
                 {"samples", rep.samples},
                 {"seed", seed},
                 {"max_jacobian_error", rep.max_jacobian_error},
                 {"jacobian_tolerance", jac_tol},
                 {"hessian_checked", rep.hessian_checked},
                 {"max_hessian_error", rep.max_hessian_error},
                 {"hessian_tolerance", hess_tol},
                 {"worst_jacobian_sample", rep.worst_jacobian_sample},
                 {"worst_entry", {rep.worst_row, rep.worst_col}},
                 {"passed", pass}};
  std::cout << out.dump(2) << "\n";
  return pass ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"softtraj: trajectory optimisation for rigid and soft chains"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Override the config seed");
  app.fallthrough();

  std::string run_config;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("config", run_config, "Config file (JSON)")->required();
  run->add_option("--out", out_dir, "Run directory (default: output.dir under the output root)");

  std::string cfg_a, cfg_b, cmp_out;
  auto* compare = app.add_subcommand("compare", "Run two experiments and compare their traces");
  compare->add_option("config_a", cfg_a)->required();
  compare->add_option("config_b", cfg_b)->required();
  compare->add_option("--out", cmp_out, "Comparison directory");

  std::string run_dir;
  auto* exp = app.add_subcommand("export-plot-data", "Write plot series for a run directory");
  exp->add_option("run_dir", run_dir)->required();

  std::string system, orders = "2,2,2";
  int samples = 100;
  double jac_tol = 1e-5, hess_tol = 1e-4;
  bool no_hessian = false;
  auto* chk = app.add_subcommand("check-derivatives",
                                 "Compare model derivatives against finite differences");
  chk->add_option("system", system, "Preset name or config file")->required();
  chk->add_option("--orders", orders, "Strain orders kappa,stretch,shear (-1 disables)");
  chk->add_option("--samples", samples, "Number of random samples");
  chk->add_option("--jac-tol", jac_tol, "Jacobian relative-error tolerance");
  chk->add_option("--hess-tol", hess_tol, "Hessian relative-error tolerance");
  chk->add_flag("--no-hessian", no_hessian, "Skip the second-order check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::optional<std::uint64_t> seed_override =
      app.get_option("--seed")->count() > 0 ? std::optional<std::uint64_t>(seed) : std::nullopt;
  try {
    if (*run) {
      return do_run(run_config, seed_override,
                    out_dir.empty() ? std::nullopt : std::optional<fs::path>(out_dir));
    }
    if (*compare) {
      return do_compare(cfg_a, cfg_b, seed_override,
                        cmp_out.empty() ? std::nullopt : std::optional<fs::path>(cmp_out));
    }
    if (*exp) return do_export(run_dir);
    if (*chk) {
      return do_check(system, orders, samples, seed_override.value_or(1), jac_tol, hess_tol,
                      !no_hessian);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ArtifactError& e) {
    std::cerr << "artifact error: " << e.what() << "\n";
    return kExitArtifacts;
  } catch (const Error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "artifact error: " << e.what() << "\n";
    return kExitArtifacts;
  }
  return kExitConfig;
}
