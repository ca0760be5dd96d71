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

#include "softtraj_cli/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>

#include <Eigen/Core>

#include "softtraj/integrator.hpp"
#include "softtraj/version.hpp"

namespace softtraj::cli {

namespace {

constexpr double kThreshold = 0.05;  // iterations-to-threshold: cost within 5% of final

struct Coordinate {
  std::string name;
  std::string kind;  // prismatic | revolute | strain
  std::string unit;
};

std::vector<Coordinate> coordinates(const ChainLayout& layout) {
  static const char* kModes[] = {"kappa", "stretch", "shear"};
  static const char* kUnits[] = {"1/m", "1", "1"};
  std::vector<Coordinate> out;
  int link = 0;
  for (const ChainElement& e : layout.elements) {
    if (const auto* l = std::get_if<SoftLink>(&e)) {
      for (int mode = 0; mode < kStrainModes; ++mode) {
        for (int k = 0; k <= l->basis.order[mode]; ++k) {
          out.push_back({"link" + std::to_string(link) + "." + kModes[mode] + std::to_string(k),
                         "strain", kUnits[mode]});
        }
      }
      ++link;
    } else {
      const auto& j = std::get<RigidJoint>(e);
      const bool prismatic = j.kind == JointKind::prismatic;
      out.push_back({j.name, prismatic ? "prismatic" : "revolute", prismatic ? "m" : "rad"});
    }
  }
  return out;
}

std::vector<Coordinate> controls(const ChainLayout& layout) {
  std::vector<Coordinate> out;
  for (const ChainElement& e : layout.elements) {
    if (const auto* j = std::get_if<RigidJoint>(&e); j && j->actuated) {
      const bool prismatic = j->kind == JointKind::prismatic;
      out.push_back({"u_" + j->name, prismatic ? "force" : "torque", prismatic ? "N" : "N m"});
    }
  }
  return out;
}

// Links whose strain is reported: none when every basis is empty (rigid).
int strained_links(const ChainLayout& layout) {
  for (const Coordinate& c : coordinates(layout)) {
    if (c.kind == "strain") return layout.soft_link_count();
  }
  return 0;
}

json coordinate_json(const std::vector<Coordinate>& cs) {
  json a = json::array();
  for (const Coordinate& c : cs) a.push_back({{"name", c.name}, {"kind", c.kind}, {"unit", c.unit}});
  return a;
}

json vector_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json trace_summary(const SolverTrace& trace) {
  double total = 0.0;
  for (const IterationRecord& r : trace.iterations()) total += r.wall_time;
  return {{"status", to_string(trace.status)},
          {"iterations", trace.size()},
          {"accepted_iterations", trace.accepted_count()},
          {"final_cost", trace.empty() ? std::nan("") : trace.back().cost},
          {"mean_wall_time", trace.mean_wall_time()},
          {"total_wall_time", total},
          {"iterations_to_threshold", trace.iterations_to_within(kThreshold)},
          {"threshold_fraction", kThreshold}};
}

bool is_failure(SolverStatus s) {
  return s == SolverStatus::failed || s == SolverStatus::regularization_failure;
}

std::vector<VectorXd> initial_controls(const ExperimentConfig& cfg, const OcpProblem& prob) {
  if (cfg.init == "pseudo-random") {
    return pseudo_random_controls(prob.N, prob.bounds, cfg.seed, cfg.init_fraction);
  }
  return std::vector<VectorXd>(prob.N, VectorXd::Zero(prob.control_dim()));
}

std::vector<VectorXd> implicit_rollout(const GvsModel& model, const OcpProblem& prob,
                                       const std::vector<VectorXd>& us,
                                       const BoxIddpSettings& iddp) {
  ImplicitStepSettings step = iddp.step;
  step.h = prob.h;
  return rollout(model, prob.x0, us, step);
}

double guess_cost(const GvsModel& model, const OcpProblem& prob, const std::vector<VectorXd>& us,
                  const BoxIddpSettings& iddp, Quadrature quad) {
  try {
    return trajectory_cost(prob, implicit_rollout(model, prob, us, iddp), us, quad);
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// Result of one solver branch before it is written out.
struct Solved {
  std::vector<VectorXd> xs;
  std::vector<VectorXd> us;
  SolverTrace trace;
  json results = json::object();
  bool have_trajectory = false;
  std::string error;
};

Solved solve_shooting(const ExperimentConfig& cfg, const GvsModel& model, const OcpProblem& prob,
                      const std::vector<VectorXd>& u_init) {
  Solved s;
  s.results["initial_cost"] =
      number_or_null(guess_cost(model, prob, u_init, cfg.iddp, Quadrature::left_rectangle));
  BoxIddpResult r = solve_box_iddp(prob, model, u_init, cfg.iddp);
  s.xs = std::move(r.policy.xs);
  s.us = std::move(r.policy.us);
  s.trace = std::move(r.trace);
  s.have_trajectory = true;
  return s;
}

Solved solve_dc(const ExperimentConfig& cfg, const GvsModel& model, const OcpProblem& prob,
                const std::vector<VectorXd>& u_init, const fs::path& dir) {
  Solved s;
  const Transcription tr(prob);
  VectorXd z0;
  try {
    z0 = tr.pack(implicit_rollout(model, prob, u_init, cfg.iddp), u_init);
  } catch (const Error&) {
    z0 = z_from_interpolation(tr, u_init);
  }
  s.results["initial_cost"] = transcription_cost(tr, z0);
  CollocationResult r = solve_collocation(prob, model, z0, cfg.alm);
  s.results["defect_norm"] = r.defect_norm;
  s.results["inner_steps"] = r.inner_steps;

  Table jac{{"row", "col", "value"}, {}};
  const SparseMatrixd D = defect_jacobian(tr, model, r.z);
  for (int c = 0; c < D.outerSize(); ++c) {
    for (SparseMatrixd::InnerIterator it(D, c); it; ++it) {
      jac.add_row({static_cast<double>(it.row()), static_cast<double>(it.col()), it.value()});
    }
  }
  write_csv(dir / "dc_jacobian.csv", jac);
  Table def{{"index", "value"}, {}};
  const VectorXd d = defects(tr, model, r.z);
  for (Eigen::Index i = 0; i < d.size(); ++i) def.add_row({static_cast<double>(i), d(i)});
  write_csv(dir / "dc_defects.csv", def);

  s.xs = std::move(r.xs);
  s.us = std::move(r.us);
  s.trace = std::move(r.trace);
  s.have_trajectory = true;
  return s;
}

Solved solve_ladder(const ExperimentConfig& cfg, const std::vector<VectorXd>& u_init,
                    const fs::path& dir) {
  Solved s;
  LadderSettings ls;
  ls.solver = cfg.solver == SolverKind::dc ? LadderSolver::collocation : LadderSolver::box_iddp;
  ls.iddp = cfg.iddp;
  ls.alm = cfg.alm;
  ls.feedback_lift = cfg.feedback_lift;
  const std::vector<LadderStage> ladder = ladder_to(cfg.layout, cfg.split_linear_modes);
  const LadderResult lr = run_ladder(ladder, cfg.task, u_init, ls);
  json stages = json::array();
  for (std::size_t i = 0; i < lr.stages.size(); ++i) {
    const StageOutcome& st = lr.stages[i];
    const std::string file = "stages/" + std::to_string(i) + "_" + st.name + "_trace.csv";
    write_csv(dir / file, trace_table(st.trace));
    json e = trace_summary(st.trace);
    e["name"] = st.name;
    e["n"] = st.n;
    e["initial_cost"] = number_or_null(st.initial_cost);
    e["trace"] = file;
    stages.push_back(e);
  }
  s.results["stages"] = stages;
  if (!lr.completed) {
    s.error = "ladder stage '" + lr.failed_stage + "' failed: " + lr.error;
    s.trace.status = SolverStatus::failed;
    return s;
  }
  const StageOutcome& last = lr.final_stage();
  s.results["initial_cost"] = number_or_null(last.initial_cost);
  s.xs = last.policy.xs;
  s.us = last.policy.us;
  s.trace = last.trace;
  s.have_trajectory = true;
  return s;
}

Solved solve_nmpc(const ExperimentConfig& cfg, const GvsModel& model, const OcpProblem& prob,
                  const std::vector<VectorXd>& u_init, const fs::path& dir) {
  Solved s;
  const BoxIddpResult plan = solve_box_iddp(prob, model, u_init, cfg.iddp);
  write_csv(dir / "plan_trajectory.csv",
            trajectory_table(model, prob.h, plan.policy.xs, plan.policy.us));
  write_csv(dir / "plan_trace.csv", trace_table(plan.trace));
  s.results["plan"] = trace_summary(plan.trace);
  s.results["plan"]["criterion"] = check_swing_up(cfg, prob, plan.policy.xs, plan.policy.us).to_json();

  NmpcSettings settings = cfg.nmpc;
  if (cfg.disturbance.active()) {
    const std::vector<std::string> names = cfg.layout.coordinate_names();
    std::vector<int> idx;
    for (const std::string& c : cfg.disturbance.coordinates) {
      idx.push_back(static_cast<int>(std::find(names.begin(), names.end(), c) - names.begin()));
    }
    settings.disturbance = seeded_impulse(model.state_dim(), idx, cfg.disturbance.magnitude,
                                          cfg.disturbance.step, cfg.seed);
    s.results["disturbance"] = {{"step", settings.disturbance.step},
                                {"delta", vector_json(settings.disturbance.delta)}};
  }
  const ClosedLoopResult cl =
      run_closed_loop(model, model, prob.x0, prob, settings, plan.policy.us);
  for (std::size_t k = 0; k < cl.traces.size(); ++k) {
    const SolverTrace& t = cl.traces[k];
    IterationRecord rec;
    for (const IterationRecord& r : t.iterations()) rec.wall_time += r.wall_time;
    if (!t.empty()) {
      rec.cost = t.back().cost;
      rec.merit = t.back().merit;
      rec.gradient_norm = t.back().gradient_norm;
      rec.regularization = t.back().regularization;
      rec.alpha = t.back().alpha;
      rec.accepted = !is_failure(t.status);
    }
    s.trace.append(rec);
  }
  s.trace.status = cl.degraded_steps == 0 ? SolverStatus::converged : SolverStatus::not_converged;
  s.results["degraded_steps"] = cl.degraded_steps;
  s.xs = cl.xs;
  s.us = cl.us;
  s.have_trajectory = true;

  if (settings.disturbance.active()) {
    // Open-loop baseline: the controls an undisturbed loop applies, replayed
    // blind through the same kick.
    NmpcSettings calm = settings;
    calm.disturbance = {};
    const ClosedLoopResult nominal =
        run_closed_loop(model, model, prob.x0, prob, calm, plan.policy.us);
    json replay;
    try {
      const std::vector<VectorXd> xs =
          replay_open_loop(model, prob.x0, nominal.us, prob.h, settings.disturbance);
      write_csv(dir / "replay_trajectory.csv", trajectory_table(model, prob.h, xs, nominal.us));
      replay["criterion"] = check_swing_up(cfg, prob, xs, nominal.us).to_json();
    } catch (const IntegrationError& e) {
      replay["criterion"] = nullptr;
      replay["error"] = e.what();
    }
    replay["nominal_criterion"] = check_swing_up(cfg, prob, nominal.xs, nominal.us).to_json();
    s.results["open_loop_replay"] = replay;
  }
  return s;
}

void remove_stale(const fs::path& dir) {
  for (const char* f : {"trajectory.csv", "trace.csv", "metadata.json", "dc_jacobian.csv",
                        "dc_defects.csv", "plan_trajectory.csv", "plan_trace.csv",
                        "replay_trajectory.csv"}) {
    fs::remove(dir / f);
  }
  fs::remove_all(dir / "stages");
  fs::remove_all(dir / "plot_data");
}

}  // namespace

bool SwingUpCheck::met() const {
  return angle_error < angle_tolerance && (!check_speed || speed_norm < speed_tolerance) &&
         controls_within_bounds;
}

json SwingUpCheck::to_json() const {
  return {{"angle_error", angle_error},
          {"angle_tolerance", angle_tolerance},
          {"speed_norm", speed_norm},
          {"speed_tolerance", speed_tolerance},
          {"speed_checked", check_speed},
          {"controls_within_bounds", controls_within_bounds},
          {"met", met()}};
}

SwingUpCheck check_swing_up(const ExperimentConfig& cfg, const OcpProblem& prob,
                            const std::vector<VectorXd>& xs, const std::vector<VectorXd>& us) {
  SwingUpCheck c;
  c.angle_tolerance = cfg.angle_tolerance();
  const int n = cfg.layout.n();
  c.check_speed = n > static_cast<int>(cfg.layout.joint_coordinates().size());
  const VectorXd& x = xs.back();
  const std::vector<Coordinate> cs = coordinates(cfg.layout);
  for (int i = 0; i < n; ++i) {
    if (cs[static_cast<std::size_t>(i)].kind == "revolute") {
      c.angle_error = std::max(c.angle_error, std::abs(x(i) - prob.cost.x_target(i)));
    }
  }
  if (!x.allFinite()) c.angle_error = std::numeric_limits<double>::infinity();
  c.speed_norm = x.allFinite() ? x.tail(n).norm() : std::numeric_limits<double>::infinity();
  for (const VectorXd& u : us) {
    if (!prob.bounds.contains(u, 1e-12)) c.controls_within_bounds = false;
  }
  return c;
}

Table trajectory_table(const GvsModel& model, double h, const std::vector<VectorXd>& xs,
                       const std::vector<VectorXd>& us) {
  const ChainLayout& layout = model.layout();
  const int n = layout.n();
  const std::vector<Coordinate> cs = coordinates(layout);
  const std::vector<Coordinate> ctl = controls(layout);
  Table t;
  t.columns.push_back("time");
  for (const Coordinate& c : cs) t.columns.push_back(c.name);
  for (const Coordinate& c : cs) t.columns.push_back(c.name + "_dot");
  for (const Coordinate& c : ctl) t.columns.push_back(c.name);
  const int links = strained_links(layout);
  for (int l = 0; l < links; ++l) {
    for (const char* mode : {"kappa", "stretch", "shear"}) {
      t.columns.push_back("link" + std::to_string(l) + ".mean_" + mode);
    }
  }
  for (std::size_t k = 0; k < xs.size(); ++k) {
    std::vector<double> row;
    row.reserve(t.columns.size());
    row.push_back(static_cast<double>(k) * h);
    for (int i = 0; i < 2 * n; ++i) row.push_back(xs[k](i));
    for (std::size_t j = 0; j < ctl.size(); ++j) {
      row.push_back(k < us.size() ? us[k](static_cast<Eigen::Index>(j)) : std::nan(""));
    }
    if (links > 0) {
      const std::vector<Vector3d> ms = xs[k].allFinite()
                                           ? model.mean_strain(xs[k].head(n))
                                           : std::vector<Vector3d>(links, Vector3d::Constant(NAN));
      for (const Vector3d& v : ms) {
        for (int i = 0; i < 3; ++i) row.push_back(v(i));
      }
    }
    t.add_row(std::move(row));
  }
  return t;
}

Table trace_table(const SolverTrace& trace) {
  Table t{{"iteration", "cost", "merit", "gradient_norm", "constraint_violation", "regularization",
           "alpha", "accepted", "wall_time"},
          {}};
  for (const IterationRecord& r : trace.iterations()) {
    t.add_row({static_cast<double>(r.iteration), r.cost, r.merit, r.gradient_norm,
               r.constraint_violation, r.regularization, r.alpha, r.accepted ? 1.0 : 0.0,
               r.wall_time});
  }
  return t;
}

fs::path output_root() {
  const char* env = std::getenv("SOFTTRAJ_OUTPUT_ROOT");
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path(".");
}

fs::path resolve_run_dir(const ExperimentConfig& cfg, const std::optional<fs::path>& override_dir) {
  if (override_dir) return *override_dir;
  const fs::path p(cfg.output_dir);
  return p.is_absolute() ? p : output_root() / p;
}

RunOutcome run_experiment(const ExperimentConfig& cfg, const fs::path& dir) {
  RunOutcome out;
  out.dir = dir;
  fs::create_directories(dir);
  remove_stale(dir);

  const GvsModel model(cfg.layout, cfg.preset);
  json meta;
  meta["format_version"] = 1;
  meta["software"] = {{"name", "softtraj"},
                      {"version", kVersion},
                      {"compiler", __VERSION__},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)}};
  meta["config"] = cfg.resolved;
  meta["seed"] = cfg.seed;
  meta["system"] = {{"name", cfg.preset},
                    {"n", model.layout().n()},
                    {"m", model.layout().m()},
                    {"soft_links", strained_links(model.layout())},
                    {"coordinates", coordinate_json(coordinates(cfg.layout))},
                    {"controls", coordinate_json(controls(cfg.layout))}};
  meta["files"] = {{"trajectory", "trajectory.csv"}, {"trace", "trace.csv"}};

  Solved s;
  OcpProblem prob;
  try {
    prob = cfg.task.build(model);
    const std::vector<VectorXd> u_init = initial_controls(cfg, prob);
    if (cfg.ladder) {
      s = solve_ladder(cfg, u_init, dir);
    } else if (cfg.solver == SolverKind::box_iddp) {
      s = solve_shooting(cfg, model, prob, u_init);
    } else if (cfg.solver == SolverKind::dc) {
      s = solve_dc(cfg, model, prob, u_init, dir);
    } else {
      s = solve_nmpc(cfg, model, prob, u_init, dir);
    }
  } catch (const Error& e) {
    s.error = e.what();
    s.trace.status = SolverStatus::failed;
    s.have_trajectory = false;
  }

  json results = s.results;
  json summary = trace_summary(s.trace);
  for (auto it = summary.begin(); it != summary.end(); ++it) {
    if (it.key() != "status") results[it.key()] = it.value();
  }
  if (s.have_trajectory) {
    results["criterion"] = check_swing_up(cfg, prob, s.xs, s.us).to_json();
    write_csv(dir / "trajectory.csv", trajectory_table(model, prob.h, s.xs, s.us));
  } else {
    meta["files"].erase("trajectory");
  }
  write_csv(dir / "trace.csv", trace_table(s.trace));

  out.status = to_string(s.trace.status);
  out.error = s.error;
  out.exit_code = !s.error.empty() || is_failure(s.trace.status) ? kExitSolver : kExitOk;
  meta["status"] = out.status;
  meta["exit_code"] = out.exit_code;
  if (!s.error.empty()) meta["error"] = s.error;
  meta["results"] = results;
  write_json(dir / "metadata.json", meta);
  out.trace = std::move(s.trace);
  out.metadata = std::move(meta);
  return out;
}

void check_comparable(const ExperimentConfig& a, const ExperimentConfig& b) {
  for (const char* block : {"system", "cost", "task", "bounds"}) {
    if (a.resolved.at(block) != b.resolved.at(block)) {
      throw ConfigError(std::string(block) + ": the compared configs differ (" + a.name +
                        " vs " + b.name + ")");
    }
  }
  if (a.resolved.at("horizon").at("t_f") != b.resolved.at("horizon").at("t_f")) {
    throw ConfigError("horizon.t_f: the compared configs differ (" + a.name + " vs " + b.name + ")");
  }
}

CompareOutcome compare_experiments(const ExperimentConfig& a, const ExperimentConfig& b,
                                   const fs::path& dir) {
  check_comparable(a, b);
  CompareOutcome out;
  out.a = run_experiment(a, dir / "a");
  out.b = run_experiment(b, dir / "b");

  const auto& ra = out.a.trace.iterations();
  const auto& rb = out.b.trace.iterations();
  Table t{{"iteration", "cost_a", "wall_time_a", "cost_b", "wall_time_b"}, {}};
  for (std::size_t i = 0; i < std::max(ra.size(), rb.size()); ++i) {
    const double nan = std::nan("");
    t.add_row({static_cast<double>(i), i < ra.size() ? ra[i].cost : nan,
               i < ra.size() ? ra[i].wall_time : nan, i < rb.size() ? rb[i].cost : nan,
               i < rb.size() ? rb[i].wall_time : nan});
  }
  write_csv(dir / "compare.csv", t);

  auto side = [](const ExperimentConfig& cfg, const RunOutcome& r) {
    json j = trace_summary(r.trace);
    j["name"] = cfg.name;
    j["solver"] = to_string(cfg.solver);
    j["ladder"] = cfg.ladder;
    j["run_dir"] = r.dir.filename().string();
    j["exit_code"] = r.exit_code;
    const json& res = r.metadata.at("results");
    j["criterion_met"] = res.contains("criterion") ? res["criterion"]["met"] : json(false);
    return j;
  };
  const double ma = out.a.trace.mean_wall_time();
  const double mb = out.b.trace.mean_wall_time();
  out.summary = {{"a", side(a, out.a)},
                 {"b", side(b, out.b)},
                 {"wall_time_ratio_a_over_b", mb > 0.0 ? json(ma / mb) : json(nullptr)},
                 {"threshold_fraction", kThreshold}};
  write_json(dir / "summary.json", out.summary);
  return out;
}

std::vector<std::string> export_plot_data(const fs::path& run_dir) {
  const json meta = read_json(run_dir / "metadata.json");
  const Table traj = read_csv(run_dir / "trajectory.csv");
  const Table trace = read_csv(run_dir / "trace.csv");
  json system, coords, ctls;
  try {
    system = meta.at("system");
    coords = system.at("coordinates");
    ctls = system.at("controls");
  } catch (const json::exception&) {
    throw ArtifactError((run_dir / "metadata.json").string() + ": missing system description");
  }
  const fs::path out_dir = run_dir / "plot_data";
  fs::create_directories(out_dir);
  json panels = json::array();
  std::vector<std::string> files;
  const std::vector<double> time = traj.values("time");

  auto emit = [&](const std::string& id, const std::string& title, const Table& t,
                  const json& x, const json& series) {
    const std::string file = id + ".csv";
    write_csv(out_dir / file, t);
    files.push_back(file);
    panels.push_back({{"id", id}, {"file", file}, {"title", title}, {"x", x}, {"series", series}});
  };
  const json time_axis{{"column", "time"}, {"label", "time"}, {"unit", "s"}};

  {
    Table t{{"time"}, {}};
    json series = json::array();
    std::vector<std::vector<double>> cols;
    for (const json& c : ctls) {
      const std::string name = c.at("name");
      t.columns.push_back(name);
      cols.push_back(traj.values(name));
      series.push_back({{"column", name}, {"label", c.at("kind")}, {"unit", c.at("unit")}});
    }
    for (std::size_t k = 0; k < time.size(); ++k) {
      std::vector<double> row{time[k]};
      bool present = true;
      for (const auto& col : cols) {
        present = present && !std::isnan(col[k]);
        row.push_back(col[k]);
      }
      if (present) t.add_row(std::move(row));
    }
    emit("input", "Control input", t, time_axis, series);
  }
  for (const json& c : coords) {
    if (c.at("kind") == "strain") continue;
    const std::string name = c.at("name");
    Table t{{"time", name}, {}};
    const std::vector<double> v = traj.values(name);
    for (std::size_t k = 0; k < time.size(); ++k) t.add_row({time[k], v[k]});
    emit("joint_" + name, "Joint " + name, t, time_axis,
         json::array({{{"column", name}, {"label", name}, {"unit", c.at("unit")}}}));
  }
  const int links = system.value("soft_links", 0);
  if (links > 0) {
    Table t{{"time"}, {}};
    json series = json::array();
    std::vector<std::vector<double>> cols;
    for (int l = 0; l < links; ++l) {
      for (const auto& [mode, unit] : {std::pair{"kappa", "1/m"}, std::pair{"stretch", "1"},
                                       std::pair{"shear", "1"}}) {
        const std::string name = "link" + std::to_string(l) + ".mean_" + mode;
        t.columns.push_back(name);
        cols.push_back(traj.values(name));
        series.push_back({{"column", name},
                          {"label", "link " + std::to_string(l) + " mean " + mode},
                          {"unit", unit}});
      }
    }
    for (std::size_t k = 0; k < time.size(); ++k) {
      std::vector<double> row{time[k]};
      for (const auto& col : cols) row.push_back(col[k]);
      t.add_row(std::move(row));
    }
    emit("mean_strain", "Mean strain", t, time_axis, series);
  }
  {
    Table t{{"iteration", "cost"}, {}};
    const std::vector<double> it = trace.values("iteration");
    const std::vector<double> cost = trace.values("cost");
    for (std::size_t k = 0; k < it.size(); ++k) t.add_row({it[k], cost[k]});
    emit("cost", "Cost per iteration", t,
         json{{"column", "iteration"}, {"label", "iteration"}, {"unit", "1"}},
         json::array({{{"column", "cost"}, {"label", "cost"}, {"unit", "1"}}}));
  }
  const json index{{"format_version", 1},
                   {"run", meta.contains("config") ? meta["config"].value("name", "") : ""},
                   {"system", system.value("name", "")},
                   {"panels", panels}};
  write_json(out_dir / "plot_index.json", index);
  return files;
}

DerivativeCheckOptions derivative_check_options(const ChainLayout& layout, double u_max,
                                                int samples, std::uint64_t seed) {
  const std::vector<Coordinate> cs = coordinates(layout);
  const int n = layout.n();
  DerivativeCheckOptions opt;
  opt.samples = samples;
  opt.seed = seed;
  opt.x_range = VectorXd::Zero(2 * n);
  for (int i = 0; i < n; ++i) {
    const Coordinate& c = cs[static_cast<std::size_t>(i)];
    if (c.kind == "prismatic") {
      opt.x_range(i) = 1.0;
      opt.x_range(n + i) = 1.0;
    } else if (c.kind == "revolute") {
      opt.x_range(i) = std::numbers::pi;
      opt.x_range(n + i) = 2.0;
    } else if (c.unit == "1/m") {
      opt.x_range(i) = 1.0;
      opt.x_range(n + i) = 1.0;
    } else {
      opt.x_range(i) = 0.05;
      opt.x_range(n + i) = 0.1;
    }
  }
  opt.u_range = VectorXd::Constant(layout.m(), 0.5 * u_max);
  return opt;
}

}  // namespace softtraj::cli
