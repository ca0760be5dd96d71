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

#include "softtraj_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "softtraj/errors.hpp"

namespace softtraj::cli {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

/// Read cursor over one JSON object that remembers which keys were used so
/// that unknown keys can be reported.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }
  Obj child(const std::string& key) {
    used_.insert(key);
    static const json empty = json::object();
    if (!j_.contains(key) || j_.at(key).is_null()) return Obj(empty, join(path_, key));
    return Obj(j_.at(key), join(path_, key));
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return as_number(j_.at(key), join(path_, key));
  }
  double required_number(const std::string& key) {
    if (!has(key)) fail(join(path_, key), "required field is missing");
    return as_number(j_.at(key), join(path_, key));
  }
  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    return as_int(j_.at(key), join(path_, key));
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(join(path_, key), "expected true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) fail(join(path_, key), "expected a string");
    return v.get<std::string>();
  }
  VectorXd vector(const std::string& key, const VectorXd& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    const std::string p = join(path_, key);
    if (!v.is_array()) fail(p, "expected an array of numbers");
    VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      out(static_cast<Eigen::Index>(i)) = as_number(v[i], p + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  /// Throws on keys that no accessor asked for.
  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) fail(join(path_, key), "unknown field");
    }
  }

  static double as_number(const json& v, const std::string& p) {
    if (!v.is_number()) fail(p, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(p, "must be finite");
    return x;
  }
  static int as_int(const json& v, const std::string& p) {
    if (!v.is_number_integer()) fail(p, "expected an integer");
    return v.get<int>();
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) fail(path, what);
}

json to_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

std::array<int, kStrainModes> read_orders(Obj& o, const std::string& key,
                                          std::array<int, kStrainModes> fallback) {
  if (!o.has(key)) return fallback;
  const json& v = o.raw(key);
  const std::string p = join(o.path(), key);
  if (!v.is_array() || v.size() != kStrainModes) fail(p, "expected [curvature, stretch, shear]");
  std::array<int, kStrainModes> out{};
  for (int i = 0; i < kStrainModes; ++i) {
    out[i] = Obj::as_int(v[static_cast<std::size_t>(i)], p + "[" + std::to_string(i) + "]");
    if (out[i] < -1) fail(p, "orders must be >= -1 (-1 disables a mode)");
  }
  return out;
}

json orders_json(const std::array<int, kStrainModes>& o) { return json::array({o[0], o[1], o[2]}); }

SoftLinkParams read_rod(Obj o, const SoftLinkParams& d) {
  SoftLinkParams rod;
  rod.length = o.number("L", d.length);
  rod.radius = o.number("R_cs", d.radius);
  rod.density = o.number("rho", d.density);
  rod.youngs_modulus = o.number("E", d.youngs_modulus);
  rod.poisson = o.number("nu", d.poisson);
  rod.damping = o.number("beta", d.damping);
  const VectorXd xi = o.vector("xi_star", d.xi_star);
  require(xi.size() == 3, join(o.path(), "xi_star"), "expected [kappa, stretch, shear]");
  rod.xi_star = xi;
  o.finish();
  try {
    rod.validate();
  } catch (const ConfigError& e) {
    fail(o.path(), e.what());
  }
  return rod;
}

json rod_json(const SoftLinkParams& r) {
  return json{{"L", r.length},     {"R_cs", r.radius}, {"rho", r.density},
              {"E", r.youngs_modulus}, {"nu", r.poisson}, {"beta", r.damping},
              {"xi_star", to_json(r.xi_star)}};
}

std::vector<ChainElement> read_custom_elements(Obj layout, const SoftLinkParams& rod,
                                               double joint_damping, int quadrature_order,
                                               double& base_angle, json& resolved) {
  base_angle = layout.number("base_angle", -0.5 * std::numbers::pi);
  require(layout.has("elements"), join(layout.path(), "elements"), "required field is missing");
  const json& arr = layout.raw("elements");
  const std::string p = join(layout.path(), "elements");
  require(arr.is_array() && !arr.empty(), p, "expected a non-empty array");
  layout.finish();
  std::vector<ChainElement> elements;
  json out = json::array();
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Obj e(arr[i], p + "[" + std::to_string(i) + "]");
    const std::string type = e.string("type", "");
    if (type == "prismatic" || type == "revolute") {
      RigidJoint j;
      j.kind = type == "prismatic" ? JointKind::prismatic : JointKind::revolute;
      j.name = e.string("name", type == "prismatic" ? "d" : "theta");
      j.actuated = e.boolean("actuated", false);
      j.damping = e.number("damping", type == "revolute" ? joint_damping : 0.0);
      j.body_mass = e.number("body_mass", 0.0);
      j.body_inertia = e.number("body_inertia", 0.0);
      const VectorXd axis = e.vector("axis", j.axis);
      require(axis.size() == 2, join(e.path(), "axis"), "expected [x, y]");
      j.axis = axis;
      out.push_back({{"type", type},
                     {"name", j.name},
                     {"actuated", j.actuated},
                     {"damping", j.damping},
                     {"body_mass", j.body_mass},
                     {"body_inertia", j.body_inertia},
                     {"axis", to_json(j.axis)}});
      elements.emplace_back(j);
    } else if (type == "soft") {
      SoftLink link;
      link.params = read_rod(e.child("rod"), rod);
      link.basis.order = read_orders(e, "strain_orders", {2, 2, 2});
      link.quadrature_order = e.integer("quadrature_order", quadrature_order);
      out.push_back({{"type", type},
                     {"rod", rod_json(link.params)},
                     {"strain_orders", orders_json(link.basis.order)},
                     {"quadrature_order", link.quadrature_order}});
      elements.emplace_back(link);
    } else {
      fail(join(e.path(), "type"), "expected prismatic, revolute or soft");
    }
    e.finish();
  }
  resolved = json{{"base_angle", base_angle}, {"elements", out}};
  return elements;
}

VectorXd sized(const VectorXd& v, Eigen::Index n, const std::string& path) {
  if (v.size() != n) {
    fail(path, "expected " + std::to_string(n) + " entries (one per rigid joint)");
  }
  return v;
}

}  // namespace

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::box_iddp: return "box-iddp";
    case SolverKind::dc: return "dc";
    case SolverKind::nmpc: return "nmpc";
  }
  return "unknown";
}

double ExperimentConfig::angle_tolerance() const {
  const bool soft = layout.n() > static_cast<int>(layout.joint_coordinates().size());
  return soft ? 0.1 : 0.05;
}

ChainLayout preset_layout(const std::string& preset, const StrainBasis& basis,
                          const SoftLinkParams& rod, double joint_damping, double cart_mass,
                          int quadrature_order) {
  ChainLayout layout;
  if (preset == "rigid-cartpole") {
    layout = soft_cartpole_layout(StrainBasis::rigid(), rod, cart_mass, joint_damping);
  } else if (preset == "soft-cartpole") {
    layout = soft_cartpole_layout(basis, rod, cart_mass, joint_damping);
  } else if (preset == "soft-pendubot") {
    layout = soft_pendubot_layout(basis, rod, joint_damping);
  } else {
    throw ConfigError("system.preset: unknown preset '" + preset + "'");
  }
  for (ChainElement& el : layout.elements) {
    if (auto* link = std::get_if<SoftLink>(&el)) link->quadrature_order = quadrature_order;
  }
  return layout;
}

ExperimentConfig parse_config(const json& doc, std::optional<std::uint64_t> seed_override) {
  ExperimentConfig cfg;
  Obj root(doc, "");
  json out;

  cfg.name = root.string("name", "experiment");
  require(!cfg.name.empty() && cfg.name.find('/') == std::string::npos, "name",
          "must be non-empty and contain no '/'");
  if (root.has("seed")) {
    const json& s = root.raw("seed");
    require(s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0), "seed",
            "expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (seed_override) cfg.seed = *seed_override;
  out["name"] = cfg.name;
  out["seed"] = cfg.seed;

  // System.
  {
    Obj sys = root.child("system");
    require(sys.has("preset"), "system.preset", "required field is missing");
    cfg.preset = sys.string("preset", "");
    const std::set<std::string> presets{"rigid-cartpole", "soft-cartpole", "soft-pendubot", "custom"};
    require(presets.count(cfg.preset) > 0, "system.preset",
            "expected rigid-cartpole, soft-cartpole, soft-pendubot or custom");
    const SoftLinkParams rod = read_rod(sys.child("rod"), SoftLinkParams{});
    const double beta_r = sys.number("beta_r", 0.05);
    require(beta_r >= 0.0, "system.beta_r", "must be >= 0");
    const double cart_mass = sys.number("cart_mass", 1.0);
    require(cart_mass > 0.0, "system.cart_mass", "must be > 0");
    const double g = sys.number("gravity", 9.81);
    const int quad = sys.integer("quadrature_order", 8);
    require(quad >= 1, "system.quadrature_order", "must be >= 1");
    std::array<int, kStrainModes> orders =
        read_orders(sys, "strain_orders", cfg.preset == "rigid-cartpole"
                                              ? std::array<int, kStrainModes>{-1, -1, -1}
                                              : std::array<int, kStrainModes>{2, 2, 2});
    if (cfg.preset == "rigid-cartpole") {
      require(orders == std::array<int, kStrainModes>{-1, -1, -1}, "system.strain_orders",
              "the rigid preset has no strain modes");
    }
    json sys_out{{"preset", cfg.preset}, {"rod", rod_json(rod)},     {"beta_r", beta_r},
                 {"cart_mass", cart_mass}, {"gravity", g},           {"quadrature_order", quad},
                 {"strain_orders", orders_json(orders)}};
    if (cfg.preset == "custom") {
      require(sys.has("layout"), "system.layout", "required for the custom preset");
      json layout_out;
      double base_angle = 0.0;
      cfg.layout.elements =
          read_custom_elements(sys.child("layout"), rod, beta_r, quad, base_angle, layout_out);
      cfg.layout.base_angle = base_angle;
      sys_out["layout"] = layout_out;
    } else {
      require(!sys.has("layout"), "system.layout", "only allowed with the custom preset");
      cfg.layout = preset_layout(cfg.preset, StrainBasis{orders}, rod, beta_r, cart_mass, quad);
    }
    cfg.layout.gravity = Vector2d(0.0, -g);
    sys.finish();
    try {
      cfg.layout.validate();
    } catch (const ConfigError& e) {
      fail("system", e.what());
    }
    out["system"] = sys_out;
  }
  const int n_joints = static_cast<int>(cfg.layout.joint_coordinates().size());

  // Solver kind first: it picks the default horizon resolution.
  Obj solver = root.child("solver");
  {
    const std::string type = solver.string("type", "box-iddp");
    if (type == "box-iddp") cfg.solver = SolverKind::box_iddp;
    else if (type == "dc") cfg.solver = SolverKind::dc;
    else if (type == "nmpc") cfg.solver = SolverKind::nmpc;
    else fail("solver.type", "expected box-iddp, dc or nmpc");
  }

  SwingUpSpec base = cfg.preset == "soft-pendubot" ? default_pendubot_swingup()
                                                   : default_cartpole_swingup();
  // Horizon.
  {
    Obj hz = root.child("horizon");
    cfg.task.t_f = hz.required_number("t_f");
    require(cfg.task.t_f > 0.0, "horizon.t_f", "must be > 0");
    const bool has_n = hz.has("N");
    const bool has_h = hz.has("h");
    int N = 0;
    if (has_n) {
      N = hz.integer("N", 0);
      require(N >= 1, "horizon.N", "must be >= 1");
    }
    if (has_h) {
      const double h = hz.number("h", 0.0);
      require(h > 0.0, "horizon.h", "must be > 0");
      const double steps = cfg.task.t_f / h;
      const int Nh = static_cast<int>(std::lround(steps));
      require(Nh >= 1 && std::abs(steps - Nh) < 1e-9 * std::max(1.0, steps), "horizon.h",
              "t_f must be an integer multiple of h");
      require(!has_n || N == Nh, "horizon.h", "inconsistent with horizon.N and horizon.t_f");
      N = Nh;
    }
    if (!has_n && !has_h) {
      N = cfg.solver == SolverKind::dc ? 100
                                       : static_cast<int>(std::lround(cfg.task.t_f / 0.01));
      require(N >= 1, "horizon.t_f", "shorter than one default step");
    }
    cfg.task.N = N;
    hz.finish();
    out["horizon"] = {{"t_f", cfg.task.t_f}, {"N", N}, {"h", cfg.task.t_f / N}};
  }

  // Bounds.
  {
    Obj b = root.child("bounds");
    if (cfg.preset == "custom") {
      cfg.task.u_max = b.required_number("u_max");
    } else {
      cfg.task.u_max = b.number("u_max", base.u_max);
    }
    require(cfg.task.u_max > 0.0, "bounds.u_max", "must be > 0");
    b.finish();
    out["bounds"] = {{"u_max", cfg.task.u_max}};
  }

  // Task and cost.
  {
    Obj t = root.child("task");
    const bool custom = cfg.preset == "custom";
    if (custom) {
      require(t.has("joint_start"), "task.joint_start", "required for the custom preset");
      require(t.has("joint_target"), "task.joint_target", "required for the custom preset");
    }
    cfg.task.joint_start = sized(t.vector("joint_start", base.joint_start), n_joints, "task.joint_start");
    cfg.task.joint_target =
        sized(t.vector("joint_target", base.joint_target), n_joints, "task.joint_target");
    t.finish();
    out["task"] = {{"joint_start", to_json(cfg.task.joint_start)},
                   {"joint_target", to_json(cfg.task.joint_target)}};

    Obj c = root.child("cost");
    const VectorXd ones = VectorXd::Ones(n_joints);
    const VectorXd jw = custom ? ones : base.joint_weight;
    const VectorXd jr = custom ? VectorXd(0.1 * ones) : base.joint_rate_weight;
    cfg.task.joint_weight = sized(c.vector("joint_weight", jw), n_joints, "cost.joint_weight");
    cfg.task.joint_rate_weight =
        sized(c.vector("joint_rate_weight", jr), n_joints, "cost.joint_rate_weight");
    cfg.task.soft_weight = c.number("soft_weight", base.soft_weight);
    cfg.task.soft_rate_weight = c.number("soft_rate_weight", base.soft_rate_weight);
    cfg.task.control_weight = c.number("control_weight", base.control_weight);
    cfg.task.terminal_scale = c.number("terminal_scale", base.terminal_scale);
    if (c.has("terminal_joint_weight")) {
      cfg.task.terminal_joint_weight =
          sized(c.vector("terminal_joint_weight", {}), n_joints, "cost.terminal_joint_weight");
    }
    if (c.has("terminal_joint_rate_weight")) {
      cfg.task.terminal_joint_rate_weight = sized(c.vector("terminal_joint_rate_weight", {}),
                                                  n_joints, "cost.terminal_joint_rate_weight");
    }
    require((cfg.task.joint_weight.array() >= 0).all(), "cost.joint_weight", "must be >= 0");
    require((cfg.task.joint_rate_weight.array() >= 0).all(), "cost.joint_rate_weight", "must be >= 0");
    require(cfg.task.soft_weight >= 0, "cost.soft_weight", "must be >= 0");
    require(cfg.task.soft_rate_weight >= 0, "cost.soft_rate_weight", "must be >= 0");
    require(cfg.task.control_weight > 0, "cost.control_weight", "must be > 0");
    require(cfg.task.terminal_scale >= 0, "cost.terminal_scale", "must be >= 0");
    c.finish();
    json cost_out{{"joint_weight", to_json(cfg.task.joint_weight)},
                  {"joint_rate_weight", to_json(cfg.task.joint_rate_weight)},
                  {"soft_weight", cfg.task.soft_weight},
                  {"soft_rate_weight", cfg.task.soft_rate_weight},
                  {"control_weight", cfg.task.control_weight},
                  {"terminal_scale", cfg.task.terminal_scale}};
    if (cfg.task.terminal_joint_weight.size()) {
      cost_out["terminal_joint_weight"] = to_json(cfg.task.terminal_joint_weight);
    }
    if (cfg.task.terminal_joint_rate_weight.size()) {
      cost_out["terminal_joint_rate_weight"] = to_json(cfg.task.terminal_joint_rate_weight);
    }
    out["cost"] = cost_out;
  }

  // Solver settings.
  {
    json solver_out{{"type", to_string(cfg.solver)}};
    Obj bi = solver.child("box_iddp");
    BoxIddpSettings& s = cfg.iddp;
    s.max_iters = bi.integer("max_iters", s.max_iters);
    s.cost_tol = bi.number("cost_tol", s.cost_tol);
    s.grad_tol = bi.number("grad_tol", s.grad_tol);
    s.reg_init = bi.number("reg_init", s.reg_init);
    s.reg_min = bi.number("reg_min", s.reg_min);
    s.reg_max = bi.number("reg_max", s.reg_max);
    s.reg_scale = bi.number("reg_scale", s.reg_scale);
    const std::string hess = bi.string("hessian", "gauss-newton");
    if (hess == "gauss-newton") s.hessian_mode = IddpHessian::gauss_newton;
    else if (hess == "full") s.hessian_mode = IddpHessian::full_second_order;
    else fail("solver.box_iddp.hessian", "expected gauss-newton or full");
    s.parallel_line_search = bi.boolean("parallel_line_search", s.parallel_line_search);
    s.step.newton_tol = bi.number("newton_tol", s.step.newton_tol);
    s.step.max_newton_iters = bi.integer("max_newton_iters", s.step.max_newton_iters);
    bi.finish();
    try {
      s.validate();
    } catch (const ConfigError& e) {
      fail("solver.box_iddp", e.what());
    }
    solver_out["box_iddp"] = {{"max_iters", s.max_iters},
                              {"cost_tol", s.cost_tol},
                              {"grad_tol", s.grad_tol},
                              {"reg_init", s.reg_init},
                              {"reg_min", s.reg_min},
                              {"reg_max", s.reg_max},
                              {"reg_scale", s.reg_scale},
                              {"hessian", hess},
                              {"parallel_line_search", s.parallel_line_search},
                              {"newton_tol", s.step.newton_tol},
                              {"max_newton_iters", s.step.max_newton_iters}};

    Obj dc = solver.child("dc");
    AlmSettings& a = cfg.alm;
    a.penalty_init = dc.number("penalty_init", a.penalty_init);
    a.penalty_scale = dc.number("penalty_scale", a.penalty_scale);
    a.penalty_max = dc.number("penalty_max", a.penalty_max);
    a.constraint_tol = dc.number("constraint_tol", a.constraint_tol);
    a.opt_tol = dc.number("opt_tol", a.opt_tol);
    a.max_outer = dc.integer("max_outer", a.max_outer);
    a.max_inner = dc.integer("max_inner", a.max_inner);
    require(a.penalty_init > 0 && a.penalty_scale > 1 && a.penalty_max >= a.penalty_init,
            "solver.dc", "need penalty_init > 0, penalty_scale > 1, penalty_max >= penalty_init");
    require(a.constraint_tol > 0 && a.opt_tol > 0, "solver.dc", "tolerances must be > 0");
    require(a.max_outer >= 1 && a.max_inner >= 1, "solver.dc", "iteration limits must be >= 1");
    dc.finish();
    solver_out["dc"] = {{"penalty_init", a.penalty_init}, {"penalty_scale", a.penalty_scale},
                        {"penalty_max", a.penalty_max},   {"constraint_tol", a.constraint_tol},
                        {"opt_tol", a.opt_tol},           {"max_outer", a.max_outer},
                        {"max_inner", a.max_inner}};

    Obj nm = solver.child("nmpc");
    cfg.nmpc.p = nm.integer("p", 100);
    cfg.nmpc.sim_steps = nm.integer("sim_steps", 300);
    cfg.nmpc.inner = cfg.iddp;
    cfg.nmpc.inner.max_iters = nm.integer("inner_max_iters", 5);
    require(cfg.nmpc.p >= 1, "solver.nmpc.p", "must be >= 1");
    require(cfg.nmpc.sim_steps >= 1, "solver.nmpc.sim_steps", "must be >= 1");
    require(cfg.nmpc.inner.max_iters >= 0, "solver.nmpc.inner_max_iters", "must be >= 0");
    Obj dist = nm.child("disturbance");
    cfg.disturbance.step = dist.integer("step", -1);
    cfg.disturbance.magnitude = dist.number("magnitude", 0.0);
    require(cfg.disturbance.magnitude >= 0, "solver.nmpc.disturbance.magnitude", "must be >= 0");
    require(cfg.disturbance.step < cfg.nmpc.sim_steps, "solver.nmpc.disturbance.step",
            "must lie inside the simulated steps");
    std::vector<std::string> names = cfg.layout.coordinate_names();
    std::vector<std::string> default_coords;
    for (int j : cfg.layout.joint_coordinates()) default_coords.push_back(names[j]);
    cfg.disturbance.coordinates = default_coords;
    if (dist.has("coordinates")) {
      const json& arr = dist.raw("coordinates");
      const std::string p = "solver.nmpc.disturbance.coordinates";
      require(arr.is_array() && !arr.empty(), p, "expected a non-empty array of coordinate names");
      cfg.disturbance.coordinates.clear();
      for (const json& v : arr) {
        require(v.is_string(), p, "expected coordinate names");
        const std::string c = v.get<std::string>();
        require(std::find(names.begin(), names.end(), c) != names.end(), p,
                "unknown coordinate '" + c + "'");
        cfg.disturbance.coordinates.push_back(c);
      }
    }
    dist.finish();
    nm.finish();
    solver_out["nmpc"] = {{"p", cfg.nmpc.p},
                          {"sim_steps", cfg.nmpc.sim_steps},
                          {"inner_max_iters", cfg.nmpc.inner.max_iters},
                          {"disturbance",
                           {{"step", cfg.disturbance.step},
                            {"magnitude", cfg.disturbance.magnitude},
                            {"coordinates", cfg.disturbance.coordinates}}}};
    solver.finish();
    out["solver"] = solver_out;
  }

  // Warm start and initial guess.
  {
    Obj w = root.child("warm_start");
    cfg.ladder = w.boolean("ladder", false);
    cfg.split_linear_modes = w.boolean("split_linear_modes", false);
    cfg.feedback_lift = w.boolean("feedback_lift", false);
    require(!cfg.ladder || cfg.solver != SolverKind::nmpc, "warm_start.ladder",
            "not available with the nmpc solver");
    require(!cfg.ladder || cfg.layout.soft_link_count() > 0, "warm_start.ladder",
            "needs a system with soft links");
    w.finish();
    out["warm_start"] = {{"ladder", cfg.ladder},
                         {"split_linear_modes", cfg.split_linear_modes},
                         {"feedback_lift", cfg.feedback_lift}};

    Obj in = root.child("init");
    cfg.init = in.string("type", "zeros");
    require(cfg.init == "zeros" || cfg.init == "pseudo-random", "init.type",
            "expected zeros or pseudo-random");
    cfg.init_fraction = in.number("fraction", 0.1);
    require(cfg.init_fraction >= 0.0 && cfg.init_fraction <= 1.0, "init.fraction",
            "must lie in [0, 1]");
    in.finish();
    out["init"] = {{"type", cfg.init}, {"fraction", cfg.init_fraction}};
  }

  {
    Obj o = root.child("output");
    cfg.output_dir = o.string("dir", "runs/" + cfg.name);
    require(!cfg.output_dir.empty(), "output.dir", "must be non-empty");
    o.finish();
    out["output"] = {{"dir", cfg.output_dir}};
  }
  root.finish();

  try {
    GvsModel probe(cfg.layout);
    cfg.task.validate(probe);
  } catch (const ConfigError& e) {
    fail("task", e.what());
  }
  cfg.resolved = std::move(out);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot read config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": not valid JSON (" + e.what() + ")");
  }
  return parse_config(doc, seed_override);
}

}  // namespace softtraj::cli
