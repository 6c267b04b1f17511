/*
 Copyright 2026 The gaitopt Authors

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

#include "gaitopt/task.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "gaitopt/linear_system.hpp"
#include "gaitopt/model_io.hpp"

namespace gaitopt {
namespace {

using json = nlohmann::json;

// --- naming ---------------------------------------------------------------

struct Naming {
  std::vector<std::string> names;
  std::map<std::string, std::vector<int>> groups;
};

bool glob_match(const char* pattern, const char* text) {
  if (*pattern == '\0') return *text == '\0';
  if (*pattern == '*')
    return glob_match(pattern + 1, text) || (*text != '\0' && glob_match(pattern, text + 1));
  return *text == *pattern && glob_match(pattern + 1, text + 1);
}

Naming state_naming(const System& system) {
  Naming naming;
  naming.names = coordinate_names(system);
  const auto* rigid = dynamic_cast<const RigidBodySystem*>(&system);
  if (!rigid) return naming;
  const StateLayout layout(rigid->model());
  const int nq = layout.dofs();
  auto range = [](int begin, int count) {
    std::vector<int> idx(count);
    std::iota(idx.begin(), idx.end(), begin);
    return idx;
  };
  naming.groups["base_orientation"] = range(0, layout.orientation);
  naming.groups["base_position"] = range(layout.orientation, layout.position);
  naming.groups["joint_positions"] = range(layout.orientation + layout.position, layout.joints);
  naming.groups["base_angular_velocity"] = range(nq, layout.orientation == 0 ? 0 : (layout.orientation == 1 ? 1 : 3));
  naming.groups["base_linear_velocity"] =
      range(nq + layout.orientation, layout.position);
  naming.groups["joint_velocities"] = range(nq + layout.orientation + layout.position, layout.joints);
  return naming;
}

Naming plain_naming(std::vector<std::string> names) {
  Naming naming;
  naming.names = std::move(names);
  return naming;
}

Naming base_naming(const RigidBodyModel& model) {
  if (model.planar()) return plain_naming({"x", "z", "pitch"});
  return plain_naming({"x", "y", "z", "roll", "pitch", "yaw"});
}

// Applies {NAME: value} entries of an object onto `out`.
void apply_named(const json& j, const Naming& naming, Vector& out, const std::string& field,
                 const std::vector<std::string>& reserved) {
  struct Entry {
    int priority;
    std::vector<int> indices;
    double value;
  };
  std::vector<Entry> entries;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (std::find(reserved.begin(), reserved.end(), key) != reserved.end()) continue;
    const std::string sub = field + "." + key;
    if (!it.value().is_number()) throw ConfigError(sub, "expected a number");
    const double value = it.value().get<double>();
    auto exact = std::find(naming.names.begin(), naming.names.end(), key);
    if (exact != naming.names.end()) {
      entries.push_back({3, {static_cast<int>(exact - naming.names.begin())}, value});
    } else if (key.find('*') != std::string::npos) {
      Entry e{2, {}, value};
      for (int i = 0; i < static_cast<int>(naming.names.size()); ++i)
        if (glob_match(key.c_str(), naming.names[i].c_str())) e.indices.push_back(i);
      if (e.indices.empty()) throw ConfigError(sub, "pattern matches no coordinate");
      entries.push_back(std::move(e));
    } else if (auto g = naming.groups.find(key); g != naming.groups.end()) {
      entries.push_back({1, g->second, value});
    } else {
      throw ConfigError(sub, "unknown coordinate or group");
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.priority < b.priority; });
  for (const auto& e : entries)
    for (int i : e.indices) out[i] = e.value;
}

Vector parse_vector_spec(const json& j, const Naming& naming, const Vector& initial,
                         const std::string& field, const std::string& default_from) {
  const int dim = static_cast<int>(naming.names.size());
  if (j.is_array()) {
    Vector v = json_vector(j, field);
    if (v.size() != dim)
      throw ConfigError(field, "expected " + std::to_string(dim) + " entries, got " +
                                   std::to_string(v.size()));
    return v;
  }
  if (!j.is_object()) throw ConfigError(field, "expected an array or an object");
  const std::string from = j.value("from", default_from);
  Vector v;
  if (from == "zero") v = Vector::Zero(dim);
  else if (from == "initial" && initial.size() == dim) v = initial;
  else throw ConfigError(field + ".from", "expected \"zero\" or \"initial\"");
  apply_named(j, naming, v, field, {"from", "feet_on_ground"});
  return v;
}

Matrix parse_weight_spec(const json& j, const Naming& naming, const std::string& field) {
  const int dim = static_cast<int>(naming.names.size());
  if (j.is_number()) return Matrix::Identity(dim, dim) * j.get<double>();
  if (j.is_array()) {
    if (!j.empty() && j[0].is_array()) {
      Matrix m = json_matrix(j, field);
      if (m.rows() != dim || m.cols() != dim)
        throw ConfigError(field, "expected " + std::to_string(dim) + "x" +
                                     std::to_string(dim) + " matrix");
      return m;
    }
    Vector v = json_vector(j, field);
    if (v.size() != dim)
      throw ConfigError(field, "expected " + std::to_string(dim) + " entries, got " +
                                   std::to_string(v.size()));
    return v.asDiagonal();
  }
  if (!j.is_object()) throw ConfigError(field, "expected a number, vector, matrix or object");
  Vector diag = Vector::Constant(dim, j.value("default", 0.0));
  apply_named(j, naming, diag, field, {"default"});
  return diag.asDiagonal();
}

double get_number(const json& j, const std::string& key, double fallback,
                  const std::string& field) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(field + "." + key, "expected a number");
  return j[key].get<double>();
}

int get_int(const json& j, const std::string& key, int fallback, const std::string& field) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) throw ConfigError(field + "." + key, "expected an integer");
  return j[key].get<int>();
}

ContactParams parse_contact(const json& j) {
  ContactParams c;
  if (!j.is_object()) throw ConfigError("contact", "expected an object");
  c.alpha_c = get_number(j, "alpha_c", c.alpha_c, "contact");
  c.k_n = get_number(j, "k_n", c.k_n, "contact");
  c.d_n = get_number(j, "d_n", c.d_n, "contact");
  c.k_t = get_number(j, "k_t", c.k_t, "contact");
  c.d_t = get_number(j, "d_t", c.d_t, "contact");
  c.mu = get_number(j, "mu", c.mu, "contact");
  c.validate();
  return c;
}

GroundPlane parse_plane(const json& j) {
  if (!j.is_object()) throw ConfigError("plane", "expected an object");
  GroundPlane plane;
  if (j.contains("inclination")) {
    plane = GroundPlane::inclined(get_number(j, "inclination", 0.0, "plane"));
  } else {
    if (j.contains("point")) plane.point = json_vector3(j["point"], "plane.point");
    if (j.contains("normal")) plane.normal = json_vector3(j["normal"], "plane.normal");
    if (j.contains("height")) plane.point.z() = get_number(j, "height", 0.0, "plane");
  }
  plane.validate();
  return plane;
}

SolverSettings parse_solver(const json& j) {
  SolverSettings s;
  if (!j.is_object()) throw ConfigError("solver", "expected an object");
  s.max_iterations = get_int(j, "max_iterations", s.max_iterations, "solver");
  s.alpha_d = get_number(j, "alpha_d", s.alpha_d, "solver");
  s.max_line_search_steps = get_int(j, "max_line_search_steps", s.max_line_search_steps, "solver");
  s.regularization_min = get_number(j, "regularization_min", s.regularization_min, "solver");
  s.regularization_max = get_number(j, "regularization_max", s.regularization_max, "solver");
  s.regularization_factor =
      get_number(j, "regularization_factor", s.regularization_factor, "solver");
  s.convergence_threshold =
      get_number(j, "convergence_threshold", s.convergence_threshold, "solver");
  s.threads = get_int(j, "threads", s.threads, "solver");
  if (j.contains("integrator")) {
    if (!j["integrator"].is_string()) throw ConfigError("solver.integrator", "expected a string");
    try {
      s.integrator.method = parse_integrator(j["integrator"].get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError("solver.integrator", e.what());
    }
  }
  return s;
}

Vector joint_gain_spec(const json& j, const RigidBodyModel& model, const std::string& field) {
  std::vector<std::string> names;
  for (int a : model.actuated_joints()) names.push_back(model.joints()[a].name);
  const int m = static_cast<int>(names.size());
  if (j.is_number()) return Vector::Constant(m, j.get<double>());
  if (j.is_array()) {
    Vector v = json_vector(j, field);
    if (v.size() != m) throw ConfigError(field, "expected " + std::to_string(m) + " entries");
    return v;
  }
  if (!j.is_object()) throw ConfigError(field, "expected a number, array or object");
  Vector v = Vector::Constant(m, j.value("default", 0.0));
  apply_named(j, plain_naming(names), v, field, {"default"});
  return v;
}

TrackingConfig parse_tracking(const json& j, const RigidBodySystem& system,
                              const Naming& naming) {
  if (!j.is_object()) throw ConfigError("tracking", "expected an object");
  const RigidBodyModel& model = system.model();
  TrackingConfig t;
  const Naming base = base_naming(model);
  const int dims = model.base_type() == BaseType::Fixed ? 0 : static_cast<int>(base.names.size());
  t.gains = TrackingGains::zero(model.num_actuated(), dims);
  if (j.contains("joint_kp")) t.gains.joint_kp = joint_gain_spec(j["joint_kp"], model, "tracking.joint_kp");
  if (j.contains("joint_kd")) t.gains.joint_kd = joint_gain_spec(j["joint_kd"], model, "tracking.joint_kd");
  if (dims > 0) {
    if (j.contains("base_kp")) t.gains.base_kp = parse_weight_spec(j["base_kp"], base, "tracking.base_kp");
    if (j.contains("base_kd")) t.gains.base_kd = parse_weight_spec(j["base_kd"], base, "tracking.base_kd");
  }
  t.gains.validate(model.num_actuated(), dims);
  t.settings.control_rate = get_number(j, "control_rate", t.settings.control_rate, "tracking");
  t.settings.plant_substeps = get_int(j, "plant_substeps", t.settings.plant_substeps, "tracking");
  t.settings.contact_threshold =
      get_number(j, "contact_threshold", t.settings.contact_threshold, "tracking");
  t.settings.validate();
  t.min_height_fraction = get_number(j, "min_height_fraction", t.min_height_fraction, "tracking");

  const json perturbations = j.value("perturbations", json::array({json::object()}));
  for (std::size_t k = 0; k < perturbations.size(); ++k) {
    const std::string field = "tracking.perturbations[" + std::to_string(k) + "]";
    const json& p = perturbations[k];
    PlantPerturbation pert;
    pert.mass_scale = get_number(p, "mass_scale", 1.0, field);
    pert.contact_stiffness_scale = get_number(p, "contact_stiffness_scale", 1.0, field);
    pert.contact_damping_scale = get_number(p, "contact_damping_scale", 1.0, field);
    pert.torque_noise_std = get_number(p, "torque_noise_std", 0.0, field);
    if (p.contains("initial_state_offset"))
      pert.initial_state_offset = parse_vector_spec(
          p["initial_state_offset"], naming, Vector(), field + ".initial_state_offset", "zero");
    try {
      pert.validate(system.state_dim());
    } catch (const ConfigError& e) {
      throw ConfigError(field, e.what());
    }
    t.perturbations.push_back(pert);
  }
  return t;
}

// Lowers or raises the base until the deepest foot penetrates by `depth`.
void place_feet_on_ground(const RigidBodySystem& system, Vector& x, double depth) {
  const StateLayout layout = system.layout();
  if (layout.base_height() < 0 || system.num_feet() == 0)
    throw ConfigError("initial_state.feet_on_ground", "needs a floating base with feet");
  const GroundPlane& plane = system.plane();
  double deepest = -std::numeric_limits<double>::infinity();
  for (const auto& p : foot_positions(system.model(), x.head(layout.dofs())))
    deepest = std::max(deepest, -plane.normal.dot(p - plane.point));
  x[layout.base_height()] += (deepest - depth) / plane.normal.z();
}

std::string hex64(std::uint64_t value) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << value;
  return out.str();
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

using Clock = std::chrono::steady_clock;

json timings_json(const PhaseTimings& t) {
  return {{"rollout", t.rollout},
          {"linearize", t.linearize},
          {"quadratize", t.quadratize},
          {"backward", t.backward},
          {"total", t.total()}};
}

json versions_json() {
  return {{"gaitopt", GAITOPT_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", __VERSION__},
          {"cxx_standard", __cplusplus}};
}

}  // namespace

// --- names and formatting --------------------------------------------------

std::vector<std::string> coordinate_names(const System& system) {
  std::vector<std::string> names;
  const auto* rigid = dynamic_cast<const RigidBodySystem*>(&system);
  if (!rigid) {
    for (int i = 0; i < system.state_dim(); ++i) names.push_back("x" + std::to_string(i));
    return names;
  }
  const RigidBodyModel& model = rigid->model();
  std::vector<std::string> q, v;
  switch (model.base_type()) {
    case BaseType::Fixed: break;
    case BaseType::Planar:
      q = {"pitch", "x", "z"};
      v = {"wy", "vx", "vz"};
      break;
    case BaseType::Spatial:
      q = {"roll", "pitch", "yaw", "x", "y", "z"};
      v = {"wx", "wy", "wz", "vx", "vy", "vz"};
      break;
  }
  for (const auto& joint : model.joints()) {
    q.push_back(joint.name);
    v.push_back(joint.name + "_dot");
  }
  names = q;
  names.insert(names.end(), v.begin(), v.end());
  return names;
}

std::vector<std::string> input_names(const System& system) {
  std::vector<std::string> names;
  const auto* rigid = dynamic_cast<const RigidBodySystem*>(&system);
  if (!rigid) {
    for (int i = 0; i < system.input_dim(); ++i) names.push_back("u" + std::to_string(i));
    return names;
  }
  for (int a : rigid->model().actuated_joints())
    names.push_back(rigid->model().joints()[a].name);
  return names;
}

std::string format_number(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t seed) {
  std::uint64_t hash = seed;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

// --- configuration -----------------------------------------------------------

int TaskConfig::horizon() const {
  return static_cast<int>(std::lround(final_time / dt));
}

AffineController TaskConfig::make_initial_controller() const {
  if (initial_controller == "pd_hold" && rigid_body)
    return rigid_body->pd_hold_controller(initial_state, horizon());
  return AffineController::zero(horizon(), system->input_dim());
}

TaskConfig TaskConfig::with_horizon(int steps) const {
  if (steps < 1) throw ConfigError("benchmark.step_counts", "must be >= 1");
  TaskConfig copy = *this;
  copy.dt = final_time / steps;
  copy.solver.integrator.dt = copy.dt;
  return copy;
}

TaskConfig parse_task(const json& j, const std::filesystem::path& base_dir,
                      const TaskOverrides& overrides) {
  if (!j.is_object()) throw ConfigError("task", "expected a JSON object");
  TaskConfig config;
  config.name = j.value("name", std::string("task"));
  config.description = j.value("description", std::string());
  if (!j.contains("model") || !j["model"].is_string())
    throw ConfigError("model", "missing model file path");
  config.model_path = base_dir / j["model"].get<std::string>();
  if (!std::filesystem::exists(config.model_path))
    throw ConfigError("model", "model file '" + config.model_path.string() + "' does not exist");

  if (!j.contains("t_f")) throw ConfigError("t_f", "missing field");
  if (!j.contains("dt")) throw ConfigError("dt", "missing field");
  config.final_time = get_number(j, "t_f", 0.0, "task");
  config.dt = get_number(j, "dt", 0.0, "task");
  if (!(config.final_time > 0.0)) throw ConfigError("t_f", "must be > 0");
  if (!(config.dt > 0.0)) throw ConfigError("dt", "must be > 0");
  const double ratio = config.final_time / config.dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1.0)
    throw ConfigError("dt", "t_f / dt must be a positive integer");

  config.seed = static_cast<std::uint64_t>(j.value("seed", 0));
  if (overrides.seed) config.seed = *overrides.seed;
  config.initial_controller = j.value("initial_controller", std::string("pd_hold"));
  if (config.initial_controller != "pd_hold" && config.initial_controller != "zero")
    throw ConfigError("initial_controller", "expected \"pd_hold\" or \"zero\"");

  if (j.contains("contact")) config.contact = parse_contact(j["contact"]);
  if (j.contains("plane")) config.plane = parse_plane(j["plane"]);
  if (j.contains("solver")) config.solver = parse_solver(j["solver"]);
  config.solver.integrator.dt = config.dt;
  if (overrides.threads) config.solver.threads = *overrides.threads;
  if (overrides.integrator) config.solver.integrator.method = *overrides.integrator;
  config.solver.validate();

  const json model_json = read_json_file(config.model_path);
  if (is_linear_model(model_json)) {
    config.system = std::make_shared<LinearSystem>(parse_linear_system(model_json));
  } else {
    auto rigid = std::make_shared<RigidBodySystem>(parse_rigid_body_model(model_json),
                                                   config.contact, config.plane);
    config.rigid_body = rigid;
    config.system = rigid;
  }
  const System& system = *config.system;
  const Naming naming = state_naming(system);
  const Naming inputs = plain_naming(input_names(system));

  if (!j.contains("initial_state")) throw ConfigError("initial_state", "missing field");
  config.initial_state =
      parse_vector_spec(j["initial_state"], naming, Vector(), "initial_state", "zero");
  if (j["initial_state"].is_object() && j["initial_state"].contains("feet_on_ground")) {
    if (!config.rigid_body)
      throw ConfigError("initial_state.feet_on_ground", "needs a rigid-body model");
    place_feet_on_ground(*config.rigid_body, config.initial_state,
                         get_number(j["initial_state"], "feet_on_ground", 0.0, "initial_state"));
  }
  if (!all_finite(config.initial_state)) throw ConfigError("initial_state", "must be finite");

  if (!j.contains("cost")) throw ConfigError("cost", "missing field");
  const json& jc = j["cost"];
  if (!jc.is_object()) throw ConfigError("cost", "expected an object");
  const int n = system.state_dim();
  const int m = system.input_dim();
  CostSpec& cost = config.cost;
  cost.state_weight = jc.contains("Q") ? parse_weight_spec(jc["Q"], naming, "cost.Q") : Matrix::Zero(n, n);
  cost.final_weight = jc.contains("H") ? parse_weight_spec(jc["H"], naming, "cost.H") : Matrix::Zero(n, n);
  if (!jc.contains("R")) throw ConfigError("cost.R", "missing field");
  cost.input_weight = parse_weight_spec(jc["R"], inputs, "cost.R");

  if (jc.contains("x_des") && jc["x_des"].is_object() && jc["x_des"].contains("segments")) {
    std::vector<double> times;
    std::vector<Vector> values;
    const json& segments = jc["x_des"]["segments"];
    for (std::size_t k = 0; k < segments.size(); ++k) {
      const std::string field = "cost.x_des.segments[" + std::to_string(k) + "]";
      times.push_back(get_number(segments[k], "t", 0.0, field));
      if (!segments[k].contains("x")) throw ConfigError(field + ".x", "missing field");
      values.push_back(parse_vector_spec(segments[k]["x"], naming, config.initial_state,
                                         field + ".x", "initial"));
    }
    cost.state_reference = PiecewiseReference(std::move(times), std::move(values));
  } else {
    cost.state_reference = PiecewiseReference(
        jc.contains("x_des") ? parse_vector_spec(jc["x_des"], naming, config.initial_state,
                                                 "cost.x_des", "initial")
                             : config.initial_state);
  }
  cost.input_reference = PiecewiseReference(
      jc.contains("u_des")
          ? parse_vector_spec(jc["u_des"], inputs, Vector::Zero(m), "cost.u_des", "zero")
          : Vector::Zero(m));

  if (jc.contains("waypoints")) {
    const json& wps = jc["waypoints"];
    if (!wps.is_array()) throw ConfigError("cost.waypoints", "expected an array");
    for (std::size_t k = 0; k < wps.size(); ++k) {
      const std::string field = "cost.waypoints[" + std::to_string(k) + "]";
      const json& w = wps[k];
      WaypointTerm term;
      if (!w.contains("t")) throw ConfigError(field + ".t", "missing field");
      if (!w.contains("rho")) throw ConfigError(field + ".rho", "missing field");
      if (!w.contains("W")) throw ConfigError(field + ".W", "missing field");
      if (!w.contains("x")) throw ConfigError(field + ".x", "missing field");
      term.time = get_number(w, "t", 0.0, field);
      term.rho = get_number(w, "rho", 1.0, field);
      term.weight = parse_weight_spec(w["W"], naming, field + ".W");
      term.target = parse_vector_spec(w["x"], naming, config.initial_state, field + ".x", "initial");
      cost.waypoints.push_back(std::move(term));
    }
  }
  cost.angle_indices = system.angle_indices();
  cost.validate(n, m, config.final_time);

  if (j.contains("tracking")) {
    if (!config.rigid_body) throw ConfigError("tracking", "needs a rigid-body model");
    config.tracking = parse_tracking(j["tracking"], *config.rigid_body, naming);
    config.tracking->settings.seed = config.seed;
    config.tracking->settings.method = config.solver.integrator.method;
  }
  if (j.contains("benchmark")) {
    const json& b = j["benchmark"];
    if (b.contains("step_counts")) {
      config.benchmark.step_counts.clear();
      for (const auto& v : b["step_counts"]) {
        if (!v.is_number_integer() || v.get<int>() < 1)
          throw ConfigError("benchmark.step_counts", "expected positive integers");
        config.benchmark.step_counts.push_back(v.get<int>());
      }
    }
    config.benchmark.repetitions = get_int(b, "repetitions", config.benchmark.repetitions, "benchmark");
    config.benchmark.iterations = get_int(b, "iterations", config.benchmark.iterations, "benchmark");
    if (config.benchmark.repetitions < 1) throw ConfigError("benchmark.repetitions", "must be >= 1");
    if (config.benchmark.iterations < 1) throw ConfigError("benchmark.iterations", "must be >= 1");
  }
  return config;
}

TaskConfig load_task(const std::filesystem::path& path, const TaskOverrides& overrides) {
  const std::string bytes = read_bytes(path);
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  TaskConfig config = parse_task(j, path.parent_path(), overrides);
  config.config_path = path;
  config.config_hash = hex64(fnv1a64(read_bytes(config.model_path), fnv1a64(bytes)));
  return config;
}

// --- solving and artifacts ---------------------------------------------------

TaskRun solve_task(const TaskConfig& config, const SlqSolver::IterationCallback& callback) {
  TaskRun run;
  const auto start = Clock::now();
  SlqSolver solver(*config.system, config.cost, config.solver);
  run.solution = solver.solve(config.initial_state, config.make_initial_controller(), callback);
  run.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  run.exit_code = run.solution.status == SolveStatus::Stalled ? kExitStalled : kExitSuccess;
  run.message = to_string(run.solution.status);
  if (config.rigid_body && config.rigid_body->num_feet() > 0) {
    std::vector<std::string> names;
    for (const auto& foot : config.rigid_body->model().feet()) names.push_back(foot.name);
    run.schedule = extract_schedule(run.solution.nominal, -1.0, names);
    run.statistics = gait_statistics(run.schedule);
  }
  return run;
}

void write_trajectory_csv(const TaskConfig& config, const StateInputTrajectory& trajectory,
                          const std::filesystem::path& path) {
  const System& system = *config.system;
  std::ostringstream out;
  out << "t";
  for (const auto& name : coordinate_names(system)) out << "," << name;
  for (const auto& name : input_names(system)) out << ",tau_" << name;
  const RigidBodySystem* rigid = config.rigid_body.get();
  const bool planar = rigid && rigid->model().planar();
  if (rigid) {
    for (const auto& foot : rigid->model().feet()) {
      out << "," << foot.name << "_fx";
      if (!planar) out << "," << foot.name << "_fy";
      out << "," << foot.name << "_fz," << foot.name << "_contact";
    }
  }
  out << "\n";
  for (int k = 0; k <= trajectory.horizon(); ++k) {
    const Vector& x = trajectory.states[k];
    const Vector& u = trajectory.inputs[std::min(k, trajectory.horizon() - 1)];
    out << format_number(k * trajectory.dt);
    for (int i = 0; i < x.size(); ++i) out << "," << format_number(x[i]);
    for (int i = 0; i < u.size(); ++i) out << "," << format_number(u[i]);
    if (rigid && rigid->num_feet() > 0) {
      const auto forces = rigid->contact_forces(x, trajectory.contacts[k]);
      for (std::size_t f = 0; f < forces.size(); ++f) {
        const Vector3 force = forces[f].total();
        out << "," << format_number(force.x());
        if (!planar) out << "," << format_number(force.y());
        out << "," << format_number(force.z()) << ","
            << (trajectory.contacts[k][f].in_contact ? 1 : 0);
      }
    }
    out << "\n";
  }
  write_text(path, out.str());
}

namespace {

json diagnostics_json(const TaskConfig& config, const TaskRun& run) {
  const SlqSolution& sol = run.solution;
  json records = json::array();
  for (const auto& r : sol.diagnostics)
    records.push_back({{"iteration", r.iteration},
                       {"cost", r.cost},
                       {"alpha", r.alpha},
                       {"max_ff_increment", r.max_ff_increment},
                       {"line_search_steps", r.line_search_steps},
                       {"regularization", r.regularization},
                       {"backward_passes", r.backward_passes},
                       {"accepted", r.accepted},
                       {"timings", timings_json(r.timings)}});
  json j = {{"task", config.name},
            {"status", to_string(sol.status)},
            {"converged", sol.converged()},
            {"iterations", sol.iterations},
            {"convergence_threshold", config.solver.convergence_threshold},
            {"cost_trace", sol.cost_trace},
            {"wall_time", run.wall_time},
            {"records", records},
            {"exit_code", run.exit_code}};
  if (!sol.cost_trace.empty()) {
    j["initial_cost"] = sol.cost_trace.front();
    j["final_cost"] = sol.cost_trace.back();
  }
  if (config.rigid_body && !sol.nominal.states.empty()) {
    const StateLayout layout = config.rigid_body->layout();
    const Vector& xf = sol.nominal.states.back();
    if (layout.base_x() >= 0) {
      j["final_base_x"] = xf[layout.base_x()];
      j["final_base_height"] = xf[layout.base_height()];
      double apex = -std::numeric_limits<double>::infinity();
      for (const auto& x : sol.nominal.states) apex = std::max(apex, x[layout.base_height()]);
      j["max_base_height"] = apex;
    }
  }
  return j;
}

json manifest_json(const TaskConfig& config, int exit_code, const std::string& status,
                   const std::vector<std::string>& artifacts) {
  return {{"task", config.name},
          {"config", config.config_path.string()},
          {"model", config.model_path.string()},
          {"config_hash", config.config_hash},
          {"seed", config.seed},
          {"threads", config.solver.threads},
          {"integrator", to_string(config.solver.integrator.method)},
          {"t_f", config.final_time},
          {"dt", config.dt},
          {"horizon", config.horizon()},
          {"versions", versions_json()},
          {"status", status},
          {"exit_code", exit_code},
          {"artifacts", artifacts}};
}

}  // namespace

TaskRun run_task(const TaskConfig& config, const std::filesystem::path& output_dir,
                 const SlqSolver::IterationCallback& callback) {
  std::filesystem::create_directories(output_dir);
  TaskRun run;
  try {
    run = solve_task(config, callback);
  } catch (const DynamicsError& e) {
    run.exit_code = kExitDiverged;
    run.message = e.what();
    write_json(output_dir / "diagnostics.json",
               {{"task", config.name},
                {"status", "diverged"},
                {"error", e.what()},
                {"time_index", e.time_index()},
                {"exit_code", run.exit_code}});
    write_json(output_dir / "manifest.json",
               manifest_json(config, run.exit_code, "diverged", {"diagnostics.json"}));
    return run;
  }

  write_trajectory_csv(config, run.solution.nominal, output_dir / "trajectory.csv");

  std::ostringstream trace;
  trace << "iteration,cost,normalized_cost,alpha,max_ff_increment,line_search_steps\n";
  const double initial = run.solution.cost_trace.front();
  int accepted = 0;
  trace << 0 << "," << format_number(initial) << ",1,0,0,0\n";
  for (const auto& r : run.solution.diagnostics) {
    if (!r.accepted) continue;
    ++accepted;
    trace << accepted << "," << format_number(r.cost) << ","
          << format_number(initial != 0.0 ? r.cost / initial : 0.0) << ","
          << format_number(r.alpha) << "," << format_number(r.max_ff_increment) << ","
          << r.line_search_steps << "\n";
  }
  write_text(output_dir / "cost_trace.csv", trace.str());

  json schedule = {{"schedule", to_json(run.schedule)}, {"statistics", to_json(run.statistics)}};
  write_json(output_dir / "schedule.json", schedule);
  write_json(output_dir / "diagnostics.json", diagnostics_json(config, run));
  write_json(output_dir / "manifest.json",
             manifest_json(config, run.exit_code, to_string(run.solution.status),
                           {"trajectory.csv", "cost_trace.csv", "schedule.json",
                            "diagnostics.json"}));
  return run;
}

// --- closed loop ---------------------------------------------------------------

std::vector<ClosedLoopRun> run_closed_loop(const TaskConfig& config,
                                           const SlqSolution& solution) {
  if (!config.tracking) throw ConfigError("tracking", "task has no tracking section");
  if (!config.rigid_body) throw ConfigError("tracking", "needs a rigid-body model");
  const RigidBodySystem& model = *config.rigid_body;
  const int height = model.layout().base_height();
  std::vector<ClosedLoopRun> runs;
  for (const auto& perturbation : config.tracking->perturbations) {
    ClosedLoopRun run;
    run.perturbation = perturbation;
    const RigidBodySystem plant = perturbed_plant(model, perturbation);
    run.log = simulate_closed_loop(plant, solution.nominal, config.tracking->gains, perturbation,
                                   config.tracking->settings);
    if (height >= 0) {
      run.nominal_min_height = std::numeric_limits<double>::infinity();
      for (const auto& x : solution.nominal.states)
        run.nominal_min_height = std::min(run.nominal_min_height, x[height]);
      run.min_height = run.log.min_base_height(height);
      run.fell = run.log.diverged ||
                 run.min_height < config.tracking->min_height_fraction * run.nominal_min_height;
    } else {
      run.fell = run.log.diverged;
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

void write_execution_csv(const TaskConfig& config, const ExecutionLog& log,
                         const std::filesystem::path& path) {
  const RigidBodySystem& system = *config.rigid_body;
  const bool planar = system.model().planar();
  std::ostringstream out;
  out << "t";
  for (const auto& name : coordinate_names(system)) out << "," << name;
  const auto inputs = input_names(system);
  for (const char* prefix : {"tau_cmd_", "tau_ff_", "tau_fb_"})
    for (const auto& name : inputs) out << "," << prefix << name;
  for (const auto& foot : system.model().feet()) {
    out << "," << foot.name << "_fx";
    if (!planar) out << "," << foot.name << "_fy";
    out << "," << foot.name << "_fz," << foot.name << "_stance";
  }
  out << ",joint_error,base_error\n";
  for (std::size_t k = 0; k < log.states.size(); ++k) {
    out << format_number(log.time[k]);
    for (int i = 0; i < log.states[k].size(); ++i) out << "," << format_number(log.states[k][i]);
    for (const auto* v : {&log.tau_cmd[k], &log.tau_ff[k], &log.tau_fb[k]})
      for (int i = 0; i < v->size(); ++i) out << "," << format_number((*v)[i]);
    for (std::size_t f = 0; f < log.forces[k].size(); ++f) {
      out << "," << format_number(log.forces[k][f].x());
      if (!planar) out << "," << format_number(log.forces[k][f].y());
      out << "," << format_number(log.forces[k][f].z()) << "," << (log.stance[k][f] ? 1 : 0);
    }
    out << "," << format_number(log.joint_error[k]) << "," << format_number(log.base_error[k])
        << "\n";
  }
  write_text(path, out.str());
}

// --- runtime benchmark ---------------------------------------------------------

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line needs two or more matching samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

RuntimeBenchmark benchmark_runtime(const TaskConfig& config,
                                   const std::vector<int>& step_counts, int repetitions,
                                   int iterations) {
  if (repetitions < 1) throw ConfigError("benchmark.repetitions", "must be >= 1");
  if (iterations < 1) throw ConfigError("benchmark.iterations", "must be >= 1");
  RuntimeBenchmark bench;
  for (int steps : step_counts) {
    TaskConfig cfg = config.with_horizon(steps);
    cfg.solver.max_iterations = iterations;
    cfg.solver.convergence_threshold = std::numeric_limits<double>::min();
    std::vector<double> totals;
    for (int rep = 0; rep < repetitions; ++rep) {
      SlqSolver solver(*cfg.system, cfg.cost, cfg.solver);
      const SlqSolution sol = solver.solve(cfg.initial_state, cfg.make_initial_controller());
      RuntimeSample sample;
      sample.steps = steps;
      sample.repetition = rep;
      // Every record counts, including the final convergence check. The
      // rollout phase is normalized to a single rollout: the number of
      // line-search rollouts depends on the discretization, not on N.
      int rollouts = 1;  // the initial rollout
      for (const auto& r : sol.diagnostics) {
        sample.per_iteration.rollout += r.timings.rollout;
        sample.per_iteration.linearize += r.timings.linearize;
        sample.per_iteration.quadratize += r.timings.quadratize;
        sample.per_iteration.backward += r.timings.backward;
        rollouts += r.line_search_steps;
      }
      const int timed = static_cast<int>(sol.diagnostics.size());
      sample.iterations = timed;
      sample.rollouts_per_iteration = static_cast<double>(rollouts) / timed;
      sample.per_iteration.rollout /= rollouts;
      sample.per_iteration.linearize /= timed;
      sample.per_iteration.quadratize /= timed;
      sample.per_iteration.backward /= timed;
      totals.push_back(sample.per_iteration.total());
      bench.samples.push_back(sample);
    }
    const double mean = std::accumulate(totals.begin(), totals.end(), 0.0) / totals.size();
    double var = 0.0;
    for (double t : totals) var += (t - mean) * (t - mean);
    bench.steps.push_back(steps);
    bench.mean.push_back(mean);
    bench.stddev.push_back(totals.size() > 1 ? std::sqrt(var / (totals.size() - 1)) : 0.0);
  }
  if (bench.steps.size() >= 2) {
    std::vector<double> x(bench.steps.begin(), bench.steps.end());
    bench.fit = fit_line(x, bench.mean);
  }
  return bench;
}

void write_benchmark(const RuntimeBenchmark& bench, const std::filesystem::path& output_dir) {
  std::filesystem::create_directories(output_dir);
  std::ostringstream csv;
  csv << "steps,repetition,iterations,rollouts_per_iteration,rollout,linearize,quadratize,"
         "backward,total\n";
  for (const auto& s : bench.samples)
    csv << s.steps << "," << s.repetition << "," << s.iterations << ","
        << format_number(s.rollouts_per_iteration) << ","
        << format_number(s.per_iteration.rollout) << ","
        << format_number(s.per_iteration.linearize) << ","
        << format_number(s.per_iteration.quadratize) << ","
        << format_number(s.per_iteration.backward) << ","
        << format_number(s.per_iteration.total()) << "\n";
  write_text(output_dir / "benchmark.csv", csv.str());
  json summary = {{"steps", bench.steps},
                  {"mean_per_iteration", bench.mean},
                  {"stddev_per_iteration", bench.stddev},
                  {"fit",
                   {{"slope", bench.fit.slope},
                    {"intercept", bench.fit.intercept},
                    {"r_squared", bench.fit.r_squared}}}};
  write_json(output_dir / "benchmark.json", summary);
}

// --- convergence report --------------------------------------------------------

namespace {

ConvergenceSeries make_series(const std::string& task, const std::vector<double>& cost,
                              bool converged, const std::string& status, int iterations) {
  ConvergenceSeries s;
  s.task = task;
  s.cost = cost;
  s.converged = converged;
  s.status = status;
  s.iterations = iterations;
  for (std::size_t k = 0; k < cost.size(); ++k) {
    s.normalized.push_back(cost.front() != 0.0 ? cost[k] / cost.front() : 0.0);
    if (k > 0 && cost[k] > cost[k - 1]) s.monotone = false;
  }
  if (converged) s.iterations_to_threshold = iterations;
  return s;
}

}  // namespace

ConvergenceSeries convergence_series(const std::string& task, const SlqSolution& solution) {
  return make_series(task, solution.cost_trace, solution.converged(),
                     to_string(solution.status), solution.iterations);
}

std::vector<ConvergenceSeries> report_convergence(
    const std::vector<std::filesystem::path>& run_dirs) {
  std::vector<ConvergenceSeries> out;
  for (const auto& dir : run_dirs) {
    const json d = read_json_file(dir / "diagnostics.json");
    if (!d.contains("cost_trace"))
      throw ConfigError((dir / "diagnostics.json").string(), "run has no cost trace");
    out.push_back(make_series(d.value("task", dir.filename().string()),
                              d["cost_trace"].get<std::vector<double>>(),
                              d.value("converged", false), d.value("status", std::string()),
                              d.value("iterations", 0)));
  }
  return out;
}

void write_convergence_report(const std::vector<ConvergenceSeries>& series,
                              const std::filesystem::path& output_dir) {
  std::filesystem::create_directories(output_dir);
  std::ostringstream csv;
  csv << "task,iteration,cost,normalized_cost\n";
  json summary = json::array();
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.cost.size(); ++k)
      csv << s.task << "," << k << "," << format_number(s.cost[k]) << ","
          << format_number(s.normalized[k]) << "\n";
    summary.push_back({{"task", s.task},
                       {"status", s.status},
                       {"converged", s.converged},
                       {"iterations", s.iterations},
                       {"iterations_to_threshold",
                        s.iterations_to_threshold ? json(*s.iterations_to_threshold) : json()},
                       {"monotone", s.monotone},
                       {"final_normalized_cost", s.normalized.empty() ? 0.0 : s.normalized.back()}});
  }
  write_text(output_dir / "convergence.csv", csv.str());
  write_json(output_dir / "convergence_summary.json", summary);
}

}  // namespace gaitopt
