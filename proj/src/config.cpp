#include "bsel/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace bsel {

using nlohmann::json;

namespace {

class FieldError : public std::invalid_argument {
 public:
  FieldError(const std::string& field, const std::string& what)
      : std::invalid_argument("config field '" + field + "': " + what) {}
};

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown fields.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw FieldError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  void finish() const {
    for (const auto& [key, value] : node_.items())
      if (!seen_.count(key)) throw FieldError(field(key), "unknown field");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key);
  }

  Section child(const std::string& key) { return Section(node_.at(key), field(key)); }

  void read(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_number()) throw FieldError(field(key), "expected a number");
    out = v.get<double>();
  }

  void read(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) throw FieldError(field(key), "expected an integer");
    out = v.get<int>();
  }

  void read(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw FieldError(field(key), "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void read(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_boolean()) throw FieldError(field(key), "expected true or false");
    out = v.get<bool>();
  }

  void read(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_string()) throw FieldError(field(key), "expected a string");
    out = v.get<std::string>();
  }

  void read_pair(const std::string& key, double& a, double& b) {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw FieldError(field(key), "expected a two-element numeric array");
    a = v[0].get<double>();
    b = v[1].get<double>();
  }

  void read(const std::string& key, Vec2& out) { read_pair(key, out.x(), out.y()); }

  void read_grid(const std::string& key, int& nx, int& ny) {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
      throw FieldError(field(key), "expected [nx, ny] integers");
    nx = v[0].get<int>();
    ny = v[1].get<int>();
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

json vec(const Vec2& v) { return json::array({v.x(), v.y()}); }

}  // namespace

void ExperimentConfig::validate() const {
  if (robots < 2) throw FieldError("robots", "must be >= 2");
  run.validate();
  learning.validate();
  try {
    space.validate();
  } catch (const std::invalid_argument& e) {
    throw FieldError("library", e.what());
  }
  if (output_dir.empty()) throw FieldError("output_dir", "must not be empty");
  if (!(run.arena.x_lo < run.arena.x_hi && run.arena.y_lo < run.arena.y_hi))
    throw FieldError("arena", "bounds must satisfy lo < hi");
  if (mission == MissionKind::Convoy) {
    convoy.validate();
    // The ad-hoc baseline needs a ring of radius delta expressible inside Theta.
    const double theta = radius_to_theta(convoy.delta, robots);
    if (theta < space.theta_lo || theta > space.theta_hi)
      throw FieldError("convoy.delta", "ring of this radius needs a chord length outside library.theta");
  } else {
    box.validate();
  }
}

Mission ExperimentConfig::to_mission() const {
  validate();
  Mission m;
  m.robots = robots;
  m.library = default_library(robots, space);
  m.run = run;
  m.learning = learning;
  if (mission == MissionKind::Convoy) {
    ConvoyEnv c = convoy;
    c.arena = run.arena;
    m.environment = c;
  } else {
    BoxEnv b = box;
    b.arena = run.arena;
    m.environment = b;
  }
  return m;
}

ExperimentConfig config_from_json(const json& doc) {
  ExperimentConfig cfg;
  Section root(doc, "");

  std::string mission = "convoy";
  root.read("mission", mission);
  try {
    cfg.mission = mission_from_string(mission);
  } catch (const std::invalid_argument& e) {
    throw FieldError("mission", e.what());
  }
  root.read("robots", cfg.robots);
  root.read("output_dir", cfg.output_dir);
  root.read("seed", cfg.run.seed);

  if (root.has("arena")) {
    Section a = root.child("arena");
    a.read_pair("x", cfg.run.arena.x_lo, cfg.run.arena.x_hi);
    a.read_pair("y", cfg.run.arena.y_lo, cfg.run.arena.y_hi);
    a.finish();
  }
  cfg.convoy.arena = cfg.run.arena;
  cfg.box.arena = cfg.run.arena;

  if (root.has("run")) {
    Section r = root.child("run");
    r.read("eps_energy", cfg.run.eps_energy);
    r.read("dwell_max", cfg.run.dwell_max);
    r.read("min_dwell", cfg.run.min_dwell);
    r.read("t_f", cfg.run.t_f);
    r.read("dt", cfg.run.dt);
    r.read("episodes", cfg.run.episodes);
    r.read("eval_episodes", cfg.run.eval_episodes);
    r.read("reset_param_memory", cfg.run.reset_param_memory);
    r.read("trajectory_stride", cfg.run.trajectory_stride);
    r.finish();
  }
  if (root.has("learning")) {
    Section l = root.child("learning");
    l.read("alpha", cfg.learning.alpha);
    l.read("gamma", cfg.learning.gamma);
    l.read("eps0", cfg.learning.eps0);
    l.read("eps_decay", cfg.learning.eps_decay);
    l.read("ogd_rate", cfg.learning.ogd_rate);
    l.read("fd_step", cfg.learning.fd_step);
    l.read("q_init_range", cfg.learning.q_init_range);
    l.finish();
  }
  if (root.has("library")) {
    Section l = root.child("library");
    l.read_pair("theta", cfg.space.theta_lo, cfg.space.theta_hi);
    l.read("phi_lo", cfg.space.phi_lo);
    l.read("phi_hi", cfg.space.phi_hi);
    l.finish();
  }
  if (root.has("convoy")) {
    Section c = root.child("convoy");
    c.read("target_start", cfg.convoy.z);
    c.read("velocity", cfg.convoy.v_z);
    c.read("sigma", cfg.convoy.sigma);
    c.read("delta", cfg.convoy.delta);
    c.read("bins", cfg.convoy.bins);
    c.read("bin_width", cfg.convoy.bin_width);
    c.read("delta_known", cfg.convoy.delta_known);
    c.finish();
  }
  if (root.has("box")) {
    Section b = root.child("box");
    b.read("start", cfg.box.e);
    b.read("goal", cfg.box.goal);
    b.read("rho", cfg.box.rho);
    b.read("kappa", cfg.box.kappa);
    b.read_grid("grid", cfg.box.nx, cfg.box.ny);
    b.read("goal_tol", cfg.box.goal_tol);
    b.read("waypoint_offset", cfg.box.waypoint_offset);
    b.read("grip_scale", cfg.box.grip_scale);
    std::string coupling = cfg.box.coupling == BoxCoupling::Displacement ? "displacement" : "teleport";
    b.read("coupling", coupling);
    if (coupling == "displacement")
      cfg.box.coupling = BoxCoupling::Displacement;
    else if (coupling == "teleport")
      cfg.box.coupling = BoxCoupling::Teleport;
    else
      throw FieldError("box.coupling", "expected \"displacement\" or \"teleport\"");
    b.finish();
  }
  root.finish();
  return cfg;
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["mission"] = std::string(to_string(cfg.mission));
  j["robots"] = cfg.robots;
  j["output_dir"] = cfg.output_dir;
  j["seed"] = cfg.run.seed;
  j["arena"] = {{"x", {cfg.run.arena.x_lo, cfg.run.arena.x_hi}},
                {"y", {cfg.run.arena.y_lo, cfg.run.arena.y_hi}}};
  j["run"] = {{"eps_energy", cfg.run.eps_energy},
              {"dwell_max", cfg.run.dwell_max},
              {"min_dwell", cfg.run.min_dwell},
              {"t_f", cfg.run.t_f},
              {"dt", cfg.run.dt},
              {"episodes", cfg.run.episodes},
              {"eval_episodes", cfg.run.eval_episodes},
              {"reset_param_memory", cfg.run.reset_param_memory},
              {"trajectory_stride", cfg.run.trajectory_stride}};
  j["learning"] = {{"alpha", cfg.learning.alpha},
                   {"gamma", cfg.learning.gamma},
                   {"eps0", cfg.learning.eps0},
                   {"eps_decay", cfg.learning.eps_decay},
                   {"ogd_rate", cfg.learning.ogd_rate},
                   {"fd_step", cfg.learning.fd_step},
                   {"q_init_range", cfg.learning.q_init_range}};
  j["library"] = {{"theta", {cfg.space.theta_lo, cfg.space.theta_hi}},
                  {"phi_lo", vec(cfg.space.phi_lo)},
                  {"phi_hi", vec(cfg.space.phi_hi)}};
  j["convoy"] = {{"target_start", vec(cfg.convoy.z)},
                 {"velocity", vec(cfg.convoy.v_z)},
                 {"sigma", cfg.convoy.sigma},
                 {"delta", cfg.convoy.delta},
                 {"bins", cfg.convoy.bins},
                 {"bin_width", cfg.convoy.bin_width},
                 {"delta_known", cfg.convoy.delta_known}};
  j["box"] = {{"start", vec(cfg.box.e)},
              {"goal", vec(cfg.box.goal)},
              {"rho", cfg.box.rho},
              {"kappa", cfg.box.kappa},
              {"grid", {cfg.box.nx, cfg.box.ny}},
              {"goal_tol", cfg.box.goal_tol},
              {"waypoint_offset", cfg.box.waypoint_offset},
              {"grip_scale", cfg.box.grip_scale},
              {"coupling", cfg.box.coupling == BoxCoupling::Displacement ? "displacement" : "teleport"}};
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  ExperimentConfig cfg = config_from_json(doc);
  cfg.validate();
  return cfg;
}

}  // namespace bsel
