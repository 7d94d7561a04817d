#include "bsel/environments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bsel {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Reflects one coordinate into [lo, hi], flipping the velocity on contact.
void reflect(double& pos, double& vel, double lo, double hi) {
  for (int guard = 0; guard < 8 && (pos < lo || pos > hi); ++guard) {
    if (pos > hi) {
      pos = 2.0 * hi - pos;
      vel = -std::abs(vel);
    } else {
      pos = 2.0 * lo - pos;
      vel = std::abs(vel);
    }
  }
  pos = std::clamp(pos, lo, hi);
}

std::string arena_tag(const Arena& a) {
  std::ostringstream os;
  os << "[" << a.x_lo << "," << a.x_hi << "]x[" << a.y_lo << "," << a.y_hi << "]";
  return os.str();
}

}  // namespace

std::string_view to_string(MissionKind kind) { return kind == MissionKind::Convoy ? "convoy" : "box"; }

MissionKind mission_from_string(std::string_view name) {
  if (name == "convoy") return MissionKind::Convoy;
  if (name == "box") return MissionKind::Box;
  throw std::invalid_argument("unknown mission '" + std::string(name) + "' (expected convoy or box)");
}

void ConvoyEnv::validate() const {
  if (!z.allFinite() || !v_z.allFinite()) throw std::invalid_argument("convoy: target state must be finite");
  if (!(sigma >= 0.0)) throw std::invalid_argument("convoy.sigma must be >= 0");
  if (!(delta > 0.0)) throw std::invalid_argument("convoy.delta must be > 0");
  if (bins < 2) throw std::invalid_argument("convoy.bins must be >= 2");
  if (!(bin_width > 0.0)) throw std::invalid_argument("convoy.bin_width must be > 0");
  if (!arena.contains(z)) throw std::invalid_argument("convoy.target_start must lie inside the arena");
}

std::string ConvoyEnv::discretization_id() const {
  std::ostringstream os;
  os << "convoy/centroid-distance/bins=" << bins << "/width=" << bin_width;
  return os.str();
}

void BoxEnv::validate() const {
  if (!e.allFinite() || !goal.allFinite()) throw std::invalid_argument("box: positions must be finite");
  if (!(rho > 0.0)) throw std::invalid_argument("box.rho must be > 0");
  if (!(kappa >= 0.0)) throw std::invalid_argument("box.kappa must be >= 0");
  if (nx < 1 || ny < 1 || nx * ny < 2) throw std::invalid_argument("box.grid must have at least 2 cells");
  if (!(goal_tol >= 0.0)) throw std::invalid_argument("box.goal_tol must be >= 0");
  if (!(waypoint_offset >= 0.0)) throw std::invalid_argument("box.waypoint_offset must be >= 0");
  if (!(grip_scale >= 0.0)) throw std::invalid_argument("box.grip_scale must be >= 0");
  if (!arena.contains(e)) throw std::invalid_argument("box.start must lie inside the arena");
  if (!arena.contains(goal)) throw std::invalid_argument("box.goal must lie inside the arena");
}

std::string BoxEnv::discretization_id() const {
  std::ostringstream os;
  os << "box/grid=" << nx << "x" << ny << "/arena=" << arena_tag(arena);
  return os.str();
}

ConvoyEnv convoy_step(const ConvoyEnv& env, double dt, Rng& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("convoy_step: dt must be positive");
  const Vec2 xi = standard_normal2(rng);
  ConvoyEnv next = env;
  next.z = env.z + dt * (env.v_z + env.sigma * xi);
  reflect(next.z.x(), next.v_z.x(), env.arena.x_lo, env.arena.x_hi);
  reflect(next.z.y(), next.v_z.y(), env.arena.y_lo, env.arena.y_hi);
  return next;
}

int convoy_observe(const ConvoyEnv& env, const EnsembleState& x) {
  const double d = (centroid(x) - env.z).norm();
  const double bin = std::floor(d / env.bin_width);
  if (!(bin < env.bins - 1)) return env.bins - 1;
  return static_cast<int>(bin);
}

double convoy_reward(const ConvoyEnv& env, const EnsembleState& x) {
  const auto n = x.size();
  double ring = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double err = (x.positions.col(i) - env.z).norm() - env.delta;
    ring += err * err;
  }
  return -(env.z - centroid(x)).squaredNorm() - ring / static_cast<double>(n);
}

double min_distance(const EnsembleState& x, const Vec2& p) {
  return (x.positions.colwise() - p).colwise().norm().minCoeff();
}

BoxEnv box_step(const BoxEnv& env, const EnsembleState& before, const EnsembleState& after) {
  if (before.size() != after.size()) throw std::invalid_argument("box_step: robot count mismatch");
  BoxEnv next = env;
  if (min_distance(before, env.e) > env.rho) return next;
  if (env.coupling == BoxCoupling::Displacement)
    next.e = env.e + (centroid(after) - centroid(before));
  else
    next.e = centroid(after);
  return next;
}

int box_observe(const BoxEnv& env, const EnsembleState& /*x*/) {
  const Arena& a = env.arena;
  auto cell = [](double v, double lo, double span, int count) {
    const double c = std::floor((v - lo) / span * count);
    return static_cast<int>(std::clamp(c, 0.0, static_cast<double>(count - 1)));
  };
  const int ix = cell(env.e.x(), a.x_lo, a.width(), env.nx);
  const int iy = cell(env.e.y(), a.y_lo, a.height(), env.ny);
  return iy * env.nx + ix;
}

double box_reward(const BoxEnv& env) { return -(env.kappa + (env.e - env.goal).norm()); }

Vec2 box_waypoint(const BoxEnv& env, const EnsembleState& x, const ParamSpace& space) {
  if (min_distance(x, env.e) > env.rho) return env.e;
  const Vec2 to_goal = env.goal - env.e;
  const double len = to_goal.norm();
  if (len == 0.0) return env.e.cwiseMax(space.phi_lo).cwiseMin(space.phi_hi);
  const Vec2 q = env.e + to_goal / len * env.waypoint_offset;
  return q.cwiseMax(space.phi_lo).cwiseMin(space.phi_hi);
}

namespace {

// (scale(theta) - target)^2, where scale is linear in theta: the ring radius
// for cyclic pursuit, theta itself otherwise.
void add_scale_term(BehaviorId id, const EnsembleState& x, const BehaviorParams& p, double target,
                    CostEval& out) {
  const double k = id == BehaviorId::CyclicPursuit ? theta_to_radius(1.0, static_cast<int>(x.size())) : 1.0;
  const double err = k * p.theta - target;
  out.value += err * err;
  out.grad.theta += 2.0 * err * k;
}

}  // namespace

CostEval tuning_cost(BehaviorId id, const EnsembleState& x, const Environment& env,
                     const BehaviorParams& p, const ParamSpace& space) {
  CostEval out;
  std::visit(overloaded{
                 [&](const ConvoyEnv& c) {
                   const Vec2 dphi = p.phi - c.z;
                   out.value = dphi.squaredNorm();
                   out.grad.phi = 2.0 * dphi;
                   if (c.delta_known) add_scale_term(id, x, p, c.delta, out);
                 },
                 [&](const BoxEnv& b) {
                   const Vec2 dphi = p.phi - box_waypoint(b, x, space);
                   out.value = dphi.squaredNorm();
                   out.grad.phi = 2.0 * dphi;
                   if (b.grip_scale > 0.0) add_scale_term(id, x, p, b.grip_scale, out);
                 }},
             env);
  return out;
}

MissionKind kind(const Environment& env) {
  return std::holds_alternative<ConvoyEnv>(env) ? MissionKind::Convoy : MissionKind::Box;
}

Environment env_step(const Environment& env, const EnsembleState& before,
                     const EnsembleState& after, double dt, Rng& rng) {
  return std::visit(overloaded{[&](const ConvoyEnv& c) -> Environment { return convoy_step(c, dt, rng); },
                               [&](const BoxEnv& b) -> Environment { return box_step(b, before, after); }},
                    env);
}

int observe(const Environment& env, const EnsembleState& x) {
  return std::visit(overloaded{[&](const ConvoyEnv& c) { return convoy_observe(c, x); },
                               [&](const BoxEnv& b) { return box_observe(b, x); }},
                    env);
}

double reward(const Environment& env, const EnsembleState& x) {
  return std::visit(overloaded{[&](const ConvoyEnv& c) { return convoy_reward(c, x); },
                               [&](const BoxEnv& b) { return box_reward(b); }},
                    env);
}

int state_count(const Environment& env) {
  return std::visit([](const auto& e) { return e.states(); }, env);
}

std::string discretization_id(const Environment& env) {
  return std::visit([](const auto& e) { return e.discretization_id(); }, env);
}

bool mission_complete(const Environment& env) {
  if (const auto* b = std::get_if<BoxEnv>(&env)) return b->complete();
  return false;
}

}  // namespace bsel
