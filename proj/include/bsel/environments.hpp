#ifndef BSEL_ENVIRONMENTS_HPP
#define BSEL_ENVIRONMENTS_HPP

#include "bsel/behavior.hpp"
#include "bsel/learning.hpp"
#include "bsel/random.hpp"

#include <string>
#include <variant>

namespace bsel {

enum class MissionKind { Convoy, Box };

std::string_view to_string(MissionKind kind);
MissionKind mission_from_string(std::string_view name);

/// Moving target the team must ring at distance delta.
struct ConvoyEnv {
  Vec2 z = Vec2(-1.0, -0.5);          // target position
  Vec2 v_z = Vec2(0.03, 0.015);       // drift velocity, m/s
  double sigma = 0.01;                // disturbance std, m/s
  double delta = 0.5;                 // desired robot-to-target distance
  int bins = 10;
  double bin_width = 0.3;
  bool delta_known = true;            // whether the tuning cost sees delta
  Arena arena;

  void validate() const;
  int states() const { return bins; }
  std::string discretization_id() const;
};

enum class BoxCoupling { Displacement, Teleport };

/// Object pushed by the team once any robot is within rho of it.
struct BoxEnv {
  Vec2 e = Vec2(0.9, 0.6);       // box position
  Vec2 goal = Vec2::Zero();
  double rho = 0.2;
  double kappa = 0.1;            // per-switch time penalty
  int nx = 8;
  int ny = 5;
  double goal_tol = 0.05;
  double waypoint_offset = 0.2;  // transport waypoint distance beyond the box
  BoxCoupling coupling = BoxCoupling::Teleport;
  // Formation scale the tuning cost pulls theta toward so the team stays
  // within reach of the box; 0 leaves theta untuned.
  double grip_scale = 0.1;
  Arena arena;

  void validate() const;
  int states() const { return nx * ny; }
  std::string discretization_id() const;
  bool complete() const { return (e - goal).norm() <= goal_tol; }
};

using Environment = std::variant<ConvoyEnv, BoxEnv>;

ConvoyEnv convoy_step(const ConvoyEnv& env, double dt, Rng& rng);
int convoy_observe(const ConvoyEnv& env, const EnsembleState& x);
double convoy_reward(const ConvoyEnv& env, const EnsembleState& x);

BoxEnv box_step(const BoxEnv& env, const EnsembleState& before, const EnsembleState& after);
int box_observe(const BoxEnv& env, const EnsembleState& x);
double box_reward(const BoxEnv& env);

/// Closest robot distance to p.
double min_distance(const EnsembleState& x, const Vec2& p);

/// Point the leader's goal should track in the box mission: the box itself
/// until it is detected, then a waypoint just beyond it toward the goal.
Vec2 box_waypoint(const BoxEnv& env, const EnsembleState& x, const ParamSpace& space);

struct CostEval {
  double value = 0.0;
  ParamGradient grad;
};

/// Parameter-tuning cost with analytic gradients.
CostEval tuning_cost(BehaviorId id, const EnsembleState& x, const Environment& env,
                     const BehaviorParams& p, const ParamSpace& space);

// Mission-agnostic dispatch.
MissionKind kind(const Environment& env);
Environment env_step(const Environment& env, const EnsembleState& before,
                     const EnsembleState& after, double dt, Rng& rng);
int observe(const Environment& env, const EnsembleState& x);
double reward(const Environment& env, const EnsembleState& x);
int state_count(const Environment& env);
std::string discretization_id(const Environment& env);
bool mission_complete(const Environment& env);

}  // namespace bsel

#endif  // BSEL_ENVIRONMENTS_HPP
