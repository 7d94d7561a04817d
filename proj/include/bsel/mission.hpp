#ifndef BSEL_MISSION_HPP
#define BSEL_MISSION_HPP

#include "bsel/behavior.hpp"
#include "bsel/environments.hpp"
#include "bsel/learning.hpp"
#include "bsel/random.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace bsel {

struct RunConfig {
  double eps_energy = 0.05;   // interrupt threshold on the behavior energy
  double dwell_max = 20.0;    // seconds; bounds every dwell
  double min_dwell = 1.0;     // seconds a behavior runs before the interrupt is honored
  double t_f = 60.0;          // mission horizon
  double dt = 0.01;
  int episodes = 200;
  int eval_episodes = 50;
  std::uint64_t seed = 1;
  bool reset_param_memory = true;
  int trajectory_stride = 0;  // record every k-th integrator step; 0 disables
  Arena arena;

  void validate() const;
};

enum class Interrupt { EnergyThreshold, DwellTimeout, HorizonEnd };
std::string_view to_string(Interrupt why);

struct SwitchEvent {
  double tau = 0.0;       // dwell start (switching time)
  double tau_next = 0.0;  // dwell end
  int behavior = 0;       // library index
  BehaviorId behavior_id = BehaviorId::StaticFormation;
  BehaviorParams params_in;
  BehaviorParams params_out;
  int s = 0;
  int s_next = 0;
  double reward = 0.0;
  double energy_exit = 0.0;
  Interrupt interrupted_by = Interrupt::EnergyThreshold;
};

struct EpisodeLog {
  std::vector<SwitchEvent> events;
  std::vector<EnsembleState> trajectory;
  double total_reward = 0.0;
  bool mission_complete = false;
};

/// Everything that stays fixed across the episodes of one experiment.
struct Mission {
  std::vector<BehaviorSpec> library;
  Environment environment;  // state at the start of every episode
  RunConfig run;
  LearningConfig learning;
  int robots = 5;

  int states() const { return state_count(environment); }
  int behaviors() const { return static_cast<int>(library.size()); }
  void validate() const;
};

Mission make_mission(MissionKind kind, int robots = 5);

/// Independent random streams of one episode. The environment stream drives
/// robot initialization and target noise, so modes that share it see the same
/// world; the agent stream drives every choice the team makes.
struct EpisodeRngs {
  Rng environment;
  Rng agent;
};

enum class Phase { Train, Eval };
EpisodeRngs episode_rngs(std::uint64_t seed, Phase phase, int episode);

enum class Tuning { Online, Frozen };

struct DwellResult {
  EnsembleState x;
  Environment env;
  double tau = 0.0;
  double tau_next = 0.0;
  BehaviorParams params_in;
  BehaviorParams params_out;
  double energy_exit = 0.0;
  Interrupt interrupted_by = Interrupt::EnergyThreshold;
  long steps = 0;
};

struct DwellHooks {
  std::vector<double>* energy_trace = nullptr;  // energy at every check
  std::vector<EnsembleState>* trajectory = nullptr;
  int stride = 0;
};

/// Runs behavior m from x until its energy is at most eps_energy (once
/// min_dwell has elapsed), dwell_max elapses, or the horizon is reached. With
/// Online tuning the parameters follow the projected cost gradient flow; the
/// final parameters are written back to memory.
DwellResult run_dwell(const Mission& mission, int m, ParamMemory& memory, const EnsembleState& x,
                      const Environment& env, Rng& env_rng, Tuning tuning = Tuning::Online,
                      const DwellHooks& hooks = {});

/// Robots uniform over the arena at t = 0.
EnsembleState initial_state(const Mission& mission, Rng& env_rng);

/// One epsilon-greedy training episode; q is updated in place.
EpisodeLog run_episode_train(QTable& q, const Mission& mission, int episode, EpisodeRngs& rngs,
                             ParamMemory* persistent_memory = nullptr);

/// Greedy rollout of a trained table; q is not modified.
EpisodeLog run_episode_eval(const QTable& q, const Mission& mission, EpisodeRngs& rngs);

/// Cyclic pursuit on a ring of radius delta about the target, every switch.
EpisodeLog run_adhoc_convoy(const Mission& mission, EpisodeRngs& rngs);

/// Uniform behavior and uniform parameters at every switch.
EpisodeLog run_random_baseline(const Mission& mission, EpisodeRngs& rngs);

struct TrainResult {
  QTable q;
  std::vector<double> episode_rewards;
  std::vector<EpisodeLog> logs;  // kept only when requested
};

/// Full training run: Q-table initialized from the seed, episodes in order.
TrainResult train(const Mission& mission, bool keep_logs = false);

enum class EvalMode { Trained, Random, Adhoc };
std::string_view to_string(EvalMode mode);
EvalMode eval_mode_from_string(std::string_view name);

/// eval_episodes paired episodes under one mode.
std::vector<EpisodeLog> evaluate(const Mission& mission, EvalMode mode, const QTable* q);

/// Checks the structural invariants every log must satisfy; returns an empty
/// string when the log is legal, otherwise a description of the violation.
std::string check_log(const EpisodeLog& log, const Mission& mission);

}  // namespace bsel

#endif  // BSEL_MISSION_HPP
