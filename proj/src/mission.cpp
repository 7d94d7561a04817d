#include "bsel/mission.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bsel {

namespace {

struct Selection {
  int m = 0;
  std::optional<BehaviorParams> params;  // overrides the remembered parameters
  Tuning tuning = Tuning::Online;
};

using Selector = std::function<Selection(int s, const EnsembleState& x, const Environment& env)>;
using Learner = std::function<void(const SwitchEvent& event, bool terminal)>;

bool reached(double t, double limit, double dt) { return t >= limit - 0.5 * dt; }

EpisodeLog run_episode(const Mission& mission, EpisodeRngs& rngs, ParamMemory& memory,
                       const Selector& select, const Learner& learn) {
  const RunConfig& cfg = mission.run;
  if (!(cfg.min_dwell > 0.0))
    throw std::invalid_argument("episodes require run.min_dwell > 0 so every switch advances time");

  EpisodeLog log;
  EnsembleState x = initial_state(mission, rngs.environment);
  Environment env = mission.environment;
  DwellHooks hooks;
  if (cfg.trajectory_stride > 0) {
    hooks.trajectory = &log.trajectory;
    hooks.stride = cfg.trajectory_stride;
    log.trajectory.push_back(x);
  }

  int s = observe(env, x);
  while (!reached(x.time, cfg.t_f, cfg.dt)) {
    const Selection sel = select(s, x, env);
    if (sel.m < 0 || sel.m >= mission.behaviors())
      throw std::out_of_range("selected behavior index out of range");
    const BehaviorSpec& spec = mission.library[static_cast<std::size_t>(sel.m)];
    if (sel.params) memory.set(sel.m, *sel.params, spec.space);

    DwellResult dwell = run_dwell(mission, sel.m, memory, x, env, rngs.environment, sel.tuning, hooks);
    x = std::move(dwell.x);
    env = std::move(dwell.env);

    SwitchEvent ev;
    ev.tau = dwell.tau;
    ev.tau_next = dwell.tau_next;
    ev.behavior = sel.m;
    ev.behavior_id = spec.id;
    ev.params_in = dwell.params_in;
    ev.params_out = dwell.params_out;
    ev.s = s;
    ev.s_next = observe(env, x);
    ev.reward = reward(env, x);
    ev.energy_exit = dwell.energy_exit;
    ev.interrupted_by = dwell.interrupted_by;

    const bool complete = mission_complete(env);
    const bool terminal = complete || dwell.interrupted_by == Interrupt::HorizonEnd ||
                          reached(x.time, cfg.t_f, cfg.dt);
    if (learn) learn(ev, terminal);
    log.total_reward += ev.reward;
    log.events.push_back(ev);
    s = ev.s_next;
    if (complete) {
      log.mission_complete = true;
      break;
    }
  }
  return log;
}

ParamMemory fresh_or_persistent(const Mission& mission, Rng& agent, ParamMemory* persistent) {
  if (persistent == nullptr) return ParamMemory::sample(mission.library, agent);
  if (mission.run.reset_param_memory || persistent->size() != mission.library.size())
    *persistent = ParamMemory::sample(mission.library, agent);
  return *persistent;
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("run." + msg); };
  if (!(eps_energy > 0.0)) fail("eps_energy must be > 0");
  if (!(dt > 0.0)) fail("dt must be > 0");
  if (!(dwell_max > 0.0)) fail("dwell_max must be > 0");
  if (!(dt < dwell_max)) fail("dt must be smaller than run.dwell_max");
  if (!(dwell_max <= t_f)) fail("dwell_max must not exceed run.t_f");
  if (!(min_dwell >= 0.0 && min_dwell <= dwell_max)) fail("min_dwell must be in [0, run.dwell_max]");
  if (episodes < 1) fail("episodes must be >= 1");
  if (eval_episodes < 1) fail("eval_episodes must be >= 1");
  if (trajectory_stride < 0) fail("trajectory_stride must be >= 0");
}

std::string_view to_string(Interrupt why) {
  switch (why) {
    case Interrupt::EnergyThreshold: return "energy_threshold";
    case Interrupt::DwellTimeout: return "dwell_timeout";
    case Interrupt::HorizonEnd: return "horizon_end";
  }
  return "?";
}

void Mission::validate() const {
  run.validate();
  learning.validate();
  if (robots < 2) throw std::invalid_argument("library.robots must be >= 2");
  if (library.empty()) throw std::invalid_argument("mission: empty behavior library");
  for (const auto& spec : library) {
    spec.validate();
    if (spec.robots() != robots)
      throw std::invalid_argument("mission: behavior graph size differs from robot count");
  }
  std::visit([](const auto& e) { e.validate(); }, environment);
}

Mission make_mission(MissionKind kind, int robots) {
  Mission m;
  m.robots = robots;
  m.library = default_library(robots);
  if (kind == MissionKind::Convoy)
    m.environment = ConvoyEnv{};
  else
    m.environment = BoxEnv{};
  return m;
}

EpisodeRngs episode_rngs(std::uint64_t seed, Phase phase, int episode) {
  const auto index = static_cast<std::uint64_t>(episode);
  if (phase == Phase::Train)
    return {make_rng(seed, Stream::TrainEnvironment, index), make_rng(seed, Stream::TrainAgent, index)};
  return {make_rng(seed, Stream::EvalEnvironment, index), make_rng(seed, Stream::EvalAgent, index)};
}

EnsembleState initial_state(const Mission& mission, Rng& env_rng) {
  EnsembleState x;
  x.positions = uniform_in_arena(env_rng, mission.run.arena, mission.robots);
  x.time = 0.0;
  return x;
}

DwellResult run_dwell(const Mission& mission, int m, ParamMemory& memory, const EnsembleState& x0,
                      const Environment& env0, Rng& env_rng, Tuning tuning, const DwellHooks& hooks) {
  const RunConfig& cfg = mission.run;
  const BehaviorSpec& spec = mission.library.at(static_cast<std::size_t>(m));
  DwellResult out;
  out.x = x0;
  out.env = env0;
  out.tau = x0.time;
  out.params_in = memory.get(m);
  BehaviorParams p = out.params_in;

  long k = 0;
  while (true) {
    const double e = energy(spec, out.x, p);
    if (hooks.energy_trace) hooks.energy_trace->push_back(e);
    const double elapsed = static_cast<double>(k) * cfg.dt;
    if (reached(elapsed, cfg.min_dwell, cfg.dt) && e <= cfg.eps_energy) {
      out.interrupted_by = Interrupt::EnergyThreshold;
      out.energy_exit = e;
      break;
    }
    if (reached(out.x.time, cfg.t_f, cfg.dt)) {
      out.interrupted_by = Interrupt::HorizonEnd;
      out.energy_exit = e;
      break;
    }
    if (reached(elapsed, cfg.dwell_max, cfg.dt)) {
      out.interrupted_by = Interrupt::DwellTimeout;
      out.energy_exit = e;
      break;
    }

    const Positions u = control(spec, out.x, p);
    EnsembleState next = euler_step(out.x, u, cfg.dt);
    if (!next.positions.allFinite()) {
      std::ostringstream os;
      os << "non-finite robot state during " << to_string(spec.id) << " at t=" << out.x.time;
      throw std::runtime_error(os.str());
    }
    out.env = env_step(out.env, out.x, next, cfg.dt, env_rng);
    if (tuning == Tuning::Online) {
      const CostEval c = tuning_cost(spec.id, next, out.env, p, spec.space);
      p = ogd_step(p, c.grad, cfg.dt, mission.learning, spec.space);
    }
    out.x = std::move(next);
    ++k;
    if (hooks.trajectory && hooks.stride > 0 && k % hooks.stride == 0)
      hooks.trajectory->push_back(out.x);
  }

  out.steps = k;
  out.tau_next = out.x.time;
  out.params_out = p;
  memory.set(m, p, spec.space);
  return out;
}

EpisodeLog run_episode_train(QTable& q, const Mission& mission, int episode, EpisodeRngs& rngs,
                             ParamMemory* persistent_memory) {
  if (q.states() != mission.states() || q.actions() != mission.behaviors())
    throw std::invalid_argument("run_episode_train: Q-table dimensions do not match the mission");
  ParamMemory memory = fresh_or_persistent(mission, rngs.agent, persistent_memory);
  const double eps = explore_rate(mission.learning, episode);
  Rng& agent = rngs.agent;
  EpisodeLog log = run_episode(
      mission, rngs, memory,
      [&](int s, const EnsembleState&, const Environment&) {
        return Selection{select_epsilon_greedy(q, s, eps, agent), std::nullopt, Tuning::Online};
      },
      [&](const SwitchEvent& ev, bool terminal) {
        if (terminal)
          q_update_terminal(q, ev.s, ev.behavior, ev.reward, mission.learning);
        else
          q_update(q, ev.s, ev.behavior, ev.reward, ev.s_next, mission.learning);
      });
  if (persistent_memory) *persistent_memory = memory;
  return log;
}

EpisodeLog run_episode_eval(const QTable& q, const Mission& mission, EpisodeRngs& rngs) {
  if (q.states() != mission.states() || q.actions() != mission.behaviors())
    throw std::invalid_argument("run_episode_eval: Q-table dimensions do not match the mission");
  ParamMemory memory = ParamMemory::sample(mission.library, rngs.agent);
  return run_episode(
      mission, rngs, memory,
      [&](int s, const EnsembleState&, const Environment&) {
        return Selection{select_greedy(q, s), std::nullopt, Tuning::Online};
      },
      {});
}

EpisodeLog run_adhoc_convoy(const Mission& mission, EpisodeRngs& rngs) {
  if (kind(mission.environment) != MissionKind::Convoy)
    throw std::invalid_argument("the ad-hoc baseline is only defined for the convoy mission");
  int pursuit = -1;
  for (int m = 0; m < mission.behaviors(); ++m)
    if (mission.library[static_cast<std::size_t>(m)].id == BehaviorId::CyclicPursuit) pursuit = m;
  if (pursuit < 0) throw std::invalid_argument("the ad-hoc baseline needs a cyclic pursuit behavior");
  const BehaviorSpec& spec = mission.library[static_cast<std::size_t>(pursuit)];
  const double delta = std::get<ConvoyEnv>(mission.environment).delta;
  const double theta = radius_to_theta(delta, mission.robots);
  if (theta < spec.space.theta_lo || theta > spec.space.theta_hi)
    throw std::invalid_argument("ad-hoc baseline: ring of radius delta needs theta outside Theta");

  ParamMemory memory = ParamMemory::sample(mission.library, rngs.agent);
  return run_episode(
      mission, rngs, memory,
      [&](int, const EnsembleState&, const Environment& env) {
        BehaviorParams p;
        p.theta = theta;
        p.phi = project(BehaviorParams{theta, std::get<ConvoyEnv>(env).z}, spec.space).phi;
        return Selection{pursuit, p, Tuning::Frozen};
      },
      {});
}

EpisodeLog run_random_baseline(const Mission& mission, EpisodeRngs& rngs) {
  ParamMemory memory = ParamMemory::sample(mission.library, rngs.agent);
  Rng& agent = rngs.agent;
  return run_episode(
      mission, rngs, memory,
      [&](int, const EnsembleState&, const Environment&) {
        const int m = std::uniform_int_distribution<int>(0, mission.behaviors() - 1)(agent);
        const ParamSpace& space = mission.library[static_cast<std::size_t>(m)].space;
        BehaviorParams p;
        p.theta = uniform(agent, space.theta_lo, space.theta_hi);
        p.phi = uniform_in_box(agent, space.phi_lo, space.phi_hi);
        return Selection{m, p, Tuning::Frozen};
      },
      {});
}

TrainResult train(const Mission& mission, bool keep_logs) {
  mission.validate();
  TrainResult result;
  Rng init = make_rng(mission.run.seed, Stream::QInit);
  result.q = QTable::uniform(mission.states(), mission.behaviors(), mission.learning.q_init_range, init);
  ParamMemory memory;
  result.episode_rewards.reserve(static_cast<std::size_t>(mission.run.episodes));
  for (int ep = 0; ep < mission.run.episodes; ++ep) {
    EpisodeRngs rngs = episode_rngs(mission.run.seed, Phase::Train, ep);
    EpisodeLog log = run_episode_train(result.q, mission, ep, rngs, &memory);
    result.episode_rewards.push_back(log.total_reward);
    if (keep_logs) result.logs.push_back(std::move(log));
  }
  return result;
}

std::string_view to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::Trained: return "trained";
    case EvalMode::Random: return "random";
    case EvalMode::Adhoc: return "adhoc";
  }
  return "?";
}

EvalMode eval_mode_from_string(std::string_view name) {
  if (name == "trained") return EvalMode::Trained;
  if (name == "random") return EvalMode::Random;
  if (name == "adhoc") return EvalMode::Adhoc;
  throw std::invalid_argument("unknown eval mode '" + std::string(name) +
                              "' (expected trained, random or adhoc)");
}

std::vector<EpisodeLog> evaluate(const Mission& mission, EvalMode mode, const QTable* q) {
  mission.validate();
  if (mode == EvalMode::Trained && q == nullptr)
    throw std::invalid_argument("trained evaluation needs a Q-table");
  if (mode == EvalMode::Adhoc && kind(mission.environment) != MissionKind::Convoy)
    throw std::invalid_argument("adhoc mode is only supported for the convoy mission");
  std::vector<EpisodeLog> logs;
  logs.reserve(static_cast<std::size_t>(mission.run.eval_episodes));
  for (int ep = 0; ep < mission.run.eval_episodes; ++ep) {
    EpisodeRngs rngs = episode_rngs(mission.run.seed, Phase::Eval, ep);
    switch (mode) {
      case EvalMode::Trained: logs.push_back(run_episode_eval(*q, mission, rngs)); break;
      case EvalMode::Random: logs.push_back(run_random_baseline(mission, rngs)); break;
      case EvalMode::Adhoc: logs.push_back(run_adhoc_convoy(mission, rngs)); break;
    }
  }
  return logs;
}

std::string check_log(const EpisodeLog& log, const Mission& mission) {
  const RunConfig& cfg = mission.run;
  std::ostringstream err;
  if (log.events.empty()) return "log has no events";
  if (log.events.front().tau != 0.0) return "first switching time is not 0";
  double total = 0.0;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const SwitchEvent& ev = log.events[i];
    if (ev.tau_next < ev.tau) err << "event " << i << ": dwell ends before it starts; ";
    if (i + 1 < log.events.size() && log.events[i + 1].tau != ev.tau_next)
      err << "event " << i << ": next switching time does not continue this dwell; ";
    if (ev.tau_next > cfg.t_f + 0.5 * cfg.dt) err << "event " << i << ": past the horizon; ";
    if (ev.interrupted_by == Interrupt::EnergyThreshold && !(ev.energy_exit <= cfg.eps_energy))
      err << "event " << i << ": switched with energy " << ev.energy_exit << " above threshold; ";
    if (ev.behavior < 0 || ev.behavior >= mission.behaviors()) err << "event " << i << ": bad behavior; ";
    if (ev.s < 0 || ev.s >= mission.states() || ev.s_next < 0 || ev.s_next >= mission.states())
      err << "event " << i << ": observation out of range; ";
    if (!is_feasible(ev.params_out, mission.library[static_cast<std::size_t>(ev.behavior)].space))
      err << "event " << i << ": infeasible parameters; ";
    if (i > 0 && ev.s != log.events[i - 1].s_next) err << "event " << i << ": state chain broken; ";
    total += ev.reward;
  }
  if (total != log.total_reward) err << "total reward differs from the sum of event rewards; ";
  return err.str();
}

}  // namespace bsel
