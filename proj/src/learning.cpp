#include "bsel/learning.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bsel {

void LearningConfig::validate() const {
  auto fail = [](const char* field, const char* range) {
    throw std::invalid_argument(std::string("learning.") + field + " must be in " + range);
  };
  if (!(alpha > 0.0 && alpha <= 1.0)) fail("alpha", "(0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma", "[0, 1]");
  if (!(eps0 >= 0.0 && eps0 <= 1.0)) fail("eps0", "[0, 1]");
  if (!(eps_decay > 0.0 && eps_decay <= 1.0)) fail("eps_decay", "(0, 1]");
  if (!(ogd_rate > 0.0 && std::isfinite(ogd_rate))) fail("ogd_rate", "(0, inf)");
  if (!(fd_step > 0.0 && std::isfinite(fd_step))) fail("fd_step", "(0, inf)");
  if (!(q_init_range >= 0.0 && std::isfinite(q_init_range))) fail("q_init_range", "[0, inf)");
}

QTable::QTable(int states, int actions) {
  if (states < 1 || actions < 1) throw std::invalid_argument("QTable: dimensions must be positive");
  values_ = Eigen::MatrixXd::Zero(states, actions);
}

QTable QTable::uniform(int states, int actions, double range, Rng& rng) {
  QTable q(states, actions);
  // Row-major fill so the draw order matches the serialized layout.
  for (int s = 0; s < states; ++s)
    for (int m = 0; m < actions; ++m) q.values_(s, m) = range > 0.0 ? bsel::uniform(rng, -range, range) : 0.0;
  return q;
}

void QTable::check(int s, int m) const {
  if (s < 0 || s >= states())
    throw std::out_of_range("QTable: state " + std::to_string(s) + " out of range");
  if (m < 0 || m >= actions())
    throw std::out_of_range("QTable: behavior " + std::to_string(m) + " out of range");
}

double QTable::operator()(int s, int m) const {
  check(s, m);
  return values_(s, m);
}

double& QTable::operator()(int s, int m) {
  check(s, m);
  return values_(s, m);
}

double QTable::max_value(int s) const { return (*this)(s, select_greedy(*this, s)); }

int select_greedy(const QTable& q, int s) {
  if (s < 0 || s >= q.states())
    throw std::out_of_range("select_greedy: state " + std::to_string(s) + " out of range");
  int best = 0;
  for (int m = 1; m < q.actions(); ++m)
    if (q.values()(s, m) > q.values()(s, best)) best = m;
  return best;
}

int select_epsilon_greedy(const QTable& q, int s, double eps_explore, Rng& rng) {
  if (!(eps_explore >= 0.0 && eps_explore <= 1.0))
    throw std::invalid_argument("select_epsilon_greedy: probability outside [0, 1]");
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < eps_explore) return std::uniform_int_distribution<int>(0, q.actions() - 1)(rng);
  return select_greedy(q, s);
}

double explore_rate(const LearningConfig& cfg, int episode) {
  if (episode < 0) throw std::invalid_argument("explore_rate: negative episode");
  return cfg.eps0 * std::pow(cfg.eps_decay, episode);
}

namespace {

double apply_target(QTable& q, int s, int m, double target, double alpha) {
  double& entry = q(s, m);
  entry += alpha * (target - entry);
  return entry;
}

}  // namespace

double q_update(QTable& q, int s, int m, double reward, int s_next, const LearningConfig& cfg) {
  if (!std::isfinite(reward)) throw std::invalid_argument("q_update: non-finite reward");
  const double target = reward + cfg.gamma * q.max_value(s_next);
  return apply_target(q, s, m, target, cfg.alpha);
}

double q_update_terminal(QTable& q, int s, int m, double reward, const LearningConfig& cfg) {
  if (!std::isfinite(reward)) throw std::invalid_argument("q_update: non-finite reward");
  return apply_target(q, s, m, reward, cfg.alpha);
}

BehaviorParams ogd_step(const BehaviorParams& p, const ParamGradient& grad, double dt,
                        const LearningConfig& cfg, const ParamSpace& space) {
  if (!(dt > 0.0)) throw std::invalid_argument("ogd_step: dt must be positive");
  if (!std::isfinite(grad.theta) || !grad.phi.allFinite())
    throw std::invalid_argument("ogd_step: non-finite gradient");
  const double gain = dt * cfg.ogd_rate;
  BehaviorParams next;
  next.theta = p.theta - gain * grad.theta;
  next.phi = p.phi - gain * grad.phi;
  return project(next, space);
}

ParamGradient fd_gradient(const std::function<double(const BehaviorParams&)>& cost,
                          const BehaviorParams& p, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
  auto eval = [&](const BehaviorParams& q) {
    const double c = cost(q);
    if (!std::isfinite(c)) throw std::invalid_argument("fd_gradient: non-finite cost evaluation");
    return c;
  };
  ParamGradient g;
  BehaviorParams plus = p;
  BehaviorParams minus = p;
  plus.theta += h;
  minus.theta -= h;
  g.theta = (eval(plus) - eval(minus)) / (2.0 * h);
  for (int a = 0; a < 2; ++a) {
    plus = p;
    minus = p;
    plus.phi[a] += h;
    minus.phi[a] -= h;
    g.phi[a] = (eval(plus) - eval(minus)) / (2.0 * h);
  }
  return g;
}

ParamMemory ParamMemory::sample(const std::vector<BehaviorSpec>& library, Rng& rng) {
  ParamMemory mem;
  mem.params_.reserve(library.size());
  for (const auto& spec : library) {
    BehaviorParams p;
    p.theta = uniform(rng, spec.space.theta_lo, spec.space.theta_hi);
    p.phi = uniform_in_box(rng, spec.space.phi_lo, spec.space.phi_hi);
    mem.params_.push_back(p);
  }
  return mem;
}

void ParamMemory::set(int m, const BehaviorParams& p, const ParamSpace& space) {
  if (!is_feasible(p, space)) throw std::invalid_argument("ParamMemory: infeasible parameters");
  params_.at(static_cast<std::size_t>(m)) = p;
}

std::pair<int, double> ChainMdp::step(int s, int a) const {
  if (s < 0 || s >= kStates || a < 0 || a >= kActions)
    throw std::out_of_range("ChainMdp: state or action out of range");
  static constexpr double kAdvance[kStates] = {0.0, 0.0, 1.0};
  static constexpr double kStay[kStates] = {0.1, 0.2, 0.3};
  if (a == 0) return {(s + 1) % kStates, kAdvance[s]};
  return {s, kStay[s]};
}

}  // namespace bsel
