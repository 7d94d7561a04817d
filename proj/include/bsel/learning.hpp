#ifndef BSEL_LEARNING_HPP
#define BSEL_LEARNING_HPP

#include "bsel/behavior.hpp"
#include "bsel/random.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace bsel {

/// Hyper-parameters of the Q-update, exploration schedule and parameter tuning.
struct LearningConfig {
  double alpha = 0.1;       // Q-learning rate
  double gamma = 1.0;       // discount
  double eps0 = 1.0;        // initial exploration probability
  double eps_decay = 0.995; // per-episode multiplicative decay
  double ogd_rate = 1.0;    // gradient-flow gain on (theta, phi)
  double fd_step = 1e-4;
  double q_init_range = 0.1;  // Q entries start uniform on [-range, range]

  void validate() const;
};

/// S x M table of state-behavior values.
class QTable {
 public:
  QTable() = default;
  QTable(int states, int actions);

  static QTable uniform(int states, int actions, double range, Rng& rng);

  int states() const { return static_cast<int>(values_.rows()); }
  int actions() const { return static_cast<int>(values_.cols()); }

  double operator()(int s, int m) const;
  double& operator()(int s, int m);
  double max_value(int s) const;

  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::MatrixXd& values() { return values_; }

  bool operator==(const QTable& o) const { return values_ == o.values_; }

 private:
  void check(int s, int m) const;

  Eigen::MatrixXd values_;
};

/// Row argmax, ties broken toward the lowest index.
int select_greedy(const QTable& q, int s);

/// Uniform behavior with probability eps_explore, greedy otherwise. Always
/// consumes exactly one uniform draw, plus one index draw when exploring.
int select_epsilon_greedy(const QTable& q, int s, double eps_explore, Rng& rng);

double explore_rate(const LearningConfig& cfg, int episode);

/// Q(s,m) += alpha (r + gamma max_j Q(s',j) - Q(s,m)). Returns the new entry.
double q_update(QTable& q, int s, int m, double reward, int s_next, const LearningConfig& cfg);

/// Update for the last transition of an episode: target is r alone.
double q_update_terminal(QTable& q, int s, int m, double reward, const LearningConfig& cfg);

struct ParamGradient {
  double theta = 0.0;
  Vec2 phi = Vec2::Zero();
};

/// Projected forward-Euler step of the parameter gradient flow.
BehaviorParams ogd_step(const BehaviorParams& p, const ParamGradient& grad, double dt,
                        const LearningConfig& cfg, const ParamSpace& space);

/// Central differences in theta, phi_x and phi_y.
ParamGradient fd_gradient(const std::function<double(const BehaviorParams&)>& cost,
                          const BehaviorParams& p, double h);

/// Per-behavior parameters carried across dwells.
class ParamMemory {
 public:
  ParamMemory() = default;

  /// theta ~ U(Theta_m), phi ~ U(Phi_m) for every behavior of the library.
  static ParamMemory sample(const std::vector<BehaviorSpec>& library, Rng& rng);

  std::size_t size() const { return params_.size(); }
  const BehaviorParams& get(int m) const { return params_.at(static_cast<std::size_t>(m)); }
  void set(int m, const BehaviorParams& p, const ParamSpace& space);

 private:
  std::vector<BehaviorParams> params_;
};

/// Small deterministic MDP used to check Q-learning against value iteration:
/// three states in a ring; action 0 advances, action 1 stays.
struct ChainMdp {
  static constexpr int kStates = 3;
  static constexpr int kActions = 2;

  std::pair<int, double> step(int s, int a) const;
};

}  // namespace bsel

#endif  // BSEL_LEARNING_HPP
