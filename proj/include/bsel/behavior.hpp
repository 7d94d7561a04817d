#ifndef BSEL_BEHAVIOR_HPP
#define BSEL_BEHAVIOR_HPP

#include "bsel/geometry.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bsel {

enum class BehaviorId {
  StaticFormation = 0,
  FormationWithLeader = 1,
  CyclicPursuit = 2,
  LeaderFollower = 3,
  TriangulationCoverage = 4,
};

inline constexpr int kBehaviorCount = 5;

inline constexpr std::array<BehaviorId, kBehaviorCount> kAllBehaviors = {
    BehaviorId::StaticFormation, BehaviorId::FormationWithLeader, BehaviorId::CyclicPursuit,
    BehaviorId::LeaderFollower, BehaviorId::TriangulationCoverage};

std::string_view to_string(BehaviorId id);
BehaviorId behavior_from_string(std::string_view name);

/// Whether the controller is the exact negative gradient of its energy.
constexpr bool is_gradient_flow(BehaviorId id) { return id != BehaviorId::CyclicPursuit; }
constexpr bool has_leader(BehaviorId id) {
  return id == BehaviorId::FormationWithLeader || id == BehaviorId::LeaderFollower;
}
constexpr bool uses_deltas(BehaviorId id) {
  return id == BehaviorId::StaticFormation || id == BehaviorId::FormationWithLeader;
}

/// Box-shaped feasible set Theta x Phi.
struct ParamSpace {
  double theta_lo = 0.05;
  double theta_hi = 1.1;
  Vec2 phi_lo = Vec2(-1.0, -1.0);
  Vec2 phi_hi = Vec2(1.0, 1.0);

  void validate() const;
};

struct BehaviorParams {
  double theta = 0.5;  // scale, separation or chord length depending on behavior
  Vec2 phi = Vec2::Zero();  // leader goal or cycle center

  bool operator==(const BehaviorParams& o) const { return theta == o.theta && phi == o.phi; }
};

bool is_feasible(const BehaviorParams& p, const ParamSpace& space);

/// Componentwise clamp onto the box. Idempotent and non-expansive.
BehaviorParams project(const BehaviorParams& p, const ParamSpace& space);

/// Cyclic-pursuit chord length for a ring of radius r with n robots: 2 r sin(pi/n).
double radius_to_theta(double r, int n);
double theta_to_radius(double theta, int n);

/// A library entry: controller kind, interaction graph and parameter space.
/// For StaticFormation and FormationWithLeader the graph's per-edge deltas are
/// the unit-scale desired separations.
struct BehaviorSpec {
  BehaviorId id = BehaviorId::StaticFormation;
  InteractionGraph graph;
  ParamSpace space;
  std::optional<int> leader;

  int robots() const { return graph.size(); }
  void validate() const;
};

/// The five shipped behaviors for n robots (n >= 2).
std::vector<BehaviorSpec> default_library(int n, const ParamSpace& space = {});

/// Regular n-gon with unit side, vertex k at angle 2 pi k / n about the origin.
Positions unit_polygon(int n);

namespace detail {

inline double scalar_value(double v) { return v; }
template <typename T>
double scalar_value(const T& v) {
  return scalar_value(v.value());
}

void check_call(const BehaviorSpec& spec, Eigen::Index robots, const BehaviorParams& p);

/// Robots ordered by bearing about a center: each robot's predecessor (the
/// next robot clockwise) and the angular gap to it in [0, 2 pi]; pred is -1
/// when the robot has no cycle neighbor.
struct RingOrder {
  std::vector<int> pred;
  std::vector<double> gap;
};

RingOrder ring_order(const std::vector<double>& bearing);

template <typename Derived>
RingOrder ring_order(const InteractionGraph& g, const Eigen::MatrixBase<Derived>& x, const Vec2& center) {
  const Eigen::Index n = x.cols();
  if (g.edges().empty())
    return {std::vector<int>(static_cast<std::size_t>(n), -1), std::vector<double>(static_cast<std::size_t>(n), 0.0)};
  std::vector<double> bearing(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dx = scalar_value(x(0, i)) - center.x();
    const double dy = scalar_value(x(1, i)) - center.y();
    bearing[static_cast<std::size_t>(i)] = std::atan2(dy, dx);
  }
  return ring_order(bearing);
}

inline double desired_separation(const BehaviorSpec& spec, const InteractionGraph::Edge& e,
                                 double theta) {
  return uses_deltas(spec.id) ? theta * e.delta : theta;
}

}  // namespace detail

/// Controls u (2 x N) of the behavior at positions x.
template <typename Derived>
PositionsT<typename Derived::Scalar> control(const BehaviorSpec& spec,
                                             const Eigen::MatrixBase<Derived>& x,
                                             const BehaviorParams& p) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  detail::check_call(spec, x.cols(), p);
  const Eigen::Index n = x.cols();
  PositionsT<Scalar> u = PositionsT<Scalar>::Zero(2, n);
  const Vec2T<Scalar> phi = p.phi.template cast<Scalar>();

  if (spec.id == BehaviorId::CyclicPursuit) {
    // Robots are arranged on the cycle by their bearing about phi. Each one
    // moves clockwise at a speed proportional to the arc separating it from its
    // predecessor, so the gaps follow a consensus and spread out evenly; on the
    // regular ring of chord theta this is exactly the predecessor direction
    // rotated by pi/N. The radial term pulls every robot onto radius r(theta).
    const double nd = static_cast<double>(n);
    const Scalar r(theta_to_radius(p.theta, static_cast<int>(n)));
    const double gain = std::sin(std::numbers::pi / nd) / (std::numbers::pi / nd);
    const detail::RingOrder ring = detail::ring_order(spec.graph, x, p.phi);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vec2T<Scalar> rel = x.col(i) - phi;
      const Scalar d = sqrt(rel.squaredNorm());
      if (ring.pred[static_cast<std::size_t>(i)] >= 0) {
        // clockwise tangent times the radius: (y, -x)
        const Vec2T<Scalar> cw(rel.y(), -rel.x());
        u.col(i) += Scalar(gain * ring.gap[static_cast<std::size_t>(i)]) * cw;
      }
      if (d > Scalar(0)) {
        u.col(i) += (Scalar(1) - r / d) * (-rel);
      } else {
        u.col(i) += Vec2T<Scalar>(r, Scalar(0));
      }
    }
    return u;
  }

  for (const auto& e : spec.graph.edges()) {
    const Scalar d(detail::desired_separation(spec, e, p.theta));
    const Vec2T<Scalar> diff = x.col(e.j) - x.col(e.i);
    const Scalar w = diff.squaredNorm() - d * d;
    u.col(e.i) += w * diff;
    u.col(e.j) -= w * diff;
  }
  if (spec.leader) u.col(*spec.leader) += phi - x.col(*spec.leader);
  return u;
}

/// Nonnegative energy. For gradient-flow behaviors control() == -dE/dx exactly;
/// for CyclicPursuit it is the mean squared distance to the desired ring.
template <typename Derived>
typename Derived::Scalar energy(const BehaviorSpec& spec, const Eigen::MatrixBase<Derived>& x,
                                const BehaviorParams& p) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  detail::check_call(spec, x.cols(), p);
  const Eigen::Index n = x.cols();
  const Vec2T<Scalar> phi = p.phi.template cast<Scalar>();

  if (spec.id == BehaviorId::CyclicPursuit) {
    const Scalar r(theta_to_radius(p.theta, static_cast<int>(n)));
    Scalar sum(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar err = sqrt((x.col(i) - phi).squaredNorm()) - r;
      sum += err * err;
    }
    return sum / double(n);
  }

  // Constants stay plain doubles so derivative-carrying scalars never mix
  // with empty derivative vectors.
  Scalar e(0);
  for (const auto& edge : spec.graph.edges()) {
    const double d = detail::desired_separation(spec, edge, p.theta);
    const Scalar w = (x.col(edge.j) - x.col(edge.i)).squaredNorm() - d * d;
    e += 0.25 * w * w;
  }
  if (spec.leader) e += 0.5 * (phi - x.col(*spec.leader)).squaredNorm();
  return e;
}

template <typename Scalar>
PositionsT<Scalar> control(const BehaviorSpec& spec, const EnsembleStateT<Scalar>& x,
                           const BehaviorParams& p) {
  return control(spec, x.positions, p);
}

template <typename Scalar>
Scalar energy(const BehaviorSpec& spec, const EnsembleStateT<Scalar>& x, const BehaviorParams& p) {
  return energy(spec, x.positions, p);
}

}  // namespace bsel

#endif  // BSEL_BEHAVIOR_HPP
