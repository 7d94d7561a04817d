#include "bsel/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bsel {

namespace {

constexpr std::array<std::string_view, kBehaviorCount> kNames = {
    "static_formation", "formation_with_leader", "cyclic_pursuit", "leader_follower",
    "triangulation_coverage"};

// Polygon triangulated as a fan from vertex 0: the n-cycle plus chords (0, k).
// For n = 4 this is the square-with-diagonal formation graph; it is minimally
// rigid for every n >= 3.
InteractionGraph fan_triangulated_polygon(int n) {
  const Positions shape = unit_polygon(n);
  InteractionGraph g(n);
  auto add = [&](int i, int j) { g.add_edge(i, j, (shape.col(i) - shape.col(j)).norm()); };
  if (n == 2) {
    add(0, 1);
    return g;
  }
  for (int i = 0; i < n; ++i) add(i, (i + 1) % n);
  for (int k = 2; k <= n - 2; ++k) add(0, k);
  return g;
}

// Robot 0 at the hub, spokes to every other robot and a rim path 1-2-...-(n-1):
// n - 2 triangles that are all equilateral at a common separation.
InteractionGraph hub_triangulation(int n) {
  InteractionGraph g(n);
  for (int k = 1; k < n; ++k) g.add_edge(0, k);
  for (int k = 1; k + 1 < n; ++k) g.add_edge(k, k + 1);
  return g;
}

}  // namespace

std::string_view to_string(BehaviorId id) { return kNames.at(static_cast<std::size_t>(id)); }

BehaviorId behavior_from_string(std::string_view name) {
  for (std::size_t k = 0; k < kNames.size(); ++k)
    if (kNames[k] == name) return static_cast<BehaviorId>(k);
  throw std::invalid_argument("unknown behavior '" + std::string(name) + "'");
}

void ParamSpace::validate() const {
  auto ok = [](double lo, double hi) { return std::isfinite(lo) && std::isfinite(hi) && lo <= hi; };
  if (!ok(theta_lo, theta_hi)) throw std::invalid_argument("ParamSpace: theta bounds must satisfy lo <= hi");
  if (!(theta_lo > 0.0)) throw std::invalid_argument("ParamSpace: theta_lo must be positive");
  for (int a = 0; a < 2; ++a)
    if (!ok(phi_lo[a], phi_hi[a]))
      throw std::invalid_argument("ParamSpace: phi bounds must satisfy lo <= hi on every axis");
}

bool is_feasible(const BehaviorParams& p, const ParamSpace& space) {
  return p.theta >= space.theta_lo && p.theta <= space.theta_hi &&
         (p.phi.array() >= space.phi_lo.array()).all() &&
         (p.phi.array() <= space.phi_hi.array()).all();
}

BehaviorParams project(const BehaviorParams& p, const ParamSpace& space) {
  BehaviorParams out;
  out.theta = std::clamp(p.theta, space.theta_lo, space.theta_hi);
  out.phi = p.phi.cwiseMax(space.phi_lo).cwiseMin(space.phi_hi);
  return out;
}

double radius_to_theta(double r, int n) {
  if (n < 2) throw std::invalid_argument("radius_to_theta: need at least two robots");
  if (!(r > 0.0)) throw std::invalid_argument("radius_to_theta: radius must be positive");
  return 2.0 * r * std::sin(std::numbers::pi / n);
}

double theta_to_radius(double theta, int n) {
  if (n < 2) throw std::invalid_argument("theta_to_radius: need at least two robots");
  return theta / (2.0 * std::sin(std::numbers::pi / n));
}

Positions unit_polygon(int n) {
  if (n < 2) throw std::invalid_argument("unit_polygon: need at least two vertices");
  const double circumradius = 1.0 / (2.0 * std::sin(std::numbers::pi / n));
  Positions p(2, n);
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n;
    p.col(k) << circumradius * std::cos(a), circumradius * std::sin(a);
  }
  return p;
}

void BehaviorSpec::validate() const {
  space.validate();
  if (graph.size() < 1) throw std::invalid_argument("BehaviorSpec: empty graph");
  if (has_leader(id) != leader.has_value())
    throw std::invalid_argument("BehaviorSpec: " + std::string(to_string(id)) +
                                (leader ? " must not have a leader" : " requires a leader"));
  if (leader && (*leader < 0 || *leader >= graph.size()))
    throw std::out_of_range("BehaviorSpec: leader index out of range");
}

std::vector<BehaviorSpec> default_library(int n, const ParamSpace& space) {
  if (n < 2) throw std::invalid_argument("default_library: need at least two robots");
  space.validate();
  std::vector<BehaviorSpec> lib;
  lib.reserve(kBehaviorCount);
  lib.push_back({BehaviorId::StaticFormation, fan_triangulated_polygon(n), space, std::nullopt});
  lib.push_back({BehaviorId::FormationWithLeader, fan_triangulated_polygon(n), space, 0});
  lib.push_back({BehaviorId::CyclicPursuit, InteractionGraph::cycle(n), space, std::nullopt});
  lib.push_back({BehaviorId::LeaderFollower, InteractionGraph::path(n), space, 0});
  lib.push_back({BehaviorId::TriangulationCoverage, hub_triangulation(n), space, std::nullopt});
  return lib;
}

namespace detail {

void check_call(const BehaviorSpec& spec, Eigen::Index robots, const BehaviorParams& p) {
  if (robots != spec.graph.size())
    throw std::invalid_argument("behavior " + std::string(to_string(spec.id)) + ": graph has " +
                                std::to_string(spec.graph.size()) + " robots, state has " +
                                std::to_string(robots));
  if (!is_feasible(p, spec.space))
    throw std::invalid_argument("behavior " + std::string(to_string(spec.id)) +
                                ": parameters outside the feasible set");
}

RingOrder ring_order(const std::vector<double>& bearing) {
  const std::size_t n = bearing.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return bearing[a] < bearing[b]; });
  RingOrder ring{std::vector<int>(n, -1), std::vector<double>(n, 0.0)};
  if (n < 2) return ring;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    const std::size_t j = order[(k + n - 1) % n];
    double gap = bearing[i] - bearing[j];
    if (k == 0) gap += 2.0 * std::numbers::pi;
    ring.pred[i] = static_cast<int>(j);
    ring.gap[i] = gap;
  }
  return ring;
}

}  // namespace detail

}  // namespace bsel
