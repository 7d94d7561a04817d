#include "bsel/behavior.hpp"
#include "bsel/random.hpp"
#include "oracles.hpp"

#include <doctest.h>
#include <unsupported/Eigen/AutoDiff>

#include <cmath>
#include <numbers>
#include <queue>
#include <set>

using namespace bsel;

namespace {

using AD = Eigen::AutoDiffScalar<Eigen::VectorXd>;

Positions pts(std::initializer_list<Vec2> list) {
  Positions p(2, static_cast<Eigen::Index>(list.size()));
  Eigen::Index k = 0;
  for (const auto& v : list) p.col(k++) = v;
  return p;
}

BehaviorParams random_params(Rng& rng, const ParamSpace& s) {
  return {uniform(rng, s.theta_lo, s.theta_hi), uniform_in_box(rng, s.phi_lo, s.phi_hi)};
}

// Independent breadth-first search over the edge list.
bool bfs_connected(const InteractionGraph& g) {
  const int n = g.size();
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (const auto& e : g.edges()) {
    adj[static_cast<std::size_t>(e.i)].insert(e.j);
    adj[static_cast<std::size_t>(e.j)].insert(e.i);
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::queue<int> open;
  open.push(0);
  seen[0] = true;
  int count = 1;
  while (!open.empty()) {
    const int v = open.front();
    open.pop();
    for (int w : adj[static_cast<std::size_t>(v)])
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        ++count;
        open.push(w);
      }
  }
  return count == n;
}

// -dE/dx by reverse-free forward-mode AD: one derivative direction per coordinate.
Positions autodiff_neg_grad(const BehaviorSpec& spec, const Positions& x, const BehaviorParams& p) {
  const Eigen::Index dim = x.size();
  PositionsT<AD> xa(2, x.cols());
  for (Eigen::Index k = 0; k < dim; ++k) xa(k) = AD(x(k), dim, k);
  const AD e = energy(spec, xa, p);
  Positions g(2, x.cols());
  for (Eigen::Index k = 0; k < dim; ++k) g(k) = -e.derivatives()(k);
  return g;
}

}  // namespace

TEST_CASE("control examples") {
  const ParamSpace space;

  InteractionGraph pair(2);
  pair.add_edge(0, 1, 1.0);
  const BehaviorSpec formation{BehaviorId::StaticFormation, pair, space, std::nullopt};
  const Positions u = control(formation, pts({{0, 0}, {1, 0}}), BehaviorParams{1.0, Vec2::Zero()});
  CHECK(u.isZero(0));

  const BehaviorSpec follow{BehaviorId::LeaderFollower, InteractionGraph::path(2), space, 1};
  const Positions v = control(follow, pts({{0, 0}, {2, 0}}), BehaviorParams{1.0, Vec2(1, 0)});
  CHECK(v.col(0).isApprox(Vec2(6, 0)));

  // Without neighbors a pursuing robot only feels the radial term toward the
  // ring of radius r(theta) about phi.
  const BehaviorSpec lonely{BehaviorId::CyclicPursuit, InteractionGraph(2), space, std::nullopt};
  const double theta = 0.8;
  const double r = theta_to_radius(theta, 2);
  const Positions w = control(lonely, pts({{1, 0}, {-0.2, 0}}), BehaviorParams{theta, Vec2::Zero()});
  CHECK(w.col(0).isApprox((1 - r) * Vec2(-1, 0)));
}

TEST_CASE("consensus-only controls sum to zero and ignore translations") {
  Rng rng(21);
  const auto lib = default_library(5);
  for (const auto& spec : lib) {
    if (spec.id != BehaviorId::StaticFormation && spec.id != BehaviorId::TriangulationCoverage) continue;
    for (int k = 0; k < 50; ++k) {
      const Positions x = uniform_in_arena(rng, Arena{}, 5);
      const BehaviorParams p = random_params(rng, spec.space);
      const Positions u = control(spec, x, p);
      CHECK(u.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, u.cwiseAbs().maxCoeff()));
      const Vec2 shift = uniform_in_box(rng, Vec2(-3, -3), Vec2(3, 3));
      const Positions moved = x.colwise() + shift;
      CHECK((control(spec, moved, p) - u).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, u.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("energy vanishes on each goal set") {
  const ParamSpace space;
  const auto lib = default_library(5);
  const double theta = 0.4;
  const Vec2 phi(0.3, -0.2);

  const Positions shape = theta * unit_polygon(5);
  CHECK(energy(lib[0], shape, BehaviorParams{theta, phi}) <= 1e-20);

  Positions line(2, 5);
  for (int i = 0; i < 5; ++i) line.col(i) = phi + Vec2(theta * i, 0);
  CHECK(energy(lib[3], line, BehaviorParams{theta, phi}) <= 1e-20);

  const double r = theta_to_radius(theta, 5);
  Positions ring(2, 5);
  for (int i = 0; i < 5; ++i) {
    const double a = 0.4 + 2 * std::numbers::pi * i / 5;
    ring.col(i) = phi + r * Vec2(std::cos(a), std::sin(a));
  }
  CHECK(energy(lib[2], ring, BehaviorParams{theta, phi}) <= 1e-20);
}

TEST_CASE("energy is nonnegative") {
  Rng rng(8);
  for (const auto& spec : default_library(5))
    for (int k = 0; k < 200; ++k) {
      const Positions x = uniform_in_arena(rng, Arena{}, 5);
      CHECK(energy(spec, x, random_params(rng, spec.space)) >= 0.0);
    }
}

TEST_CASE("gradient-flow controls are the negative energy gradient") {
  Rng rng(1234);
  for (const auto& spec : default_library(5)) {
    if (!is_gradient_flow(spec.id)) continue;
    CAPTURE(to_string(spec.id));
    double worst_ad = 0, worst_fd = 0;
    for (int k = 0; k < 100; ++k) {
      const Positions x = uniform_in_arena(rng, Arena{}, 5);
      const BehaviorParams p = random_params(rng, spec.space);
      const Positions u = control(spec, x, p);
      const Positions ad = autodiff_neg_grad(spec, x, p);
      const Positions fd = oracle::fd_neg_grad(spec, x, p, 1e-5);
      for (Eigen::Index c = 0; c < u.size(); ++c) {
        worst_ad = std::max(worst_ad, oracle::rel_err(u(c), ad(c)));
        worst_fd = std::max(worst_fd, oracle::rel_err(u(c), fd(c)));
      }
    }
    CHECK(worst_ad <= 1e-12);
    CHECK(worst_fd <= 1e-5);
  }
}

TEST_CASE("cyclic pursuit on the regular ring circulates like rotated pursuit") {
  const auto lib = default_library(5);
  const BehaviorSpec& spec = lib[2];
  const double theta = 0.6;
  const Vec2 phi(-0.1, 0.2);
  const double r = theta_to_radius(theta, 5);
  Positions x(2, 5);
  for (int i = 0; i < 5; ++i) {
    const double a = 1.0 + 2 * std::numbers::pi * i / 5;
    x.col(i) = phi + r * Vec2(std::cos(a), std::sin(a));
  }
  const Positions u = control(spec, x, BehaviorParams{theta, phi});
  for (int i = 0; i < 5; ++i) {
    const int pred = (i + 4) % 5;  // next robot clockwise
    const Vec2 expected = rotate(Vec2(x.col(pred) - x.col(i)), std::numbers::pi / 5);
    CHECK((u.col(i) - expected).norm() <= 1e-12);
    CHECK(std::abs(u.col(i).dot(x.col(i) - phi)) <= 1e-12);  // tangential
    CHECK(u.col(i).norm() == doctest::Approx(theta));
  }
}

TEST_CASE("ring order by bearing") {
  const auto ring = detail::ring_order({0.5, -2.0, 3.0, 1.0});
  CHECK(ring.pred == std::vector<int>{1, 2, 3, 0});
  double total = 0;
  for (double g : ring.gap) {
    CHECK(g >= 0);
    total += g;
  }
  CHECK(total == doctest::Approx(2 * std::numbers::pi));

  const auto two = detail::ring_order({0.0, 1.0});
  CHECK(two.pred == std::vector<int>{1, 0});

  const auto same = detail::ring_order({0.2, 0.2, 0.2});
  CHECK(same.gap[0] == doctest::Approx(2 * std::numbers::pi));
  CHECK(same.gap[1] == 0.0);
}

TEST_CASE("radius and chord conversions") {
  const double theta4 = 0.7;
  const double r4 = theta4 / (2 * std::sin(std::numbers::pi / 4));
  CHECK(std::abs(radius_to_theta(r4, 4) - theta4) <= 1e-12);
  CHECK(std::abs(theta_to_radius(radius_to_theta(0.37, 4), 4) - 0.37) <= 1e-12);
  CHECK(radius_to_theta(0.5, 5) == doctest::Approx(0.58779).epsilon(1e-5));
  CHECK(radius_to_theta(1.0, 6) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS(radius_to_theta(1.0, 1));
  CHECK_THROWS(radius_to_theta(0.0, 5));
  CHECK_THROWS(theta_to_radius(1.0, 1));
}

TEST_CASE("projection") {
  const ParamSpace space;
  CHECK(project(BehaviorParams{0.01, Vec2::Zero()}, space).theta == 0.05);
  CHECK(project(BehaviorParams{0.5, Vec2(1.5, -2)}, space).phi == Vec2(1, -1));
  const BehaviorParams ok{0.3, Vec2(0.2, -0.9)};
  CHECK(project(ok, space) == ok);

  Rng rng(77);
  auto draw = [&] { return BehaviorParams{uniform(rng, -1, 3), uniform_in_box(rng, Vec2(-3, -3), Vec2(3, 3))}; };
  auto dist = [](const BehaviorParams& a, const BehaviorParams& b) {
    return std::sqrt((a.theta - b.theta) * (a.theta - b.theta) + (a.phi - b.phi).squaredNorm());
  };
  for (int k = 0; k < 1000; ++k) {
    const BehaviorParams a = draw(), b = draw();
    const BehaviorParams pa = project(a, space), pb = project(b, space);
    CHECK(is_feasible(pa, space));
    CHECK(project(pa, space) == pa);
    CHECK(dist(pa, pb) <= dist(a, b) + 1e-15);
  }
}

TEST_CASE("default library") {
  const auto lib = default_library(5);
  REQUIRE(lib.size() == 5);
  std::set<BehaviorId> ids;
  for (const auto& spec : lib) {
    ids.insert(spec.id);
    CHECK(spec.robots() == 5);
    CHECK(bfs_connected(spec.graph));
    CHECK(spec.space.theta_lo == 0.05);
    CHECK(spec.space.theta_hi == 1.1);
    CHECK(spec.space.phi_lo == Vec2(-1, -1));
    CHECK(spec.space.phi_hi == Vec2(1, 1));
    CHECK_NOTHROW(spec.validate());
    CHECK(spec.leader.has_value() == has_leader(spec.id));
  }
  CHECK(ids.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(lib[2].graph.degree(i) == 2);
  for (int n = 2; n <= 8; ++n)
    for (const auto& spec : default_library(n)) CHECK(bfs_connected(spec.graph));
  CHECK_THROWS(default_library(1));
}

TEST_CASE("formation deltas come from the regular pentagon") {
  const auto lib = default_library(5);
  const Positions shape = unit_polygon(5);
  for (const auto& e : lib[0].graph.edges())
    CHECK(e.delta == doctest::Approx((shape.col(e.i) - shape.col(e.j)).norm()));
  for (int i = 0; i < 5; ++i)
    CHECK((shape.col(i) - shape.col((i + 1) % 5)).norm() == doctest::Approx(1.0));
}

TEST_CASE("behavior calls validate their inputs") {
  const auto lib = default_library(5);
  const Positions x = Positions::Zero(2, 5);
  CHECK_THROWS(control(lib[0], x, BehaviorParams{2.0, Vec2::Zero()}));
  CHECK_THROWS(energy(lib[1], x, BehaviorParams{0.5, Vec2(0, 3)}));
  CHECK_THROWS(control(lib[0], Positions::Zero(2, 4), BehaviorParams{}));

  BehaviorSpec bad = lib[0];
  bad.leader = 0;
  CHECK_THROWS(bad.validate());
  BehaviorSpec missing = lib[3];
  missing.leader.reset();
  CHECK_THROWS(missing.validate());
  CHECK(behavior_from_string("cyclic_pursuit") == BehaviorId::CyclicPursuit);
  CHECK_THROWS(behavior_from_string("swarm"));
}
