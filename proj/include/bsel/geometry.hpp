#ifndef BSEL_GEOMETRY_HPP
#define BSEL_GEOMETRY_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bsel {

template <typename Scalar>
using Vec2T = Eigen::Matrix<Scalar, 2, 1>;
using Vec2 = Vec2T<double>;

/// Column i is the planar position of robot i.
template <typename Scalar>
using PositionsT = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;
using Positions = PositionsT<double>;

/// Ensemble of single-integrator robots plus the simulation clock.
template <typename Scalar>
struct EnsembleStateT {
  PositionsT<Scalar> positions;
  Scalar time{0};

  Eigen::Index size() const { return positions.cols(); }
  Vec2T<Scalar> robot(Eigen::Index i) const { return positions.col(i); }
};
using EnsembleState = EnsembleStateT<double>;

/// Rectangular workspace. Robots are never clamped to it; targets, goals and
/// initial positions are sampled inside it.
struct Arena {
  double x_lo = -1.6;
  double x_hi = 1.6;
  double y_lo = -1.0;
  double y_hi = 1.0;

  double width() const { return x_hi - x_lo; }
  double height() const { return y_hi - y_lo; }
  bool contains(const Vec2& p) const {
    return p.x() >= x_lo && p.x() <= x_hi && p.y() >= y_lo && p.y() <= y_hi;
  }
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Derived>
Vec2T<typename Derived::Scalar> centroid(const Eigen::MatrixBase<Derived>& positions) {
  if (positions.cols() < 1) throw std::invalid_argument("centroid: empty ensemble");
  return positions.rowwise().mean();
}

template <typename Scalar>
Vec2T<Scalar> centroid(const EnsembleStateT<Scalar>& state) {
  return centroid(state.positions);
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> rotation(Scalar angle) {
  using std::cos;
  using std::sin;
  Eigen::Matrix<Scalar, 2, 2> r;
  r << cos(angle), -sin(angle), sin(angle), cos(angle);
  return r;
}

template <typename Derived>
Vec2T<typename Derived::Scalar> rotate(const Eigen::MatrixBase<Derived>& v,
                                       typename Derived::Scalar angle) {
  return rotation(angle) * v;
}

/// One forward-Euler step of x' = u. Rejects non-positive dt and non-finite
/// controls; the input state is left untouched.
template <typename Scalar, typename Derived>
EnsembleStateT<Scalar> euler_step(const EnsembleStateT<Scalar>& state,
                                  const Eigen::MatrixBase<Derived>& controls, Scalar dt) {
  if (!(dt > Scalar(0))) throw std::invalid_argument("euler_step: dt must be positive");
  if (controls.rows() != 2 || controls.cols() != state.positions.cols())
    throw std::invalid_argument("euler_step: control/robot count mismatch");
  if (!controls.allFinite()) throw std::invalid_argument("euler_step: non-finite control");
  EnsembleStateT<Scalar> next;
  next.positions = state.positions + dt * controls;
  next.time = state.time + dt;
  return next;
}

/// Undirected interaction graph with optional per-edge desired separations.
class InteractionGraph {
 public:
  struct Edge {
    int i;
    int j;
    double delta;  // desired separation; 1.0 when the behavior has none
  };

  InteractionGraph() = default;
  explicit InteractionGraph(int n);

  /// Adds the undirected edge {i, j}. Duplicates and self-loops are rejected.
  void add_edge(int i, int j, double delta = 1.0);

  int size() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(int i, int j) const;
  const std::vector<int>& neighbors(int i) const;
  std::size_t degree(int i) const { return neighbors(i).size(); }
  /// Desired separation stored on {i, j}; throws if the edge is absent.
  double delta(int i, int j) const;
  bool connected() const;

  static InteractionGraph cycle(int n);
  static InteractionGraph path(int n);
  static InteractionGraph star(int n, int center = 0);

 private:
  void check_index(int i) const;

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

/// Free-function form of InteractionGraph::neighbors.
inline const std::vector<int>& neighbors(const InteractionGraph& g, int i) {
  return g.neighbors(i);
}

}  // namespace bsel

#endif  // BSEL_GEOMETRY_HPP
