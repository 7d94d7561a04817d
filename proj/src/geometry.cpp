#include "bsel/geometry.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace bsel {

InteractionGraph::InteractionGraph(int n) : n_(n), adjacency_(static_cast<std::size_t>(n)) {
  if (n < 1) throw std::invalid_argument("InteractionGraph: need at least one node");
}

void InteractionGraph::check_index(int i) const {
  if (i < 0 || i >= n_)
    throw std::out_of_range("InteractionGraph: robot index " + std::to_string(i) +
                            " out of range [0, " + std::to_string(n_) + ")");
}

void InteractionGraph::add_edge(int i, int j, double delta) {
  check_index(i);
  check_index(j);
  if (i == j) throw std::invalid_argument("InteractionGraph: self-loop");
  if (has_edge(i, j)) throw std::invalid_argument("InteractionGraph: duplicate edge");
  if (!std::isfinite(delta) || delta < 0.0)
    throw std::invalid_argument("InteractionGraph: desired separation must be finite and >= 0");
  edges_.push_back({std::min(i, j), std::max(i, j), delta});
  adjacency_[i].push_back(j);
  adjacency_[j].push_back(i);
  std::sort(adjacency_[i].begin(), adjacency_[i].end());
  std::sort(adjacency_[j].begin(), adjacency_[j].end());
}

bool InteractionGraph::has_edge(int i, int j) const {
  check_index(i);
  check_index(j);
  const auto& adj = adjacency_[i];
  return std::binary_search(adj.begin(), adj.end(), j);
}

const std::vector<int>& InteractionGraph::neighbors(int i) const {
  check_index(i);
  return adjacency_[i];
}

double InteractionGraph::delta(int i, int j) const {
  const int a = std::min(i, j);
  const int b = std::max(i, j);
  for (const auto& e : edges_)
    if (e.i == a && e.j == b) return e.delta;
  throw std::invalid_argument("InteractionGraph: no edge between " + std::to_string(i) + " and " +
                              std::to_string(j));
}

bool InteractionGraph::connected() const {
  std::vector<bool> seen(static_cast<std::size_t>(n_), false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int count = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int w : adjacency_[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        frontier.push(w);
      }
    }
  }
  return count == n_;
}

InteractionGraph InteractionGraph::cycle(int n) {
  InteractionGraph g(n);
  if (n == 2) {
    g.add_edge(0, 1);
  } else {
    for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    if (n > 2) g.add_edge(n - 1, 0);
  }
  return g;
}

InteractionGraph InteractionGraph::path(int n) {
  InteractionGraph g(n);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

InteractionGraph InteractionGraph::star(int n, int center) {
  InteractionGraph g(n);
  for (int i = 0; i < n; ++i)
    if (i != center) g.add_edge(center, i);
  return g;
}

}  // namespace bsel
