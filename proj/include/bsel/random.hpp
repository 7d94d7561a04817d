#ifndef BSEL_RANDOM_HPP
#define BSEL_RANDOM_HPP

#include "bsel/geometry.hpp"

#include <cstdint>
#include <random>

namespace bsel {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; mixes (seed, stream, index) into an independent seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1)) ^ (0xBF58476D1CE4E5B9ULL * (index + 1));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

enum class Stream : std::uint64_t {
  QInit = 1,
  TrainEnvironment = 2,
  TrainAgent = 3,
  EvalEnvironment = 4,
  EvalAgent = 5,
};

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  return Rng(mix_seed(seed, static_cast<std::uint64_t>(stream), index));
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec2 uniform_in_box(Rng& rng, const Vec2& lo, const Vec2& hi) {
  const double x = uniform(rng, lo.x(), hi.x());
  const double y = uniform(rng, lo.y(), hi.y());
  return {x, y};
}

inline Positions uniform_in_arena(Rng& rng, const Arena& arena, int n) {
  Positions p(2, n);
  for (int i = 0; i < n; ++i)
    p.col(i) = uniform_in_box(rng, Vec2(arena.x_lo, arena.y_lo), Vec2(arena.x_hi, arena.y_hi));
  return p;
}

inline Vec2 standard_normal2(Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  const double x = n01(rng);
  const double y = n01(rng);
  return {x, y};
}

}  // namespace bsel

#endif  // BSEL_RANDOM_HPP
