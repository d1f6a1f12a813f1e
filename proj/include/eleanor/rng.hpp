#pragma once
// Counter-based random streams. A stream is keyed by (seed, replication,
// episode, step); two streams with the same key generate the identical
// sequence on every platform, and distinct keys give statistically
// independent sequences. There is no global RNG state anywhere.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace eleanor {

namespace detail {
// SplitMix64 finalizer (Steele, Lea, Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t replication, std::uint64_t episode,
            std::uint64_t step) {
    std::uint64_t h = detail::mix64(seed);
    h = detail::mix64(h ^ detail::mix64(replication + 0x517cc1b727220a95ULL));
    h = detail::mix64(h ^ detail::mix64(episode + 0x2545f4914f6cdd1dULL));
    h = detail::mix64(h ^ detail::mix64(step + 0x6a09e667f3bcc909ULL));
    state_ = h;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on [-half_width, half_width].
  double symmetric(double half_width) {
    return uniform(-half_width, half_width);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Index below n, uniformly.
  int uniform_index(int n) {
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

  // Standard normal via Box-Muller (consumes two uniforms).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  // Samples an index from a probability vector by inverse CDF; on the
  // (measure-zero) boundary the lowest matching index wins.
  int categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

  // Uniform point in the Euclidean ball of the given radius.
  std::vector<double> ball_point(int dim, double radius) {
    std::vector<double> x(static_cast<std::size_t>(dim));
    double norm_sq = 0.0;
    for (auto& xi : x) {
      xi = normal();
      norm_sq += xi * xi;
    }
    const double norm = std::sqrt(norm_sq);
    const double r =
        radius * std::pow(uniform(), 1.0 / static_cast<double>(dim));
    const double scale = norm > 0.0 ? r / norm : 0.0;
    for (auto& xi : x) xi *= scale;
    return x;
  }

 private:
  std::uint64_t state_;
};

}  // namespace eleanor
