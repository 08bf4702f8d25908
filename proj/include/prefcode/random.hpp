#pragma once
// Deterministic random number generation used by every stochastic routine in
// the library.
//
// Base generator: SplitMix64 (Steele/Lea/Vigna). Two properties matter here:
//   * a stream is a pure function of its 64-bit seed, and
//   * child streams are derived from the *construction* seed and a stream id,
//     never from the current position, so restarts and grid cells can be
//     evaluated in any order (or in parallel) without changing a single draw.
//
// All distribution helpers below are hand-rolled on top of uniform bits so
// that results are bit-identical across standard libraries and platforms.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace prefcode {

namespace detail {
inline std::uint64_t splitmix_scramble(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return detail::splitmix_scramble(state_);
  }

  /// Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in the open interval (0, 1); safe to pass to log().
  double uniform_open01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Child stream for `id`, derived from the construction seed only.
  Rng split(std::uint64_t id) const {
    return Rng(detail::splitmix_scramble(
        seed_ ^ detail::splitmix_scramble(id + 0x9e3779b97f4a7c15ull)));
  }

  /// Unit-rate exponential draw, strictly positive.
  double exponential() { return -std::log(uniform_open01()); }

  /// Standard normal via Box-Muller (second value discarded).
  double normal() {
    double u1 = uniform_open01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  /// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 handled by boosting.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
    if (shape < 1.0) {
      double u = uniform_open01();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = uniform_open01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  /// Point drawn uniformly from the (n-1)-simplex: normalized exponentials.
  std::vector<double> uniform_simplex(std::size_t n) {
    std::vector<double> p(n);
    double total = 0.0;
    for (auto& v : p) {
      v = exponential();
      total += v;
    }
    for (auto& v : p) v /= total;
    return p;
  }

  /// Dirichlet draw with the given concentration parameters.
  std::vector<double> dirichlet(const std::vector<double>& alpha) {
    std::vector<double> p(alpha.size());
    double total = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      p[i] = gamma(alpha[i]);
      total += p[i];
    }
    if (total <= 0.0) throw std::runtime_error("dirichlet draw degenerated to zero mass");
    for (auto& v : p) v /= total;
    return p;
  }

  /// Index sampled with probability proportional to the (finite, nonnegative)
  /// weights. Total weight must be positive.
  std::size_t pick_weighted(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("pick_weighted: nonpositive total weight");
    double u = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace prefcode
