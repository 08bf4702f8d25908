#pragma once
// Codebook design under density-valued preferences. Exact integrals over the
// divergence partition are intractable beyond toy alphabets, so designs are
// computed on a fixed Monte Carlo sample (sample average approximation):
// draw S points from the preference density, give each weight 1/S, and hand
// the empirical problem to a discrete designer. The fixed sample keeps the
// iterative descent property exact.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "prefcode/dc.hpp"
#include "prefcode/design_discrete.hpp"
#include "prefcode/random.hpp"
#include "prefcode/types.hpp"

namespace prefcode {

/// Preference density over the simplex.
///   uniform    - flat density
///   dirichlet  - Dirichlet(alpha)
///   radial     - density proportional to ||p - center||_2
///   custom     - caller-supplied density with an upper bound, sampled by
///                rejection against the uniform proposal
struct PreferenceSpec {
  enum class Kind { uniform, dirichlet, radial, custom };

  Kind kind = Kind::uniform;
  std::size_t n = 3;
  std::vector<double> alpha;   // dirichlet
  std::vector<double> center;  // radial
  std::function<double(const std::vector<double>&)> density;  // custom
  double bound = 0.0;                                          // custom

  static PreferenceSpec Uniform(std::size_t n) { return {Kind::uniform, n, {}, {}, {}, 0.0}; }
  static PreferenceSpec Dirichlet(std::vector<double> alpha) {
    PreferenceSpec s;
    s.kind = Kind::dirichlet;
    s.n = alpha.size();
    s.alpha = std::move(alpha);
    return s;
  }
  static PreferenceSpec Radial(std::vector<double> center) {
    PreferenceSpec s;
    s.kind = Kind::radial;
    s.n = center.size();
    s.center = std::move(center);
    return s;
  }
  static PreferenceSpec Custom(std::size_t n,
                               std::function<double(const std::vector<double>&)> density,
                               double bound) {
    PreferenceSpec s;
    s.kind = Kind::custom;
    s.n = n;
    s.density = std::move(density);
    s.bound = bound;
    return s;
  }
};

struct SampleSet {
  std::vector<Spv> points;  // uniform weights 1/S
};

namespace detail {

inline double radial_density(const std::vector<double>& p, const std::vector<double>& center) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d2 += (p[i] - center[i]) * (p[i] - center[i]);
  return std::sqrt(d2);
}

/// Upper bound of the radial density over the simplex: the distance is
/// convex, so the maximum sits at a vertex.
inline double radial_bound(const std::vector<double>& center) {
  double best = 0.0;
  const std::size_t n = center.size();
  for (std::size_t v = 0; v < n; ++v) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double diff = (i == v ? 1.0 : 0.0) - center[i];
      d2 += diff * diff;
    }
    best = std::max(best, std::sqrt(d2));
  }
  return best;
}

inline std::vector<double> rejection_sample(
    std::size_t n, const std::function<double(const std::vector<double>&)>& density,
    double bound, Rng& rng) {
  if (!(bound > 0.0)) throw std::invalid_argument("rejection bound must be positive");
  std::uint64_t proposals = 0, accepted = 0;
  for (;;) {
    auto p = rng.uniform_simplex(n);
    ++proposals;
    double d = density(p);
    if (d < 0.0) throw std::invalid_argument("density returned a negative value");
    if (rng.uniform01() * bound <= d) {
      ++accepted;
      return p;
    }
    if (proposals % 1000000 == 0 && accepted < proposals / 10000)
      throw RejectionStall("rejection sampler acceptance rate below 1e-4");
  }
}

}  // namespace detail

/// S i.i.d. draws from the spec's normalized density.
inline SampleSet sample_preference(const PreferenceSpec& spec, std::size_t S, Rng& rng) {
  if (S == 0) throw std::invalid_argument("sample_preference: S must be positive");
  if (spec.n < 2) throw std::invalid_argument("sample_preference: alphabet too small");
  SampleSet out;
  out.points.reserve(S);
  switch (spec.kind) {
    case PreferenceSpec::Kind::uniform:
      for (std::size_t s = 0; s < S; ++s) out.points.emplace_back(rng.uniform_simplex(spec.n));
      break;
    case PreferenceSpec::Kind::dirichlet: {
      if (spec.alpha.size() != spec.n)
        throw DimensionMismatch("dirichlet alpha length must equal n");
      for (double a : spec.alpha)
        if (!(a > 0.0)) throw std::invalid_argument("dirichlet alpha must be positive");
      for (std::size_t s = 0; s < S; ++s) out.points.emplace_back(rng.dirichlet(spec.alpha));
      break;
    }
    case PreferenceSpec::Kind::radial: {
      if (spec.center.size() != spec.n)
        throw DimensionMismatch("radial center length must equal n");
      const double bound = detail::radial_bound(spec.center);
      auto dens = [&](const std::vector<double>& p) {
        return detail::radial_density(p, spec.center);
      };
      for (std::size_t s = 0; s < S; ++s)
        out.points.emplace_back(detail::rejection_sample(spec.n, dens, bound, rng));
      break;
    }
    case PreferenceSpec::Kind::custom: {
      if (!spec.density) throw std::invalid_argument("custom spec needs a density");
      for (std::size_t s = 0; s < S; ++s)
        out.points.emplace_back(detail::rejection_sample(spec.n, spec.density, spec.bound, rng));
      break;
    }
  }
  return out;
}

inline DiscretePreference to_preference(SampleSet sample) {
  const double f = 1.0 / static_cast<double>(sample.points.size());
  std::vector<double> w(sample.points.size(), f);
  return DiscretePreference(std::move(sample.points), std::move(w));
}

enum class SamplingMethod { kmeanspp, dca };

namespace detail {

// Shared pipeline so the fixed-sample iterative design and the plain
// sampling design agree bit for bit when given the same options: stream 1
// draws the sample, stream 2 drives the designer.
inline DesignResult sampled_design(const PreferenceSpec& spec, std::size_t K, std::size_t S,
                                   SamplingMethod method, const DesignOptions& opts,
                                   LloydStop stop) {
  Rng root(opts.seed);
  Rng sampler = root.split(1);
  auto pref = to_preference(sample_preference(spec, S, sampler));
  DesignOptions inner = opts;
  inner.seed = root.split(2).seed();
  if (method == SamplingMethod::dca) return design_dca(pref, K, inner);
  if (stop == LloydStop::assignment_stable) return design_kmeanspp(pref, K, inner);

  // Center-change stopping: same seeding, looser termination test.
  Rng seeder(inner.seed);
  DesignResult best{CodebookSet({Codebook(std::vector<double>(pref.alphabet_size(),
                                                              1.0 / pref.alphabet_size()))}),
                    PartitionAssignment{},
                    kInfBits,
                    0,
                    {}};
  for (int r = 0; r < std::max(1, inner.restarts); ++r) {
    Rng rng = seeder.split(static_cast<std::uint64_t>(r));
    auto seeds = kmeanspp_seed(pref, K, rng);
    std::vector<std::vector<double>> centers;
    for (const auto& cb : seeds.codebooks()) centers.push_back(cb.q());
    auto out = lloyd(pref, std::move(centers), inner.max_iters, LloydStop::center_change,
                     inner.epsilon);
    if (out.objective < best.objective) best = lloyd_to_result(pref, std::move(out));
  }
  return best;
}

}  // namespace detail

/// Sampling-based design: draw S points, weight them 1/S, and delegate to the
/// chosen discrete designer.
inline DesignResult design_sampling(const PreferenceSpec& spec, std::size_t K, std::size_t S,
                                    SamplingMethod method, const DesignOptions& opts = {}) {
  return detail::sampled_design(spec, K, S, method, opts,
                                detail::LloydStop::assignment_stable);
}

/// Iterative design on a fixed Monte Carlo realization of the density:
/// density-weighted seeding followed by alternating region/center updates,
/// stopping when the largest componentwise center movement drops to
/// opts.epsilon. With matching options this coincides with
/// design_sampling(kmeanspp) on the same sample.
inline DesignResult design_continuous_saa(const PreferenceSpec& spec, std::size_t K,
                                          std::size_t S_int, const DesignOptions& opts = {}) {
  return detail::sampled_design(spec, K, S_int, SamplingMethod::kmeanspp, opts,
                                detail::LloydStop::center_change);
}

}  // namespace prefcode
