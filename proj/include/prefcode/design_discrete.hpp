#pragma once
// Codebook design for finite-support preferences via divergence-based
// k-means++ with request-weighted centroid updates.
//
// The alternation is the classic one: assign every item to its
// divergence-minimizing codebook, then replace each codebook by the
// request-weighted mean of its members (which is the exact minimizer of the
// cluster's weighted divergence sum). Both steps lower the objective, so the
// per-iteration trace is non-increasing and termination at a fixed point is
// guaranteed on finite inputs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "prefcode/design_single.hpp"
#include "prefcode/diagnostics.hpp"
#include "prefcode/info.hpp"
#include "prefcode/random.hpp"
#include "prefcode/types.hpp"

namespace prefcode {

struct DesignOptions {
  int restarts = 10;
  int max_iters = 1000;
  double epsilon = 1e-6;         // outer convergence threshold
  double subproblem_tol = 1e-8;  // inner solver tolerance (DCA path)
  std::uint64_t seed = 42;
};

struct DesignResult {
  CodebookSet set;
  PartitionAssignment assignment;
  double objective = 0.0;  // request-weighted divergence, bits/symbol
  int iterations = 0;
  std::vector<double> trace;  // per-iteration objective, non-increasing
};

/// Request-weighted mean of the member SPVs, normalized to unit sum: the
/// divergence-minimizing codebook for a fixed cluster.
inline Codebook center_update(const DiscretePreference& pref,
                              const std::vector<std::size_t>& members) {
  const std::size_t n = pref.alphabet_size();
  std::vector<double> acc(n, 0.0);
  double mass = 0.0;
  for (std::size_t j : members) {
    mass += pref.prob(j);
    for (std::size_t i = 0; i < n; ++i) acc[i] += pref.prob(j) * pref.spv(j)[i];
  }
  double sum = 0.0;
  for (double v : acc) sum += v;
  if (!(sum > 0.0) || !(mass > 0.0))
    throw EmptyCluster("center_update: cluster carries no request mass");
  for (auto& v : acc) v /= sum;
  return Codebook(std::move(acc));
}

namespace detail {

inline double weighted_divergence(const DiscretePreference& pref,
                                  const std::vector<std::vector<double>>& centers,
                                  const std::vector<std::size_t>& owner) {
  double obj = 0.0;
  for (std::size_t j = 0; j < pref.item_count(); ++j) {
    if (pref.prob(j) <= 0.0) continue;
    obj += pref.prob(j) * kl_bits(pref.spv(j).probs(), centers[owner[j]]);
  }
  return obj;
}

/// Assignment step, tolerant of infinite divergences: an item no center can
/// encode falls to index 0 until the next center update widens support.
inline std::vector<std::size_t> assign_items(const DiscretePreference& pref,
                                             const std::vector<std::vector<double>>& centers) {
  std::vector<std::size_t> owner(pref.item_count(), 0);
  for (std::size_t j = 0; j < pref.item_count(); ++j)
    owner[j] = nearest_center(pref.spv(j).probs(), centers).first;
  return owner;
}

/// Center step: request-weighted means per cluster. A cluster left with zero
/// request mass is reseeded at the item maximizing f_j * G_j, G_j being the
/// divergence to the nearest surviving center; if even that weight vanishes
/// the old center is kept.
inline void update_centers(const DiscretePreference& pref, const std::vector<std::size_t>& owner,
                           std::vector<std::vector<double>>& centers) {
  const std::size_t n = pref.alphabet_size();
  const std::size_t K = centers.size();
  std::vector<std::vector<double>> acc(K, std::vector<double>(n, 0.0));
  std::vector<double> mass(K, 0.0);
  for (std::size_t j = 0; j < pref.item_count(); ++j) {
    const double f = pref.prob(j);
    if (f <= 0.0) continue;
    mass[owner[j]] += f;
    for (std::size_t i = 0; i < n; ++i) acc[owner[j]][i] += f * pref.spv(j)[i];
  }
  std::vector<std::size_t> starved;
  std::vector<std::vector<double>> valid;
  for (std::size_t k = 0; k < K; ++k) {
    if (mass[k] > 0.0) {
      double sum = 0.0;
      for (double v : acc[k]) sum += v;
      for (auto& v : acc[k]) v /= sum;
      centers[k] = acc[k];
      valid.push_back(centers[k]);
    } else {
      starved.push_back(k);
    }
  }
  for (std::size_t k : starved) {
    double best_score = 0.0;
    std::size_t best_j = pref.item_count();
    for (std::size_t j = 0; j < pref.item_count(); ++j) {
      if (pref.prob(j) <= 0.0) continue;
      double g = kInfBits;
      for (const auto& c : valid) g = std::min(g, kl_bits(pref.spv(j).probs(), c));
      double score = g == kInfBits ? kInfBits : pref.prob(j) * g;
      if (score > best_score) {
        best_score = score;
        best_j = j;
      }
    }
    if (best_j < pref.item_count()) centers[k] = pref.spv(best_j).probs();
    valid.push_back(centers[k]);
  }
}

enum class LloydStop { assignment_stable, center_change };

struct LloydOutcome {
  std::vector<std::vector<double>> centers;
  std::vector<std::size_t> owner;
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> trace;
};

inline LloydOutcome lloyd(const DiscretePreference& pref,
                          std::vector<std::vector<double>> centers, int max_iters,
                          LloydStop stop = LloydStop::assignment_stable,
                          double center_eps = 0.0) {
  LloydOutcome out;
  out.owner = assign_items(pref, centers);
  out.trace.push_back(weighted_divergence(pref, centers, out.owner));
  for (int iter = 1; iter <= max_iters; ++iter) {
    out.iterations = iter;
    std::vector<std::vector<double>> prev = centers;
    update_centers(pref, out.owner, centers);
    double delta = 0.0;
    for (std::size_t k = 0; k < centers.size(); ++k)
      for (std::size_t i = 0; i < centers[k].size(); ++i)
        delta = std::max(delta, std::abs(centers[k][i] - prev[k][i]));
    auto next_owner = assign_items(pref, centers);
    out.trace.push_back(weighted_divergence(pref, centers, next_owner));
    bool stable = next_owner == out.owner;
    out.owner = std::move(next_owner);
    if (stop == LloydStop::assignment_stable ? stable : delta <= center_eps) break;
  }
  out.centers = std::move(centers);
  out.objective = out.trace.back();

  // Self-checks: monotone trace, centroid residual, assignment residual.
  auto& diag = diagnostics();
  diag.kmeans_runs++;
  for (std::size_t i = 1; i < out.trace.size(); ++i)
    if (out.trace[i] > out.trace[i - 1] + 1e-12) diag.descent_violations++;
  {
    const std::size_t n = pref.alphabet_size();
    std::vector<std::vector<double>> acc(out.centers.size(), std::vector<double>(n, 0.0));
    std::vector<double> mass(out.centers.size(), 0.0);
    for (std::size_t j = 0; j < pref.item_count(); ++j) {
      const double f = pref.prob(j);
      if (f <= 0.0) continue;
      mass[out.owner[j]] += f;
      for (std::size_t i = 0; i < n; ++i) acc[out.owner[j]][i] += f * pref.spv(j)[i];
    }
    double residual = 0.0;
    for (std::size_t k = 0; k < out.centers.size(); ++k) {
      if (!(mass[k] > 0.0)) continue;  // starved clusters carry no constraint
      double sum = 0.0;
      for (double v : acc[k]) sum += v;
      for (std::size_t i = 0; i < n; ++i)
        residual = std::max(residual, std::abs(out.centers[k][i] - acc[k][i] / sum));
    }
    for (std::size_t j = 0; j < pref.item_count(); ++j) {
      if (pref.prob(j) <= 0.0) continue;
      auto [best, div] = nearest_center(pref.spv(j).probs(), out.centers);
      (void)best;
      double cur = kl_bits(pref.spv(j).probs(), out.centers[out.owner[j]]);
      if (cur > div + 1e-9 || (div == kInfBits && cur != kInfBits)) residual = 1.0;
    }
    if (residual >= 1e-9) diag.fixed_point_violations++;
  }
  return out;
}

inline DesignResult lloyd_to_result(const DiscretePreference& pref, LloydOutcome&& out) {
  std::vector<Codebook> books;
  books.reserve(out.centers.size());
  for (auto& c : out.centers) books.emplace_back(std::move(c));
  return DesignResult{CodebookSet(std::move(books)),
                      PartitionAssignment{std::move(out.owner)},
                      out.objective,
                      out.iterations,
                      std::move(out.trace)};
}

}  // namespace detail

/// k-means++ style seeding: the first codebook is an SPV drawn by request
/// probability, each further one by probability proportional to f_j * G_j^2,
/// G_j being the divergence to the closest codebook chosen so far. Items an
/// existing seed cannot encode have infinite G; when any exist, the draw is
/// restricted to them (weighted by f_j). If fewer than K distinct SPVs carry
/// positive seeding weight, the chosen seeds are duplicated cyclically.
inline CodebookSet kmeanspp_seed(const DiscretePreference& pref, std::size_t K, Rng& rng) {
  if (K == 0) throw std::invalid_argument("kmeanspp_seed: K must be positive");
  const std::size_t J = pref.item_count();
  std::vector<std::vector<double>> centers;
  centers.reserve(K);
  std::vector<double> w(J);
  for (std::size_t j = 0; j < J; ++j) w[j] = pref.prob(j);
  centers.push_back(pref.spv(rng.pick_weighted(w)).probs());
  while (centers.size() < K) {
    std::vector<double> score(J, 0.0);
    std::vector<double> infinite_f(J, 0.0);
    bool any_infinite = false;
    double total = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      if (pref.prob(j) <= 0.0) continue;
      double g = kInfBits;
      for (const auto& c : centers) g = std::min(g, detail::kl_bits(pref.spv(j).probs(), c));
      if (g == kInfBits) {
        any_infinite = true;
        infinite_f[j] = pref.prob(j);
      } else {
        score[j] = pref.prob(j) * g * g;
        total += score[j];
      }
    }
    if (any_infinite) {
      centers.push_back(pref.spv(rng.pick_weighted(infinite_f)).probs());
    } else if (total > 0.0) {
      centers.push_back(pref.spv(rng.pick_weighted(score)).probs());
    } else {
      // Degenerate support: fewer than K distinct seedable SPVs remain.
      std::size_t base = centers.size();
      for (std::size_t i = 0; centers.size() < K; ++i) centers.push_back(centers[i % base]);
      break;
    }
  }
  std::vector<Codebook> books;
  books.reserve(K);
  for (auto& c : centers) books.emplace_back(std::move(c));
  return CodebookSet(std::move(books));
}

/// Best-of-restarts alternating design. Each restart seeds with kmeanspp_seed
/// under an independent child stream and iterates to an exact fixed point;
/// restarts are merged by (objective, restart index) so the outcome does not
/// depend on evaluation order.
inline DesignResult design_kmeanspp(const DiscretePreference& pref, std::size_t K,
                                    const DesignOptions& opts = {}) {
  Rng root(opts.seed);
  DesignResult best{CodebookSet({Codebook(std::vector<double>(pref.alphabet_size(),
                                                              1.0 / pref.alphabet_size()))}),
                    PartitionAssignment{},
                    kInfBits,
                    0,
                    {}};
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Rng rng = root.split(static_cast<std::uint64_t>(r));
    auto seeds = kmeanspp_seed(pref, K, rng);
    std::vector<std::vector<double>> centers;
    centers.reserve(K);
    for (const auto& cb : seeds.codebooks()) centers.push_back(cb.q());
    auto out = detail::lloyd(pref, std::move(centers), opts.max_iters);
    if (out.objective < best.objective)
      best = detail::lloyd_to_result(pref, std::move(out));
  }
  return best;
}

}  // namespace prefcode
