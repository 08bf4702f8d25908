#pragma once
// Closed-form single-codebook optimum and the exhaustive grid baseline used
// as a correctness oracle by the iterative designers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "prefcode/info.hpp"
#include "prefcode/types.hpp"

namespace prefcode {

/// The unique divergence-minimizing single codebook: the request-weighted
/// mean of the preference SPVs, normalized to unit sum.
inline Codebook optimal_single(const DiscretePreference& pref) {
  const std::size_t n = pref.alphabet_size();
  std::vector<double> q(n, 0.0);
  for (std::size_t j = 0; j < pref.item_count(); ++j)
    for (std::size_t i = 0; i < n; ++i) q[i] += pref.prob(j) * pref.spv(j)[i];
  double sum = 0.0;
  for (double v : q) sum += v;
  for (auto& v : q) v /= sum;
  return Codebook(std::move(q));
}

struct GridSearchSpec {
  double step = 0.01;
  std::size_t codebook_count = 1;
};

/// All points of the regular simplex grid with resolution `step`: the
/// nonnegative integer compositions of round(1/step), scaled back down.
/// Coordinates are computed as integer/m, so every point lies exactly on the
/// simplex.
inline std::vector<std::vector<double>> simplex_grid(std::size_t n, double step) {
  if (!(step > 0.0) || step > 0.5) throw std::invalid_argument("grid step must be in (0, 0.5]");
  const long long m = std::llround(1.0 / step);
  std::vector<std::vector<double>> points;
  std::vector<long long> comp(n, 0);
  auto emit = [&] {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i)
      p[i] = static_cast<double>(comp[i]) / static_cast<double>(m);
    points.push_back(std::move(p));
  };
  // Lexicographic enumeration of the compositions of m into n parts.
  auto rec = [&](auto&& self, std::size_t idx, long long remaining) -> void {
    if (idx == n - 1) {
      comp[idx] = remaining;
      emit();
      return;
    }
    for (long long c = 0; c <= remaining; ++c) {
      comp[idx] = c;
      self(self, idx + 1, remaining - c);
    }
  };
  rec(rec, 0, m);
  return points;
}

struct ExhaustiveResult {
  CodebookSet set;
  double objective;  // bits/symbol divergence term
};

/// Minimizes the request-weighted divergence over all unordered K-subsets of
/// the simplex grid. Guarded: (#grid points)^K must stay at or below 1e7.
/// Ties resolve to the lexicographically smallest subset, which the
/// ascending enumeration yields for free.
inline ExhaustiveResult exhaustive_search(const DiscretePreference& pref,
                                          const GridSearchSpec& spec) {
  const std::size_t n = pref.alphabet_size();
  const std::size_t K = spec.codebook_count;
  if (K == 0) throw std::invalid_argument("exhaustive_search: K must be positive");
  auto grid = simplex_grid(n, spec.step);
  const std::size_t g = grid.size();
  if (std::pow(static_cast<double>(g), static_cast<double>(K)) > 1e7)
    throw BudgetExceeded("exhaustive_search: grid^K exceeds 1e7 candidates");
  const std::size_t k_eff = std::min(K, g);

  const std::size_t J = pref.item_count();
  // Divergence table: item j vs grid point gi.
  std::vector<double> div(J * g);
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t gi = 0; gi < g; ++gi)
      div[j * g + gi] = detail::kl_bits(pref.spv(j).probs(), grid[gi]);

  std::vector<std::size_t> pick(k_eff);
  for (std::size_t i = 0; i < k_eff; ++i) pick[i] = i;
  std::vector<std::size_t> best_pick;
  double best_obj = kInfBits;
  bool done = false;
  while (!done) {
    double obj = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      double mn = kInfBits;
      for (std::size_t i = 0; i < k_eff; ++i) mn = std::min(mn, div[j * g + pick[i]]);
      obj += pref.prob(j) * mn;
      if (!(obj < best_obj)) break;  // prune: objective only grows over j
    }
    if (obj < best_obj) {
      best_obj = obj;
      best_pick = pick;
    }
    // next combination in lexicographic order
    done = true;
    for (std::size_t i = k_eff; i-- > 0;) {
      if (pick[i] != i + g - k_eff) {
        ++pick[i];
        for (std::size_t l = i + 1; l < k_eff; ++l) pick[l] = pick[l - 1] + 1;
        done = false;
        break;
      }
    }
  }
  if (best_pick.empty()) throw AllInfinite("exhaustive_search: no feasible subset");

  std::vector<Codebook> books;
  books.reserve(K);
  for (std::size_t i : best_pick) books.emplace_back(grid[i]);
  while (books.size() < K) books.push_back(books.back());  // K > #grid: pad with duplicates
  return {CodebookSet(std::move(books)), best_obj};
}

}  // namespace prefcode
