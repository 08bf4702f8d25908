#pragma once
// Information-theoretic primitives. All logarithms are base 2; entropies,
// divergences, and costs are reported in bits. Conventions: 0*log(0/q) = 0,
// and p_n > 0 against q_n = 0 yields +infinity rather than an error, so
// minima over codebook sets stay well-defined.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "prefcode/types.hpp"

namespace prefcode {

namespace detail {

inline double entropy_bits(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h < 0.0 ? 0.0 : h;
}

inline double kl_bits(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    if (p[n] <= 0.0) continue;
    if (q[n] <= 0.0) return kInfBits;
    d += p[n] * std::log2(p[n] / q[n]);
  }
  return d < 0.0 ? 0.0 : d;
}

/// Index of the divergence-minimizing vector among `centers` (ties resolve to
/// the lowest index). Returns the minimum, which may be +infinity when no
/// center covers p's support.
inline std::pair<std::size_t, double> nearest_center(
    const std::vector<double>& p, const std::vector<std::vector<double>>& centers) {
  std::size_t best = 0;
  double best_div = kInfBits;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    double d = kl_bits(p, centers[k]);
    if (d < best_div) {
      best_div = d;
      best = k;
    }
  }
  return {best, best_div};
}

}  // namespace detail

/// Entropy H(p) in bits per symbol.
inline double entropy(const Spv& p) { return detail::entropy_bits(p.probs()); }

/// Kullback-Leibler divergence D(p || q) in bits per symbol; +infinity when
/// some p_n > 0 has q_n = 0.
inline double kl_divergence(const Spv& p, const Codebook& q) {
  if (p.size() != q.size()) throw DimensionMismatch("kl_divergence: length mismatch");
  return detail::kl_bits(p.probs(), q.q());
}

/// Bits needed to encode an L-symbol item with SPV p under codebook q at the
/// real-valued ideal lengths -log2 q_n. Equals L*(H(p) + D(p||q)).
inline double code_cost(const Spv& p, const Codebook& q, std::size_t length) {
  if (length == 0) throw std::invalid_argument("code_cost: length must be positive");
  double d = kl_divergence(p, q);
  if (d == kInfBits) return kInfBits;
  return static_cast<double>(length) * (entropy(p) + d);
}

struct BestCodebook {
  std::size_t index;
  double divergence;
};

/// Lowest-index codebook minimizing D(p || q_k) and the attained minimum.
inline BestCodebook best_codebook(const Spv& p, const CodebookSet& set) {
  if (p.size() != set.alphabet_size())
    throw DimensionMismatch("best_codebook: alphabet mismatch");
  std::size_t best = 0;
  double best_div = kInfBits;
  for (std::size_t k = 0; k < set.size(); ++k) {
    double d = kl_divergence(p, set[k]);
    if (d < best_div) {
      best_div = d;
      best = k;
    }
  }
  if (best_div == kInfBits) throw AllInfinite("no codebook can encode this SPV");
  return {best, best_div};
}

struct ExpectedCost {
  double bits;
  PartitionAssignment assignment;
};

/// Expected bits to satisfy one request drawn from `pref`, together with the
/// divergence-minimizing partition of items onto codebooks.
inline ExpectedCost expected_cost(const DiscretePreference& pref, const CodebookSet& set,
                                  std::size_t length) {
  if (pref.alphabet_size() != set.alphabet_size())
    throw DimensionMismatch("expected_cost: alphabet mismatch");
  if (length == 0) throw std::invalid_argument("expected_cost: length must be positive");
  PartitionAssignment assignment;
  assignment.owner.resize(pref.item_count());
  double per_symbol = 0.0;
  for (std::size_t j = 0; j < pref.item_count(); ++j) {
    BestCodebook best = best_codebook(pref.spv(j), set);
    assignment.owner[j] = best.index;
    per_symbol += pref.prob(j) * (entropy(pref.spv(j)) + best.divergence);
  }
  return {static_cast<double>(length) * per_symbol, std::move(assignment)};
}

/// True iff the implied-probability Kraft sum does not exceed one (1e-9 slack).
inline bool kraft_check(const Codebook& q) {
  double sum = 0.0;
  for (double v : q.q()) sum += v;
  return sum <= 1.0 + kProbTol;
}

}  // namespace prefcode
