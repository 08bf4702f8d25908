#pragma once
// Two-receiver codebook design with shared (multicast) and exclusive
// codebooks. A joint preference matrix F gives the probability that user 1
// requests item i while user 2 requests item j. Identical requests are
// served by one multicast transmission encoded with a shared codebook; all
// other requests are served per user, each picking the best codebook among
// the shared set and that user's exclusive set.
//
// Both designers sweep the shared-codebook count K0 (including K0 = 0, which
// degenerates to two independent single-user designs on the marginals) and
// keep the cheapest design, breaking ties toward fewer shared codebooks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "prefcode/dc.hpp"
#include "prefcode/design_discrete.hpp"
#include "prefcode/info.hpp"
#include "prefcode/random.hpp"
#include "prefcode/types.hpp"

namespace prefcode {

/// J x J joint request matrix; entries sum to one within 1e-9 and are
/// renormalized on ingest.
class JointPreference {
 public:
  explicit JointPreference(std::vector<std::vector<double>> f) : f_(std::move(f)) {
    const std::size_t j = f_.size();
    if (j == 0) throw std::invalid_argument("joint preference must be nonempty");
    double sum = 0.0;
    for (const auto& row : f_) {
      if (row.size() != j) throw DimensionMismatch("joint preference must be square");
      for (double v : row) {
        if (v < 0.0) throw std::invalid_argument("joint preference entry is negative");
        sum += v;
      }
    }
    if (std::abs(sum - 1.0) > kProbTol)
      throw std::invalid_argument("joint preference entries must sum to 1");
    for (auto& row : f_)
      for (auto& v : row) v /= sum;
  }

  std::size_t item_count() const { return f_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return f_[i][j]; }
  const std::vector<std::vector<double>>& matrix() const { return f_; }

  double diagonal(std::size_t j) const { return f_[j][j]; }
  /// Probability that user 1 requests item j while user 2 requests another.
  double solo1(std::size_t j) const {
    double s = 0.0;
    for (std::size_t i = 0; i < f_.size(); ++i)
      if (i != j) s += f_[j][i];
    return s;
  }
  /// Probability that user 2 requests item j while user 1 requests another.
  double solo2(std::size_t j) const {
    double s = 0.0;
    for (std::size_t i = 0; i < f_.size(); ++i)
      if (i != j) s += f_[i][j];
    return s;
  }

 private:
  std::vector<std::vector<double>> f_;
};

struct TwoUserBudget {
  std::size_t k1_total = 1;
  std::size_t k2_total = 1;
};

struct TwoUserDesign {
  std::vector<Codebook> common;
  std::vector<Codebook> excl1;
  std::vector<Codebook> excl2;

  std::size_t k0() const { return common.size(); }
};

struct TwoUserResult {
  TwoUserDesign design;
  double bits = 0.0;
};

/// Similarity-parameterized joint matrix: diagonal alpha/J, off-diagonal
/// (1-alpha)/(J(J-1)); the trace equals alpha.
inline JointPreference joint_pref_alpha(std::size_t j, double alpha) {
  if (j < 2) throw std::invalid_argument("joint_pref_alpha needs J >= 2");
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0, 1]");
  const double diag = alpha / static_cast<double>(j);
  const double off = (1.0 - alpha) / (static_cast<double>(j) * static_cast<double>(j - 1));
  std::vector<std::vector<double>> f(j, std::vector<double>(j, off));
  for (std::size_t i = 0; i < j; ++i) f[i][i] = diag;
  return JointPreference(std::move(f));
}

namespace twouser_detail {

struct Weights {
  std::vector<double> diag, solo1, solo2;
};

inline Weights weights_of(const JointPreference& F) {
  const std::size_t J = F.item_count();
  Weights w;
  w.diag.resize(J);
  w.solo1.resize(J);
  w.solo2.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    w.diag[j] = F.diagonal(j);
    w.solo1[j] = F.solo1(j);
    w.solo2[j] = F.solo2(j);
  }
  return w;
}

struct Centers {
  std::vector<std::vector<double>> common, excl1, excl2;
};

struct Assignments {
  // Diagonal term: index into common. Solo terms: < K0 means common,
  // otherwise exclusive index + K0.
  std::vector<std::size_t> a0, a1, a2;

  bool operator==(const Assignments&) const = default;
};

/// Divergence of item j under user u's allowed codebooks (shared preferred on
/// ties, then lowest index).
inline std::pair<std::size_t, double> best_allowed(const std::vector<double>& p,
                                                   const std::vector<std::vector<double>>& common,
                                                   const std::vector<std::vector<double>>& excl) {
  std::size_t best = 0;
  double best_div = kInfBits;
  for (std::size_t k = 0; k < common.size(); ++k) {
    double d = detail::kl_bits(p, common[k]);
    if (d < best_div) {
      best_div = d;
      best = k;
    }
  }
  for (std::size_t k = 0; k < excl.size(); ++k) {
    double d = detail::kl_bits(p, excl[k]);
    if (d < best_div) {
      best_div = d;
      best = common.size() + k;
    }
  }
  return {best, best_div};
}

inline Assignments assign(const std::vector<Spv>& spvs, const Centers& c) {
  Assignments a;
  const std::size_t J = spvs.size();
  a.a0.resize(J);
  a.a1.resize(J);
  a.a2.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    const auto& p = spvs[j].probs();
    a.a0[j] = c.common.empty() ? 0 : detail::nearest_center(p, c.common).first;
    a.a1[j] = best_allowed(p, c.common, c.excl1).first;
    a.a2[j] = best_allowed(p, c.common, c.excl2).first;
  }
  return a;
}

inline double objective(const std::vector<Spv>& spvs, const Weights& w, const Centers& c,
                        const Assignments& a) {
  double obj = 0.0;
  for (std::size_t j = 0; j < spvs.size(); ++j) {
    const auto& p = spvs[j].probs();
    if (w.diag[j] > 0.0 && !c.common.empty())
      obj += w.diag[j] * detail::kl_bits(p, c.common[a.a0[j]]);
    if (w.solo1[j] > 0.0)
      obj += w.solo1[j] * detail::kl_bits(p, a.a1[j] < c.common.size()
                                                 ? c.common[a.a1[j]]
                                                 : c.excl1[a.a1[j] - c.common.size()]);
    if (w.solo2[j] > 0.0)
      obj += w.solo2[j] * detail::kl_bits(p, a.a2[j] < c.common.size()
                                                 ? c.common[a.a2[j]]
                                                 : c.excl2[a.a2[j] - c.common.size()]);
  }
  return obj;
}

/// Center step: each codebook becomes the weighted mean of the SPVs it
/// serves (multicast weight for shared books plus each solo stream that
/// picked them). Books left without mass keep their previous value.
inline void update_centers(const std::vector<Spv>& spvs, const Weights& w,
                           const Assignments& a, Centers& c) {
  const std::size_t n = spvs.front().size();
  const std::size_t K0 = c.common.size();
  auto acc_block = [&](std::size_t count) {
    return std::vector<std::vector<double>>(count, std::vector<double>(n, 0.0));
  };
  auto common_acc = acc_block(K0);
  auto e1_acc = acc_block(c.excl1.size());
  auto e2_acc = acc_block(c.excl2.size());
  for (std::size_t j = 0; j < spvs.size(); ++j) {
    const auto& p = spvs[j].probs();
    auto add = [&](std::vector<double>& dst, double weight) {
      for (std::size_t i = 0; i < n; ++i) dst[i] += weight * p[i];
    };
    if (K0 > 0 && w.diag[j] > 0.0) add(common_acc[a.a0[j]], w.diag[j]);
    if (w.solo1[j] > 0.0) {
      if (a.a1[j] < K0)
        add(common_acc[a.a1[j]], w.solo1[j]);
      else
        add(e1_acc[a.a1[j] - K0], w.solo1[j]);
    }
    if (w.solo2[j] > 0.0) {
      if (a.a2[j] < K0)
        add(common_acc[a.a2[j]], w.solo2[j]);
      else
        add(e2_acc[a.a2[j] - K0], w.solo2[j]);
    }
  }
  auto commit = [&](std::vector<std::vector<double>>& acc, std::vector<std::vector<double>>& dst) {
    for (std::size_t k = 0; k < acc.size(); ++k) {
      double sum = 0.0;
      for (double v : acc[k]) sum += v;
      if (!(sum > 0.0)) continue;  // retain the previous codebook
      for (auto& v : acc[k]) v /= sum;
      dst[k] = acc[k];
    }
  };
  commit(common_acc, c.common);
  commit(e1_acc, c.excl1);
  commit(e2_acc, c.excl2);
}

struct IterateOutcome {
  Centers centers;
  Assignments assignment;
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> trace;
};

inline IterateOutcome iterate(const std::vector<Spv>& spvs, const Weights& w, Centers centers,
                              int max_iters) {
  IterateOutcome out;
  auto a = assign(spvs, centers);
  out.trace.push_back(objective(spvs, w, centers, a));
  for (int iter = 1; iter <= max_iters; ++iter) {
    out.iterations = iter;
    update_centers(spvs, w, a, centers);
    auto next = assign(spvs, centers);
    out.trace.push_back(objective(spvs, w, centers, next));
    bool stable = next == a;
    a = std::move(next);
    if (stable) break;
  }
  auto& diag = diagnostics();
  for (std::size_t i = 1; i < out.trace.size(); ++i)
    if (out.trace[i] > out.trace[i - 1] + 1e-12) diag.descent_violations++;
  out.centers = std::move(centers);
  out.assignment = std::move(a);
  out.objective = out.trace.back();
  return out;
}

/// Seeding for one K0 configuration. Shared books are drawn from the SPVs by
/// total involvement (row + column - diagonal mass), then distance-squared
/// weighting; exclusive books by each user's solo mass with distance measured
/// against everything already chosen for that user.
inline Centers seed(const std::vector<Spv>& spvs, const Weights& w, std::size_t K0,
                    std::size_t K1, std::size_t K2, Rng& rng) {
  const std::size_t J = spvs.size();
  Centers c;
  auto pick = [&](const std::vector<double>& base,
                  const std::vector<std::vector<double>>& chosen) -> std::size_t {
    std::vector<double> score(J, 0.0), inf_f(J, 0.0);
    bool any_inf = false;
    double total = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      if (base[j] <= 0.0) continue;
      double g = kInfBits;
      for (const auto& q : chosen) g = std::min(g, detail::kl_bits(spvs[j].probs(), q));
      if (chosen.empty()) g = 1.0;  // first draw: plain base weighting
      if (g == kInfBits) {
        any_inf = true;
        inf_f[j] = base[j];
      } else {
        score[j] = base[j] * g * g;
        total += score[j];
      }
    }
    if (any_inf) return rng.pick_weighted(inf_f);
    if (total > 0.0) return rng.pick_weighted(score);
    return J;  // no seedable item left
  };

  std::vector<double> involvement(J);
  for (std::size_t j = 0; j < J; ++j) involvement[j] = w.diag[j] + w.solo1[j] + w.solo2[j];
  for (std::size_t k = 0; k < K0; ++k) {
    std::size_t j = pick(involvement, c.common);
    if (j == J)
      c.common.push_back(c.common.empty() ? spvs[k % J].probs() : c.common[k % c.common.size()]);
    else
      c.common.push_back(spvs[j].probs());
  }
  auto seed_exclusive = [&](const std::vector<double>& base, std::vector<std::vector<double>>& dst,
                            std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      auto chosen = c.common;
      chosen.insert(chosen.end(), dst.begin(), dst.end());
      std::size_t j = pick(base, chosen);
      if (j == J)
        dst.push_back(chosen[k % chosen.size()]);
      else
        dst.push_back(spvs[j].probs());
    }
  };
  seed_exclusive(w.solo1, c.excl1, K1);
  seed_exclusive(w.solo2, c.excl2, K2);
  return c;
}

inline TwoUserDesign to_design(Centers&& c) {
  TwoUserDesign d;
  for (auto& v : c.common) d.common.emplace_back(std::move(v));
  for (auto& v : c.excl1) d.excl1.emplace_back(std::move(v));
  for (auto& v : c.excl2) d.excl2.emplace_back(std::move(v));
  return d;
}

}  // namespace twouser_detail

/// Total expected bits to satisfy one request pair. With shared codebooks an
/// identical pair costs one multicast transmission; without any (K0 = 0) the
/// two copies are sent separately, each under its user's exclusive set.
inline double two_user_cost(const std::vector<Spv>& spvs, const JointPreference& F,
                            const TwoUserDesign& design, std::size_t length) {
  const std::size_t J = spvs.size();
  if (F.item_count() != J) throw DimensionMismatch("two_user_cost: item count mismatch");
  if (length == 0) throw std::invalid_argument("two_user_cost: length must be positive");
  auto w = twouser_detail::weights_of(F);
  auto book_vecs = [](const std::vector<Codebook>& books) {
    std::vector<std::vector<double>> v;
    v.reserve(books.size());
    for (const auto& b : books) v.push_back(b.q());
    return v;
  };
  auto common = book_vecs(design.common);
  auto excl1 = book_vecs(design.excl1);
  auto excl2 = book_vecs(design.excl2);

  double per_symbol = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const auto& p = spvs[j].probs();
    const double h = detail::entropy_bits(p);
    auto charge = [&](double weight, double div) {
      if (weight <= 0.0) return;
      if (div == kInfBits) throw AllInfinite("two_user_cost: item has no usable codebook");
      per_symbol += weight * (h + div);
    };
    if (design.common.empty()) {
      // No multicast possible: both copies go out separately.
      charge(w.diag[j] + w.solo1[j], twouser_detail::best_allowed(p, common, excl1).second);
      charge(w.diag[j] + w.solo2[j], twouser_detail::best_allowed(p, common, excl2).second);
    } else {
      charge(w.diag[j], detail::nearest_center(p, common).second);
      charge(w.solo1[j], twouser_detail::best_allowed(p, common, excl1).second);
      charge(w.solo2[j], twouser_detail::best_allowed(p, common, excl2).second);
    }
  }
  return static_cast<double>(length) * per_symbol;
}

namespace twouser_detail {

/// K0 = 0 branch: two independent single-user designs on the marginals.
inline TwoUserResult separate_designs(const std::vector<Spv>& spvs, const JointPreference& F,
                                      const TwoUserBudget& budget, const DesignOptions& opts,
                                      bool use_dca, std::size_t length) {
  const std::size_t J = spvs.size();
  std::vector<double> m1(J), m2(J);
  for (std::size_t j = 0; j < J; ++j) {
    m1[j] = F.diagonal(j) + F.solo1(j);
    m2[j] = F.diagonal(j) + F.solo2(j);
  }
  Rng root(opts.seed);
  DesignOptions o1 = opts, o2 = opts;
  o1.seed = root.split(1).seed();
  o2.seed = root.split(2).seed();
  auto pref1 = DiscretePreference::with_weights(spvs, m1);
  auto pref2 = DiscretePreference::with_weights(spvs, m2);
  auto d1 = use_dca ? design_dca(pref1, budget.k1_total, o1)
                    : design_kmeanspp(pref1, budget.k1_total, o1);
  auto d2 = use_dca ? design_dca(pref2, budget.k2_total, o2)
                    : design_kmeanspp(pref2, budget.k2_total, o2);
  TwoUserDesign design;
  design.excl1 = d1.set.codebooks();
  design.excl2 = d2.set.codebooks();
  double bits = two_user_cost(spvs, F, design, length);
  return {std::move(design), bits};
}

}  // namespace twouser_detail

/// Alternating two-user design. For each K0 from 0 to min(K1t, K2t), seeds
/// shared and exclusive codebooks, iterates subset/center updates to a fixed
/// point (best of opts.restarts), and finally returns the cheapest K0
/// (ties toward smaller K0). `length` only scales the reported bits.
inline TwoUserResult design_twouser_kmeanspp(const std::vector<Spv>& spvs,
                                             const JointPreference& F,
                                             const TwoUserBudget& budget,
                                             const DesignOptions& opts = {},
                                             std::size_t length = 20) {
  if (budget.k1_total == 0 || budget.k2_total == 0)
    throw std::invalid_argument("two-user budgets must be positive");
  const std::size_t k0_max = std::min(budget.k1_total, budget.k2_total);
  auto w = twouser_detail::weights_of(F);
  Rng root(opts.seed);

  TwoUserResult best = twouser_detail::separate_designs(spvs, F, budget, opts, false, length);
  for (std::size_t K0 = 1; K0 <= k0_max; ++K0) {
    const std::size_t K1 = budget.k1_total - K0;
    const std::size_t K2 = budget.k2_total - K0;
    Rng cell = root.split(K0);
    bool have = false;
    twouser_detail::IterateOutcome cell_best;
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
      Rng rng = cell.split(static_cast<std::uint64_t>(r));
      auto centers = twouser_detail::seed(spvs, w, K0, K1, K2, rng);
      auto out = twouser_detail::iterate(spvs, w, std::move(centers), opts.max_iters);
      if (!have || out.objective < cell_best.objective) {
        cell_best = std::move(out);
        have = true;
      }
    }
    auto design = twouser_detail::to_design(std::move(cell_best.centers));
    double bits = two_user_cost(spvs, F, design, length);
    if (bits < best.bits - 1e-12) best = {std::move(design), bits};
  }
  return best;
}

/// DC-programming two-user design: per K0, solves the soft relaxation over
/// the stacked multicast/solo assignment rows, hardens, recovers codebooks,
/// and polishes with the alternating updates. Rounding safety is verified on
/// every solve.
inline TwoUserResult design_twouser_dca(const std::vector<Spv>& spvs, const JointPreference& F,
                                        const TwoUserBudget& budget,
                                        const DesignOptions& opts = {},
                                        std::size_t length = 20) {
  if (budget.k1_total == 0 || budget.k2_total == 0)
    throw std::invalid_argument("two-user budgets must be positive");
  const std::size_t J = spvs.size();
  const std::size_t N = spvs.front().size();
  const std::size_t k0_max = std::min(budget.k1_total, budget.k2_total);
  auto w = twouser_detail::weights_of(F);
  Rng root(opts.seed);
  auto& diag = diagnostics();

  std::vector<std::vector<double>> spv_table;
  spv_table.reserve(J);
  for (const auto& s : spvs) spv_table.push_back(s.probs());

  TwoUserResult best = twouser_detail::separate_designs(spvs, F, budget, opts, true, length);
  for (std::size_t K0 = 1; K0 <= k0_max; ++K0) {
    const std::size_t K1 = budget.k1_total - K0;
    const std::size_t K2 = budget.k2_total - K0;
    const std::size_t C = K0 + K1 + K2;

    // Rows: multicast (width K0), user-1 solo (width K0+K1), user-2 solo
    // (width K0+K2); solo choices map shared slots first, then exclusives.
    std::vector<DcRow> rows;
    rows.reserve(3 * J);
    std::vector<std::size_t> slots0(K0), slots1(K0 + K1), slots2(K0 + K2);
    for (std::size_t k = 0; k < K0; ++k) slots0[k] = k;
    for (std::size_t k = 0; k < K0 + K1; ++k) slots1[k] = k;
    for (std::size_t k = 0; k < K0; ++k) slots2[k] = k;
    for (std::size_t k = 0; k < K2; ++k) slots2[K0 + k] = K0 + K1 + k;
    for (std::size_t j = 0; j < J; ++j) rows.push_back(DcRow{j, w.diag[j], slots0});
    for (std::size_t j = 0; j < J; ++j) rows.push_back(DcRow{j, w.solo1[j], slots1});
    for (std::size_t j = 0; j < J; ++j) rows.push_back(DcRow{j, w.solo2[j], slots2});
    DcProblem prob(spv_table, std::move(rows), C, N);

    Rng cell = root.split(0xD0000 + K0);
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
      auto outcome = dca_solve(prob, cell.split(static_cast<std::uint64_t>(r)), opts);
      diag.dca_runs++;

      auto slot_centers = detail::centers_from_soft(prob, outcome.x);
      twouser_detail::Centers soft;
      soft.common.assign(slot_centers.begin(), slot_centers.begin() + K0);
      soft.excl1.assign(slot_centers.begin() + K0, slot_centers.begin() + K0 + K1);
      soft.excl2.assign(slot_centers.begin() + K0 + K1, slot_centers.end());

      // Rounding safety: divergence-minimizing hardening plus center rebuild
      // cannot worsen the deterministic objective.
      {
        auto a = twouser_detail::assign(spvs, soft);
        double pre = twouser_detail::objective(spvs, w, soft, a);
        auto rebuilt = soft;
        twouser_detail::update_centers(spvs, w, a, rebuilt);
        auto a2 = twouser_detail::assign(spvs, rebuilt);
        double post = twouser_detail::objective(spvs, w, rebuilt, a2);
        if (post > pre + 1e-9 * std::max(1.0, std::abs(pre))) diag.rounding_violations++;
      }

      // Alg-style hardening by largest soft weight, then polish.
      twouser_detail::Assignments hard;
      hard.a0.resize(J);
      hard.a1.resize(J);
      hard.a2.resize(J);
      auto argmax_row = [&](std::size_t row_index) {
        const auto& row = prob.rows()[row_index];
        std::size_t best_c = 0;
        double best_v = -1.0;
        for (std::size_t c = 0; c < row.slots.size(); ++c) {
          double v = outcome.x[prob.r_index(row_index, c)];
          if (v > best_v) {
            best_v = v;
            best_c = c;
          }
        }
        return best_c;
      };
      for (std::size_t j = 0; j < J; ++j) {
        hard.a0[j] = argmax_row(j);
        hard.a1[j] = argmax_row(J + j);
        hard.a2[j] = argmax_row(2 * J + j);
      }
      auto centers = soft;
      twouser_detail::update_centers(spvs, w, hard, centers);
      auto polished = twouser_detail::iterate(spvs, w, std::move(centers), opts.max_iters);
      auto design = twouser_detail::to_design(std::move(polished.centers));
      double bits = two_user_cost(spvs, F, design, length);
      if (bits < best.bits - 1e-12) best = {std::move(design), bits};
    }
  }
  return best;
}

}  // namespace prefcode
