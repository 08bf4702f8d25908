#pragma once
// Difference-of-convex formulation of the soft clustering problem and its
// iterative linearization solver.
//
// Soft assignments r place each request row on a probability simplex over
// codebook choices. Auxiliary variables
//     s[c][n] = sum_rows weight * p_n * r[row][choice->c]
//     t[c]    = sum_n s[c][n]
// turn the weighted-divergence objective into
//     sum_c t log t  -  sum_{c,n} s log s  -  (weighted entropy of the rows),
// a difference of two convex functions of the stacked vector
// x = [t | s | r]. The solver repeatedly linearizes the subtracted part at
// the current point and minimizes the remaining convex model over the
// product of row simplices with a Frank-Wolfe scheme (the linear oracle per
// row is a single argmin over choices; feasibility is maintained exactly).
//
// The same machinery serves the single-set design and the two-user design:
// the only difference is how rows, weights, and choice-to-slot maps are laid
// out, so the problem carries that layout explicitly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "prefcode/design_discrete.hpp"
#include "prefcode/diagnostics.hpp"
#include "prefcode/info.hpp"
#include "prefcode/random.hpp"
#include "prefcode/types.hpp"

namespace prefcode {

struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::vector<std::pair<std::size_t, double>>> entries;

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> y(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
      for (const auto& [c, v] : entries[r]) y[r] += v * x[c];
    return y;
  }
};

/// One soft-assignment row: a simplex over `slots.size()` choices, carrying
/// `weight` units of request mass on the SPV `spv_index`. Choice c feeds the
/// cluster slot slots[c].
struct DcRow {
  std::size_t spv_index;
  double weight;
  std::vector<std::size_t> slots;
};

class DcProblem {
 public:
  DcProblem(std::vector<std::vector<double>> spvs, std::vector<DcRow> rows,
            std::size_t slot_count, std::size_t alphabet)
      : spvs_(std::move(spvs)), rows_(std::move(rows)), slots_(slot_count), n_(alphabet) {
    r_offsets_.resize(rows_.size());
    std::size_t off = slots_ + slots_ * n_;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      r_offsets_[i] = off;
      off += rows_[i].slots.size();
    }
    dim_ = off;
    lambda1_.assign(dim_, 0);
    lambda2_.assign(dim_, 0);
    for (std::size_t c = 0; c < slots_; ++c) lambda1_[t_index(c)] = 1;
    for (std::size_t c = 0; c < slots_; ++c)
      for (std::size_t i = 0; i < n_; ++i) lambda2_[s_index(c, i)] = 1;
    build_constraints();
    entropy_offset_bits_ = 0.0;
    for (const auto& row : rows_)
      entropy_offset_bits_ += row.weight * detail::entropy_bits(spvs_[row.spv_index]);
  }

  std::size_t dim() const { return dim_; }
  std::size_t slot_count() const { return slots_; }
  std::size_t alphabet_size() const { return n_; }
  const std::vector<DcRow>& rows() const { return rows_; }
  const std::vector<std::vector<double>>& spvs() const { return spvs_; }
  const std::vector<std::uint8_t>& lambda1() const { return lambda1_; }
  const std::vector<std::uint8_t>& lambda2() const { return lambda2_; }
  const SparseMatrix& constraints() const { return constraints_; }
  const std::vector<double>& rhs() const { return rhs_; }
  double entropy_offset_bits() const { return entropy_offset_bits_; }

  std::size_t t_index(std::size_t c) const { return c; }
  std::size_t s_index(std::size_t c, std::size_t i) const { return slots_ + c * n_ + i; }
  std::size_t r_index(std::size_t row, std::size_t choice) const {
    return r_offsets_[row] + choice;
  }

  /// Stacks [t | s | r] from a flat soft assignment (row-major choices).
  std::vector<double> assemble(const std::vector<double>& r_flat) const {
    std::vector<double> x(dim_, 0.0);
    // r block
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < rows_.size(); ++i)
      for (std::size_t c = 0; c < rows_[i].slots.size(); ++c)
        x[r_index(i, c)] = r_flat[cursor++];
    // s and t blocks
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const auto& row = rows_[i];
      const auto& p = spvs_[row.spv_index];
      for (std::size_t c = 0; c < row.slots.size(); ++c) {
        const double rv = x[r_index(i, c)];
        if (rv == 0.0) continue;
        const std::size_t slot = row.slots[c];
        for (std::size_t n = 0; n < n_; ++n) x[s_index(slot, n)] += row.weight * p[n] * rv;
      }
    }
    for (std::size_t c = 0; c < slots_; ++c) {
      double t = 0.0;
      for (std::size_t n = 0; n < n_; ++n) t += x[s_index(c, n)];
      x[t_index(c)] = t;
    }
    return x;
  }

  std::size_t flat_size() const {
    std::size_t total = 0;
    for (const auto& row : rows_) total += row.slots.size();
    return total;
  }

 private:
  void build_constraints() {
    constraints_.rows = slots_ + slots_ * n_ + rows_.size();
    constraints_.cols = dim_;
    constraints_.entries.assign(constraints_.rows, {});
    rhs_.assign(constraints_.rows, 0.0);
    // t definitions: t_c - sum of feeding weights * r = 0
    for (std::size_t c = 0; c < slots_; ++c)
      constraints_.entries[c].push_back({t_index(c), 1.0});
    // s definitions: s_{c,n} - sum weight*p_n*r = 0
    for (std::size_t c = 0; c < slots_; ++c)
      for (std::size_t i = 0; i < n_; ++i)
        constraints_.entries[slots_ + c * n_ + i].push_back({s_index(c, i), 1.0});
    for (std::size_t rI = 0; rI < rows_.size(); ++rI) {
      const auto& row = rows_[rI];
      const auto& p = spvs_[row.spv_index];
      for (std::size_t c = 0; c < row.slots.size(); ++c) {
        const std::size_t slot = row.slots[c];
        constraints_.entries[slot].push_back({r_index(rI, c), -row.weight});
        for (std::size_t i = 0; i < n_; ++i)
          constraints_.entries[slots_ + slot * n_ + i].push_back(
              {r_index(rI, c), -row.weight * p[i]});
      }
      // row simplex: sum_c r = 1
      const std::size_t srow = slots_ + slots_ * n_ + rI;
      for (std::size_t c = 0; c < row.slots.size(); ++c)
        constraints_.entries[srow].push_back({r_index(rI, c), 1.0});
      rhs_[srow] = 1.0;
    }
  }

  std::vector<std::vector<double>> spvs_;
  std::vector<DcRow> rows_;
  std::size_t slots_;
  std::size_t n_;
  std::size_t dim_ = 0;
  std::vector<std::size_t> r_offsets_;
  std::vector<std::uint8_t> lambda1_, lambda2_;
  SparseMatrix constraints_;
  std::vector<double> rhs_;
  double entropy_offset_bits_ = 0.0;
};

namespace detail {

inline double xlnx(double x) { return x <= 0.0 ? 0.0 : x * std::log(std::max(x, 1e-300)); }

/// DC objective in nats, before the entropy offset is removed.
inline double dc_value_nats(const DcProblem& prob, const std::vector<double>& x) {
  double v = 0.0;
  for (std::size_t c = 0; c < prob.slot_count(); ++c) v += xlnx(x[prob.t_index(c)]);
  for (std::size_t c = 0; c < prob.slot_count(); ++c)
    for (std::size_t i = 0; i < prob.alphabet_size(); ++i) v -= xlnx(x[prob.s_index(c, i)]);
  return v;
}

}  // namespace detail

/// DC problem for the single-set design: row j carries weight f_j over K
/// choices, choice k feeding slot k. Dimension is K + K*N + J*K.
inline DcProblem dc_transform(const DiscretePreference& pref, std::size_t K) {
  if (K == 0) throw std::invalid_argument("dc_transform: K must be positive");
  std::vector<std::vector<double>> spvs;
  spvs.reserve(pref.item_count());
  for (std::size_t j = 0; j < pref.item_count(); ++j) spvs.push_back(pref.spv(j).probs());
  std::vector<DcRow> rows;
  rows.reserve(pref.item_count());
  std::vector<std::size_t> all_slots(K);
  for (std::size_t k = 0; k < K; ++k) all_slots[k] = k;
  for (std::size_t j = 0; j < pref.item_count(); ++j)
    rows.push_back(DcRow{j, pref.prob(j), all_slots});
  return DcProblem(std::move(spvs), std::move(rows), K, pref.alphabet_size());
}

/// Value of the DC objective at a feasible point, reported in bits with the
/// constant entropy offset removed, so a 0-1 assignment evaluates to the
/// deterministic request-weighted divergence of the implied clustering.
inline double dc_objective(const std::vector<double>& x, const DcProblem& prob) {
  if (x.size() != prob.dim()) throw DimensionMismatch("dc_objective: wrong dimension");
  auto residual = prob.constraints().apply(x);
  for (std::size_t i = 0; i < residual.size(); ++i)
    if (std::abs(residual[i] - prob.rhs()[i]) > 1e-7)
      throw std::invalid_argument("dc_objective: point violates constraints");
  return detail::dc_value_nats(prob, x) / std::log(2.0) - prob.entropy_offset_bits();
}

struct SubproblemResult {
  std::vector<double> x;
  bool converged = false;
  int iterations = 0;
};

/// Minimizes  sum_t x log x - y^T x  over the feasible set, starting from
/// x_start's soft-assignment block (so the output never scores worse than the
/// input). Frank-Wolfe with exact line search; stops when the duality gap or
/// the relative objective change drops below `tol`, flagging non-convergence
/// after 10000 iterations.
inline SubproblemResult convex_subproblem(const DcProblem& prob, const std::vector<double>& y,
                                          const std::vector<double>& x_start, double tol) {
  const auto& rows = prob.rows();
  const std::size_t C = prob.slot_count();
  const std::size_t N = prob.alphabet_size();

  // Current soft assignment, flattened row by row.
  std::vector<double> r;
  r.reserve(prob.flat_size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < rows[i].slots.size(); ++c) r.push_back(x_start[prob.r_index(i, c)]);

  // Fold y into one linear coefficient per (row, choice):
  //   B = weight * sum_n y_s[slot][n] * p_n + weight * y_t[slot] + y_r.
  std::vector<std::vector<double>> B(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const auto& p = prob.spvs()[row.spv_index];
    B[i].resize(row.slots.size());
    for (std::size_t c = 0; c < row.slots.size(); ++c) {
      const std::size_t slot = row.slots[c];
      double acc = y[prob.t_index(slot)];
      double dot = 0.0;
      for (std::size_t n = 0; n < N; ++n) dot += y[prob.s_index(slot, n)] * p[n];
      B[i][c] = row.weight * (acc + dot) + y[prob.r_index(i, c)];
    }
  }

  auto slot_mass = [&](const std::vector<double>& rf) {
    std::vector<double> t(C, 0.0);
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t c = 0; c < rows[i].slots.size(); ++c)
        t[rows[i].slots[c]] += rows[i].weight * rf[cursor++];
    return t;
  };
  auto linear_term = [&](const std::vector<double>& rf) {
    double v = 0.0;
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t c = 0; c < rows[i].slots.size(); ++c) v += B[i][c] * rf[cursor++];
    return v;
  };

  std::vector<double> t = slot_mass(r);
  auto value = [&](const std::vector<double>& tv, double lin) {
    double v = 0.0;
    for (double m : tv) v += detail::xlnx(m);
    return v - lin;
  };
  double lin = linear_term(r);
  double obj = value(t, lin);

  SubproblemResult result;
  const int cap = 10000;
  std::vector<double> vtx(r.size());
  for (int iter = 1; iter <= cap; ++iter) {
    result.iterations = iter;
    // Gradient and per-row linear minimizer.
    double gap = 0.0;
    std::size_t cursor = 0;
    std::vector<double> logt(C);
    for (std::size_t c = 0; c < C; ++c) logt[c] = std::log(std::max(t[c], 1e-300));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      double best_g = kInfBits;
      std::size_t best_c = 0;
      double cur = 0.0;
      const std::size_t width = row.slots.size();
      for (std::size_t c = 0; c < width; ++c) {
        double g = row.weight * (1.0 + logt[row.slots[c]]) - B[i][c];
        cur += g * r[cursor + c];
        if (g < best_g) {
          best_g = g;
          best_c = c;
        }
      }
      gap += cur - best_g;
      for (std::size_t c = 0; c < width; ++c) vtx[cursor + c] = (c == best_c) ? 1.0 : 0.0;
      cursor += width;
    }
    const double scale = std::max(1.0, std::abs(obj));
    if (gap <= tol * scale) {
      result.converged = true;
      break;
    }

    // Direction d = vtx - r; exact line search on the 1-D convex restriction.
    std::vector<double> dt(C, 0.0);
    double dlin = 0.0;
    cursor = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t c = 0; c < rows[i].slots.size(); ++c) {
        const double d = vtx[cursor] - r[cursor];
        dt[rows[i].slots[c]] += rows[i].weight * d;
        dlin += B[i][c] * d;
        ++cursor;
      }
    auto deriv = [&](double gamma) {
      double v = -dlin;
      for (std::size_t c = 0; c < C; ++c) {
        if (dt[c] == 0.0) continue;
        v += dt[c] * (1.0 + std::log(std::max(t[c] + gamma * dt[c], 1e-300)));
      }
      return v;
    };
    double gamma = 1.0;
    if (deriv(0.0) >= 0.0) {
      gamma = 0.0;
    } else if (deriv(1.0) > 0.0) {
      double lo = 0.0, hi = 1.0;
      for (int b = 0; b < 60; ++b) {
        double mid = 0.5 * (lo + hi);
        (deriv(mid) > 0.0 ? hi : lo) = mid;
      }
      gamma = 0.5 * (lo + hi);
    }
    if (gamma <= 0.0) {
      result.converged = true;  // stationary along every feasible direction
      break;
    }
    for (std::size_t idx = 0; idx < r.size(); ++idx) r[idx] += gamma * (vtx[idx] - r[idx]);
    if (gamma == 1.0) r = vtx;
    if (iter % 64 == 0) {
      t = slot_mass(r);  // refresh accumulated mass to cancel drift
    } else {
      for (std::size_t c = 0; c < C; ++c) t[c] += gamma * dt[c];
    }
    double new_lin = linear_term(r);
    double new_obj = value(t, new_lin);
    const double rel = std::abs(obj - new_obj) / std::max(1.0, std::abs(obj));
    obj = new_obj;
    lin = new_lin;
    if (rel < tol) {
      result.converged = true;
      break;
    }
  }
  result.x = prob.assemble(r);
  return result;
}

struct DcaOutcome {
  std::vector<double> x;           // final stacked point
  std::vector<double> trace_bits;  // DC objective per outer iteration
  int iterations = 0;
};

/// Iterative linearization: repeatedly replace the subtracted convex term by
/// its tangent at the current point and solve the convex remainder, until
/// the objective change falls below opts.epsilon. Warm starting makes every
/// outer step a descent step.
inline DcaOutcome dca_solve(const DcProblem& prob, Rng rng, const DesignOptions& opts) {
  const double ln2 = std::log(2.0);
  // Feasible start: independent flat-Dirichlet rows.
  std::vector<double> r_flat;
  r_flat.reserve(prob.flat_size());
  for (const auto& row : prob.rows()) {
    auto d = row.slots.size() == 1 ? std::vector<double>{1.0}
                                   : rng.uniform_simplex(row.slots.size());
    r_flat.insert(r_flat.end(), d.begin(), d.end());
  }
  std::vector<double> x = prob.assemble(r_flat);

  DcaOutcome out;
  double R = detail::dc_value_nats(prob, x);
  out.trace_bits.push_back(R / ln2 - prob.entropy_offset_bits());
  std::vector<double> y(prob.dim(), 0.0);
  auto& diag = diagnostics();
  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    out.iterations = iter;
    for (std::size_t m = 0; m < prob.dim(); ++m)
      y[m] = prob.lambda2()[m] ? 1.0 + std::log(std::max(x[m], 1e-300)) : 0.0;
    auto sub = convex_subproblem(prob, y, x, opts.subproblem_tol);
    double R_new = detail::dc_value_nats(prob, sub.x);
    if (R_new > R + std::max(1e-9, 100.0 * opts.subproblem_tol)) diag.descent_violations++;
    x = std::move(sub.x);
    out.trace_bits.push_back(R_new / ln2 - prob.entropy_offset_bits());
    const bool done = std::abs(R - R_new) <= opts.epsilon;
    R = R_new;
    if (done) break;
  }
  out.x = std::move(x);
  return out;
}

namespace detail {

/// Codebooks implied by a soft assignment: per slot, the normalized weighted
/// SPV mass. Slots with no mass fall back to the uniform codebook.
inline std::vector<std::vector<double>> centers_from_soft(const DcProblem& prob,
                                                          const std::vector<double>& x) {
  const std::size_t C = prob.slot_count();
  const std::size_t N = prob.alphabet_size();
  std::vector<std::vector<double>> centers(C, std::vector<double>(N, 1.0 / N));
  for (std::size_t c = 0; c < C; ++c) {
    double total = 0.0;
    for (std::size_t n = 0; n < N; ++n) total += x[prob.s_index(c, n)];
    if (!(total > 0.0)) continue;
    for (std::size_t n = 0; n < N; ++n) centers[c][n] = x[prob.s_index(c, n)] / total;
  }
  return centers;
}

}  // namespace detail

/// DC-programming design: solve the soft relaxation, harden each row to its
/// largest weight, rebuild codebooks from the hardened assignment, then
/// polish with the alternating updates to an exact fixed point. Each run
/// also verifies the rounding-safety property (hardening a soft solution to
/// divergence-minimizing rows and re-deriving centers cannot increase the
/// deterministic objective).
inline DesignResult design_dca(const DiscretePreference& pref, std::size_t K,
                               const DesignOptions& opts = {}) {
  DcProblem prob = dc_transform(pref, K);
  Rng root(opts.seed);
  auto& diag = diagnostics();
  bool have_best = false;
  DesignResult best{CodebookSet({Codebook(std::vector<double>(pref.alphabet_size(),
                                                              1.0 / pref.alphabet_size()))}),
                    PartitionAssignment{},
                    kInfBits,
                    0,
                    {}};
  for (int rr = 0; rr < std::max(1, opts.restarts); ++rr) {
    auto outcome = dca_solve(prob, root.split(0xDCA0000ull + static_cast<std::uint64_t>(rr)), opts);
    diag.dca_runs++;

    auto q_soft = detail::centers_from_soft(prob, outcome.x);
    auto det_objective = [&](const std::vector<std::vector<double>>& centers) {
      double v = 0.0;
      for (std::size_t j = 0; j < pref.item_count(); ++j) {
        if (pref.prob(j) <= 0.0) continue;
        v += pref.prob(j) * detail::nearest_center(pref.spv(j).probs(), centers).second;
      }
      return v;
    };
    // Rounding-safety check: divergence-minimizing hardening + center rebuild.
    {
      double pre = det_objective(q_soft);
      auto owner = detail::assign_items(pref, q_soft);
      auto rebuilt = q_soft;
      detail::update_centers(pref, owner, rebuilt);
      double post = det_objective(rebuilt);
      if (post > pre + 1e-9 * std::max(1.0, std::abs(pre))) diag.rounding_violations++;
    }

    // Result path: harden rows by largest soft weight, rebuild, polish.
    std::vector<std::size_t> owner(pref.item_count(), 0);
    for (std::size_t j = 0; j < pref.item_count(); ++j) {
      double best_w = -1.0;
      for (std::size_t k = 0; k < K; ++k) {
        double w = outcome.x[prob.r_index(j, k)];
        if (w > best_w) {
          best_w = w;
          owner[j] = k;
        }
      }
    }
    auto centers = q_soft;
    detail::update_centers(pref, owner, centers);
    auto polished = detail::lloyd(pref, std::move(centers), opts.max_iters);
    if (!have_best || polished.objective < best.objective) {
      int total_iters = outcome.iterations + polished.iterations;
      best = detail::lloyd_to_result(pref, std::move(polished));
      best.iterations = total_iters;
      best.trace = std::move(outcome.trace_bits);
      have_best = true;
    }
  }
  return best;
}

}  // namespace prefcode
