#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "prefcode/design_single.hpp"
#include "prefcode/design_twouser.hpp"
#include "prefcode/info.hpp"

using namespace prefcode;

namespace {

std::vector<Spv> far_pair() {
  return {Spv({0.8, 0.2, 0.0, 0.0}), Spv({0.0, 0.0, 0.2, 0.8})};
}

std::vector<Spv> random_spvs(std::size_t n, std::size_t j, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Spv> out;
  out.reserve(j);
  for (std::size_t i = 0; i < j; ++i) out.emplace_back(rng.uniform_simplex(n));
  return out;
}

}  // namespace

TEST_CASE("joint_pref_alpha instantiates the similarity family") {
  auto half = joint_pref_alpha(2, 0.5);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(half(i, j) == doctest::Approx(0.25));

  auto ident = joint_pref_alpha(4, 1.0);
  double trace = 0.0;
  for (int i = 0; i < 4; ++i) {
    trace += ident(i, i);
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(ident(i, j) == doctest::Approx(0.0));
  }
  CHECK(trace == doctest::Approx(1.0));

  auto indep = joint_pref_alpha(3, 0.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(indep(i, i) == doctest::Approx(0.0));
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(indep(i, j) == doctest::Approx(1.0 / 6.0));
  }
}

TEST_CASE("two_user_cost closed cases") {
  auto spvs = far_pair();
  const std::size_t L = 20;

  // Pure common interest: one multicast transmission per request pair.
  auto F1 = joint_pref_alpha(2, 1.0);
  TwoUserDesign d1;
  d1.common.push_back(optimal_single(DiscretePreference(spvs, {0.5, 0.5})));
  double expect = 0.0;
  for (int j = 0; j < 2; ++j)
    expect += 0.5 * (entropy(spvs[j]) + kl_divergence(spvs[j], d1.common[0]));
  CHECK(two_user_cost(spvs, F1, d1, L) == doctest::Approx(L * expect).epsilon(1e-12));

  // Fully one-sided interests with no shared codebook: two solo streams,
  // each served at zero divergence.
  JointPreference F0(std::vector<std::vector<double>>{{0.0, 1.0}, {0.0, 0.0}});
  TwoUserDesign d0;
  d0.excl1.push_back(Codebook(spvs[0].probs()));
  d0.excl2.push_back(Codebook(spvs[1].probs()));
  CHECK(two_user_cost(spvs, F0, d0, L) ==
        doctest::Approx(L * (entropy(spvs[0]) + entropy(spvs[1]))).epsilon(1e-12));

  // One item requested by both users always: a single shared codebook at the
  // SPV costs exactly the entropy.
  std::vector<Spv> single{Spv({0.7, 0.3}), Spv({0.7, 0.3})};
  std::vector<std::vector<double>> fm{{1.0, 0.0}, {0.0, 0.0}};
  JointPreference F(fm);
  TwoUserDesign ds;
  ds.common.push_back(Codebook(single[0].probs()));
  CHECK(two_user_cost(single, F, ds, L) ==
        doctest::Approx(L * entropy(single[0])).epsilon(1e-12));
}

TEST_CASE("kmeanspp two-user: full similarity picks one shared codebook") {
  auto spvs = far_pair();
  auto F = joint_pref_alpha(2, 1.0);
  DesignOptions opts;
  opts.restarts = 5;
  auto res = design_twouser_kmeanspp(spvs, F, {1, 1}, opts, 20);
  CHECK(res.design.k0() == 1);
  // With both items multicast, the shared book is the weighted mean.
  auto mean = optimal_single(DiscretePreference(spvs, {0.5, 0.5}));
  for (int i = 0; i < 4; ++i)
    CHECK(res.design.common[0][i] == doctest::Approx(mean[i]).epsilon(1e-9));
  CHECK(res.bits == doctest::Approx(two_user_cost(spvs, F, res.design, 20)).epsilon(1e-12));
}

TEST_CASE("kmeanspp two-user: disjoint interests match independent designs") {
  auto spvs = random_spvs(3, 12, 555);
  auto F = joint_pref_alpha(12, 0.0);
  DesignOptions opts;
  opts.restarts = 5;
  auto res = design_twouser_kmeanspp(spvs, F, {3, 3}, opts, 20);

  // Oracle: two single-user designs on the marginals (same streams as the
  // designer's shared-free branch).
  std::vector<double> m1(12), m2(12);
  for (int j = 0; j < 12; ++j) {
    m1[j] = F.diagonal(j) + F.solo1(j);
    m2[j] = F.diagonal(j) + F.solo2(j);
  }
  Rng root(opts.seed);
  DesignOptions o1 = opts, o2 = opts;
  o1.seed = root.split(1).seed();
  o2.seed = root.split(2).seed();
  auto d1 = design_kmeanspp(DiscretePreference::with_weights(spvs, m1), 3, o1);
  auto d2 = design_kmeanspp(DiscretePreference::with_weights(spvs, m2), 3, o2);
  double cost = 0.0;
  for (int j = 0; j < 12; ++j) {
    cost += m1[j] * (entropy(spvs[j]) + best_codebook(spvs[j], d1.set).divergence);
    cost += m2[j] * (entropy(spvs[j]) + best_codebook(spvs[j], d2.set).divergence);
  }
  CHECK(res.bits <= 20.0 * cost + 1e-9);
  CHECK(res.design.k0() == 0);
}

TEST_CASE("kmeanspp two-user: single shared item keeps a zero-divergence book") {
  std::vector<Spv> spvs{Spv({0.6, 0.4}), Spv({0.6, 0.4})};
  std::vector<std::vector<double>> fm{{0.5, 0.0}, {0.0, 0.5}};
  JointPreference F(fm);
  DesignOptions opts;
  opts.restarts = 3;
  auto res = design_twouser_kmeanspp(spvs, F, {1, 1}, opts, 20);
  CHECK(res.design.k0() == 1);
  CHECK(res.design.common[0][0] == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(kl_divergence(spvs[0], res.design.common[0]) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("dca two-user: full similarity matches the single-user closed form") {
  auto spvs = far_pair();
  auto F = joint_pref_alpha(2, 1.0);
  DesignOptions opts;
  opts.restarts = 3;
  auto res = design_twouser_dca(spvs, F, {1, 1}, opts, 20);
  CHECK(res.design.k0() == 1);
  auto mean = optimal_single(DiscretePreference(spvs, {0.5, 0.5}));
  for (int i = 0; i < 4; ++i)
    CHECK(res.design.common[0][i] == doctest::Approx(mean[i]).epsilon(1e-9));

  auto single = design_dca(DiscretePreference(spvs, {0.5, 0.5}), 1, opts);
  double single_bits = 0.0;
  for (int j = 0; j < 2; ++j)
    single_bits +=
        0.5 * 20.0 * (entropy(spvs[j]) + best_codebook(spvs[j], single.set).divergence);
  CHECK(res.bits == doctest::Approx(single_bits).epsilon(1e-9));
}

TEST_CASE("dca two-user: tiny instance matches grid enumeration") {
  std::vector<Spv> spvs{Spv({0.85, 0.15}), Spv({0.3, 0.7})};
  auto F = joint_pref_alpha(2, 0.6);
  DesignOptions opts;
  opts.restarts = 5;
  auto res = design_twouser_dca(spvs, F, {1, 1}, opts, 20);

  auto grid = simplex_grid(2, 0.005);
  double best = kInfBits;
  {  // One shared codebook serves every stream.
    for (const auto& q : grid) {
      double c = 0.0;
      for (int j = 0; j < 2; ++j) {
        double d = oracles::kl2(spvs[j].probs(), q);
        c += (F.diagonal(j) + F.solo1(j) + F.solo2(j)) * (entropy(spvs[j]) + d);
      }
      best = std::min(best, 20.0 * c);
    }
  }
  {  // No shared codebook: independent books, diagonal charged per user.
    double best1 = kInfBits, best2 = kInfBits;
    for (const auto& q : grid) {
      double c1 = 0.0, c2 = 0.0;
      for (int j = 0; j < 2; ++j) {
        c1 += (F.diagonal(j) + F.solo1(j)) *
              (entropy(spvs[j]) + oracles::kl2(spvs[j].probs(), q));
        c2 += (F.diagonal(j) + F.solo2(j)) *
              (entropy(spvs[j]) + oracles::kl2(spvs[j].probs(), q));
      }
      best1 = std::min(best1, c1);
      best2 = std::min(best2, c2);
    }
    best = std::min(best, 20.0 * (best1 + best2));
  }
  CHECK(res.bits >= best - 1e-6);
  CHECK(res.bits <= best + 0.05);  // grid resolution slack
  CHECK(res.bits == doctest::Approx(two_user_cost(spvs, F, res.design, 20)).epsilon(1e-9));
}

TEST_CASE("two-user designs respect budgets and descend") {
  auto& diag = diagnostics();
  diag.reset();
  auto spvs = random_spvs(3, 20, 777);
  DesignOptions opts;
  opts.restarts = 3;
  for (double alpha : {0.0, 0.5, 1.0}) {
    auto F = joint_pref_alpha(20, alpha);
    auto km = design_twouser_kmeanspp(spvs, F, {3, 2}, opts, 20);
    CHECK(km.design.k0() + km.design.excl1.size() == 3);
    CHECK(km.design.k0() + km.design.excl2.size() == 2);
    auto dc = design_twouser_dca(spvs, F, {3, 2}, opts, 20);
    CHECK(dc.design.k0() + dc.design.excl1.size() == 3);
    CHECK(dc.design.k0() + dc.design.excl2.size() == 2);
  }
  CHECK(diag.descent_violations.load() == 0);
  CHECK(diag.rounding_violations.load() == 0);

  // Shared interest strictly beats disjoint interest in total bits.
  auto hi = design_twouser_kmeanspp(spvs, joint_pref_alpha(20, 1.0), {3, 3}, opts, 20);
  auto lo = design_twouser_kmeanspp(spvs, joint_pref_alpha(20, 0.0), {3, 3}, opts, 20);
  CHECK(hi.bits < lo.bits);
}

TEST_CASE("final codebooks are the weighted means of the streams they serve") {
  auto spvs = random_spvs(3, 8, 901);
  auto F = joint_pref_alpha(8, 0.4);
  DesignOptions opts;
  opts.restarts = 2;
  auto res = design_twouser_kmeanspp(spvs, F, {2, 2}, opts, 20);
  REQUIRE(res.design.k0() >= 1);

  const std::size_t K0 = res.design.k0();
  std::vector<std::vector<double>> acc_common(K0, std::vector<double>(3, 0.0));
  std::vector<std::vector<double>> acc_e1(res.design.excl1.size(), std::vector<double>(3, 0.0));
  std::vector<std::vector<double>> acc_e2(res.design.excl2.size(), std::vector<double>(3, 0.0));
  auto common_set = CodebookSet(res.design.common);
  for (int j = 0; j < 8; ++j) {
    auto b0 = best_codebook(spvs[j], common_set);
    for (int i = 0; i < 3; ++i) acc_common[b0.index][i] += F.diagonal(j) * spvs[j][i];
    auto pick = [&](const std::vector<Codebook>& excl) {
      std::size_t arg = 0;
      double bestd = kInfBits;
      for (std::size_t k = 0; k < K0; ++k) {
        double dv = kl_divergence(spvs[j], res.design.common[k]);
        if (dv < bestd) {
          bestd = dv;
          arg = k;
        }
      }
      for (std::size_t k = 0; k < excl.size(); ++k) {
        double dv = kl_divergence(spvs[j], excl[k]);
        if (dv < bestd) {
          bestd = dv;
          arg = K0 + k;
        }
      }
      return arg;
    };
    auto a1 = pick(res.design.excl1);
    auto a2 = pick(res.design.excl2);
    for (int i = 0; i < 3; ++i) {
      if (a1 < K0)
        acc_common[a1][i] += F.solo1(j) * spvs[j][i];
      else
        acc_e1[a1 - K0][i] += F.solo1(j) * spvs[j][i];
      if (a2 < K0)
        acc_common[a2][i] += F.solo2(j) * spvs[j][i];
      else
        acc_e2[a2 - K0][i] += F.solo2(j) * spvs[j][i];
    }
  }
  auto check_block = [&](std::vector<std::vector<double>>& acc,
                         const std::vector<Codebook>& books) {
    for (std::size_t k = 0; k < books.size(); ++k) {
      double sum = 0.0;
      for (double v : acc[k]) sum += v;
      if (!(sum > 0.0)) continue;  // retained book: unconstrained
      for (int i = 0; i < 3; ++i)
        CHECK(books[k][i] == doctest::Approx(acc[k][i] / sum).epsilon(1e-9));
    }
  };
  check_block(acc_common, res.design.common);
  check_block(acc_e1, res.design.excl1);
  check_block(acc_e2, res.design.excl2);
}
