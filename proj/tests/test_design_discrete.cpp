#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "prefcode/design_discrete.hpp"
#include "prefcode/design_single.hpp"
#include "prefcode/info.hpp"

using namespace prefcode;

namespace {

DiscretePreference demo_pref() {
  std::vector<Spv> demo{Spv({0.75, 0.25, 0.0, 0.0}), Spv({0.25, 0.75, 0.0, 0.0}),
                        Spv({0.0, 0.0, 0.75, 0.25}), Spv({0.0, 0.0, 0.25, 0.75})};
  return DiscretePreference(demo, {0.25, 0.25, 0.25, 0.25});
}

}  // namespace

TEST_CASE("center_update: singleton, symmetric pair, weighted pair") {
  DiscretePreference pref(
      {Spv({0.75, 0.25}), Spv({0.25, 0.75}), Spv({0.8, 0.2}), Spv({0.2, 0.8})},
      {0.25, 0.25, 0.25, 0.25});
  auto solo = center_update(pref, {0});
  CHECK(solo[0] == doctest::Approx(0.75).epsilon(1e-12));

  auto sym = center_update(pref, {0, 1});
  CHECK(sym[0] == doctest::Approx(0.5).epsilon(1e-12));

  DiscretePreference weighted =
      DiscretePreference::with_weights({Spv({0.8, 0.2}), Spv({0.2, 0.8})}, {0.2, 0.1});
  auto q = center_update(weighted, {0, 1});
  CHECK(q[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(q[1] == doctest::Approx(0.4).epsilon(1e-12));

  DiscretePreference zero = DiscretePreference::with_weights(
      {Spv({0.5, 0.5}), Spv({0.3, 0.7})}, {0.0, 1.0});
  CHECK_THROWS_AS(center_update(zero, {0}), EmptyCluster);
}

TEST_CASE("kmeanspp_seed basics") {
  Rng rng(5);
  DiscretePreference one({Spv({0.4, 0.6})}, {1.0});
  auto s1 = kmeanspp_seed(one, 1, rng);
  CHECK(s1[0][0] == doctest::Approx(0.4));

  // K = J over distinct SPVs: every SPV is chosen exactly once.
  Rng rng2(6);
  auto pref = oracles::random_preference(3, 5, rng2);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng r(seed);
    auto seeds = kmeanspp_seed(pref, 5, r);
    std::set<std::vector<double>> chosen;
    for (const auto& cb : seeds.codebooks()) chosen.insert(cb.q());
    CHECK(chosen.size() == 5);
  }

  // Degenerate support: duplicates fill the remainder.
  DiscretePreference dup({Spv({0.5, 0.5}), Spv({0.5, 0.5})}, {0.5, 0.5});
  Rng r3(7);
  auto padded = kmeanspp_seed(dup, 3, r3);
  CHECK(padded.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(padded[k][0] == doctest::Approx(0.5));
}

TEST_CASE("kmeanspp_seed spreads across far clusters") {
  // Two support-disjoint groups: the second seed must land in the other
  // group (divergence to the first seed is infinite there).
  std::vector<Spv> pts{Spv({0.7, 0.3, 0.0, 0.0}), Spv({0.6, 0.4, 0.0, 0.0}),
                       Spv({0.0, 0.0, 0.7, 0.3}), Spv({0.0, 0.0, 0.6, 0.4})};
  DiscretePreference pref(pts, {0.25, 0.25, 0.25, 0.25});
  int opposite = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    auto seeds = kmeanspp_seed(pref, 2, rng);
    bool a_left = seeds[0][0] > 0.0;
    bool b_left = seeds[1][0] > 0.0;
    if (a_left != b_left) ++opposite;
  }
  CHECK(opposite > 900);
}

TEST_CASE("design_kmeanspp recovers the demo clustering") {
  auto pref = demo_pref();
  auto res = design_kmeanspp(pref, 2, {});
  double brute = oracles::brute_force_clustering(pref, 2);
  CHECK(brute == doctest::Approx(0.18872187554086717).epsilon(1e-9));
  CHECK(res.objective == doctest::Approx(brute).epsilon(1e-9));
  CHECK(res.assignment.owner[0] == res.assignment.owner[1]);
  CHECK(res.assignment.owner[2] == res.assignment.owner[3]);
  CHECK(res.assignment.owner[0] != res.assignment.owner[2]);
  std::vector<double> sorted_first{res.set[res.assignment.owner[0]].q()};
  CHECK(sorted_first[0] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("design_kmeanspp trivial cases") {
  auto pref = demo_pref();
  auto res = design_kmeanspp(pref, 4, {});
  CHECK(res.objective == doctest::Approx(0.0).epsilon(1e-12));

  auto res5 = design_kmeanspp(pref, 5, {});
  CHECK(res5.objective == doctest::Approx(0.0).epsilon(1e-12));

  Rng rng(12);
  auto rnd = oracles::random_preference(4, 9, rng);
  auto res1 = design_kmeanspp(rnd, 1, {});
  auto closed = optimal_single(rnd);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(res1.set[0][i] == doctest::Approx(closed[i]).epsilon(1e-12));
}

TEST_CASE("design_kmeanspp traces descend and end at a fixed point") {
  auto& diag = diagnostics();
  diag.reset();
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    auto pref = oracles::random_preference(2 + trial % 4, 6 + trial % 10, rng);
    auto res = design_kmeanspp(pref, 1 + trial % 4, {});
    for (std::size_t i = 1; i < res.trace.size(); ++i)
      CHECK(res.trace[i] <= res.trace[i - 1] + 1e-12);
    // The reported objective is reproducible from the returned set.
    auto again = expected_cost(pref, res.set, 20);
    double div = 0.0;
    for (std::size_t j = 0; j < pref.item_count(); ++j)
      div += pref.prob(j) * kl_divergence(pref.spv(j), res.set[again.assignment.owner[j]]);
    CHECK(div == doctest::Approx(res.objective).epsilon(1e-9));
  }
  CHECK(diag.descent_violations.load() == 0);
  CHECK(diag.fixed_point_violations.load() == 0);
  CHECK(diag.kmeans_runs.load() > 0);
}

TEST_CASE("property: rescaling the request weights changes nothing") {
  Rng rng(31);
  auto pref = oracles::random_preference(3, 8, rng);
  auto base = design_kmeanspp(pref, 3, {});
  for (double c : {0.5, 3.0}) {
    std::vector<double> w(pref.probs());
    for (auto& v : w) v *= c;
    auto scaled_pref = DiscretePreference::with_weights(pref.spvs(), w);
    auto scaled = design_kmeanspp(scaled_pref, 3, {});
    CHECK(scaled.assignment.owner == base.assignment.owner);
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t i = 0; i < 3; ++i)
        CHECK(scaled.set[k][i] == doctest::Approx(base.set[k][i]).epsilon(1e-12));
    CHECK(scaled.objective == doctest::Approx(c * base.objective).epsilon(1e-9));
  }
}

TEST_CASE("property: symbol permutation equivariance of the design") {
  Rng rng(32);
  auto pref = oracles::random_preference(4, 7, rng);
  auto base = design_kmeanspp(pref, 2, {});

  std::vector<std::size_t> perm{2, 0, 3, 1};
  auto apply = [&](const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[perm[i]] = v[i];
    return out;
  };
  std::vector<Spv> pspvs;
  for (const auto& s : pref.spvs()) pspvs.emplace_back(apply(s.probs()));
  DiscretePreference ppref(pspvs, pref.probs());
  auto permuted = design_kmeanspp(ppref, 2, {});
  CHECK(permuted.assignment.owner == base.assignment.owner);
  CHECK(permuted.objective == doctest::Approx(base.objective).epsilon(1e-12));
  for (std::size_t k = 0; k < 2; ++k) {
    auto expect = apply(base.set[k].q());
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(permuted.set[k][i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }
}
