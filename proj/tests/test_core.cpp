#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "prefcode/info.hpp"
#include "prefcode/random.hpp"
#include "prefcode/types.hpp"

using namespace prefcode;

TEST_CASE("type validation") {
  CHECK_THROWS_AS(Spv(std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Spv(std::vector<double>{0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(Spv(std::vector<double>{-0.1, 1.1}), std::invalid_argument);
  CHECK_NOTHROW(Spv(std::vector<double>{0.5, 0.5 + 5e-10}));  // renormalized on ingest

  CHECK_THROWS_AS(Codebook(std::vector<double>{0.75, 0.5}), KraftViolation);
  CHECK_THROWS_AS(Codebook(std::vector<double>{0.0, 0.0}), std::invalid_argument);
  CHECK_NOTHROW(Codebook(std::vector<double>{0.5, 0.25, 0.125}));  // slack is fine

  CHECK_THROWS_AS(DiscretePreference({Spv({0.5, 0.5})}, {0.7}), std::invalid_argument);
  CHECK_NOTHROW(DiscretePreference::with_weights({Spv({0.5, 0.5})}, {0.7}));
}

TEST_CASE("entropy matches the frozen examples") {
  CHECK(entropy(Spv({0.25, 0.25, 0.25, 0.25})) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(entropy(Spv({1.0, 0.0})) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(entropy(Spv({0.75, 0.25})) == doctest::Approx(0.8112781244591328).epsilon(1e-12));
}

TEST_CASE("kl divergence matches the frozen examples") {
  CHECK(kl_divergence(Spv({0.3, 0.7}), Codebook({0.3, 0.7})) == doctest::Approx(0.0));
  CHECK(kl_divergence(Spv({1.0, 0.0}), Codebook({0.5, 0.5})) == doctest::Approx(1.0));
  CHECK(kl_divergence(Spv({0.75, 0.25}), Codebook({0.5, 0.5})) ==
        doctest::Approx(0.18872187554086717).epsilon(1e-12));
  CHECK_THROWS_AS(kl_divergence(Spv({0.5, 0.5}), Codebook({0.5, 0.25, 0.25})),
                  DimensionMismatch);
}

TEST_CASE("code cost matches the frozen examples") {
  CHECK(code_cost(Spv({0.75, 0.25, 0.0, 0.0}), Codebook({0.5, 0.5, 0.0, 0.0}), 20) ==
        doctest::Approx(20.0).epsilon(1e-12));
  CHECK(code_cost(Spv({0.75, 0.25}), Codebook({0.75, 0.25}), 20) ==
        doctest::Approx(16.225562489182655).epsilon(1e-12));
  CHECK(code_cost(Spv({1.0, 0.0}), Codebook({0.0, 1.0}), 7) == kInfBits);
}

TEST_CASE("best codebook picks the lowest-index minimizer") {
  CodebookSet set({Codebook({0.5, 0.5, 0.0, 0.0}), Codebook({0.0, 0.0, 0.5, 0.5})});
  auto best = best_codebook(Spv({0.75, 0.25, 0.0, 0.0}), set);
  CHECK(best.index == 0);
  CHECK(best.divergence == doctest::Approx(0.18872187554086717));

  CodebookSet with_exact({Codebook({0.5, 0.5}), Codebook({0.3, 0.7})});
  auto hit = best_codebook(Spv({0.3, 0.7}), with_exact);
  CHECK(hit.index == 1);
  CHECK(hit.divergence == doctest::Approx(0.0));

  CodebookSet tied({Codebook({0.5, 0.5}), Codebook({0.25, 0.5}), Codebook({0.5, 0.5})});
  CHECK(best_codebook(Spv({0.5, 0.5}), tied).index == 0);

  CodebookSet hopeless({Codebook({0.0, 1.0})});
  CHECK_THROWS_AS(best_codebook(Spv({1.0, 0.0}), hopeless), AllInfinite);
}

TEST_CASE("expected cost: zero-divergence, demo, and exact-cover cases") {
  Spv p({0.6, 0.3, 0.1});
  DiscretePreference single({p}, {1.0});
  CodebookSet own({Codebook(p.probs())});
  CHECK(expected_cost(single, own, 20).bits == doctest::Approx(20.0 * entropy(p)));

  // Four-item demo: two support-disjoint pairs, uniform requests, two
  // codebooks at the pair means -> exactly 1 bit/symbol at L=20.
  std::vector<Spv> demo{Spv({0.75, 0.25, 0.0, 0.0}), Spv({0.25, 0.75, 0.0, 0.0}),
                        Spv({0.0, 0.0, 0.75, 0.25}), Spv({0.0, 0.0, 0.25, 0.75})};
  DiscretePreference pref(demo, {0.25, 0.25, 0.25, 0.25});
  CodebookSet centers({Codebook({0.5, 0.5, 0.0, 0.0}), Codebook({0.0, 0.0, 0.5, 0.5})});
  auto cost = expected_cost(pref, centers, 20);
  CHECK(cost.bits == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(cost.assignment.owner == std::vector<std::size_t>{0, 0, 1, 1});

  // K = J with every codebook equal to one SPV: the divergence term vanishes.
  CodebookSet each({Codebook(demo[0].probs()), Codebook(demo[1].probs()),
                    Codebook(demo[2].probs()), Codebook(demo[3].probs())});
  double eh = 0.0;
  for (const auto& s : demo) eh += 0.25 * entropy(s);
  CHECK(expected_cost(pref, each, 20).bits == doctest::Approx(20.0 * eh).epsilon(1e-12));
}

TEST_CASE("kraft check") {
  CHECK(kraft_check(Codebook({0.5, 0.5})));
  CHECK(kraft_check(Codebook({0.5, 0.25, 0.125})));
  // A sum above one cannot be constructed; check the boundary instead.
  CHECK(kraft_check(Codebook({0.5, 0.5 + 5e-10})));
}

TEST_CASE("property: D(p||p) = 0 and cost identity on random inputs") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + trial % 5;
    auto v = rng.uniform_simplex(n);
    if (trial % 3 == 0) {
      v[trial % n] = 0.0;  // exercise zero entries
      double sum = 0.0;
      for (double x : v) sum += x;
      for (auto& x : v) x /= sum;
    }
    Spv p(v);
    CHECK(kl_divergence(p, Codebook(p.probs())) == 0.0);

    auto qv = rng.uniform_simplex(n);
    Codebook q(qv);
    double d = kl_divergence(p, q);
    CHECK(d >= 0.0);
    double cost = code_cost(p, q, 20);
    CHECK(cost == doctest::Approx(20.0 * (entropy(p) + d)).epsilon(1e-12));
  }
}

TEST_CASE("property: best_codebook is symbol-permutation equivariant") {
  Rng rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 3 + trial % 3;
    Spv p(rng.uniform_simplex(n));
    std::vector<Codebook> books;
    for (int k = 0; k < 4; ++k) books.emplace_back(rng.uniform_simplex(n));
    CodebookSet set(books);
    auto base = best_codebook(p, set);

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = (i + 1) % n;
    auto apply = [&](const std::vector<double>& v) {
      std::vector<double> out(n);
      for (std::size_t i = 0; i < n; ++i) out[perm[i]] = v[i];
      return out;
    };
    std::vector<Codebook> pbooks;
    for (const auto& b : books) pbooks.emplace_back(apply(b.q()));
    auto permuted = best_codebook(Spv(apply(p.probs())), CodebookSet(pbooks));
    CHECK(permuted.index == base.index);
    CHECK(permuted.divergence == doctest::Approx(base.divergence).epsilon(1e-12));
  }
}

TEST_CASE("property: expected cost decomposes over the partition") {
  Rng rng(321);
  auto pref = oracles::random_preference(4, 12, rng);
  std::vector<Codebook> books;
  for (int k = 0; k < 3; ++k) books.emplace_back(rng.uniform_simplex(4));
  CodebookSet set(books);
  auto total = expected_cost(pref, set, 20);
  double per_cluster_sum = 0.0;
  for (std::size_t k = 0; k < set.size(); ++k) {
    for (std::size_t j = 0; j < pref.item_count(); ++j) {
      if (total.assignment.owner[j] != k) continue;
      per_cluster_sum +=
          20.0 * pref.prob(j) * (entropy(pref.spv(j)) + kl_divergence(pref.spv(j), set[k]));
    }
  }
  CHECK(per_cluster_sum == doctest::Approx(total.bits).epsilon(1e-12));
}
