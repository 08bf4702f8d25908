#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "prefcode/design_continuous.hpp"
#include "prefcode/info.hpp"

using namespace prefcode;

TEST_CASE("uniform sampling: componentwise means near the barycenter") {
  Rng rng(101);
  auto sample = sample_preference(PreferenceSpec::Uniform(3), 100000, rng);
  double mean[3] = {0, 0, 0};
  for (const auto& p : sample.points)
    for (int i = 0; i < 3; ++i) mean[i] += p[i];
  for (int i = 0; i < 3; ++i) CHECK(std::abs(mean[i] / 100000 - 1.0 / 3) < 0.01);
}

TEST_CASE("dirichlet(1,1) first coordinate is uniform (KS check)") {
  Rng rng(102);
  auto sample = sample_preference(PreferenceSpec::Dirichlet({1.0, 1.0}), 100000, rng);
  std::vector<double> xs;
  xs.reserve(sample.points.size());
  for (const auto& p : sample.points) xs.push_back(p[0]);
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double ecdf_hi = static_cast<double>(i + 1) / xs.size();
    double ecdf_lo = static_cast<double>(i) / xs.size();
    ks = std::max(ks, std::max(std::abs(ecdf_hi - xs[i]), std::abs(xs[i] - ecdf_lo)));
  }
  CHECK(ks < 0.01);
}

TEST_CASE("radial sampling depresses mass near the center") {
  Rng uni_rng(103), rad_rng(104);
  const std::vector<double> c{1.0 / 3, 1.0 / 3, 1.0 / 3};
  auto uni = sample_preference(PreferenceSpec::Uniform(3), 100000, uni_rng);
  auto rad = sample_preference(PreferenceSpec::Radial(c), 100000, rad_rng);
  auto near_center = [&](const SampleSet& s) {
    int count = 0;
    for (const auto& p : s.points) {
      double d2 = 0.0;
      for (int i = 0; i < 3; ++i) d2 += (p[i] - c[i]) * (p[i] - c[i]);
      if (std::sqrt(d2) < 0.05) ++count;
    }
    return count;
  };
  CHECK(near_center(rad) < near_center(uni));
}

TEST_CASE("rejection sampler stalls on a vanishing density") {
  Rng rng(105);
  auto nowhere = PreferenceSpec::Custom(
      3, [](const std::vector<double>&) { return 0.0; }, 1.0);
  CHECK_THROWS_AS(sample_preference(nowhere, 1, rng), RejectionStall);
}

TEST_CASE("design_sampling concentrates on a near-point-mass preference") {
  auto spec = PreferenceSpec::Dirichlet({5000.0, 2000.0, 3000.0});  // tight around p*
  DesignOptions opts;
  opts.restarts = 2;
  auto res = design_sampling(spec, 1, 500, SamplingMethod::kmeanspp, opts);
  CHECK(std::abs(res.set[0][0] - 0.5) < 0.01);
  CHECK(std::abs(res.set[0][1] - 0.2) < 0.01);
  CHECK(std::abs(res.set[0][2] - 0.3) < 0.01);
}

TEST_CASE("fixed-sample iterative design coincides with the sampling design") {
  DesignOptions opts;
  opts.restarts = 3;
  opts.epsilon = 0.0;  // run the center-change loop to the exact fixed point
  auto a = design_continuous_saa(PreferenceSpec::Uniform(3), 2, 400, opts);
  auto b = design_sampling(PreferenceSpec::Uniform(3), 2, 400, SamplingMethod::kmeanspp, opts);
  REQUIRE(a.set.size() == b.set.size());
  for (std::size_t k = 0; k < a.set.size(); ++k)
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.set[k][i] == b.set[k][i]);
  CHECK(a.objective == b.objective);
  CHECK(a.assignment.owner == b.assignment.owner);
}

TEST_CASE("uniform K=1 design lands at the barycenter") {
  DesignOptions opts;
  opts.restarts = 1;
  auto res = design_continuous_saa(PreferenceSpec::Uniform(3), 1, 10000, opts);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(res.set[0][i] - 1.0 / 3) < 0.02);
}

TEST_CASE("empirical objective trace is monotone") {
  DesignOptions opts;
  opts.restarts = 2;
  auto res = design_continuous_saa(PreferenceSpec::Uniform(3), 3, 2000, opts);
  for (std::size_t i = 1; i < res.trace.size(); ++i)
    CHECK(res.trace[i] <= res.trace[i - 1] + 1e-12);
}

TEST_CASE("estimate variance shrinks as the sample grows") {
  // Spread of the evaluated expected bits across seeds at S=500 vs S=8000.
  const std::size_t L = 20;
  Rng eval_rng(900);
  auto eval = to_preference(sample_preference(PreferenceSpec::Uniform(3), 20000, eval_rng));
  auto run = [&](std::size_t S, std::uint64_t seed) {
    DesignOptions opts;
    opts.restarts = 3;
    opts.seed = seed;
    auto res = design_sampling(PreferenceSpec::Uniform(3), 2, S, SamplingMethod::kmeanspp, opts);
    return expected_cost(eval, res.set, L).bits;
  };
  auto variance = [&](std::size_t S) {
    std::vector<double> xs;
    for (std::uint64_t seed = 0; seed < 20; ++seed) xs.push_back(run(S, 7000 + seed));
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return var / (xs.size() - 1);
  };
  CHECK(variance(8000) < variance(500));
}
