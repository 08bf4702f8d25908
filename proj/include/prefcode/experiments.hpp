#pragma once
// Experiment scenarios behind the CLI: dataset generation, per-scenario
// design sweeps, and CSV reporting.
//
// Determinism contract: every grid cell derives its own random stream from
// (config seed, fixed cell id), so results are independent of evaluation
// order and of the --jobs setting; reruns with the same command and seed
// produce identical values (the runtime_ms column is wall-clock and exempt).

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "prefcode/codec.hpp"
#include "prefcode/design_continuous.hpp"
#include "prefcode/design_discrete.hpp"
#include "prefcode/design_single.hpp"
#include "prefcode/design_twouser.hpp"
#include "prefcode/io.hpp"
#include "prefcode/random.hpp"

namespace prefcode {

struct ScenarioConfig {
  std::string scenario = "demo";  // fig1 | continuous | fig4 | demo
  std::vector<std::size_t> alphabet_sizes{3, 4, 5};
  std::size_t max_codebooks = 10;            // fig1 sweep upper bound
  std::size_t items = 1000;                  // J
  std::size_t symbols_per_item = 20;         // L
  std::size_t samples = 1000;                // S (continuous training)
  std::size_t eval_samples = 100000;         // held-out evaluation draw
  std::vector<double> alpha_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::size_t budget1 = 4;
  std::size_t budget2 = 4;
  std::uint64_t seed = 42;
  int restarts = 0;  // 0 = per-scenario default (10, or 5 for fig4)
  int jobs = 1;
  std::string out;  // CSV path; design files land in <out>.designs/
};

struct CsvRow {
  std::string scenario;
  std::size_t n = 0;
  std::string k_or_alpha;
  std::string method;
  std::uint64_t seed = 0;
  int restarts = 0;
  double expected_bits = 0.0;
  double objective_bits_per_symbol = 0.0;  // NaN when not applicable
  long long runtime_ms = 0;
};

inline std::string csv_header() {
  return "scenario,n,k_or_alpha,method,seed,restarts,expected_bits,"
         "objective_bits_per_symbol,runtime_ms";
}

inline std::string format_row(const CsvRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%zu,%s,%s,%llu,%d,%.12g,%.12g,%lld",
                row.scenario.c_str(), row.n, row.k_or_alpha.c_str(), row.method.c_str(),
                static_cast<unsigned long long>(row.seed), row.restarts, row.expected_bits,
                row.objective_bits_per_symbol, row.runtime_ms);
  return buf;
}

inline void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
  std::string text = csv_header() + "\n";
  for (const auto& row : rows) text += format_row(row) + "\n";
  io::write_text(path, text);
}

/// J SPVs drawn uniformly from the simplex with uniform request
/// probabilities; fully determined by (n, j, seed).
inline DiscretePreference gen_data(std::size_t n, std::size_t j, std::uint64_t seed) {
  if (j == 0) throw std::invalid_argument("gen_data: J must be positive");
  Rng rng(seed);
  std::vector<Spv> spvs;
  spvs.reserve(j);
  for (std::size_t i = 0; i < j; ++i) spvs.emplace_back(rng.uniform_simplex(n));
  return DiscretePreference(std::move(spvs), std::vector<double>(j, 1.0 / static_cast<double>(j)));
}

namespace detail {

/// Index-stable parallel map: cell i writes results[i]; worker count never
/// affects values.
template <typename Fn>
void parallel_cells(std::size_t count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

inline long long elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               start)
      .count();
}

inline std::string design_dir(const ScenarioConfig& cfg) {
  if (cfg.out.empty()) return {};
  auto dir = cfg.out + ".designs";
  std::filesystem::create_directories(dir);
  return dir;
}

inline double mean_entropy(const DiscretePreference& pref) {
  double h = 0.0;
  for (std::size_t j = 0; j < pref.item_count(); ++j)
    h += pref.prob(j) * entropy(pref.spv(j));
  return h;
}

inline double baseline_bits(const DiscretePreference& pref, std::size_t length) {
  double bits = 0.0;
  for (std::size_t j = 0; j < pref.item_count(); ++j)
    bits += pref.prob(j) * self_decodable_bits(pref.spv(j), length);
  return bits;
}

/// Duplicate the last codebook until the set holds k books; padding never
/// changes any divergence minimum.
inline CodebookSet pad_to(const CodebookSet& set, std::size_t k) {
  auto books = set.codebooks();
  while (books.size() < k) books.push_back(books.back());
  return CodebookSet(std::move(books));
}

}  // namespace detail

/// Discrete-preference sweep: expected bits versus codebook count for both
/// designers and the self-decodable baseline. Reported values are the best
/// design with at most K codebooks (a smaller design padded with duplicates
/// is always admissible), which makes every per-method column non-increasing.
inline std::vector<CsvRow> run_fig1(const ScenarioConfig& cfg) {
  const int restarts = cfg.restarts > 0 ? cfg.restarts : 10;
  const std::size_t L = cfg.symbols_per_item;
  Rng root(cfg.seed);
  const auto dir = detail::design_dir(cfg);

  struct Cell {
    std::size_t n_idx, k;
    int method;  // 0 = kmeanspp, 1 = dca
  };
  std::vector<Cell> cells;
  for (std::size_t ni = 0; ni < cfg.alphabet_sizes.size(); ++ni)
    for (std::size_t k = 1; k <= cfg.max_codebooks; ++k)
      for (int m = 0; m < 2; ++m) cells.push_back({ni, k, m});

  std::vector<DiscretePreference> prefs;
  prefs.reserve(cfg.alphabet_sizes.size());
  for (std::size_t ni = 0; ni < cfg.alphabet_sizes.size(); ++ni)
    prefs.push_back(gen_data(cfg.alphabet_sizes[ni], cfg.items,
                             root.split(0xF100 + cfg.alphabet_sizes[ni]).seed()));

  struct CellResult {
    DesignResult design;
    long long ms;
  };
  std::vector<CellResult> results(
      cells.size(),
      CellResult{DesignResult{CodebookSet({Codebook(std::vector<double>{0.5, 0.5})}),
                              PartitionAssignment{},
                              0.0,
                              0,
                              {}},
                 0});
  detail::parallel_cells(cells.size(), cfg.jobs, [&](std::size_t i) {
    const auto& cell = cells[i];
    const auto& pref = prefs[cell.n_idx];
    DesignOptions opts;
    opts.restarts = restarts;
    opts.seed = root.split(0xF1D00000ull + cell.n_idx * 1000 + cell.k * 10 +
                           static_cast<std::uint64_t>(cell.method))
                    .seed();
    auto start = std::chrono::steady_clock::now();
    auto design = cell.method == 0 ? design_kmeanspp(pref, cell.k, opts)
                                   : design_dca(pref, cell.k, opts);
    results[i] = CellResult{std::move(design), detail::elapsed_ms(start)};
  });

  std::vector<CsvRow> rows;
  const char* method_names[2] = {"kmeanspp", "dca"};
  for (std::size_t ni = 0; ni < cfg.alphabet_sizes.size(); ++ni) {
    const std::size_t n = cfg.alphabet_sizes[ni];
    const auto& pref = prefs[ni];
    const double mean_h = detail::mean_entropy(pref);
    const double baseline = detail::baseline_bits(pref, L);
    if (!dir.empty())
      io::save_preference(dir + "/fig1_pref_n" + std::to_string(n) + ".json", pref);

    for (int m = 0; m < 2; ++m) {
      const DesignResult* best_so_far = nullptr;
      for (std::size_t k = 1; k <= cfg.max_codebooks; ++k) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < cells.size(); ++i)
          if (cells[i].n_idx == ni && cells[i].k == k && cells[i].method == m) idx = i;
        const auto& cell_res = results[idx];
        if (best_so_far == nullptr || cell_res.design.objective < best_so_far->objective)
          best_so_far = &cell_res.design;
        const double objective = best_so_far->objective;
        CsvRow row{"fig1",
                   n,
                   std::to_string(k),
                   method_names[m],
                   cfg.seed,
                   restarts,
                   static_cast<double>(L) * (mean_h + objective),
                   objective,
                   cell_res.ms};
        rows.push_back(row);
        if (!dir.empty()) {
          auto padded = detail::pad_to(best_so_far->set, k);
          auto cost = expected_cost(pref, padded, L);
          DesignResult file_design{std::move(padded), std::move(cost.assignment), objective,
                                   best_so_far->iterations, best_so_far->trace};
          io::save_design(dir + "/fig1_n" + std::to_string(n) + "_k" + std::to_string(k) + "_" +
                              method_names[m] + ".json",
                          n, file_design);
        }
      }
    }
    for (std::size_t k = 1; k <= cfg.max_codebooks; ++k)
      rows.push_back(CsvRow{"fig1", n, std::to_string(k), "self_decodable", cfg.seed, restarts,
                            baseline, std::nan(""), 0});
  }
  return rows;
}

/// Continuous-preference comparison at N=3, K=2: the fixed-sample iterative
/// design, both sampling designs, and an exhaustive grid search, each
/// evaluated on a held-out sample.
inline std::vector<CsvRow> run_continuous(const ScenarioConfig& cfg) {
  const int restarts = cfg.restarts > 0 ? cfg.restarts : 10;
  const std::size_t L = cfg.symbols_per_item;
  const std::size_t K = 2;
  Rng root(cfg.seed);
  const auto dir = detail::design_dir(cfg);

  struct Arm {
    std::string kind;
    PreferenceSpec spec;
  };
  std::vector<Arm> arms{{"uniform", PreferenceSpec::Uniform(3)},
                        {"radial", PreferenceSpec::Radial({1.0 / 3, 1.0 / 3, 1.0 / 3})}};
  const char* methods[4] = {"saa", "kmeanspp", "dca", "exhaustive"};

  std::vector<CsvRow> rows;
  for (std::size_t a = 0; a < arms.size(); ++a) {
    DesignOptions opts;
    opts.restarts = restarts;
    opts.seed = root.split(0xC000 + a).seed();

    Rng eval_rng = root.split(0xE000 + a);
    auto eval_pref =
        to_preference(sample_preference(arms[a].spec, cfg.eval_samples, eval_rng));
    const double eval_h = detail::mean_entropy(eval_pref);

    for (int m = 0; m < 4; ++m) {
      auto start = std::chrono::steady_clock::now();
      CodebookSet set({Codebook(std::vector<double>{0.5, 0.25, 0.25})});
      if (m == 0) {
        set = design_continuous_saa(arms[a].spec, K, cfg.samples, opts).set;
      } else if (m == 1) {
        set = design_sampling(arms[a].spec, K, cfg.samples, SamplingMethod::kmeanspp, opts).set;
      } else if (m == 2) {
        set = design_sampling(arms[a].spec, K, cfg.samples, SamplingMethod::dca, opts).set;
      } else {
        // Same training sample the samplers above use (stream 1 of opts.seed).
        Rng sampler = Rng(opts.seed).split(1);
        auto train = to_preference(sample_preference(arms[a].spec, cfg.samples, sampler));
        set = exhaustive_search(train, {0.02, K}).set;
      }
      auto cost = expected_cost(eval_pref, set, L);
      const double bits = cost.bits;
      CsvRow row{"continuous",
                 3,
                 arms[a].kind,
                 methods[m],
                 cfg.seed,
                 restarts,
                 bits,
                 bits / static_cast<double>(L) - eval_h,
                 detail::elapsed_ms(start)};
      rows.push_back(row);
      if (!dir.empty())
        io::save_codebook_set(dir + "/continuous_" + arms[a].kind + "_" + methods[m] + ".json",
                              set);
    }
  }
  return rows;
}

/// Two-user sweep over the similarity grid: expected pair bits for both
/// two-user designers and the (multicast-aware) self-decodable baseline.
inline std::vector<CsvRow> run_fig4(const ScenarioConfig& cfg) {
  const int restarts = cfg.restarts > 0 ? cfg.restarts : 5;
  const std::size_t L = cfg.symbols_per_item;
  Rng root(cfg.seed);
  const auto dir = detail::design_dir(cfg);
  const TwoUserBudget budget{cfg.budget1, cfg.budget2};

  struct Cell {
    std::size_t n_idx, a_idx;
    int method;  // 0 = kmeanspp2u, 1 = dca2u
  };
  std::vector<Cell> cells;
  for (std::size_t ni = 0; ni < cfg.alphabet_sizes.size(); ++ni)
    for (std::size_t ai = 0; ai < cfg.alpha_grid.size(); ++ai)
      for (int m = 0; m < 2; ++m) cells.push_back({ni, ai, m});

  std::vector<std::vector<Spv>> spv_sets;
  for (std::size_t ni = 0; ni < cfg.alphabet_sizes.size(); ++ni) {
    auto pref = gen_data(cfg.alphabet_sizes[ni], cfg.items,
                         root.split(0xF400 + cfg.alphabet_sizes[ni]).seed());
    spv_sets.push_back(pref.spvs());
  }

  struct CellResult {
    TwoUserResult result;
    long long ms;
  };
  std::vector<CellResult> results(cells.size());
  detail::parallel_cells(cells.size(), cfg.jobs, [&](std::size_t i) {
    const auto& cell = cells[i];
    auto F = joint_pref_alpha(cfg.items, cfg.alpha_grid[cell.a_idx]);
    DesignOptions opts;
    opts.restarts = restarts;
    opts.seed = root.split(0xF4D00000ull + cell.n_idx * 10000 + cell.a_idx * 10 +
                           static_cast<std::uint64_t>(cell.method))
                    .seed();
    auto start = std::chrono::steady_clock::now();
    auto res = cell.method == 0
                   ? design_twouser_kmeanspp(spv_sets[cell.n_idx], F, budget, opts, L)
                   : design_twouser_dca(spv_sets[cell.n_idx], F, budget, opts, L);
    results[i] = CellResult{std::move(res), detail::elapsed_ms(start)};
  });

  const char* method_names[2] = {"kmeanspp2u", "dca2u"};
  std::vector<CsvRow> rows;
  char alpha_buf[32];
  for (std::size_t ni = 0; ni < cfg.alphabet_sizes.size(); ++ni) {
    const std::size_t n = cfg.alphabet_sizes[ni];
    for (std::size_t ai = 0; ai < cfg.alpha_grid.size(); ++ai) {
      std::snprintf(alpha_buf, sizeof alpha_buf, "%g", cfg.alpha_grid[ai]);
      for (int m = 0; m < 2; ++m) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < cells.size(); ++i)
          if (cells[i].n_idx == ni && cells[i].a_idx == ai && cells[i].method == m) idx = i;
        const auto& cell_res = results[idx];
        const double div = [&] {
          double h = 0.0;
          auto F = joint_pref_alpha(cfg.items, cfg.alpha_grid[ai]);
          for (std::size_t j = 0; j < cfg.items; ++j) {
            double weight = F.diagonal(j) + F.solo1(j) + F.solo2(j);
            h += weight * entropy(spv_sets[ni][j]);
          }
          return cell_res.result.bits / static_cast<double>(L) - h;
        }();
        rows.push_back(CsvRow{"fig4", n, alpha_buf, method_names[m], cfg.seed, restarts,
                              cell_res.result.bits, div, cell_res.ms});
        if (!dir.empty())
          io::save_twouser_design(dir + "/fig4_n" + std::to_string(n) + "_alpha" + alpha_buf +
                                      "_" + method_names[m] + ".json",
                                  n, cell_res.result.design, cell_res.result.bits);
      }
      // Baseline: each distinct transmission ships its own codebook; an
      // identical request pair still needs only one multicast copy.
      auto F = joint_pref_alpha(cfg.items, cfg.alpha_grid[ai]);
      double bits = 0.0;
      for (std::size_t j = 0; j < cfg.items; ++j) {
        double weight = F.diagonal(j) + F.solo1(j) + F.solo2(j);
        bits += weight * self_decodable_bits(spv_sets[ni][j], L);
      }
      rows.push_back(CsvRow{"fig4", n, alpha_buf, "self_decodable", cfg.seed, restarts, bits,
                            std::nan(""), 0});
    }
  }
  return rows;
}

/// Four-item walkthrough: shows how preference changes move the optimal
/// codebook, then runs a bit-exact encode/decode round trip.
inline void run_demo(std::ostream& out) {
  std::vector<Spv> items{Spv({0.75, 0.25, 0.0, 0.0}), Spv({0.25, 0.75, 0.0, 0.0}),
                         Spv({0.0, 0.0, 0.75, 0.25}), Spv({0.0, 0.0, 0.25, 0.75})};
  const std::size_t L = 20;

  auto print_vec = [&](const std::vector<double>& v) {
    out << "[";
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
    out << "]";
  };

  out << "Four content items over a 4-symbol alphabet:\n";
  for (std::size_t j = 0; j < items.size(); ++j) {
    out << "  item " << (j + 1) << ": spv ";
    print_vec(items[j].probs());
    out << "  (entropy " << entropy(items[j]) << " bits/symbol)\n";
  }

  DiscretePreference pref1({items[0], items[1]}, {0.5, 0.5});
  auto q1 = optimal_single(pref1);
  out << "\nPreference 1 (items 1 and 2 equally likely):\n  optimal codebook ";
  print_vec(q1.q());
  auto cost1 = expected_cost(pref1, CodebookSet({q1}), L);
  out << "\n  expected bits per item at L=" << L << ": " << cost1.bits << "\n";

  DiscretePreference pref2({items[2], items[3]}, {0.5, 0.5});
  auto q2 = optimal_single(pref2);
  out << "Preference 2 (items 3 and 4 equally likely):\n  optimal codebook ";
  print_vec(q2.q());
  out << "\n";

  DiscretePreference pref3(items, {0.25, 0.25, 0.25, 0.25});
  out << "Preference 3 (all four equally likely), two codebooks:\n";
  auto design = design_kmeanspp(pref3, 2, {});
  for (std::size_t k = 0; k < design.set.size(); ++k) {
    out << "  codebook " << (k + 1) << ": ";
    print_vec(design.set[k].q());
    out << "\n";
  }
  out << "  divergence objective: " << design.objective << " bits/symbol\n";
  auto cost3 = expected_cost(pref3, design.set, L);
  out << "  expected bits per item: " << cost3.bits << "\n";

  // Round trip an item drawn from preference 1 under its optimal codebook.
  ItemSpec item;
  Rng rng(424242);
  for (std::size_t i = 0; i < L; ++i) {
    double u = rng.uniform01();
    item.symbols.push_back(u < items[0][0] ? 0 : 1);
  }
  CodebookSet set1({q1});
  auto stream = encode(item, set1);
  auto round = decode(stream, set1);
  const std::size_t header_bits = 13 * 8;
  out << "\nEncode/decode round trip of one L=" << L << " item:\n";
  out << "  payload bits: " << (stream.bytes.size() * 8 - header_bits)
      << " (including byte padding), header bits: " << header_bits << "\n";
  out << "  round trip " << (round.symbols == item.symbols ? "succeeded" : "FAILED") << "\n";
}

/// Dispatch by scenario name; returns the rows it wrote (demo prints to the
/// stream instead and returns nothing).
inline std::vector<CsvRow> run_scenario(const ScenarioConfig& cfg, std::ostream& demo_out) {
  std::vector<CsvRow> rows;
  if (cfg.scenario == "fig1") {
    rows = run_fig1(cfg);
  } else if (cfg.scenario == "continuous") {
    rows = run_continuous(cfg);
  } else if (cfg.scenario == "fig4") {
    rows = run_fig4(cfg);
  } else if (cfg.scenario == "demo") {
    run_demo(demo_out);
    return rows;
  } else {
    throw std::invalid_argument("unknown scenario: " + cfg.scenario);
  }
  if (!cfg.out.empty()) write_csv(cfg.out, rows);
  return rows;
}

}  // namespace prefcode
