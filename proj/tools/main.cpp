// Command-line surface: dataset generation, codebook design, bit-exact
// encode/decode, and experiment reproduction with CSV output.
//
// Exit codes: 0 success, 2 validation error (bad arguments or files),
// 3 budget or sampling guard exceeded, 1 anything else.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prefcode/codec.hpp"
#include "prefcode/design_continuous.hpp"
#include "prefcode/design_discrete.hpp"
#include "prefcode/design_single.hpp"
#include "prefcode/design_twouser.hpp"
#include "prefcode/experiments.hpp"
#include "prefcode/io.hpp"

namespace {

using namespace prefcode;

struct CommonDesignArgs {
  int restarts = 10;
  int max_iters = 1000;
  double epsilon = 1e-6;
  double subproblem_tol = 1e-8;
  std::uint64_t seed = 42;

  DesignOptions options() const {
    DesignOptions opts;
    opts.restarts = restarts;
    opts.max_iters = max_iters;
    opts.epsilon = epsilon;
    opts.subproblem_tol = subproblem_tol;
    opts.seed = seed;
    return opts;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--restarts", restarts, "independent seeded restarts");
    cmd->add_option("--max-iters", max_iters, "outer iteration cap");
    cmd->add_option("--epsilon", epsilon, "outer convergence threshold");
    cmd->add_option("--subproblem-tol", subproblem_tol, "inner solver tolerance");
    cmd->add_option("--seed", seed, "random seed");
  }
};

PreferenceSpec spec_from_args(const std::string& spec_file, const std::string& kind,
                              std::size_t n, std::vector<double>& alpha,
                              std::vector<double>& center) {
  if (!spec_file.empty()) return io::load_preference_spec(spec_file);
  if (kind == "uniform") return PreferenceSpec::Uniform(n);
  if (kind == "dirichlet") return PreferenceSpec::Dirichlet(alpha);
  if (kind == "radial") {
    if (center.empty()) center.assign(n, 1.0 / static_cast<double>(n));
    return PreferenceSpec::Radial(center);
  }
  throw std::invalid_argument("unknown preference kind: " + kind);
}

int run(int argc, char** argv) {
  CLI::App app{"preference-aware codebook design and lossless coding toolkit"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "draw a discrete preference dataset");
  std::size_t gen_n = 3, gen_j = 1000;
  std::uint64_t gen_seed = 42;
  std::string gen_out;
  gen->add_option("--n", gen_n, "alphabet size")->required();
  gen->add_option("--j", gen_j, "number of items");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output preference JSON")->required();

  // design-discrete
  auto* dd = app.add_subcommand("design-discrete", "design codebooks for a preference file");
  std::string dd_pref, dd_out, dd_method = "kmeanspp";
  std::size_t dd_k = 2;
  CommonDesignArgs dd_args;
  dd->add_option("--pref", dd_pref, "preference JSON")->required();
  dd->add_option("--k", dd_k, "number of codebooks")->required();
  dd->add_option("--method", dd_method, "kmeanspp | dca")
      ->check(CLI::IsMember({"kmeanspp", "dca"}));
  dd->add_option("--out", dd_out, "output design JSON")->required();
  dd_args.attach(dd);

  // design-continuous
  auto* dc = app.add_subcommand("design-continuous", "design codebooks for a density");
  std::string dc_spec_file, dc_kind = "uniform", dc_out, dc_method = "kmeanspp",
              dc_sample_out;
  std::size_t dc_n = 3, dc_k = 2, dc_s = 1000;
  std::vector<double> dc_alpha, dc_center;
  CommonDesignArgs dc_args;
  dc->add_option("--spec", dc_spec_file, "preference spec JSON");
  dc->add_option("--kind", dc_kind, "uniform | dirichlet | radial");
  dc->add_option("--n", dc_n, "alphabet size");
  dc->add_option("--alpha", dc_alpha, "dirichlet parameters")->delimiter(',');
  dc->add_option("--center", dc_center, "radial center")->delimiter(',');
  dc->add_option("--k", dc_k, "number of codebooks")->required();
  dc->add_option("--s", dc_s, "sample count");
  dc->add_option("--method", dc_method, "kmeanspp | dca | saa")
      ->check(CLI::IsMember({"kmeanspp", "dca", "saa"}));
  dc->add_option("--out", dc_out, "output design JSON")->required();
  dc->add_option("--export-sample", dc_sample_out, "also write the training sample CSV");
  dc_args.attach(dc);

  // design-twouser
  auto* dt = app.add_subcommand("design-twouser", "two-user design with shared codebooks");
  std::string dt_pref, dt_joint, dt_out, dt_method = "kmeanspp";
  double dt_alpha = -1.0;
  std::size_t dt_k1 = 4, dt_k2 = 4, dt_l = 20;
  CommonDesignArgs dt_args;
  dt_args.restarts = 5;
  dt->add_option("--pref", dt_pref, "preference JSON supplying the SPVs")->required();
  dt->add_option("--joint", dt_joint, "dense joint preference CSV");
  dt->add_option("--alpha", dt_alpha, "similarity for the generated joint matrix");
  dt->add_option("--method", dt_method, "kmeanspp | dca")
      ->check(CLI::IsMember({"kmeanspp", "dca"}));
  dt->add_option("--k1", dt_k1, "user 1 codebook budget");
  dt->add_option("--k2", dt_k2, "user 2 codebook budget");
  dt->add_option("--l", dt_l, "symbols per item");
  dt->add_option("--out", dt_out, "output design JSON")->required();
  dt_args.attach(dt);

  // encode / decode
  auto* enc = app.add_subcommand("encode", "encode an item with a codebook set");
  std::string enc_books, enc_item, enc_out;
  bool enc_raw = false;
  enc->add_option("--codebooks", enc_books, "codebook-set or design JSON")->required();
  enc->add_option("--item", enc_item, "item file")->required();
  enc->add_flag("--raw", enc_raw, "treat the item file as raw bytes (N = 256)");
  enc->add_option("--out", enc_out, "output bitstream")->required();

  auto* dec = app.add_subcommand("decode", "decode a bitstream");
  std::string dec_books, dec_in, dec_out;
  bool dec_raw = false;
  dec->add_option("--codebooks", dec_books, "codebook-set or design JSON")->required();
  dec->add_option("--in", dec_in, "input bitstream")->required();
  dec->add_flag("--raw", dec_raw, "write raw bytes instead of symbol indices");
  dec->add_option("--out", dec_out, "output item file")->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "reproduce a reported scenario");
  ScenarioConfig cfg;
  bool seed_set = false, out_set = false;
  exp->add_option("scenario", cfg.scenario, "fig1 | continuous | fig4 | demo")->required();
  exp->add_option("--seed", cfg.seed, "random seed")->each([&](const std::string&) {
    seed_set = true;
  });
  exp->add_option("--out", cfg.out, "CSV output path")->each([&](const std::string&) {
    out_set = true;
  });
  exp->add_option("--n", cfg.alphabet_sizes, "alphabet sizes")->delimiter(',');
  exp->add_option("--k-max", cfg.max_codebooks, "largest codebook count (fig1)");
  exp->add_option("--j", cfg.items, "items per dataset");
  exp->add_option("--l", cfg.symbols_per_item, "symbols per item");
  exp->add_option("--s", cfg.samples, "training sample count (continuous)");
  exp->add_option("--eval-s", cfg.eval_samples, "held-out evaluation sample count");
  exp->add_option("--alpha-grid", cfg.alpha_grid, "similarity grid (fig4)")->delimiter(',');
  exp->add_option("--budget1", cfg.budget1, "user 1 budget (fig4)");
  exp->add_option("--budget2", cfg.budget2, "user 2 budget (fig4)");
  exp->add_option("--restarts", cfg.restarts, "restarts (0 = scenario default)");
  exp->add_option("--jobs", cfg.jobs, "parallel grid cells");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    io::save_preference(gen_out, gen_data(gen_n, gen_j, gen_seed));
    return 0;
  }

  if (dd->parsed()) {
    auto pref = io::load_preference(dd_pref);
    auto opts = dd_args.options();
    auto res = dd_method == "dca" ? design_dca(pref, dd_k, opts)
                                  : design_kmeanspp(pref, dd_k, opts);
    io::save_design(dd_out, pref.alphabet_size(), res);
    std::cout << "objective_bits_per_symbol " << res.objective << "\n";
    return 0;
  }

  if (dc->parsed()) {
    auto spec = spec_from_args(dc_spec_file, dc_kind, dc_n, dc_alpha, dc_center);
    auto opts = dc_args.options();
    DesignResult res =
        dc_method == "saa"
            ? design_continuous_saa(spec, dc_k, dc_s, opts)
            : design_sampling(spec, dc_k, dc_s,
                              dc_method == "dca" ? SamplingMethod::dca
                                                 : SamplingMethod::kmeanspp,
                              opts);
    io::save_design(dc_out, spec.n, res);
    if (!dc_sample_out.empty()) {
      Rng sampler = Rng(opts.seed).split(1);  // the stream the designer used
      io::save_sample_csv(dc_sample_out, sample_preference(spec, dc_s, sampler));
    }
    std::cout << "objective_bits_per_symbol " << res.objective << "\n";
    return 0;
  }

  if (dt->parsed()) {
    auto pref = io::load_preference(dt_pref);
    auto spvs = pref.spvs();
    JointPreference F = dt_joint.empty() ? joint_pref_alpha(spvs.size(), dt_alpha)
                                         : io::load_joint_csv(dt_joint);
    auto opts = dt_args.options();
    auto res = dt_method == "dca"
                   ? design_twouser_dca(spvs, F, {dt_k1, dt_k2}, opts, dt_l)
                   : design_twouser_kmeanspp(spvs, F, {dt_k1, dt_k2}, opts, dt_l);
    io::save_twouser_design(dt_out, pref.alphabet_size(), res.design, res.bits);
    std::cout << "expected_bits " << res.bits << " k0 " << res.design.k0() << "\n";
    return 0;
  }

  if (enc->parsed()) {
    auto set = io::load_design_codebooks(enc_books);
    auto item = io::load_item(enc_item, enc_raw);
    io::save_bitstream(enc_out, encode(item, set));
    return 0;
  }

  if (dec->parsed()) {
    auto set = io::load_design_codebooks(dec_books);
    auto item = decode(io::load_bitstream(dec_in), set);
    io::save_item(dec_out, item, dec_raw);
    return 0;
  }

  if (exp->parsed()) {
    if (cfg.scenario != "demo" && (!seed_set || !out_set))
      throw std::invalid_argument("experiment requires explicit --seed and --out");
    run_scenario(cfg, std::cout);
    if (!cfg.out.empty()) std::cout << "wrote " << cfg.out << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const prefcode::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const prefcode::RejectionStall& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
