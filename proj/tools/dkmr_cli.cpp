// Command-line frontend for kill-matrix refinement and mutation-based fault
// localization. Subcommands:
//
//   build      dataset directory -> weak/enhanced kill-matrix dumps
//   refine     matrix dump -> low-pass refined dump
//   localize   dataset directory -> suspiciousness report (JSON + CSV)
//   evaluate   reports + ground truth -> effectiveness metrics + stat tests
//   simulate   seeded synthetic fault scenarios
//   pipeline   simulate -> localize -> evaluate, end to end
//
// Exit codes: 0 success, 1 invalid input, 2 internal error.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dkmr/dkmr.hpp"

namespace {

struct CliOptions {
  dkmr::PipelineConfig cfg;
  std::string variant = "full";
  std::vector<std::string> variants;
  std::string formula = "ochiai";
  std::string mask = "ideal";
};

void add_denoise_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--cutoff", opt.cfg.denoise.cutoff_d0, "Low-pass cutoff frequency D0 in (0,1]")
      ->check(CLI::Range(1e-9, 1.0));
  cmd->add_option("--mask", opt.mask, "Low-pass mask kind")
      ->check(CLI::IsMember({"ideal", "gaussian"}));
}

void add_formula_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--formula", opt.formula, "Suspiciousness formula, or 'all'")
      ->check(CLI::IsMember({"dstar", "gp13", "jaccard", "ochiai", "op2", "tarantula", "all"}));
  cmd->add_option("--dstar-exponent", opt.cfg.dstar_exponent, "Exponent for the dstar formula")
      ->check(CLI::PositiveNumber);
}

void add_scenario_flags(CLI::App* cmd, dkmr::ScenarioParams& p) {
  cmd->add_option("--statements", p.n_statements, "Statements in the synthetic file");
  cmd->add_option("--mutants-per-statement", p.mutants_per_statement, "Mutants per statement");
  cmd->add_option("--failing", p.n_failing_tests, "Failing tests");
  cmd->add_option("--passing", p.n_passing_tests, "Passing tests");
  cmd->add_option("--faulty", p.n_faulty_statements, "Faulty statements");
  cmd->add_option("--p-detect", p.p_detect, "P(failing test weak-kills a fault-statement mutant)");
  cmd->add_option("--p-couple", p.p_couple, "P(failing test weak-kills an unrelated mutant)");
  cmd->add_option("--p-flip", p.p_flip, "Independent bit-flip rate on failing-test cells");
  cmd->add_option("--p-strong-given-weak", p.p_strong_given_weak,
                  "P(weak kill upgrades to strong)");
  cmd->add_option("--p-pass-kill", p.p_pass_kill, "P(passing test weak-kills any mutant)");
  cmd->add_option("--locality-span", p.locality_span,
                  "Statements near a fault with correlated kill rows");
}

void resolve(CliOptions& opt) {
  opt.cfg.denoise.mask_kind =
      opt.mask == "gaussian" ? dkmr::MaskKind::Gaussian : dkmr::MaskKind::Ideal;
  if (opt.formula == "all")
    opt.cfg.formulas.assign(std::begin(dkmr::kAllFormulas), std::end(dkmr::kAllFormulas));
  else
    opt.cfg.formulas = {dkmr::parse_formula(opt.formula)};
  if (!opt.variants.empty()) {
    opt.cfg.variants.clear();
    for (const auto& v : opt.variants) opt.cfg.variants.push_back(dkmr::parse_variant(v));
  } else {
    opt.cfg.variants = {dkmr::parse_variant(opt.variant)};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kill-matrix refinement and mutation-based fault localization"};
  app.require_subcommand(1);
  // key=value config, one [section] per subcommand; flags override file values
  app.set_config("--config", "", "Read options from a config file");

  CliOptions opt;

  auto* build = app.add_subcommand("build", "Build weak and enhanced kill-matrix dumps");
  build->add_option("--input", opt.cfg.input, "Dataset directory")->required();
  build->add_option("--output", opt.cfg.output, "Output directory")->required();
  build->add_flag("--timings", opt.cfg.timings, "Report per-stage wall time");

  auto* refine = app.add_subcommand("refine", "Low-pass refine a kill-matrix dump");
  refine->add_option("--input", opt.cfg.input, "Matrix dump (TSV)")->required();
  refine->add_option("--output", opt.cfg.output, "Refined dump path")->required();
  add_denoise_flags(refine, opt);
  refine->add_flag("--timings", opt.cfg.timings, "Report per-stage wall time");

  auto* localize = app.add_subcommand("localize", "Rank statements by suspiciousness");
  localize->add_option("--input", opt.cfg.input, "Dataset directory")->required();
  localize->add_option("--output", opt.cfg.output, "Output directory")->required();
  localize->add_option("--variant", opt.variant, "Pipeline variant")
      ->check(CLI::IsMember({"full", "denoise-only", "metallaxis"}));
  add_formula_flags(localize, opt);
  add_denoise_flags(localize, opt);
  localize->add_flag("--timings", opt.cfg.timings, "Report per-stage wall time");

  auto* evaluate = app.add_subcommand("evaluate", "Score reports against ground truth");
  evaluate->add_option("--input", opt.cfg.input, "Directory of version directories")->required();
  evaluate->add_option("--output", opt.cfg.output, "Output directory")->required();
  evaluate
      ->add_option("--variant", opt.variants,
                   "Variant to evaluate (repeat for pairwise significance tests)")
      ->check(CLI::IsMember({"full", "denoise-only", "metallaxis"}));
  add_formula_flags(evaluate, opt);

  auto* simulate = app.add_subcommand("simulate", "Generate seeded synthetic fault scenarios");
  simulate->add_option("--output", opt.cfg.output, "Output directory")->required();
  simulate->add_option("--seed", opt.cfg.seed, "Base seed");
  simulate->add_option("--count", opt.cfg.count, "Number of scenarios")->check(CLI::PositiveNumber);
  add_scenario_flags(simulate, opt.cfg.params);

  auto* pipeline =
      app.add_subcommand("pipeline", "simulate -> localize -> evaluate, all variants");
  pipeline->add_option("--output", opt.cfg.output, "Output directory")->required();
  pipeline->add_option("--seed", opt.cfg.seed, "Base seed");
  pipeline->add_option("--count", opt.cfg.count, "Number of scenarios")->check(CLI::PositiveNumber);
  add_formula_flags(pipeline, opt);
  add_denoise_flags(pipeline, opt);
  add_scenario_flags(pipeline, opt.cfg.params);
  pipeline->add_flag("--timings", opt.cfg.timings, "Report per-stage wall time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message; flag problems are validation errors
    return 1;
  }

  try {
    resolve(opt);
    if (build->parsed()) dkmr::run_build(opt.cfg);
    if (refine->parsed()) dkmr::run_refine(opt.cfg);
    if (localize->parsed()) dkmr::run_localize(opt.cfg);
    if (evaluate->parsed()) dkmr::run_evaluate(opt.cfg);
    if (simulate->parsed()) dkmr::run_simulate(opt.cfg);
    if (pipeline->parsed()) dkmr::run_pipeline(opt.cfg);
  } catch (const dkmr::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
