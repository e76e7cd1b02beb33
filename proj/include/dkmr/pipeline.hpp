#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dkmr/dataset.hpp"
#include "dkmr/denoise.hpp"
#include "dkmr/enhance.hpp"
#include "dkmr/error.hpp"
#include "dkmr/metrics.hpp"
#include "dkmr/suspicion.hpp"
#include "dkmr/synth.hpp"

// Orchestration behind the CLI subcommands. Everything here is a pure
// function of its configuration plus the input files: no timestamps, no
// environment probing, so rerunning with the same flags and seeds rewrites
// byte-identical outputs.

namespace dkmr {

struct PipelineConfig {
  std::filesystem::path input;
  std::filesystem::path output;
  std::vector<Variant> variants = {Variant::Full};
  std::vector<Formula> formulas = {Formula::Ochiai};
  int dstar_exponent = 2;
  DenoiseConfig denoise;
  std::uint64_t seed = 1;
  int count = 1;
  ScenarioParams params;
  bool timings = false;
};

namespace detail {

inline std::string scenario_dir_name(int index) { return "scenario_" + pad_int(index, 4); }

inline std::string report_file_stem(Variant v, Formula f) {
  return "report_" + to_string(v) + "_" + to_string(f);
}

inline void print_timings(const StageTimings& t, std::ostream& os) {
  os << "timings: matrix_build=" << format_real(t.build_seconds * 1e3)
     << "ms dkmr_refine=" << format_real(t.refine_seconds * 1e3)
     << "ms suspiciousness=" << format_real(t.suspicion_seconds * 1e3) << "ms\n";
}

inline FormulaKind make_formula(Formula f, const PipelineConfig& cfg) {
  return FormulaKind{f, cfg.dstar_exponent};
}

}  // namespace detail

// build: dataset directory -> weak + enhanced matrix dumps.
inline void run_build(const PipelineConfig& cfg) {
  Dataset ds = load_dataset(cfg.input);
  std::filesystem::create_directories(cfg.output);
  auto t0 = std::chrono::steady_clock::now();
  write_matrix_tsv(build_weak_matrix(ds), cfg.output / "weak_matrix.tsv");
  write_matrix_tsv(build_enhanced_matrix(ds), cfg.output / "enhanced_matrix.tsv");
  if (cfg.timings) {
    StageTimings t;
    t.build_seconds = detail::seconds_since(t0);
    detail::print_timings(t, std::cerr);
  }
}

// refine: matrix dump file -> refined dump file.
inline void run_refine(const PipelineConfig& cfg) {
  MatrixDump dump = read_matrix_tsv(cfg.input);
  if (dump.cells.empty()) throw EmptyMatrixError();
  RefinedKillMatrix refined;
  refined.rows = dump.rows;
  refined.cols = dump.cols;
  refined.fail_vector.assign(dump.cols.size(), 0);
  auto t0 = std::chrono::steady_clock::now();
  refined.cells = refine_cells(dump.cells, cfg.denoise);
  if (cfg.output.has_parent_path()) std::filesystem::create_directories(cfg.output.parent_path());
  write_matrix_tsv(refined, cfg.output);
  if (cfg.timings) {
    StageTimings t;
    t.refine_seconds = detail::seconds_since(t0);
    detail::print_timings(t, std::cerr);
  }
}

// localize: dataset directory -> report JSON + CSV per requested formula.
inline void run_localize(const PipelineConfig& cfg) {
  Dataset ds = load_dataset(cfg.input);
  std::filesystem::create_directories(cfg.output);
  StageTimings timings;
  for (Variant variant : cfg.variants) {
    for (Formula f : cfg.formulas) {
      auto report = localize(ds, variant, detail::make_formula(f, cfg), cfg.denoise,
                             cfg.timings ? &timings : nullptr);
      auto stem = detail::report_file_stem(variant, f);
      write_report_json(report, cfg.output / (stem + ".json"));
      write_report_csv(report, cfg.output / (stem + ".csv"));
    }
  }
  if (cfg.timings) detail::print_timings(timings, std::cerr);
}

namespace detail {

// Versions are the sorted subdirectories of the evaluation root; each must
// hold faults.tsv plus one report per requested (variant, formula).
inline std::vector<std::filesystem::path> version_directories(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root))
    throw ValidationError("not a directory: " + root.string());
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(root))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw ValidationError("no version directories under " + root.string());
  return dirs;
}

struct EvaluatedVariant {
  Variant variant;
  EvaluationReport report;
};

}  // namespace detail

// evaluate: version directories with reports + ground truth -> evaluation
// JSON (per formula), EXAM curve CSVs, pairwise significance tests.
inline void run_evaluate(const PipelineConfig& cfg) {
  auto versions = detail::version_directories(cfg.input);
  std::filesystem::create_directories(cfg.output);

  for (Formula f : cfg.formulas) {
    std::vector<detail::EvaluatedVariant> evaluated;
    for (Variant variant : cfg.variants) {
      std::vector<VersionResult> results;
      for (const auto& dir : versions) {
        auto report_path = dir / (detail::report_file_stem(variant, f) + ".json");
        if (!std::filesystem::exists(report_path))
          throw ValidationError("missing report for version " + dir.filename().string() + ": " +
                                report_path.string());
        auto faults_path = dir / "faults.tsv";
        if (!std::filesystem::exists(faults_path))
          throw ValidationError("missing ground truth: " + faults_path.string());
        GroundTruth gt = load_ground_truth(faults_path);
        if (gt.faulty_statements.empty())
          throw ValidationError("empty ground truth: " + faults_path.string());
        results.push_back(
            make_version_result(read_report_json(report_path), std::move(gt),
                                dir.filename().string()));
      }
      evaluated.push_back({variant, evaluate(results)});
    }

    nlohmann::json j;
    j["formula"] = to_string(f);
    nlohmann::json variants_json;
    for (const auto& ev : evaluated) {
      variants_json[to_string(ev.variant)] = evaluation_to_json(ev.report);
      write_exam_curve_csv(ev.report.exam_scores,
                           cfg.output / ("exam_curve_" + to_string(ev.variant) + "_" +
                                         to_string(f) + ".csv"));
    }
    j["variants"] = std::move(variants_json);

    nlohmann::json tests = nlohmann::json::array();
    for (std::size_t a = 0; a < evaluated.size(); ++a) {
      for (std::size_t b = a + 1; b < evaluated.size(); ++b) {
        nlohmann::json entry;
        entry["pair"] = {to_string(evaluated[a].variant), to_string(evaluated[b].variant)};
        const auto& xs = evaluated[a].report.exam_scores;
        const auto& ys = evaluated[b].report.exam_scores;
        try {
          auto detail_two = wilcoxon_signed_rank_detail(xs, ys, Alternative::TwoSided);
          entry["p_two_sided"] = detail_two.p;
          entry["p_less"] = wilcoxon_signed_rank(xs, ys, Alternative::Less);
          entry["p_greater"] = wilcoxon_signed_rank(xs, ys, Alternative::Greater);
          entry["n_dropped_zero_diffs"] = detail_two.n_dropped;
          entry["zero_drop_warning"] =
              detail_two.n_dropped * 10 > xs.size();  // >10% of pairs dropped
        } catch (const AllDifferencesZeroError&) {
          entry["error"] = "all differences zero";
        }
        auto cd = cliffs_delta(xs, ys);
        entry["cliffs_delta"] = cd.delta;
        entry["magnitude"] = to_string(cd.magnitude);
        tests.push_back(std::move(entry));
      }
    }
    j["stat_tests"] = std::move(tests);

    std::ofstream out(cfg.output / ("evaluation_" + to_string(f) + ".json"), std::ios::binary);
    if (!out) throw ValidationError("cannot write evaluation JSON");
    out << j.dump(2) << '\n';
  }
}

// simulate: params + seed -> scenario directories.
inline void run_simulate(const PipelineConfig& cfg) {
  if (cfg.count < 1) throw InvalidParamsError("count must be >= 1");
  validate(cfg.params);
  std::filesystem::create_directories(cfg.output);
  for (int i = 0; i < cfg.count; ++i) {
    Scenario s = generate_scenario(cfg.params, cfg.seed + static_cast<std::uint64_t>(i));
    save_scenario(s, cfg.output / detail::scenario_dir_name(i));
  }
}

// pipeline: simulate -> localize (all variants) -> evaluate, end to end.
inline void run_pipeline(const PipelineConfig& cfg) {
  PipelineConfig sim = cfg;
  sim.output = cfg.output / "scenarios";
  run_simulate(sim);

  static constexpr Variant kAllVariants[] = {Variant::Full, Variant::DenoiseOnly,
                                             Variant::Metallaxis};
  StageTimings timings;
  for (int i = 0; i < cfg.count; ++i) {
    auto dir = sim.output / detail::scenario_dir_name(i);
    Dataset ds = load_dataset(dir);
    for (Variant variant : kAllVariants) {
      for (Formula f : cfg.formulas) {
        auto report = localize(ds, variant, detail::make_formula(f, cfg), cfg.denoise,
                               cfg.timings ? &timings : nullptr);
        auto stem = detail::report_file_stem(variant, f);
        write_report_json(report, dir / (stem + ".json"));
        write_report_csv(report, dir / (stem + ".csv"));
      }
    }
  }
  if (cfg.timings) detail::print_timings(timings, std::cerr);

  PipelineConfig eval = cfg;
  eval.input = sim.output;
  eval.output = cfg.output / "evaluation";
  eval.variants = {Variant::Full, Variant::DenoiseOnly, Variant::Metallaxis};
  run_evaluate(eval);
}

}  // namespace dkmr
