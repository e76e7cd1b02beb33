#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dkmr/dataset.hpp"
#include "dkmr/denoise.hpp"
#include "dkmr/enhance.hpp"
#include "dkmr/error.hpp"

// Kill statistics, the six suspiciousness formulas, mutant-to-statement max
// aggregation and deterministic ranking. Three pipeline variants are
// supported: the full enhanced+denoised fuzzy path, a denoise-only fuzzy
// path over the weak matrix, and the classical boolean baseline.

namespace dkmr {

struct FuzzyKillStats {
  double a_kf = 0, a_kp = 0, a_nf = 0, a_np = 0;
};

struct KillStats {
  long long a_kf = 0, a_kp = 0, a_nf = 0, a_np = 0;
};

enum class Formula { Dstar, Gp13, Jaccard, Ochiai, Op2, Tarantula };

struct FormulaKind {
  Formula value = Formula::Ochiai;
  int dstar_exponent = 2;  // used by Dstar only
};

enum class Variant { Full, DenoiseOnly, Metallaxis };

struct RankedStatement {
  Statement statement;
  double score = 0;
  int rank_index = 0;  // 1-based position in the report
};

struct SuspiciousnessReport {
  std::vector<RankedStatement> ranking;
  FormulaKind formula;
  Variant variant = Variant::Full;
  double cutoff_d0 = 0.3;
};

inline std::string to_string(Formula f) {
  switch (f) {
    case Formula::Dstar: return "dstar";
    case Formula::Gp13: return "gp13";
    case Formula::Jaccard: return "jaccard";
    case Formula::Ochiai: return "ochiai";
    case Formula::Op2: return "op2";
    case Formula::Tarantula: return "tarantula";
  }
  return "ochiai";
}

inline Formula parse_formula(const std::string& name) {
  if (name == "dstar") return Formula::Dstar;
  if (name == "gp13") return Formula::Gp13;
  if (name == "jaccard") return Formula::Jaccard;
  if (name == "ochiai") return Formula::Ochiai;
  if (name == "op2") return Formula::Op2;
  if (name == "tarantula") return Formula::Tarantula;
  throw ValidationError("unknown formula: " + name);
}

inline constexpr Formula kAllFormulas[] = {Formula::Dstar,  Formula::Gp13, Formula::Jaccard,
                                           Formula::Ochiai, Formula::Op2,  Formula::Tarantula};

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::DenoiseOnly: return "denoise_only";
    case Variant::Metallaxis: return "metallaxis";
  }
  return "full";
}

inline Variant parse_variant(const std::string& name) {
  if (name == "full") return Variant::Full;
  if (name == "denoise-only" || name == "denoise_only") return Variant::DenoiseOnly;
  if (name == "metallaxis") return Variant::Metallaxis;
  throw ValidationError("unknown variant: " + name);
}

inline std::vector<FuzzyKillStats> fuzzy_statistics(const RefinedKillMatrix& m) {
  std::vector<FuzzyKillStats> stats(m.rows.size());
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    FuzzyKillStats& s = stats[i];
    for (std::size_t j = 0; j < m.cols.size(); ++j) {
      double v = m.cells(i, j);
      if (m.fail_vector[j]) {
        s.a_kf += v;
        s.a_nf += 1.0 - v;
      } else {
        s.a_kp += v;
        s.a_np += 1.0 - v;
      }
    }
  }
  return stats;
}

inline std::vector<KillStats> classical_statistics(const BooleanKillMatrix& m) {
  std::vector<KillStats> stats(m.rows.size());
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    KillStats& s = stats[i];
    for (std::size_t j = 0; j < m.cols.size(); ++j) {
      bool killed = m.cells(i, j) != 0;
      bool failing = m.fail_vector[j] != 0;
      if (killed && failing)
        ++s.a_kf;
      else if (killed)
        ++s.a_kp;
      else if (failing)
        ++s.a_nf;
      else
        ++s.a_np;
    }
  }
  return stats;
}

namespace detail {

// Every fraction with a zero denominator contributes 0; that keeps all six
// formulas finite without special-casing degenerate datasets.
inline double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

inline double formula_score(double a_kf, double a_kp, double a_nf, double a_np, FormulaKind f) {
  switch (f.value) {
    case Formula::Jaccard:
      return safe_ratio(a_kf, a_kf + a_nf + a_kp);
    case Formula::Tarantula: {
      double killed_fail = safe_ratio(a_kf, a_kf + a_nf);
      double killed_pass = safe_ratio(a_kp, a_kp + a_np);
      return safe_ratio(killed_fail, killed_fail + killed_pass);
    }
    case Formula::Ochiai:
      return safe_ratio(a_kf, std::sqrt((a_kf + a_nf) * (a_kf + a_kp)));
    case Formula::Op2:
      return a_kf - a_kp / (a_kp + a_np + 1.0);
    case Formula::Dstar:
      return safe_ratio(std::pow(a_kf, f.dstar_exponent), a_kp + a_nf);
    case Formula::Gp13:
      return a_kf + safe_ratio(a_kf, 2.0 * a_kp + a_np);
  }
  return 0.0;
}

}  // namespace detail

inline double mutant_suspiciousness(const FuzzyKillStats& s, FormulaKind f) {
  return detail::formula_score(s.a_kf, s.a_kp, s.a_nf, s.a_np, f);
}

inline double mutant_suspiciousness(const KillStats& s, FormulaKind f) {
  return detail::formula_score(static_cast<double>(s.a_kf), static_cast<double>(s.a_kp),
                               static_cast<double>(s.a_nf), static_cast<double>(s.a_np), f);
}

// Statement score is the maximum over its mutants; statements without
// mutants cannot be scored and are absent from the result.
inline std::map<Statement, double> statement_suspiciousness(
    const std::map<std::string, double>& mutant_scores, const std::vector<MutantMeta>& mutants) {
  std::map<std::string_view, const MutantMeta*> meta;
  for (const auto& m : mutants) meta.emplace(m.mutant_id, &m);
  std::map<Statement, double> scores;
  for (const auto& [id, score] : mutant_scores) {
    auto it = meta.find(id);
    if (it == meta.end()) throw ValidationError("scored mutant has no metadata: " + id);
    Statement st{it->second->file_path, it->second->line_number};
    auto [pos, inserted] = scores.emplace(st, score);
    if (!inserted) pos->second = std::max(pos->second, score);
  }
  return scores;
}

// Descending by score; ties broken by (file, line) ascending so output is
// deterministic. Metric-side tie handling does not depend on this order.
inline SuspiciousnessReport rank_statements(const std::map<Statement, double>& scores,
                                            FormulaKind formula, Variant variant,
                                            double cutoff_d0 = 0.3) {
  if (scores.empty()) throw EmptyScoresError();
  SuspiciousnessReport report;
  report.formula = formula;
  report.variant = variant;
  report.cutoff_d0 = cutoff_d0;
  report.ranking.reserve(scores.size());
  for (const auto& [st, score] : scores) report.ranking.push_back({st, score, 0});
  std::stable_sort(report.ranking.begin(), report.ranking.end(),
                   [](const RankedStatement& a, const RankedStatement& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.statement < b.statement;
                   });
  for (std::size_t i = 0; i < report.ranking.size(); ++i)
    report.ranking[i].rank_index = static_cast<int>(i + 1);
  return report;
}

// Wall-clock of the three pipeline stages, for the --timings report.
struct StageTimings {
  double build_seconds = 0;
  double refine_seconds = 0;
  double suspicion_seconds = 0;

  StageTimings& operator+=(const StageTimings& o) {
    build_seconds += o.build_seconds;
    refine_seconds += o.refine_seconds;
    suspicion_seconds += o.suspicion_seconds;
    return *this;
  }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename Stats>
std::map<std::string, double> score_mutants(const std::vector<std::string>& row_ids,
                                            const std::vector<Stats>& stats, FormulaKind formula) {
  std::map<std::string, double> scores;
  for (std::size_t i = 0; i < row_ids.size(); ++i)
    scores[row_ids[i]] = mutant_suspiciousness(stats[i], formula);
  return scores;
}

}  // namespace detail

inline SuspiciousnessReport localize(const Dataset& dataset, Variant variant, FormulaKind formula,
                                     const DenoiseConfig& config = {},
                                     StageTimings* timings = nullptr) {
  auto t0 = std::chrono::steady_clock::now();
  std::map<std::string, double> mutant_scores;
  if (variant == Variant::Metallaxis) {
    BooleanKillMatrix weak = build_weak_matrix(dataset);
    auto t1 = std::chrono::steady_clock::now();
    auto stats = classical_statistics(weak);
    mutant_scores = detail::score_mutants(weak.rows, stats, formula);
    if (timings) {
      timings->build_seconds += std::chrono::duration<double>(t1 - t0).count();
      timings->suspicion_seconds += detail::seconds_since(t1);
    }
  } else {
    RefinedKillMatrix refined;
    std::chrono::steady_clock::time_point t1;
    if (variant == Variant::Full) {
      EnhancedKillMatrix enhanced = build_enhanced_matrix(dataset);
      t1 = std::chrono::steady_clock::now();
      refined = refine(enhanced, config);
    } else {
      BooleanKillMatrix weak = build_weak_matrix(dataset);
      t1 = std::chrono::steady_clock::now();
      refined = refine(weak, config);
    }
    auto t2 = std::chrono::steady_clock::now();
    auto stats = fuzzy_statistics(refined);
    mutant_scores = detail::score_mutants(refined.rows, stats, formula);
    if (timings) {
      timings->build_seconds += std::chrono::duration<double>(t1 - t0).count();
      timings->refine_seconds += std::chrono::duration<double>(t2 - t1).count();
      timings->suspicion_seconds += detail::seconds_since(t2);
    }
  }
  auto t_rank = std::chrono::steady_clock::now();
  auto statement_scores = statement_suspiciousness(mutant_scores, dataset.mutants);
  auto report = rank_statements(statement_scores, formula, variant, config.cutoff_d0);
  if (timings) timings->suspicion_seconds += detail::seconds_since(t_rank);
  return report;
}

// --- report emission ---------------------------------------------------------

inline nlohmann::json report_to_json(const SuspiciousnessReport& report) {
  nlohmann::json ranking = nlohmann::json::array();
  for (const auto& r : report.ranking)
    ranking.push_back({{"file", r.statement.file_path},
                       {"line", r.statement.line_number},
                       {"score", r.score},
                       {"rank", r.rank_index}});
  nlohmann::json j{{"variant", to_string(report.variant)},
                   {"formula", to_string(report.formula.value)},
                   {"cutoff_d0", report.cutoff_d0},
                   {"ranking", std::move(ranking)}};
  if (report.formula.value == Formula::Dstar) j["dstar_exponent"] = report.formula.dstar_exponent;
  return j;
}

inline SuspiciousnessReport report_from_json(const nlohmann::json& j) {
  SuspiciousnessReport report;
  try {
    report.variant = parse_variant(j.at("variant").get<std::string>());
    report.formula.value = parse_formula(j.at("formula").get<std::string>());
    if (j.contains("dstar_exponent")) report.formula.dstar_exponent = j.at("dstar_exponent");
    report.cutoff_d0 = j.at("cutoff_d0");
    for (const auto& r : j.at("ranking"))
      report.ranking.push_back({Statement{r.at("file").get<std::string>(), r.at("line").get<int>()},
                                r.at("score").get<double>(), r.at("rank").get<int>()});
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed report JSON: ") + e.what());
  }
  return report;
}

inline void write_report_json(const SuspiciousnessReport& report,
                              const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  out << report_to_json(report).dump(2) << '\n';
}

inline SuspiciousnessReport read_report_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return report_from_json(j);
}

inline void write_report_csv(const SuspiciousnessReport& report,
                             const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  out << "file,line,score,rank\n";
  for (const auto& r : report.ranking)
    out << r.statement.file_path << ',' << r.statement.line_number << ','
        << detail::format_real(r.score) << ',' << r.rank_index << '\n';
}

}  // namespace dkmr
