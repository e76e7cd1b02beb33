#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dkmr/error.hpp"
#include "dkmr/suspicion.hpp"

// Localization effectiveness metrics (Top-N, average precision, EXAM with
// average-rank tie handling) and the statistical machinery used to compare
// techniques across many fault versions (Wilcoxon signed-rank, Cliff's
// delta).

namespace dkmr {

struct VersionResult {
  SuspiciousnessReport report;
  GroundTruth ground_truth;
  int candidate_count = 0;  // = report.ranking.size()
  std::string version_label;
};

inline VersionResult make_version_result(SuspiciousnessReport report, GroundTruth ground_truth,
                                         std::string version_label = {}) {
  if (ground_truth.faulty_statements.empty())
    throw ValidationError("ground truth must be non-empty for evaluation");
  VersionResult r{std::move(report), std::move(ground_truth), 0, std::move(version_label)};
  r.candidate_count = static_cast<int>(r.report.ranking.size());
  return r;
}

struct VersionDetail {
  std::string version;
  std::optional<int> best_rank;  // best rank of any faulty statement, if ranked
  double ap = 0;
  double exam = 1.0;
};

struct EvaluationReport {
  int top1 = 0, top3 = 0, top5 = 0;
  double map_value = 0;
  std::vector<double> exam_scores;
  std::vector<VersionDetail> details;
};

enum class Alternative { TwoSided, Less, Greater };
enum class EffectMagnitude { Negligible, Small, Medium, Large };

struct StatTestResult {
  double p_two_sided = 1, p_less = 1, p_greater = 1;
  double cliffs_delta = 0;
  EffectMagnitude magnitude = EffectMagnitude::Negligible;
};

inline std::string to_string(EffectMagnitude m) {
  switch (m) {
    case EffectMagnitude::Negligible: return "negligible";
    case EffectMagnitude::Small: return "small";
    case EffectMagnitude::Medium: return "medium";
    case EffectMagnitude::Large: return "large";
  }
  return "negligible";
}

// --- per-version metrics -----------------------------------------------------

inline bool is_faulty(const VersionResult& r, const Statement& s) {
  return r.ground_truth.faulty_statements.count(s) != 0;
}

// True iff any faulty statement appears within the first n ranks. Faults the
// report never ranked cannot count.
inline bool top_n(const VersionResult& result, int n) {
  for (const auto& entry : result.report.ranking) {
    if (entry.rank_index > n) break;
    if (is_faulty(result, entry.statement)) return true;
  }
  return false;
}

// AP = sum_i P(i) * pos(i) / |faulty statements| with P(i) the precision at
// rank i. Faulty statements absent from the ranking contribute nothing.
inline double average_precision(const VersionResult& result) {
  if (result.ground_truth.faulty_statements.empty())
    throw ValidationError("ground truth must be non-empty for evaluation");
  double sum = 0;
  int faulty_seen = 0;
  for (const auto& entry : result.report.ranking) {
    if (is_faulty(result, entry.statement)) {
      ++faulty_seen;
      sum += static_cast<double>(faulty_seen) / static_cast<double>(entry.rank_index);
    }
  }
  return sum / static_cast<double>(result.ground_truth.faulty_statements.size());
}

// EXAM = rank / candidate_count for the best-ranked faulty statement, where
// rank = ((m+1) + (m+n)) / 2, m the number of statements scoring strictly
// higher and n the size of its score tie group (fault included). A fault
// missing from the report costs the full report: EXAM = 1.
inline double exam_score(const VersionResult& result) {
  if (result.ground_truth.faulty_statements.empty())
    throw ValidationError("ground truth must be non-empty for evaluation");
  const RankedStatement* best = nullptr;
  for (const auto& entry : result.report.ranking) {
    if (is_faulty(result, entry.statement)) {
      best = &entry;
      break;
    }
  }
  if (best == nullptr) return 1.0;
  std::size_t higher = 0, tied = 0;
  for (const auto& entry : result.report.ranking) {
    if (entry.score > best->score)
      ++higher;
    else if (entry.score == best->score)
      ++tied;
  }
  double rank = (static_cast<double>(higher + 1) + static_cast<double>(higher + tied)) / 2.0;
  return rank / static_cast<double>(result.candidate_count);
}

// --- Wilcoxon signed-rank ------------------------------------------------------

enum class WilcoxonMethod { Auto, Exact, Normal };

struct WilcoxonDetail {
  double p = 1;
  std::size_t n_effective = 0;
  std::size_t n_dropped = 0;  // zero differences discarded before ranking
  bool used_exact = false;
};

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Ranks of |d| with average ranks for ties, scaled by 2 so they stay
// integers, plus the tie-correction term sum(t^3 - t).
struct SignedRanks {
  std::vector<std::uint64_t> doubled_ranks;  // aligned with diffs
  double tie_correction = 0;
};

inline SignedRanks rank_absolute(const std::vector<double>& diffs) {
  std::size_t n = diffs.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(diffs[a]) < std::abs(diffs[b]);
  });
  SignedRanks out;
  out.doubled_ranks.assign(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(diffs[idx[j + 1]]) == std::abs(diffs[idx[i]])) ++j;
    // positions i..j (0-based) share the average rank ((i+1)+(j+1))/2
    std::uint64_t doubled = static_cast<std::uint64_t>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) out.doubled_ranks[idx[k]] = doubled;
    double t = static_cast<double>(j - i + 1);
    out.tie_correction += t * t * t - t;
    i = j + 1;
  }
  return out;
}

}  // namespace detail

// Paired signed-rank test on d_i = x_i - y_i. Zero differences are
// discarded. Exact tail probabilities by enumerating the 2^n sign
// distribution (via a rank-sum count table) when the effective n <= 25;
// a normal approximation with tie and continuity corrections otherwise.
// Alternative::Less tests median(x) < median(y).
inline WilcoxonDetail wilcoxon_signed_rank_detail(std::span<const double> xs,
                                                  std::span<const double> ys, Alternative alt,
                                                  WilcoxonMethod method = WilcoxonMethod::Auto) {
  if (xs.size() != ys.size() || xs.empty())
    throw ValidationError("signed-rank test needs paired samples of equal nonzero length");
  std::vector<double> diffs;
  diffs.reserve(xs.size());
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double d = xs[i] - ys[i];
    if (d == 0.0)
      ++dropped;
    else
      diffs.push_back(d);
  }
  if (diffs.empty()) throw AllDifferencesZeroError();

  std::size_t n = diffs.size();
  auto ranks = detail::rank_absolute(diffs);
  std::uint64_t w2_plus = 0;  // doubled W+ statistic
  for (std::size_t i = 0; i < n; ++i)
    if (diffs[i] > 0) w2_plus += ranks.doubled_ranks[i];

  WilcoxonDetail out;
  out.n_effective = n;
  out.n_dropped = dropped;

  bool exact = method == WilcoxonMethod::Exact || (method == WilcoxonMethod::Auto && n <= 25);
  double p_less, p_greater;
  if (exact) {
    out.used_exact = true;
    std::uint64_t total2 = 0;
    for (auto r : ranks.doubled_ranks) total2 += r;
    std::vector<double> counts(total2 + 1, 0.0);
    counts[0] = 1.0;
    for (auto r : ranks.doubled_ranks)
      for (std::uint64_t s = total2; s >= r; --s) counts[s] += counts[s - r];
    double denom = std::ldexp(1.0, static_cast<int>(n));  // 2^n
    double below = 0;
    for (std::uint64_t s = 0; s <= w2_plus; ++s) below += counts[s];
    double above = 0;
    for (std::uint64_t s = w2_plus; s <= total2; ++s) above += counts[s];
    p_less = below / denom;
    p_greater = above / denom;
  } else {
    double dn = static_cast<double>(n);
    double mean = dn * (dn + 1.0) / 4.0;
    double var = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - ranks.tie_correction / 48.0;
    double sd = std::sqrt(std::max(var, 0.0));
    if (sd == 0.0) throw AllDifferencesZeroError();
    double w = static_cast<double>(w2_plus) / 2.0;
    p_less = detail::normal_cdf((w + 0.5 - mean) / sd);
    p_greater = 1.0 - detail::normal_cdf((w - 0.5 - mean) / sd);
  }

  switch (alt) {
    case Alternative::Less: out.p = p_less; break;
    case Alternative::Greater: out.p = p_greater; break;
    case Alternative::TwoSided: out.p = std::min(1.0, 2.0 * std::min(p_less, p_greater)); break;
  }
  return out;
}

inline double wilcoxon_signed_rank(std::span<const double> xs, std::span<const double> ys,
                                   Alternative alt) {
  return wilcoxon_signed_rank_detail(xs, ys, alt).p;
}

// --- Cliff's delta -------------------------------------------------------------

struct CliffsDeltaResult {
  double delta = 0;
  EffectMagnitude magnitude = EffectMagnitude::Negligible;
};

inline EffectMagnitude effect_magnitude(double delta) {
  double a = std::abs(delta);
  if (a >= 0.474) return EffectMagnitude::Large;
  if (a >= 0.33) return EffectMagnitude::Medium;
  if (a >= 0.147) return EffectMagnitude::Small;
  return EffectMagnitude::Negligible;
}

// delta = (#{x>y} - #{x<y}) / (|xs|*|ys|). The O(mn) pair count is the
// defining semantics, and at ensemble scale it is plenty fast.
inline CliffsDeltaResult cliffs_delta(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw ValidationError("cliffs_delta needs non-empty samples");
  long long net = 0;
  for (double x : xs)
    for (double y : ys) {
      if (x > y)
        ++net;
      else if (x < y)
        --net;
    }
  CliffsDeltaResult r;
  r.delta = static_cast<double>(net) / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
  r.magnitude = effect_magnitude(r.delta);
  return r;
}

// All three signed-rank forms plus the effect size for one comparison.
inline StatTestResult compare_samples(std::span<const double> xs, std::span<const double> ys) {
  StatTestResult r;
  r.p_two_sided = wilcoxon_signed_rank(xs, ys, Alternative::TwoSided);
  r.p_less = wilcoxon_signed_rank(xs, ys, Alternative::Less);
  r.p_greater = wilcoxon_signed_rank(xs, ys, Alternative::Greater);
  auto cd = cliffs_delta(xs, ys);
  r.cliffs_delta = cd.delta;
  r.magnitude = cd.magnitude;
  return r;
}

// --- aggregation ----------------------------------------------------------------

inline EvaluationReport evaluate(std::span<const VersionResult> results) {
  if (results.empty()) throw ValidationError("evaluate needs at least one version result");
  EvaluationReport report;
  double ap_sum = 0;
  for (const auto& result : results) {
    if (top_n(result, 1)) ++report.top1;
    if (top_n(result, 3)) ++report.top3;
    if (top_n(result, 5)) ++report.top5;
    double ap = average_precision(result);
    double exam = exam_score(result);
    ap_sum += ap;
    report.exam_scores.push_back(exam);
    VersionDetail detail;
    detail.version = result.version_label;
    detail.ap = ap;
    detail.exam = exam;
    for (const auto& entry : result.report.ranking) {
      if (is_faulty(result, entry.statement)) {
        detail.best_rank = entry.rank_index;
        break;
      }
    }
    report.details.push_back(std::move(detail));
  }
  report.map_value = ap_sum / static_cast<double>(results.size());
  return report;
}

inline nlohmann::json evaluation_to_json(const EvaluationReport& report) {
  nlohmann::json details = nlohmann::json::array();
  for (const auto& d : report.details) {
    nlohmann::json row{{"version", d.version}, {"ap", d.ap}, {"exam", d.exam}};
    if (d.best_rank)
      row["best_rank"] = *d.best_rank;
    else
      row["best_rank"] = nullptr;
    details.push_back(std::move(row));
  }
  return nlohmann::json{{"top1", report.top1},     {"top3", report.top3},
                        {"top5", report.top5},     {"map", report.map_value},
                        {"exam_scores", report.exam_scores}, {"details", std::move(details)}};
}

// Cumulative EXAM distribution: fraction of faults localized within each
// observed examination effort, for external plotting.
inline void write_exam_curve_csv(std::span<const double> exam_scores,
                                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  out << "exam_threshold,fraction_of_faults_localized\n";
  std::vector<double> sorted(exam_scores.begin(), exam_scores.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t total = sorted.size();
  std::size_t i = 0;
  while (i < total) {
    std::size_t j = i;
    while (j + 1 < total && sorted[j + 1] == sorted[i]) ++j;
    out << detail::format_real(sorted[i]) << ','
        << detail::format_real(static_cast<double>(j + 1) / static_cast<double>(total)) << '\n';
    i = j + 1;
  }
}

}  // namespace dkmr
