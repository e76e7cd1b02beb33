#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dkmr/dataset.hpp"
#include "dkmr/error.hpp"

// Seeded generator of synthetic fault scenarios: coherent low-frequency
// fault patterns (correlated kills around faulty lines, contiguous failing
// test columns) plus high-frequency noise (independent bit flips, incidental
// kills). Regenerating from the same (params, seed) is bit-identical.

namespace dkmr {

struct ScenarioParams {
  int n_statements = 100;
  int mutants_per_statement = 3;
  int n_failing_tests = 5;
  int n_passing_tests = 45;
  int n_faulty_statements = 1;
  double p_detect = 0.9;   // failing test weak-kills a fault-statement mutant
  double p_couple = 0.05;  // failing test weak-kills an unrelated mutant
  double p_flip = 0.10;    // independent bit-flip noise on failing-test cells
  // Upgrade rate from weak to strong kill. Flipping a failing test's outcome
  // means masking the fault, so on failing tests the rate holds at the fault
  // and falls off with the detection profile; breaking a passing test is easy
  // anywhere, so there the rate applies uniformly.
  double p_strong_given_weak = 0.7;
  double p_pass_kill = 0.02;  // passing test weak-kills any mutant
  int locality_span = 2;      // statements within span of a fault share correlated rows

  friend bool operator==(const ScenarioParams&, const ScenarioParams&) = default;
};

struct Scenario {
  Dataset dataset;
  std::uint64_t seed = 0;
  ScenarioParams params;
};

inline void validate(const ScenarioParams& p) {
  auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (p.n_statements < 2) throw InvalidParamsError("n_statements must be >= 2");
  if (p.mutants_per_statement < 1) throw InvalidParamsError("mutants_per_statement must be >= 1");
  if (p.n_failing_tests < 1) throw InvalidParamsError("n_failing_tests must be >= 1");
  if (p.n_passing_tests < 1) throw InvalidParamsError("n_passing_tests must be >= 1");
  if (p.n_faulty_statements < 1 || p.n_faulty_statements >= p.n_statements)
    throw InvalidParamsError("n_faulty_statements must be in [1, n_statements)");
  if (!prob(p.p_detect) || !prob(p.p_couple) || !prob(p.p_flip) ||
      !prob(p.p_strong_given_weak) || !prob(p.p_pass_kill))
    throw InvalidParamsError("probabilities must lie in [0, 1]");
  if (p.locality_span < 0) throw InvalidParamsError("locality_span must be >= 0");
}

namespace detail {

// mt19937_64 has a standardized output sequence; the double and bounded-int
// conversions below avoid std::distributions, whose streams differ across
// standard libraries. Everything here is reproducible bit-for-bit.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double next_double() {  // [0, 1), 53 random bits
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_double() < p; }

  std::uint64_t below(std::uint64_t n) {  // uniform in [0, n), rejection sampled
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  std::string hex8() {
    static const char digits[] = "0123456789abcdef";
    std::uint64_t v = engine_();
    std::string s(8, '0');
    for (int i = 0; i < 8; ++i) s[i] = digits[(v >> (4 * i)) & 0xF];
    return s;
  }

 private:
  std::mt19937_64 engine_;
};

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string params_digest_string(const ScenarioParams& p) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "v1|%d|%d|%d|%d|%d|%.17g|%.17g|%.17g|%.17g|%.17g|%d",
                p.n_statements, p.mutants_per_statement, p.n_failing_tests, p.n_passing_tests,
                p.n_faulty_statements, p.p_detect, p.p_couple, p.p_flip, p.p_strong_given_weak,
                p.p_pass_kill, p.locality_span);
  return buf;
}

inline std::string pad_int(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace detail

inline Scenario generate_scenario(const ScenarioParams& params, std::uint64_t seed) {
  validate(params);
  std::uint64_t digest = detail::fnv1a64(detail::params_digest_string(params) + ":" +
                                         std::to_string(seed));
  detail::SynthRng rng(digest);

  Scenario scenario;
  scenario.seed = seed;
  scenario.params = params;
  Dataset& ds = scenario.dataset;

  // One synthetic source file; statement i lives on line i, so line-number
  // ordering is meaningful for the mutant axis.
  const std::string file = "synthetic.src";
  static const char* kOperators[] = {"AOR", "ROR", "ORU", "LVR", "STD"};
  for (int line = 1; line <= params.n_statements; ++line) {
    for (int k = 1; k <= params.mutants_per_statement; ++k) {
      MutantMeta m;
      m.mutant_id = "m" + detail::pad_int(line, 6) + "_" + std::to_string(k);
      m.file_path = file;
      m.line_number = line;
      m.operator_name = kOperators[(line + k) % 5];
      ds.mutants.push_back(std::move(m));
    }
  }

  // Suite "failing" sorts before "passing", keeping failing-test columns
  // contiguous at the left edge of the matrix.
  for (int i = 1; i <= params.n_failing_tests; ++i) {
    TestMeta t;
    t.test_id = "tf" + detail::pad_int(i, 4);
    t.suite = "failing";
    t.name = "t" + detail::pad_int(i, 4);
    t.original_outcome = TestOutcome::Fail;
    t.original_error_signature = "E" + rng.hex8();
    ds.tests.push_back(std::move(t));
  }
  for (int i = 1; i <= params.n_passing_tests; ++i) {
    TestMeta t;
    t.test_id = "tp" + detail::pad_int(i, 4);
    t.suite = "passing";
    t.name = "t" + detail::pad_int(i, 4);
    t.original_outcome = TestOutcome::Pass;
    ds.tests.push_back(std::move(t));
  }

  // Faulty statements: distinct lines via partial Fisher-Yates.
  std::vector<int> lines(params.n_statements);
  for (int i = 0; i < params.n_statements; ++i) lines[i] = i + 1;
  GroundTruth gt;
  for (int i = 0; i < params.n_faulty_statements; ++i) {
    std::uint64_t j = i + rng.below(lines.size() - i);
    std::swap(lines[i], lines[j]);
    gt.faulty_statements.insert(Statement{file, lines[i]});
  }
  ds.ground_truth = gt;

  // Detection probability by distance to the nearest faulty line: p_detect
  // at the fault, falling off linearly to p_couple at distance locality_span.
  auto detect_prob = [&](int line) {
    int d = params.n_statements;
    for (const auto& s : gt.faulty_statements) d = std::min(d, std::abs(line - s.line_number));
    if (d == 0) return params.p_detect;
    if (d >= params.locality_span) return params.p_couple;
    double frac = static_cast<double>(d) / static_cast<double>(params.locality_span);
    return params.p_detect + (params.p_couple - params.p_detect) * frac;
  };

  int n_tests = params.n_failing_tests + params.n_passing_tests;
  std::vector<std::uint8_t> weak(static_cast<std::size_t>(ds.mutants.size()) * n_tests, 0);
  std::vector<std::uint8_t> strong(weak.size(), 0);
  auto cell = [&](std::size_t mi, int tj) { return mi * n_tests + tj; };

  // Draw kills: failing-test columns first, then passing; row order matches
  // the mutant list. Strong upgrades ride on the initial weak draw, with the
  // failing-test upgrade rate attenuated by fault distance (see above).
  for (std::size_t mi = 0; mi < ds.mutants.size(); ++mi) {
    double p = detect_prob(ds.mutants[mi].line_number);
    double p_strong_fail =
        params.p_detect > 0.0 ? params.p_strong_given_weak * (p / params.p_detect)
                              : params.p_strong_given_weak;
    for (int tj = 0; tj < params.n_failing_tests; ++tj) {
      if (rng.bernoulli(p)) {
        weak[cell(mi, tj)] = 1;
        if (rng.bernoulli(p_strong_fail)) strong[cell(mi, tj)] = 1;
      }
    }
    for (int tj = params.n_failing_tests; tj < n_tests; ++tj) {
      if (rng.bernoulli(params.p_pass_kill)) {
        weak[cell(mi, tj)] = 1;
        if (rng.bernoulli(params.p_strong_given_weak)) strong[cell(mi, tj)] = 1;
      }
    }
  }

  // Post-hoc flip noise on (mutant, failing-test) weak bits. A flipped-on
  // kill is weak-only; a flipped-off kill disappears entirely.
  for (std::size_t mi = 0; mi < ds.mutants.size(); ++mi) {
    for (int tj = 0; tj < params.n_failing_tests; ++tj) {
      if (rng.bernoulli(params.p_flip)) {
        std::size_t c = cell(mi, tj);
        weak[c] ^= 1;
        if (!weak[c]) strong[c] = 0;
      }
    }
  }

  // Emit sparse execution records: only kills; absent pairs mean survive.
  // Weak-only kills keep the original outcome but carry a fresh signature;
  // strong kills flip the outcome.
  for (std::size_t mi = 0; mi < ds.mutants.size(); ++mi) {
    for (int tj = 0; tj < n_tests; ++tj) {
      std::size_t c = cell(mi, tj);
      if (!weak[c]) continue;
      const TestMeta& t = ds.tests[tj];
      ExecutionRecord r;
      r.mutant_id = ds.mutants[mi].mutant_id;
      r.test_id = t.test_id;
      if (strong[c]) {
        if (t.original_outcome == TestOutcome::Fail) {
          r.outcome = RunOutcome::Pass;
        } else {
          r.outcome = RunOutcome::Fail;
          r.error_signature = "S" + rng.hex8();
        }
      } else {
        r.outcome = t.original_outcome == TestOutcome::Fail ? RunOutcome::Fail : RunOutcome::Pass;
        r.error_signature = "W" + rng.hex8();
      }
      ds.executions.push_back(std::move(r));
    }
  }

  return scenario;
}

inline std::vector<Scenario> generate_ensemble(const ScenarioParams& params,
                                               std::uint64_t base_seed, int count) {
  if (count < 1) throw InvalidParamsError("ensemble count must be >= 1");
  validate(params);
  std::vector<Scenario> scenarios;
  scenarios.reserve(count);
  for (int i = 0; i < count; ++i)
    scenarios.push_back(generate_scenario(params, base_seed + static_cast<std::uint64_t>(i)));
  return scenarios;
}

inline nlohmann::json params_to_json(const ScenarioParams& p) {
  return nlohmann::json{{"n_statements", p.n_statements},
                        {"mutants_per_statement", p.mutants_per_statement},
                        {"n_failing_tests", p.n_failing_tests},
                        {"n_passing_tests", p.n_passing_tests},
                        {"n_faulty_statements", p.n_faulty_statements},
                        {"p_detect", p.p_detect},
                        {"p_couple", p.p_couple},
                        {"p_flip", p.p_flip},
                        {"p_strong_given_weak", p.p_strong_given_weak},
                        {"p_pass_kill", p.p_pass_kill},
                        {"locality_span", p.locality_span}};
}

inline ScenarioParams params_from_json(const nlohmann::json& j) {
  ScenarioParams p;
  try {
    p.n_statements = j.at("n_statements");
    p.mutants_per_statement = j.at("mutants_per_statement");
    p.n_failing_tests = j.at("n_failing_tests");
    p.n_passing_tests = j.at("n_passing_tests");
    p.n_faulty_statements = j.at("n_faulty_statements");
    p.p_detect = j.at("p_detect");
    p.p_couple = j.at("p_couple");
    p.p_flip = j.at("p_flip");
    p.p_strong_given_weak = j.at("p_strong_given_weak");
    p.p_pass_kill = j.at("p_pass_kill");
    p.locality_span = j.at("locality_span");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed params JSON: ") + e.what());
  }
  return p;
}

// Writes one scenario as a loadable dataset directory plus params.json.
inline void save_scenario(const Scenario& scenario, const std::filesystem::path& directory) {
  save_dataset(scenario.dataset, directory);
  nlohmann::json j = params_to_json(scenario.params);
  j["seed"] = scenario.seed;
  std::ofstream out(directory / "params.json", std::ios::binary);
  if (!out)
    throw ValidationError("cannot open for writing: " + (directory / "params.json").string());
  out << j.dump(2) << '\n';
}

}  // namespace dkmr
