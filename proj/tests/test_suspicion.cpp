#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dkmr/suspicion.hpp"
#include "dkmr/synth.hpp"
#include "support/oracles.hpp"

using namespace dkmr;

namespace {

RefinedKillMatrix one_row(std::vector<double> cells, std::vector<int> fails) {
  RefinedKillMatrix m;
  m.rows = {"m1"};
  for (std::size_t j = 0; j < cells.size(); ++j) m.cols.push_back("t" + std::to_string(j));
  m.fail_vector = std::move(fails);
  m.cells = Matrix<double>(1, cells.size());
  for (std::size_t j = 0; j < cells.size(); ++j) m.cells(0, j) = cells[j];
  return m;
}

BooleanKillMatrix bool_row(std::vector<int> cells, std::vector<int> fails) {
  BooleanKillMatrix m;
  m.rows = {"m1"};
  for (std::size_t j = 0; j < cells.size(); ++j) m.cols.push_back("t" + std::to_string(j));
  m.fail_vector = std::move(fails);
  m.cells = Matrix<int>(1, cells.size());
  for (std::size_t j = 0; j < cells.size(); ++j) m.cells(0, j) = cells[j];
  return m;
}

bool rank_equal(const SuspiciousnessReport& a, const SuspiciousnessReport& b) {
  if (a.ranking.size() != b.ranking.size()) return false;
  for (std::size_t i = 0; i < a.ranking.size(); ++i)
    if (a.ranking[i].statement != b.ranking[i].statement ||
        a.ranking[i].rank_index != b.ranking[i].rank_index)
      return false;
  return true;
}

}  // namespace

TEST_CASE("fuzzy statistics accumulate the four sums", "[suspicion]") {
  auto stats = fuzzy_statistics(one_row({1.0, 0.5, 0.0}, {1, 0, 1}));
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].a_kf == Catch::Approx(1.0));
  CHECK(stats[0].a_kp == Catch::Approx(0.5));
  CHECK(stats[0].a_nf == Catch::Approx(1.0));
  CHECK(stats[0].a_np == Catch::Approx(0.5));
}

TEST_CASE("all-zero row yields pure not-killed mass", "[suspicion]") {
  auto stats = fuzzy_statistics(one_row({0, 0, 0, 0}, {1, 1, 0, 0}));
  CHECK(stats[0].a_kf == 0.0);
  CHECK(stats[0].a_kp == 0.0);
  CHECK(stats[0].a_nf == 2.0);
  CHECK(stats[0].a_np == 2.0);
}

TEST_CASE("classical statistics count kills", "[suspicion]") {
  auto stats = classical_statistics(bool_row({1, 0, 1}, {1, 0, 1}));
  CHECK(stats[0].a_kf == 2);
  CHECK(stats[0].a_kp == 0);
  CHECK(stats[0].a_nf == 0);
  CHECK(stats[0].a_np == 1);

  auto zero = classical_statistics(bool_row({0, 0, 0}, {1, 0, 1}));
  CHECK(zero[0].a_nf == 2);
  CHECK(zero[0].a_np == 1);

  auto ones = classical_statistics(bool_row({1, 1, 1}, {1, 0, 1}));
  CHECK(ones[0].a_kf == 2);
  CHECK(ones[0].a_kp == 1);
}

TEST_CASE("fuzzy and classical statistics coincide on boolean cells", "[suspicion]") {
  std::mt19937 rng(4);
  std::bernoulli_distribution bit(0.4);
  RefinedKillMatrix fuzzy;
  BooleanKillMatrix boolean;
  fuzzy.rows = boolean.rows = {"m1", "m2", "m3"};
  fuzzy.cols = boolean.cols = {"t1", "t2", "t3", "t4", "t5"};
  fuzzy.fail_vector = boolean.fail_vector = {1, 1, 0, 0, 0};
  fuzzy.cells = Matrix<double>(3, 5);
  boolean.cells = Matrix<int>(3, 5);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      int v = bit(rng) ? 1 : 0;
      boolean.cells(i, j) = v;
      fuzzy.cells(i, j) = v;
    }
  auto f = fuzzy_statistics(fuzzy);
  auto c = classical_statistics(boolean);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(f[i].a_kf == static_cast<double>(c[i].a_kf));
    CHECK(f[i].a_kp == static_cast<double>(c[i].a_kp));
    CHECK(f[i].a_nf == static_cast<double>(c[i].a_nf));
    CHECK(f[i].a_np == static_cast<double>(c[i].a_np));
  }
}

TEST_CASE("marginal sums are conserved", "[suspicion]") {
  Scenario s = generate_scenario({}, 21);
  auto refined = refine(build_enhanced_matrix(s.dataset), {});
  int fails = 0, passes = 0;
  for (int f : refined.fail_vector) (f ? fails : passes)++;
  for (const auto& st : fuzzy_statistics(refined)) {
    CHECK(st.a_kf + st.a_nf == Catch::Approx(fails).margin(1e-9));
    CHECK(st.a_kp + st.a_np == Catch::Approx(passes).margin(1e-9));
    CHECK(st.a_kf >= 0.0);
    CHECK(st.a_np >= 0.0);
  }
}

TEST_CASE("formula hand values", "[suspicion]") {
  SECTION("fuzzy ochiai") {
    FuzzyKillStats s{1.0, 0.5, 1.0, 7.0};
    double expected = 1.0 / std::sqrt((1.0 + 1.0) * (1.0 + 0.5));
    CHECK(mutant_suspiciousness(s, {Formula::Ochiai}) == Catch::Approx(expected).margin(1e-12));
    CHECK(mutant_suspiciousness(s, {Formula::Ochiai}) == Catch::Approx(0.57735).margin(1e-5));
  }
  SECTION("gp13") {
    KillStats s{3, 1, 0, 2};
    CHECK(mutant_suspiciousness(s, {Formula::Gp13}) == 3.75);
  }
  SECTION("jaccard") {
    KillStats s{2, 1, 1, 4};
    CHECK(mutant_suspiciousness(s, {Formula::Jaccard}) == Catch::Approx(2.0 / 4.0));
  }
  SECTION("tarantula") {
    KillStats s{2, 1, 1, 3};
    // (2/3) / (2/3 + 1/4) = 8/11
    CHECK(mutant_suspiciousness(s, {Formula::Tarantula}) == Catch::Approx(8.0 / 11.0));
  }
  SECTION("op2") {
    KillStats s{2, 1, 1, 3};
    CHECK(mutant_suspiciousness(s, {Formula::Op2}) == Catch::Approx(2.0 - 1.0 / 5.0));
  }
  SECTION("dstar with default and custom exponent") {
    KillStats s{3, 1, 1, 3};
    CHECK(mutant_suspiciousness(s, {Formula::Dstar, 2}) == Catch::Approx(9.0 / 2.0));
    CHECK(mutant_suspiciousness(s, {Formula::Dstar, 3}) == Catch::Approx(27.0 / 2.0));
  }
}

TEST_CASE("zero numerator and zero denominator conventions", "[suspicion]") {
  // a_kf = 0 with well-defined denominators
  KillStats s{0, 2, 3, 5};
  CHECK(mutant_suspiciousness(s, {Formula::Jaccard}) == 0.0);
  CHECK(mutant_suspiciousness(s, {Formula::Ochiai}) == 0.0);
  CHECK(mutant_suspiciousness(s, {Formula::Dstar}) == 0.0);
  CHECK(mutant_suspiciousness(s, {Formula::Tarantula}) == 0.0);
  CHECK(mutant_suspiciousness(s, {Formula::Gp13}) == 0.0);
  CHECK(mutant_suspiciousness(s, {Formula::Op2}) == Catch::Approx(-2.0 / 8.0));

  // degenerate denominators evaluate those fractions to zero
  KillStats no_tests{0, 0, 0, 0};
  for (Formula f : kAllFormulas) CHECK(mutant_suspiciousness(no_tests, {f}) == 0.0);

  // no passing tests: tarantula's passing ratio vanishes, the rest is 1
  KillStats no_pass{2, 0, 1, 0};
  CHECK(mutant_suspiciousness(no_pass, {Formula::Tarantula}) == 1.0);

  // dstar's denominator a_kp + a_nf = 0 contributes 0 even with kills
  KillStats perfect{3, 0, 0, 5};
  CHECK(mutant_suspiciousness(perfect, {Formula::Dstar}) == 0.0);
}

TEST_CASE("statement suspiciousness takes the max over mutants", "[suspicion]") {
  std::vector<MutantMeta> mutants = {{"m1", "f.java", 1, "AOR"},
                                     {"m2", "f.java", 1, "ROR"},
                                     {"m3", "f.java", 2, "AOR"}};
  std::map<std::string, double> scores{{"m1", 0.2}, {"m2", 0.9}, {"m3", 0.5}};
  auto st = statement_suspiciousness(scores, mutants);
  REQUIRE(st.size() == 2);
  CHECK(st.at(Statement{"f.java", 1}) == 0.9);
  CHECK(st.at(Statement{"f.java", 2}) == 0.5);

  // adding a mutant never lowers a statement's score
  mutants.push_back({"m4", "f.java", 1, "LVR"});
  scores["m4"] = 0.1;
  auto st2 = statement_suspiciousness(scores, mutants);
  CHECK(st2.at(Statement{"f.java", 1}) == 0.9);

  scores["m4"] = 0.95;
  auto st3 = statement_suspiciousness(scores, mutants);
  CHECK(st3.at(Statement{"f.java", 1}) == 0.95);
}

TEST_CASE("rank_statements breaks ties by file and line", "[suspicion]") {
  std::map<Statement, double> scores{{{"a.java", 9}, 0.9}, {{"a.java", 5}, 0.9},
                                     {{"b.java", 1}, 0.1}};
  auto report = rank_statements(scores, {Formula::Ochiai}, Variant::Metallaxis);
  REQUIRE(report.ranking.size() == 3);
  CHECK(report.ranking[0].statement == Statement{"a.java", 5});
  CHECK(report.ranking[1].statement == Statement{"a.java", 9});
  CHECK(report.ranking[2].statement == Statement{"b.java", 1});
  CHECK(report.ranking[0].rank_index == 1);
  CHECK(report.ranking[2].rank_index == 3);
}

TEST_CASE("rank_statements edge cases", "[suspicion]") {
  CHECK_THROWS_AS(rank_statements({}, {Formula::Ochiai}, Variant::Full), EmptyScoresError);

  auto single = rank_statements({{Statement{"a.java", 1}, 0.5}}, {Formula::Ochiai}, Variant::Full);
  CHECK(single.ranking.size() == 1);
  CHECK(single.ranking[0].rank_index == 1);

  std::map<Statement, double> equal{{{"z.java", 2}, 0.4}, {{"a.java", 7}, 0.4},
                                    {{"a.java", 3}, 0.4}};
  auto report = rank_statements(equal, {Formula::Ochiai}, Variant::Full);
  CHECK(report.ranking[0].statement == Statement{"a.java", 3});
  CHECK(report.ranking[1].statement == Statement{"a.java", 7});
  CHECK(report.ranking[2].statement == Statement{"z.java", 2});
}

TEST_CASE("ranking is invariant under positive affine transforms", "[suspicion]") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::map<Statement, double> scores;
  for (int i = 1; i <= 25; ++i) scores[{"f.java", i}] = dist(rng);
  auto base = rank_statements(scores, {Formula::Ochiai}, Variant::Full);
  std::map<Statement, double> scaled;
  for (const auto& [st, v] : scores) scaled[st] = 3.5 * v + 2.0;
  auto transformed = rank_statements(scaled, {Formula::Ochiai}, Variant::Full);
  CHECK(rank_equal(base, transformed));
}

TEST_CASE("metallaxis equals denoise-only at full passband", "[suspicion]") {
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    Scenario s = generate_scenario(ScenarioParams{.n_statements = 25, .n_failing_tests = 4,
                                                  .n_passing_tests = 9},
                                   seed);
    for (Formula f : kAllFormulas) {
      auto met = localize(s.dataset, Variant::Metallaxis, {f});
      auto den = localize(s.dataset, Variant::DenoiseOnly, {f}, {0.75, MaskKind::Ideal});
      REQUIRE(rank_equal(met, den));
    }
  }
}

TEST_CASE("zero failing tests degrade to tie-break order under ochiai", "[suspicion]") {
  Dataset ds;
  ds.mutants = {{"m1", "f.java", 3, "AOR"}, {"m2", "f.java", 1, "AOR"}, {"m3", "f.java", 2, "AOR"}};
  ds.tests = {{"t1", "s", "a", TestOutcome::Pass, ""}, {"t2", "s", "b", TestOutcome::Pass, ""}};
  ds.executions = {{"m1", "t1", RunOutcome::Fail, "x"}, {"m3", "t2", RunOutcome::Fail, "y"}};
  auto report = localize(ds, Variant::Metallaxis, {Formula::Ochiai});
  REQUIRE(report.ranking.size() == 3);
  for (const auto& r : report.ranking) CHECK(r.score == 0.0);
  CHECK(report.ranking[0].statement.line_number == 1);
  CHECK(report.ranking[1].statement.line_number == 2);
  CHECK(report.ranking[2].statement.line_number == 3);
}

TEST_CASE("localize is deterministic", "[suspicion]") {
  Scenario s = generate_scenario(ScenarioParams{.n_statements = 20, .n_failing_tests = 3,
                                                .n_passing_tests = 7},
                                 13);
  auto a = localize(s.dataset, Variant::Full, {Formula::Gp13});
  auto b = localize(s.dataset, Variant::Full, {Formula::Gp13});
  REQUIRE(a.ranking.size() == b.ranking.size());
  for (std::size_t i = 0; i < a.ranking.size(); ++i) {
    CHECK(a.ranking[i].statement == b.ranking[i].statement);
    CHECK(a.ranking[i].score == b.ranking[i].score);
  }
}

TEST_CASE("report JSON round-trips", "[suspicion]") {
  Scenario s = generate_scenario(ScenarioParams{.n_statements = 10, .n_failing_tests = 2,
                                                .n_passing_tests = 4},
                                 29);
  auto report = localize(s.dataset, Variant::Full, {Formula::Dstar, 3});
  auto back = report_from_json(report_to_json(report));
  CHECK(back.variant == report.variant);
  CHECK(back.formula.value == report.formula.value);
  CHECK(back.formula.dstar_exponent == 3);
  CHECK(back.cutoff_d0 == report.cutoff_d0);
  REQUIRE(back.ranking.size() == report.ranking.size());
  for (std::size_t i = 0; i < back.ranking.size(); ++i) {
    CHECK(back.ranking[i].statement == report.ranking[i].statement);
    CHECK(back.ranking[i].score == report.ranking[i].score);
    CHECK(back.ranking[i].rank_index == report.ranking[i].rank_index);
  }
}
