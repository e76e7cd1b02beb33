#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "dkmr/enhance.hpp"
#include "dkmr/synth.hpp"
#include "support/oracles.hpp"

using namespace dkmr;

namespace {

TestMeta passing_test() { return {"t", "s", "n", TestOutcome::Pass, ""}; }
TestMeta failing_test(std::string sig = "E1") {
  return {"t", "s", "n", TestOutcome::Fail, std::move(sig)};
}

ExecutionRecord record(RunOutcome outcome, std::string sig = "") {
  return {"m", "t", outcome, std::move(sig)};
}

// Two mutants, two tests; m1 strongly kills t1 and weakly kills t2, m2 has
// no records at all.
Dataset two_mutant_dataset() {
  Dataset ds;
  ds.mutants = {{"m1", "a.java", 1, "AOR"}, {"m2", "a.java", 2, "ROR"}};
  ds.tests = {{"t1", "s", "a", TestOutcome::Fail, "E1"}, {"t2", "s", "b", TestOutcome::Pass, ""}};
  ds.executions = {{"m1", "t1", RunOutcome::Pass, ""}, {"m1", "t2", RunOutcome::Pass, "Wxyz"}};
  return ds;
}

}  // namespace

TEST_CASE("classify_kill applies the strong and weak definitions", "[enhance]") {
  auto fail = failing_test();
  auto pass = passing_test();

  SECTION("outcome flip is a strong kill") {
    auto r = record(RunOutcome::Fail, "E2");
    CHECK(classify_kill(&r, pass) == KillClass::Strong);
    auto r2 = record(RunOutcome::Pass);
    CHECK(classify_kill(&r2, fail) == KillClass::Strong);
  }
  SECTION("same outcome, different signature is a weak kill") {
    auto r = record(RunOutcome::Fail, "E2");
    CHECK(classify_kill(&r, fail) == KillClass::Weak);
    auto r2 = record(RunOutcome::Pass, "W123");
    CHECK(classify_kill(&r2, pass) == KillClass::Weak);
  }
  SECTION("identical run survives") {
    auto r = record(RunOutcome::Pass);
    CHECK(classify_kill(&r, pass) == KillClass::Survive);
    auto r2 = record(RunOutcome::Fail, "E1");
    CHECK(classify_kill(&r2, fail) == KillClass::Survive);
  }
  SECTION("absent record survives") {
    CHECK(classify_kill(nullptr, pass) == KillClass::Survive);
    CHECK(classify_kill(nullptr, fail) == KillClass::Survive);
  }
  SECTION("timeout and crash normalize to FAIL with fixed signatures") {
    auto r = record(RunOutcome::Timeout);
    CHECK(classify_kill(&r, pass) == KillClass::Strong);
    // original already fails: equal outcome, signature TIMEOUT vs E1 -> weak
    CHECK(classify_kill(&r, fail) == KillClass::Weak);
    auto crash = record(RunOutcome::Crash);
    CHECK(classify_kill(&crash, failing_test("CRASH")) == KillClass::Survive);
  }
}

TEST_CASE("build_enhanced_matrix lays out cells on ordered axes", "[enhance]") {
  Dataset ds = two_mutant_dataset();
  EnhancedKillMatrix m = build_enhanced_matrix(ds);
  REQUIRE(m.rows == std::vector<std::string>{"m1", "m2"});
  REQUIRE(m.cols == std::vector<std::string>{"t1", "t2"});
  CHECK(m.cells(0, 0) == 2);
  CHECK(m.cells(0, 1) == 1);
  CHECK(m.cells(1, 0) == 0);
  CHECK(m.cells(1, 1) == 0);
  CHECK(m.fail_vector == std::vector<int>{1, 0});
}

TEST_CASE("weak matrix thresholds the enhanced matrix", "[enhance]") {
  Dataset ds = two_mutant_dataset();
  BooleanKillMatrix weak = build_weak_matrix(ds);
  EnhancedKillMatrix enhanced = build_enhanced_matrix(ds);
  REQUIRE(weak.rows == enhanced.rows);
  for (std::size_t i = 0; i < weak.rows.size(); ++i)
    for (std::size_t j = 0; j < weak.cols.size(); ++j)
      CHECK(weak.cells(i, j) == (enhanced.cells(i, j) >= 1 ? 1 : 0));
}

TEST_CASE("all-survive dataset gives the zero matrix", "[enhance]") {
  Dataset ds = two_mutant_dataset();
  ds.executions.clear();
  BooleanKillMatrix m = build_weak_matrix(ds);
  CHECK(std::all_of(m.cells.cells().begin(), m.cells.cells().end(),
                    [](int v) { return v == 0; }));
}

TEST_CASE("all-strong dataset gives the all-2 matrix", "[enhance]") {
  Dataset ds = two_mutant_dataset();
  ds.executions = {{"m1", "t1", RunOutcome::Pass, ""},
                   {"m1", "t2", RunOutcome::Fail, "boom"},
                   {"m2", "t1", RunOutcome::Pass, ""},
                   {"m2", "t2", RunOutcome::Timeout, ""}};
  EnhancedKillMatrix m = build_enhanced_matrix(ds);
  CHECK(std::all_of(m.cells.cells().begin(), m.cells.cells().end(),
                    [](int v) { return v == 2; }));
}

TEST_CASE("record order does not change any cell", "[enhance]") {
  Scenario s = generate_scenario(ScenarioParams{.n_statements = 15, .n_failing_tests = 4,
                                                .n_passing_tests = 6},
                                 3);
  EnhancedKillMatrix before = build_enhanced_matrix(s.dataset);
  std::mt19937 rng(5);
  std::shuffle(s.dataset.executions.begin(), s.dataset.executions.end(), rng);
  EnhancedKillMatrix after = build_enhanced_matrix(s.dataset);
  CHECK(before == after);
}

TEST_CASE("strong implies weak on generated data", "[enhance]") {
  Scenario s = generate_scenario({}, 11);
  BooleanKillMatrix weak = build_weak_matrix(s.dataset);
  EnhancedKillMatrix enhanced = build_enhanced_matrix(s.dataset);
  for (std::size_t i = 0; i < weak.rows.size(); ++i)
    for (std::size_t j = 0; j < weak.cols.size(); ++j)
      REQUIRE((enhanced.cells(i, j) >= 1) == (weak.cells(i, j) == 1));
}

TEST_CASE("matrix dump round-trips through TSV", "[enhance]") {
  Dataset ds = two_mutant_dataset();
  EnhancedKillMatrix m = build_enhanced_matrix(ds);
  oracle::TempDir tmp("dump");
  auto path = tmp.path() / "enhanced.tsv";
  write_matrix_tsv(m, path);
  MatrixDump dump = read_matrix_tsv(path);
  CHECK(dump.rows == m.rows);
  CHECK(dump.cols == m.cols);
  for (std::size_t i = 0; i < m.rows.size(); ++i)
    for (std::size_t j = 0; j < m.cols.size(); ++j)
      CHECK(dump.cells(i, j) == static_cast<double>(m.cells(i, j)));
}
