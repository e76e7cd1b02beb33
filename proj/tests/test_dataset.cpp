#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "dkmr/dataset.hpp"
#include "dkmr/synth.hpp"
#include "support/oracles.hpp"

using namespace dkmr;

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// 3 mutants / 2 tests / 6 records, all survive except two kills.
void write_small_dataset(const std::filesystem::path& dir) {
  write_file(dir / "mutants.tsv",
             "mutant_id\tfile_path\tline_number\toperator\n"
             "m1\ta.java\t5\tAOR\n"
             "m2\ta.java\t20\tROR\n"
             "m3\tb.java\t10\tLVR\n");
  write_file(dir / "tests.tsv",
             "test_id\tsuite\tname\toriginal_outcome\toriginal_error_signature\n"
             "t1\tsuiteA\talpha\tFAIL\tE1\n"
             "t2\tsuiteA\tbeta\tPASS\t\n");
  write_file(dir / "executions.tsv",
             "mutant_id\ttest_id\toutcome\terror_signature\n"
             "m1\tt1\tPASS\t\n"
             "m1\tt2\tPASS\t\n"
             "m2\tt1\tFAIL\tE1\n"
             "m2\tt2\tFAIL\tE9\n"
             "m3\tt1\tFAIL\tE1\n"
             "m3\tt2\tPASS\t\n");
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("load_dataset preserves counts and fields", "[dataset]") {
  oracle::TempDir tmp("load");
  write_small_dataset(tmp.path());
  Dataset ds = load_dataset(tmp.path());
  CHECK(ds.mutants.size() == 3);
  CHECK(ds.tests.size() == 2);
  CHECK(ds.executions.size() == 6);
  CHECK_FALSE(ds.ground_truth.has_value());
  CHECK(ds.mutants[0].mutant_id == "m1");
  CHECK(ds.mutants[0].line_number == 5);
  CHECK(ds.tests[0].original_outcome == TestOutcome::Fail);
  CHECK(ds.tests[0].original_error_signature == "E1");
  CHECK(ds.executions[3].outcome == RunOutcome::Fail);
}

TEST_CASE("load_dataset reads optional faults.tsv", "[dataset]") {
  oracle::TempDir tmp("faults");
  write_small_dataset(tmp.path());
  write_file(tmp.path() / "faults.tsv", "file_path\tline_number\na.java\t5\n");
  Dataset ds = load_dataset(tmp.path());
  REQUIRE(ds.ground_truth.has_value());
  CHECK(ds.ground_truth->faulty_statements.count(Statement{"a.java", 5}) == 1);
}

TEST_CASE("load_dataset validation errors", "[dataset]") {
  SECTION("missing file") {
    oracle::TempDir tmp("missing");
    CHECK_THROWS_AS(load_dataset(tmp.path()), MissingFileError);
  }
  SECTION("dangling mutant reference") {
    oracle::TempDir tmp("dangling");
    write_small_dataset(tmp.path());
    write_file(tmp.path() / "executions.tsv",
               "mutant_id\ttest_id\toutcome\terror_signature\n"
               "m99\tt1\tFAIL\tE2\n");
    CHECK_THROWS_AS(load_dataset(tmp.path()), DanglingReferenceError);
  }
  SECTION("duplicate mutant id") {
    oracle::TempDir tmp("dupmut");
    write_small_dataset(tmp.path());
    write_file(tmp.path() / "mutants.tsv",
               "mutant_id\tfile_path\tline_number\toperator\n"
               "m1\ta.java\t5\tAOR\n"
               "m1\ta.java\t6\tROR\n");
    CHECK_THROWS_AS(load_dataset(tmp.path()), DuplicateIdError);
  }
  SECTION("duplicate execution pair") {
    oracle::TempDir tmp("duppair");
    write_small_dataset(tmp.path());
    write_file(tmp.path() / "executions.tsv",
               "mutant_id\ttest_id\toutcome\terror_signature\n"
               "m1\tt1\tPASS\t\n"
               "m1\tt1\tFAIL\tE2\n");
    CHECK_THROWS_AS(load_dataset(tmp.path()), DuplicateIdError);
  }
  SECTION("malformed line number") {
    oracle::TempDir tmp("badline");
    write_small_dataset(tmp.path());
    write_file(tmp.path() / "mutants.tsv",
               "mutant_id\tfile_path\tline_number\toperator\n"
               "m1\ta.java\tzero\tAOR\n");
    CHECK_THROWS_AS(load_dataset(tmp.path()), MalformedRowError);
  }
  SECTION("wrong column count") {
    oracle::TempDir tmp("cols");
    write_small_dataset(tmp.path());
    write_file(tmp.path() / "tests.tsv",
               "test_id\tsuite\tname\toriginal_outcome\toriginal_error_signature\n"
               "t1\tsuiteA\talpha\tFAIL\n");
    CHECK_THROWS_AS(load_dataset(tmp.path()), MalformedRowError);
  }
  SECTION("signature on passing test") {
    oracle::TempDir tmp("sig");
    write_small_dataset(tmp.path());
    write_file(tmp.path() / "tests.tsv",
               "test_id\tsuite\tname\toriginal_outcome\toriginal_error_signature\n"
               "t1\tsuiteA\talpha\tPASS\tE1\n");
    CHECK_THROWS_AS(load_dataset(tmp.path()), MalformedRowError);
  }
  SECTION("bad header") {
    oracle::TempDir tmp("hdr");
    write_small_dataset(tmp.path());
    write_file(tmp.path() / "mutants.tsv", "id\tfile\tline\top\nm1\ta.java\t5\tAOR\n");
    CHECK_THROWS_AS(load_dataset(tmp.path()), MalformedRowError);
  }
}

TEST_CASE("order_axes sorts mutants by file then line", "[dataset]") {
  Dataset ds;
  ds.mutants = {{"mx", "b.java", 10, "AOR"}, {"my", "a.java", 5, "AOR"}, {"mz", "a.java", 20, "AOR"}};
  ds.tests = {{"t1", "s", "n", TestOutcome::Pass, ""}};
  auto order = order_axes(ds);
  CHECK(order.mutants == std::vector<std::string>{"my", "mz", "mx"});
}

TEST_CASE("order_axes groups tests by suite then name", "[dataset]") {
  Dataset ds;
  ds.mutants = {{"m1", "a.java", 1, "AOR"}};
  ds.tests = {{"t1", "suiteB", "tA", TestOutcome::Pass, ""},
              {"t2", "suiteA", "tZ", TestOutcome::Pass, ""},
              {"t3", "suiteA", "tB", TestOutcome::Pass, ""}};
  auto order = order_axes(ds);
  CHECK(order.tests == std::vector<std::string>{"t3", "t2", "t1"});
}

TEST_CASE("order_axes is an idempotent permutation", "[dataset]") {
  Scenario s = generate_scenario(ScenarioParams{.n_statements = 12, .n_failing_tests = 3,
                                                .n_passing_tests = 5},
                                 99);
  auto order = order_axes(s.dataset);
  CHECK(order.mutants.size() == s.dataset.mutants.size());
  CHECK(order.tests.size() == s.dataset.tests.size());
  // permutation: sorted id multisets match
  auto sorted_ids = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  std::vector<std::string> original;
  for (const auto& m : s.dataset.mutants) original.push_back(m.mutant_id);
  CHECK(sorted_ids(order.mutants) == sorted_ids(original));
  // idempotent: ordering the already-ordered dataset changes nothing
  Dataset reordered;
  std::map<std::string, MutantMeta> by_id;
  for (const auto& m : s.dataset.mutants) by_id[m.mutant_id] = m;
  for (const auto& id : order.mutants) reordered.mutants.push_back(by_id.at(id));
  reordered.tests = s.dataset.tests;
  CHECK(order_axes(reordered).mutants == order.mutants);
  CHECK(order_axes(reordered).tests == order.tests);
}

TEST_CASE("single mutant and test keep identity order", "[dataset]") {
  Dataset ds;
  ds.mutants = {{"only", "a.java", 1, "AOR"}};
  ds.tests = {{"t", "s", "n", TestOutcome::Pass, ""}};
  auto order = order_axes(ds);
  CHECK(order.mutants == std::vector<std::string>{"only"});
  CHECK(order.tests == std::vector<std::string>{"t"});
}

TEST_CASE("emitted datasets round-trip byte-identically", "[dataset]") {
  Scenario s = generate_scenario(ScenarioParams{.n_statements = 8, .n_failing_tests = 2,
                                                .n_passing_tests = 3},
                                 7);
  oracle::TempDir first("rt1"), second("rt2");
  save_dataset(s.dataset, first.path());
  Dataset loaded = load_dataset(first.path());
  CHECK(loaded == s.dataset);
  save_dataset(loaded, second.path());
  for (const char* name : {"mutants.tsv", "tests.tsv", "executions.tsv", "faults.tsv"})
    CHECK(slurp(first.path() / name) == slurp(second.path() / name));
}
