#pragma once

#include <algorithm>
#include <charconv>
#include <compare>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dkmr/error.hpp"

// Domain model and ingestion for mutants, tests, execution records and
// ground-truth faults. Datasets live on disk as a directory of TSV files
// (header row, UTF-8, LF):
//
//   mutants.tsv     mutant_id  file_path  line_number  operator
//   tests.tsv       test_id  suite  name  original_outcome  original_error_signature
//   executions.tsv  mutant_id  test_id  outcome  error_signature
//   faults.tsv      file_path  line_number            (optional)
//
// A missing (mutant, test) execution record means the run was identical to
// the original program, i.e. the mutant survived that test.

namespace dkmr {

enum class TestOutcome { Pass, Fail };
enum class RunOutcome { Pass, Fail, Timeout, Crash };

struct MutantMeta {
  std::string mutant_id;
  std::string file_path;
  int line_number = 1;
  std::string operator_name;

  friend bool operator==(const MutantMeta&, const MutantMeta&) = default;
};

struct TestMeta {
  std::string test_id;
  std::string suite;
  std::string name;
  TestOutcome original_outcome = TestOutcome::Pass;
  std::string original_error_signature;  // empty unless original_outcome == Fail

  friend bool operator==(const TestMeta&, const TestMeta&) = default;
};

struct ExecutionRecord {
  std::string mutant_id;
  std::string test_id;
  RunOutcome outcome = RunOutcome::Pass;
  std::string error_signature;

  friend bool operator==(const ExecutionRecord&, const ExecutionRecord&) = default;
};

// Statement identity is the pair (file, line); mutants map to statements
// through their metadata.
struct Statement {
  std::string file_path;
  int line_number = 1;

  friend auto operator<=>(const Statement&, const Statement&) = default;
};

struct GroundTruth {
  std::set<Statement> faulty_statements;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct Dataset {
  std::vector<MutantMeta> mutants;
  std::vector<TestMeta> tests;
  std::vector<ExecutionRecord> executions;
  std::optional<GroundTruth> ground_truth;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct AxisOrder {
  std::vector<std::string> mutants;
  std::vector<std::string> tests;
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

inline int parse_positive_int(std::string_view field, const std::string& path, std::size_t line,
                              const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || value < 1)
    throw MalformedRowError(path, line, std::string(what) + " must be a positive integer, got '" +
                                            std::string(field) + "'");
  return value;
}

// Reads a whole TSV file and validates the header. Returns data rows paired
// with their 1-based line numbers. Tolerates a trailing '\r' per line and a
// final newline; interior blank lines are malformed.
class TsvFile {
 public:
  TsvFile(const std::filesystem::path& path, const std::vector<std::string>& header) {
    path_ = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFileError(path_);
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    std::vector<std::pair<std::size_t, std::string>> pending;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!saw_header) {
        auto fields = split_tabs(line);
        bool ok = fields.size() == header.size();
        for (std::size_t i = 0; ok && i < fields.size(); ++i) ok = fields[i] == header[i];
        if (!ok) throw MalformedRowError(path_, line_no, "unexpected header row");
        saw_header = true;
        continue;
      }
      pending.emplace_back(line_no, line);
    }
    if (!saw_header) throw MalformedRowError(path_, 1, "file is empty; header row required");
    for (auto& [no, text] : pending) {
      if (text.empty()) {
        if (no == line_no) continue;  // trailing blank line at EOF
        throw MalformedRowError(path_, no, "blank line");
      }
      rows_.emplace_back(no, std::move(text));
    }
    columns_ = header.size();
  }

  const std::string& path() const { return path_; }

  // Invokes fn(line_number, fields) per data row after checking column count.
  template <typename Fn>
  void for_each_row(Fn&& fn) const {
    for (const auto& [no, text] : rows_) {
      auto fields = split_tabs(text);
      if (fields.size() != columns_)
        throw MalformedRowError(path_, no,
                                "expected " + std::to_string(columns_) + " columns, got " +
                                    std::to_string(fields.size()));
      fn(no, fields);
    }
  }

 private:
  std::string path_;
  std::size_t columns_ = 0;
  std::vector<std::pair<std::size_t, std::string>> rows_;
};

inline void check_field_clean(const std::string& value, const char* what) {
  if (value.find('\t') != std::string::npos || value.find('\n') != std::string::npos ||
      value.find('\r') != std::string::npos)
    throw ValidationError(std::string(what) + " may not contain tabs or line breaks: '" + value +
                          "'");
}

}  // namespace detail

inline std::string_view to_string(TestOutcome o) {
  return o == TestOutcome::Pass ? "PASS" : "FAIL";
}

inline std::string_view to_string(RunOutcome o) {
  switch (o) {
    case RunOutcome::Pass: return "PASS";
    case RunOutcome::Fail: return "FAIL";
    case RunOutcome::Timeout: return "TIMEOUT";
    case RunOutcome::Crash: return "CRASH";
  }
  return "PASS";
}

inline GroundTruth load_ground_truth(const std::filesystem::path& path) {
  detail::TsvFile file(path, {"file_path", "line_number"});
  GroundTruth gt;
  file.for_each_row([&](std::size_t no, const std::vector<std::string_view>& f) {
    int line = detail::parse_positive_int(f[1], file.path(), no, "line_number");
    gt.faulty_statements.insert(Statement{std::string(f[0]), line});
  });
  return gt;
}

inline Dataset load_dataset(const std::filesystem::path& directory) {
  Dataset ds;

  detail::TsvFile mutants(directory / "mutants.tsv",
                          {"mutant_id", "file_path", "line_number", "operator"});
  std::unordered_set<std::string> mutant_ids;
  mutants.for_each_row([&](std::size_t no, const std::vector<std::string_view>& f) {
    MutantMeta m{std::string(f[0]), std::string(f[1]),
                 detail::parse_positive_int(f[2], mutants.path(), no, "line_number"),
                 std::string(f[3])};
    if (m.mutant_id.empty()) throw MalformedRowError(mutants.path(), no, "empty mutant_id");
    if (!mutant_ids.insert(m.mutant_id).second)
      throw DuplicateIdError(mutants.path(), no, m.mutant_id);
    ds.mutants.push_back(std::move(m));
  });

  detail::TsvFile tests(directory / "tests.tsv",
                        {"test_id", "suite", "name", "original_outcome",
                         "original_error_signature"});
  std::unordered_set<std::string> test_ids;
  tests.for_each_row([&](std::size_t no, const std::vector<std::string_view>& f) {
    TestMeta t;
    t.test_id = std::string(f[0]);
    t.suite = std::string(f[1]);
    t.name = std::string(f[2]);
    if (f[3] == "PASS")
      t.original_outcome = TestOutcome::Pass;
    else if (f[3] == "FAIL")
      t.original_outcome = TestOutcome::Fail;
    else
      throw MalformedRowError(tests.path(), no,
                              "original_outcome must be PASS or FAIL, got '" + std::string(f[3]) +
                                  "'");
    t.original_error_signature = std::string(f[4]);
    if (t.test_id.empty()) throw MalformedRowError(tests.path(), no, "empty test_id");
    if (t.original_outcome == TestOutcome::Pass && !t.original_error_signature.empty())
      throw MalformedRowError(tests.path(), no,
                              "original_error_signature requires original_outcome FAIL");
    if (!test_ids.insert(t.test_id).second) throw DuplicateIdError(tests.path(), no, t.test_id);
    ds.tests.push_back(std::move(t));
  });

  detail::TsvFile executions(directory / "executions.tsv",
                             {"mutant_id", "test_id", "outcome", "error_signature"});
  std::unordered_set<std::string> pairs;
  executions.for_each_row([&](std::size_t no, const std::vector<std::string_view>& f) {
    ExecutionRecord r;
    r.mutant_id = std::string(f[0]);
    r.test_id = std::string(f[1]);
    if (f[2] == "PASS")
      r.outcome = RunOutcome::Pass;
    else if (f[2] == "FAIL")
      r.outcome = RunOutcome::Fail;
    else if (f[2] == "TIMEOUT")
      r.outcome = RunOutcome::Timeout;
    else if (f[2] == "CRASH")
      r.outcome = RunOutcome::Crash;
    else
      throw MalformedRowError(executions.path(), no,
                              "outcome must be PASS, FAIL, TIMEOUT or CRASH, got '" +
                                  std::string(f[2]) + "'");
    r.error_signature = std::string(f[3]);
    if (!mutant_ids.count(r.mutant_id))
      throw DanglingReferenceError(executions.path(), no, r.mutant_id);
    if (!test_ids.count(r.test_id)) throw DanglingReferenceError(executions.path(), no, r.test_id);
    if (!pairs.insert(r.mutant_id + "\t" + r.test_id).second)
      throw DuplicateIdError(executions.path(), no, r.mutant_id + "," + r.test_id);
    ds.executions.push_back(std::move(r));
  });

  auto faults_path = directory / "faults.tsv";
  if (std::filesystem::exists(faults_path)) ds.ground_truth = load_ground_truth(faults_path);

  return ds;
}

inline void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  out << "file_path\tline_number\n";
  for (const auto& s : gt.faulty_statements) {
    detail::check_field_clean(s.file_path, "file_path");
    out << s.file_path << '\t' << s.line_number << '\n';
  }
}

// Writes the dataset in list order; loading the result reproduces the
// dataset field-for-field, and re-saving reproduces the bytes.
inline void save_dataset(const Dataset& ds, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  {
    std::ofstream out(directory / "mutants.tsv", std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + (directory / "mutants.tsv").string());
    out << "mutant_id\tfile_path\tline_number\toperator\n";
    for (const auto& m : ds.mutants) {
      detail::check_field_clean(m.mutant_id, "mutant_id");
      detail::check_field_clean(m.file_path, "file_path");
      detail::check_field_clean(m.operator_name, "operator");
      out << m.mutant_id << '\t' << m.file_path << '\t' << m.line_number << '\t' << m.operator_name
          << '\n';
    }
  }
  {
    std::ofstream out(directory / "tests.tsv", std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + (directory / "tests.tsv").string());
    out << "test_id\tsuite\tname\toriginal_outcome\toriginal_error_signature\n";
    for (const auto& t : ds.tests) {
      detail::check_field_clean(t.test_id, "test_id");
      detail::check_field_clean(t.suite, "suite");
      detail::check_field_clean(t.name, "name");
      detail::check_field_clean(t.original_error_signature, "original_error_signature");
      out << t.test_id << '\t' << t.suite << '\t' << t.name << '\t'
          << to_string(t.original_outcome) << '\t' << t.original_error_signature << '\n';
    }
  }
  {
    std::ofstream out(directory / "executions.tsv", std::ios::binary);
    if (!out)
      throw ValidationError("cannot open for writing: " + (directory / "executions.tsv").string());
    out << "mutant_id\ttest_id\toutcome\terror_signature\n";
    for (const auto& r : ds.executions) {
      detail::check_field_clean(r.error_signature, "error_signature");
      out << r.mutant_id << '\t' << r.test_id << '\t' << to_string(r.outcome) << '\t'
          << r.error_signature << '\n';
    }
  }
  if (ds.ground_truth) save_ground_truth(*ds.ground_truth, directory / "faults.tsv");
}

// Mutants sorted by (file_path, line_number, mutant_id); tests grouped by
// suite, sorted by (suite, name, test_id). The id tie-breakers make the
// ordering total, so matrix layout is deterministic.
inline AxisOrder order_axes(const Dataset& ds) {
  AxisOrder order;
  std::vector<const MutantMeta*> ms;
  ms.reserve(ds.mutants.size());
  for (const auto& m : ds.mutants) ms.push_back(&m);
  std::sort(ms.begin(), ms.end(), [](const MutantMeta* a, const MutantMeta* b) {
    return std::tie(a->file_path, a->line_number, a->mutant_id) <
           std::tie(b->file_path, b->line_number, b->mutant_id);
  });
  for (const auto* m : ms) order.mutants.push_back(m->mutant_id);

  std::vector<const TestMeta*> ts;
  ts.reserve(ds.tests.size());
  for (const auto& t : ds.tests) ts.push_back(&t);
  std::sort(ts.begin(), ts.end(), [](const TestMeta* a, const TestMeta* b) {
    return std::tie(a->suite, a->name, a->test_id) < std::tie(b->suite, b->name, b->test_id);
  });
  for (const auto* t : ts) order.tests.push_back(t->test_id);
  return order;
}

}  // namespace dkmr
