#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dkmr/dataset.hpp"
#include "dkmr/error.hpp"
#include "dkmr/matrix.hpp"

// Signal-enhancement stage: classify each (mutant, test) run as survive,
// weak kill or strong kill, and lay the results out on ordered axes.
//
// A strong kill flips the test's pass/fail outcome. A weak kill is any
// detectable difference: a flipped outcome, or the same outcome with a
// different error signature. Strong therefore implies weak, and the hybrid
// matrix encodes survive/weak/strong as 0/1/2.

namespace dkmr {

enum class KillClass : int { Survive = 0, Weak = 1, Strong = 2 };

struct BooleanKillMatrix {
  std::vector<std::string> rows;  // mutant ids, ordered
  std::vector<std::string> cols;  // test ids, ordered
  std::vector<int> fail_vector;   // 1 iff the test failed on the original program
  Matrix<int> cells;              // {0,1}

  friend bool operator==(const BooleanKillMatrix&, const BooleanKillMatrix&) = default;
};

struct EnhancedKillMatrix {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<int> fail_vector;
  Matrix<int> cells;  // {0,1,2}

  friend bool operator==(const EnhancedKillMatrix&, const EnhancedKillMatrix&) = default;
};

namespace detail {

struct NormalizedRun {
  TestOutcome outcome;
  std::string_view signature;
};

// Abnormal terminations observably differ from a pass, so TIMEOUT and CRASH
// normalize to FAIL with fixed signatures.
inline NormalizedRun normalize_run(const ExecutionRecord& r) {
  switch (r.outcome) {
    case RunOutcome::Timeout: return {TestOutcome::Fail, "TIMEOUT"};
    case RunOutcome::Crash: return {TestOutcome::Fail, "CRASH"};
    case RunOutcome::Pass: return {TestOutcome::Pass, r.error_signature};
    case RunOutcome::Fail: return {TestOutcome::Fail, r.error_signature};
  }
  return {TestOutcome::Pass, r.error_signature};
}

}  // namespace detail

// record == nullptr means no execution was recorded for the pair, i.e. the
// run matched the original program.
inline KillClass classify_kill(const ExecutionRecord* record, const TestMeta& test) {
  if (record == nullptr) return KillClass::Survive;
  auto run = detail::normalize_run(*record);
  if (run.outcome != test.original_outcome) return KillClass::Strong;
  if (run.signature != test.original_error_signature) return KillClass::Weak;
  return KillClass::Survive;
}

namespace detail {

template <typename CellFn>
Matrix<int> classify_cells(const Dataset& ds, const AxisOrder& order, CellFn&& to_cell) {
  std::unordered_map<std::string_view, std::size_t> row_of, col_of;
  row_of.reserve(order.mutants.size());
  col_of.reserve(order.tests.size());
  for (std::size_t i = 0; i < order.mutants.size(); ++i) row_of.emplace(order.mutants[i], i);
  for (std::size_t j = 0; j < order.tests.size(); ++j) col_of.emplace(order.tests[j], j);

  std::unordered_map<std::string_view, const TestMeta*> test_meta;
  test_meta.reserve(ds.tests.size());
  for (const auto& t : ds.tests) test_meta.emplace(t.test_id, &t);

  Matrix<int> cells(order.mutants.size(), order.tests.size(), 0);
  for (const auto& r : ds.executions) {
    std::size_t i = row_of.at(r.mutant_id);
    std::size_t j = col_of.at(r.test_id);
    cells(i, j) = to_cell(classify_kill(&r, *test_meta.at(r.test_id)));
  }
  return cells;
}

inline std::vector<int> fail_flags(const Dataset& ds, const AxisOrder& order) {
  std::unordered_map<std::string_view, const TestMeta*> test_meta;
  for (const auto& t : ds.tests) test_meta.emplace(t.test_id, &t);
  std::vector<int> fails;
  fails.reserve(order.tests.size());
  for (const auto& id : order.tests)
    fails.push_back(test_meta.at(id)->original_outcome == TestOutcome::Fail ? 1 : 0);
  return fails;
}

}  // namespace detail

inline BooleanKillMatrix build_weak_matrix(const Dataset& ds) {
  AxisOrder order = order_axes(ds);
  BooleanKillMatrix m;
  m.cells = detail::classify_cells(ds, order,
                                   [](KillClass k) { return k == KillClass::Survive ? 0 : 1; });
  m.fail_vector = detail::fail_flags(ds, order);
  m.rows = std::move(order.mutants);
  m.cols = std::move(order.tests);
  return m;
}

inline EnhancedKillMatrix build_enhanced_matrix(const Dataset& ds) {
  AxisOrder order = order_axes(ds);
  EnhancedKillMatrix m;
  m.cells = detail::classify_cells(ds, order, [](KillClass k) { return static_cast<int>(k); });
  m.fail_vector = detail::fail_flags(ds, order);
  m.rows = std::move(order.mutants);
  m.cols = std::move(order.tests);
  return m;
}

// --- dense TSV dumps -------------------------------------------------------
// Header row of test ids, first column mutant_id, one cell per (mutant, test).

namespace detail {

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

template <typename T, typename Fmt>
void write_matrix_tsv_impl(const std::filesystem::path& path, const std::vector<std::string>& rows,
                           const std::vector<std::string>& cols, const Matrix<T>& cells,
                           Fmt&& fmt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  out << "mutant_id";
  for (const auto& c : cols) out << '\t' << c;
  out << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << rows[i];
    for (std::size_t j = 0; j < cols.size(); ++j) out << '\t' << fmt(cells(i, j));
    out << '\n';
  }
}

}  // namespace detail

inline void write_matrix_tsv(const BooleanKillMatrix& m, const std::filesystem::path& path) {
  detail::write_matrix_tsv_impl(path, m.rows, m.cols, m.cells, [](int v) { return v; });
}

inline void write_matrix_tsv(const EnhancedKillMatrix& m, const std::filesystem::path& path) {
  detail::write_matrix_tsv_impl(path, m.rows, m.cols, m.cells, [](int v) { return v; });
}

struct MatrixDump {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  Matrix<double> cells;
};

// Reads a dump produced by write_matrix_tsv (integer or real cells).
inline MatrixDump read_matrix_tsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path.string());
  std::string line;
  std::size_t line_no = 0;
  MatrixDump dump;
  std::vector<std::vector<double>> data;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split_tabs(line);
    if (line_no == 1) {
      if (fields.empty() || fields[0] != "mutant_id")
        throw MalformedRowError(path.string(), 1, "expected header starting with mutant_id");
      for (std::size_t j = 1; j < fields.size(); ++j) dump.cols.emplace_back(fields[j]);
      continue;
    }
    if (fields.size() != dump.cols.size() + 1)
      throw MalformedRowError(path.string(), line_no,
                              "expected " + std::to_string(dump.cols.size() + 1) + " columns");
    dump.rows.emplace_back(fields[0]);
    std::vector<double> row;
    row.reserve(dump.cols.size());
    for (std::size_t j = 1; j < fields.size(); ++j) {
      try {
        row.push_back(std::stod(std::string(fields[j])));
      } catch (const std::exception&) {
        throw MalformedRowError(path.string(), line_no,
                                "cell is not a number: '" + std::string(fields[j]) + "'");
      }
    }
    data.push_back(std::move(row));
  }
  if (line_no == 0) throw MalformedRowError(path.string(), 1, "file is empty");
  dump.cells = Matrix<double>(data.size(), dump.cols.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t j = 0; j < dump.cols.size(); ++j) dump.cells(i, j) = data[i][j];
  return dump;
}

}  // namespace dkmr
