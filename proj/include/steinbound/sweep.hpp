#pragma once

// Batch runners behind the command-line tool. Each runner validates its
// config, evaluates the jobs on a bounded worker pool, and returns tables in
// config order, so the output never depends on the thread count.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "steinbound/metrics.hpp"

namespace steinbound::sweep {

enum class Format { csv, json };

Format parse_format(const std::string& name);

using Cell = std::variant<long, double, std::string, bool>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Doubles as %.17g; nan / inf / -inf spelled out.
std::string format_double(double x);

std::string to_csv(const Table& table);
/// {"<table name>": [{column: value, ...}, ...], ...}
std::string to_json(const std::vector<Table>& tables);

/// Writes the text to path, or to stdout when path is empty. Throws IoError
/// naming the path on failure.
void write_output(const std::string& path, const std::string& text);

/// Runs fn(0) .. fn(count - 1) on at most `threads` workers (0 = hardware
/// concurrency). Results keep index order; if any job throws, the exception of
/// the lowest failing index is rethrown after all workers stop.
template <class T>
std::vector<T> parallel_map(std::size_t count, unsigned threads, const std::function<T(std::size_t)>& fn);

struct Law {
  int k;
  double a;
};

struct SweepConfig {
  std::string model = "curie-weiss";
  std::vector<long> ns{100, 400, 1600, 6400};
  std::vector<double> ps{0.0};
  double beta = 1.0;
  std::string a_rule = "support-bound";  // or "fixed"
  std::optional<double> a;               // required by a_rule = fixed
  Format format = Format::csv;
  std::string out;
  unsigned threads = 1;  // 0 = auto

  // limit-law and stein-check
  std::vector<Law> laws{{1, 0.5}, {2, 1.0 / 12.0}, {3, 1.0}};
  std::vector<double> zs{-5.0, -1.0, 0.0, 1.0, 5.0, 8.0};
  int grid_points = 200;

  // oracle
  // Empty = every model the caps allow; names that are all blank are an error.
  std::vector<std::string> oracle_models;
  long max_n = 10;
};

/// Outcome of a runner. status follows the exit-code contract: 0 clean,
/// 2 a checked bound is violated, 3 an oracle comparison failed.
struct RunResult {
  std::vector<Table> tables;
  int status = 0;
  std::string message;  // first failure, if any
};

/// Throws InvalidParameter naming the offending field.
void validate(const SweepConfig& config);

RunResult run_limit_law(const SweepConfig& config);
RunResult run_stein_check(const SweepConfig& config);
/// Tables "audit" (fixed column set) and "fits" (one row per p, needs >= 3 ns).
RunResult run_audit(const SweepConfig& config);
RunResult run_rate_fit(const SweepConfig& config);
RunResult run_oracle(const SweepConfig& config);

/// Serializes the result: CSV writes the first table to config.out and any
/// further table to "<out stem>.<table name>.csv" beside it (skipped on
/// stdout); JSON writes every table into one document.
void emit(const SweepConfig& config, const RunResult& result);

inline const std::vector<std::string>& audit_columns() {
  static const std::vector<std::string> columns{
      "model",          "n",      "p",           "distance",           "argsup_z",
      "term_condvar",   "term_remainder",        "term_a",             "term_a3",
      "term_delta4",    "implied_const_rate",    "implied_const_papernorm"};
  return columns;
}

}  // namespace steinbound::sweep

#include "steinbound/detail/parallel_map.hpp"
