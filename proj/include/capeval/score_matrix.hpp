#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace capeval {

/// Instances x metrics table of optional reals, row-major. Row and column
/// labels are unique. Missing cells are allowed while building; consumers
/// that need complete data call `require_complete()`.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(std::vector<std::string> instance_ids, std::vector<std::string> metric_names);

  std::size_t rows() const { return instance_ids_.size(); }
  std::size_t cols() const { return metric_names_.size(); }
  const std::vector<std::string>& instance_ids() const { return instance_ids_; }
  const std::vector<std::string>& metric_names() const { return metric_names_; }

  std::optional<std::size_t> row_of(std::string_view instance_id) const;
  std::optional<std::size_t> col_of(std::string_view metric) const;

  std::optional<double> at(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
  void set(std::size_t row, std::size_t col, double value) { values_[row * cols() + col] = value; }
  void clear(std::size_t row, std::size_t col) { values_[row * cols() + col].reset(); }

  bool complete() const;
  /// Throws DataError naming the first missing cell.
  void require_complete() const;
  std::size_t missing_count() const;

  /// Values of one column; throws DataError if the column is absent or has gaps.
  std::vector<double> column(std::string_view metric) const;
  std::vector<double> column(std::size_t col) const;

  /// Rows in the given order; unknown ids throw DataError.
  ScoreMatrix select_rows(std::span<const std::string> ids) const;
  ScoreMatrix select_columns(std::span<const std::string> metrics) const;
  /// Drops every row that has at least one missing cell.
  ScoreMatrix complete_rows() const;

  /// Appends a fully populated column.
  void add_column(std::string metric, std::span<const double> values);

  bool operator==(const ScoreMatrix&) const = default;

 private:
  std::vector<std::string> instance_ids_;
  std::vector<std::string> metric_names_;
  std::vector<std::optional<double>> values_;
  std::unordered_map<std::string, std::size_t> row_index_;
  std::unordered_map<std::string, std::size_t> col_index_;
};

struct JoinResult {
  ScoreMatrix matrix;
  /// dropped[i] lists the instance ids of input i absent from the result.
  std::vector<std::vector<std::string>> dropped;
};

/// Inner join on instance ids. Metric names must be pairwise disjoint. Row
/// order follows the first input.
JoinResult join(std::span<const ScoreMatrix> matrices);

struct IngestOptions {
  /// Reject columns that are not in the metric registry.
  bool require_registered = true;
  /// Check values against the registry's declared ranges.
  bool check_ranges = true;
};

struct IngestResult {
  ScoreMatrix matrix;
  std::vector<std::string> warnings;
};

/// Reads a score file in wide (`instance_id,<m1>,<m2>,...`) or long
/// (`instance_id,metric,score`) CSV form. Empty cells in wide files are
/// missing values.
IngestResult ingest_external(const std::filesystem::path& path, const IngestOptions& opts = {});
IngestResult read_score_csv(std::istream& in, std::string_view source, const IngestOptions& opts = {});

/// Wide CSV, values with 17 significant digits, missing cells empty.
void write_score_csv(const ScoreMatrix& m, std::ostream& out);
void save_score_csv(const ScoreMatrix& m, const std::filesystem::path& path);

/// Minimal RFC 4180 helpers shared by the report writers.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);
std::string format_double(double v);

}  // namespace capeval
