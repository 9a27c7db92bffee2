#include "capeval/score_matrix.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_set>

#include <fmt/format.h>

#include "capeval/error.hpp"
#include "capeval/registry.hpp"

namespace capeval {

ScoreMatrix::ScoreMatrix(std::vector<std::string> instance_ids, std::vector<std::string> metric_names)
    : instance_ids_(std::move(instance_ids)), metric_names_(std::move(metric_names)) {
  for (std::size_t i = 0; i < instance_ids_.size(); ++i)
    if (!row_index_.emplace(instance_ids_[i], i).second)
      throw DataError(fmt::format("duplicate instance id '{}'", instance_ids_[i]));
  for (std::size_t j = 0; j < metric_names_.size(); ++j)
    if (!col_index_.emplace(metric_names_[j], j).second)
      throw DataError(fmt::format("duplicate metric name '{}'", metric_names_[j]));
  values_.assign(instance_ids_.size() * metric_names_.size(), std::nullopt);
}

std::optional<std::size_t> ScoreMatrix::row_of(std::string_view instance_id) const {
  auto it = row_index_.find(std::string(instance_id));
  if (it == row_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> ScoreMatrix::col_of(std::string_view metric) const {
  auto it = col_index_.find(std::string(metric));
  if (it == col_index_.end()) return std::nullopt;
  return it->second;
}

bool ScoreMatrix::complete() const { return missing_count() == 0; }

std::size_t ScoreMatrix::missing_count() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.has_value() ? 0 : 1;
  return n;
}

void ScoreMatrix::require_complete() const {
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols(); ++c)
      if (!at(r, c))
        throw DataError(fmt::format("score matrix has {} missing cells (first: instance '{}', metric '{}')",
                                    missing_count(), instance_ids_[r], metric_names_[c]));
}

std::vector<double> ScoreMatrix::column(std::size_t col) const {
  std::vector<double> out;
  out.reserve(rows());
  for (std::size_t r = 0; r < rows(); ++r) {
    auto v = at(r, col);
    if (!v)
      throw DataError(fmt::format("metric '{}' missing for instance '{}'", metric_names_[col], instance_ids_[r]));
    out.push_back(*v);
  }
  return out;
}

std::vector<double> ScoreMatrix::column(std::string_view metric) const {
  auto c = col_of(metric);
  if (!c) throw DataError(fmt::format("score matrix has no column '{}'", metric));
  return column(*c);
}

ScoreMatrix ScoreMatrix::select_rows(std::span<const std::string> ids) const {
  ScoreMatrix out(std::vector<std::string>(ids.begin(), ids.end()), metric_names_);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto r = row_of(ids[i]);
    if (!r) throw DataError(fmt::format("no scores for instance '{}'", ids[i]));
    for (std::size_t c = 0; c < cols(); ++c) out.values_[i * cols() + c] = at(*r, c);
  }
  return out;
}

ScoreMatrix ScoreMatrix::select_columns(std::span<const std::string> metrics) const {
  ScoreMatrix out(instance_ids_, std::vector<std::string>(metrics.begin(), metrics.end()));
  for (std::size_t j = 0; j < metrics.size(); ++j) {
    auto c = col_of(metrics[j]);
    if (!c) throw DataError(fmt::format("score matrix has no column '{}'", metrics[j]));
    for (std::size_t r = 0; r < rows(); ++r) out.values_[r * out.cols() + j] = at(r, *c);
  }
  return out;
}

ScoreMatrix ScoreMatrix::complete_rows() const {
  std::vector<std::string> keep;
  for (std::size_t r = 0; r < rows(); ++r) {
    bool full = true;
    for (std::size_t c = 0; c < cols() && full; ++c) full = at(r, c).has_value();
    if (full) keep.push_back(instance_ids_[r]);
  }
  return select_rows(keep);
}

void ScoreMatrix::add_column(std::string metric, std::span<const double> values) {
  if (values.size() != rows())
    throw DataError(fmt::format("column '{}' has {} values for {} rows", metric, values.size(), rows()));
  if (col_index_.contains(metric)) throw DataError(fmt::format("duplicate metric name '{}'", metric));
  const std::size_t old_cols = cols();
  std::vector<std::optional<double>> next;
  next.reserve(rows() * (old_cols + 1));
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < old_cols; ++c) next.push_back(values_[r * old_cols + c]);
    next.emplace_back(values[r]);
  }
  values_ = std::move(next);
  col_index_.emplace(metric, old_cols);
  metric_names_.push_back(std::move(metric));
}

JoinResult join(std::span<const ScoreMatrix> matrices) {
  if (matrices.empty()) throw DataError("join: no score matrices given");
  std::vector<std::string> names;
  std::unordered_set<std::string> seen_names;
  for (const auto& m : matrices)
    for (const auto& n : m.metric_names()) {
      if (!seen_names.insert(n).second) throw DataError(fmt::format("join: metric '{}' appears in several inputs", n));
      names.push_back(n);
    }

  std::vector<std::string> ids;
  for (const auto& id : matrices.front().instance_ids()) {
    bool everywhere = true;
    for (const auto& m : matrices.subspan(1)) everywhere = everywhere && m.row_of(id).has_value();
    if (everywhere) ids.push_back(id);
  }
  if (ids.empty()) throw DataError("join: the inputs share no instance ids");

  JoinResult result;
  result.matrix = ScoreMatrix(ids, names);
  const std::unordered_set<std::string> kept(ids.begin(), ids.end());
  std::size_t offset = 0;
  for (const auto& m : matrices) {
    auto& dropped = result.dropped.emplace_back();
    for (const auto& id : m.instance_ids())
      if (!kept.contains(id)) dropped.push_back(id);
    for (std::size_t r = 0; r < ids.size(); ++r) {
      const auto src = *m.row_of(ids[r]);
      for (std::size_t c = 0; c < m.cols(); ++c)
        if (auto v = m.at(src, c)) result.matrix.set(r, offset + c, *v);
    }
    offset += m.cols();
  }
  return result;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

namespace {

std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw DataError(fmt::format("non-numeric value '{}'", text));
  return v;
}

void validate_column(const std::string& name, const IngestOptions& opts, std::vector<std::string>& warnings,
                     std::string_view source) {
  const MetricDescriptor* d = find_metric(name);
  if (!d && opts.require_registered)
    throw DataError(fmt::format("{}: unknown metric column '{}'", source, name));
  if (d && !d->declared_range && opts.check_ranges)
    warnings.push_back(fmt::format("{}: no declared range for '{}'; values not range-checked", source, name));
}

void check_range(const std::string& metric, const std::string& id, double v, const IngestOptions& opts,
                 std::string_view source) {
  if (!opts.check_ranges) return;
  const MetricDescriptor* d = find_metric(metric);
  if (!d || !d->declared_range) return;
  if (!d->declared_range->contains(v))
    throw DataError(fmt::format("{}: {} value {} for instance '{}' outside declared range [{}, {}]", source, metric,
                                v, id, d->declared_range->lo, d->declared_range->hi));
}

}  // namespace

IngestResult read_score_csv(std::istream& in, std::string_view source, const IngestOptions& opts) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line != "\r" && line[0] != '#') return true;
    }
    return false;
  };
  if (!next_line()) throw DataError(fmt::format("{}: empty score file", source));
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "instance_id")
    throw DataError(fmt::format("{}: header must start with 'instance_id'", source));

  IngestResult result;
  const bool long_form = header.size() == 3 && header[1] == "metric" && header[2] == "score";

  // Cells keyed in first-seen order so the output order is file order.
  std::vector<std::string> ids, metrics;
  std::unordered_map<std::string, std::size_t> id_pos, metric_pos;
  std::map<std::pair<std::size_t, std::size_t>, double> cells;

  auto intern = [](std::vector<std::string>& list, std::unordered_map<std::string, std::size_t>& pos,
                   const std::string& key) {
    auto [it, inserted] = pos.emplace(key, list.size());
    if (inserted) list.push_back(key);
    return it->second;
  };

  if (!long_form) {
    for (std::size_t c = 1; c < header.size(); ++c) {
      validate_column(header[c], opts, result.warnings, source);
      if (metric_pos.contains(header[c]))
        throw DataError(fmt::format("{}: duplicate column '{}'", source, header[c]));
      intern(metrics, metric_pos, header[c]);
    }
  }

  while (next_line()) {
    auto fields = split_csv_line(line);
    const std::string& id = fields[0];
    if (id.empty()) throw DataError(fmt::format("{}:{}: empty instance_id", source, lineno));
    if (long_form) {
      if (fields.size() != 3) throw DataError(fmt::format("{}:{}: expected 3 fields", source, lineno));
      if (!metric_pos.contains(fields[1])) validate_column(fields[1], opts, result.warnings, source);
      const auto r = intern(ids, id_pos, id);
      const auto c = intern(metrics, metric_pos, fields[1]);
      std::optional<double> v;
      try {
        v = parse_number(fields[2]);
      } catch (const DataError& e) {
        throw DataError(fmt::format("{}:{}: {}", source, lineno, e.what()));
      }
      if (!v) continue;
      check_range(fields[1], id, *v, opts, source);
      if (!cells.emplace(std::pair{r, c}, *v).second)
        throw DataError(fmt::format("{}:{}: duplicate cell (instance '{}', metric '{}')", source, lineno, id,
                                    fields[1]));
    } else {
      if (fields.size() != header.size())
        throw DataError(
            fmt::format("{}:{}: expected {} fields, found {}", source, lineno, header.size(), fields.size()));
      if (id_pos.contains(id))
        throw DataError(fmt::format("{}:{}: duplicate cell (instance '{}', metric '{}')", source, lineno, id,
                                    metrics.empty() ? std::string("-") : metrics.front()));
      const auto r = intern(ids, id_pos, id);
      for (std::size_t c = 1; c < fields.size(); ++c) {
        std::optional<double> v;
        try {
          v = parse_number(fields[c]);
        } catch (const DataError& e) {
          throw DataError(fmt::format("{}:{}: {}", source, lineno, e.what()));
        }
        if (!v) continue;
        check_range(metrics[c - 1], id, *v, opts, source);
        cells.emplace(std::pair{r, c - 1}, *v);
      }
    }
  }

  result.matrix = ScoreMatrix(ids, metrics);
  for (const auto& [rc, v] : cells) result.matrix.set(rc.first, rc.second, v);
  return result;
}

IngestResult ingest_external(const std::filesystem::path& path, const IngestOptions& opts) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open score file '{}'", path.string()));
  return read_score_csv(in, path.string(), opts);
}

void write_score_csv(const ScoreMatrix& m, std::ostream& out) {
  out << "instance_id";
  for (const auto& name : m.metric_names()) out << ',' << csv_escape(name);
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << csv_escape(m.instance_ids()[r]);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out << ',';
      if (auto v = m.at(r, c)) out << format_double(*v);
    }
    out << '\n';
  }
}

void save_score_csv(const ScoreMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write score file '{}'", path.string()));
  write_score_csv(m, out);
}

}  // namespace capeval
