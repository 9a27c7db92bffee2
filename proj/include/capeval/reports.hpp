#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capeval/stats.hpp"

namespace capeval {

enum class ReportFormat { Csv, Json };

std::optional<ReportFormat> parse_report_format(std::string_view text);

/// Run-level metadata written next to the results. Only inputs that affect
/// the numbers belong here, so identical runs produce identical bytes.
struct ReportMeta {
  std::string command;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> notes;
};

/// JSON keeps full precision. CSV carries the same value at 17 significant
/// digits plus a percent column rounded to one decimal.
std::string correlation_report(std::span<const CorrelationReport> reports, const ReportMeta& meta,
                               ReportFormat format);
std::string pairwise_report(std::span<const PairwiseReport> reports, const ReportMeta& meta, ReportFormat format);

/// Renders a JSON report produced above as a fixed-width table of
/// percentages with one decimal.
std::string render_table(std::string_view report_json);

/// value * 100 with one decimal, e.g. 0.5853 -> "58.5".
std::string percent1(double value);

}  // namespace capeval
