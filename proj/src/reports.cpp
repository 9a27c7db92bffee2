#include "capeval/reports.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "capeval/error.hpp"
#include "capeval/rng.hpp"
#include "capeval/score_matrix.hpp"

namespace capeval {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kReportFormatVersion = 1;

ordered_json meta_json(const ReportMeta& meta) {
  ordered_json j;
  j["format_version"] = kReportFormatVersion;
  j["command"] = meta.command;
  j["seed"] = meta.seed ? ordered_json(*meta.seed) : ordered_json(nullptr);
  j["notes"] = meta.notes;
  return j;
}

void csv_meta(std::ostringstream& out, const ordered_json& meta) {
  for (const auto& [key, value] : meta.items()) {
    if (key == "notes") {
      for (const auto& n : value) out << "# note: " << n.get<std::string>() << "\n";
    } else {
      out << "# " << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
    }
  }
}

ordered_json mean_std_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

std::string pad(std::string_view s, std::size_t width, bool right = false) {
  std::string out(s);
  if (out.size() >= width) return out;
  const std::string fill(width - out.size(), ' ');
  return right ? fill + out : out + fill;
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view text) {
  std::string key;
  for (char c : text) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "csv") return ReportFormat::Csv;
  if (key == "json") return ReportFormat::Json;
  return std::nullopt;
}

std::string percent1(double value) {
  auto s = fmt::format("{:.1f}", value * 100.0);
  if (s == "-0.0") s = "0.0";
  return s;
}

std::string correlation_report(std::span<const CorrelationReport> reports, const ReportMeta& meta,
                               ReportFormat format) {
  auto m = meta_json(meta);
  if (format == ReportFormat::Json) {
    ordered_json j;
    j["report"] = "correlation";
    j["dataset"] = reports.empty() ? "" : reports.front().dataset;
    j["correlation_kind"] = reports.empty() ? "" : std::string(to_string(reports.front().kind));
    auto rows = ordered_json::array();
    for (const auto& r : reports) {
      ordered_json row;
      row["metric"] = r.metric;
      row["kind"] = std::string(to_string(r.kind));
      row["n"] = r.n;
      row["value"] = r.value ? ordered_json(*r.value) : ordered_json(nullptr);
      row["error"] = r.error.empty() ? ordered_json(nullptr) : ordered_json(r.error);
      rows.push_back(row);
    }
    j["results"] = rows;
    j["meta"] = m;
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  csv_meta(out, m);
  out << "dataset,metric,kind,n,value,value_pct,error\n";
  for (const auto& r : reports) {
    out << csv_escape(r.dataset) << ',' << csv_escape(r.metric) << ',' << to_string(r.kind) << ',' << r.n << ','
        << (r.value ? format_double(*r.value) : "") << ',' << (r.value ? percent1(*r.value) : "") << ','
        << csv_escape(r.error) << "\n";
  }
  return out.str();
}

std::string pairwise_report(std::span<const PairwiseReport> reports, const ReportMeta& meta, ReportFormat format) {
  auto m = meta_json(meta);
  m["tie_credit"] = kTieCredit;
  m["std"] = "population";
  m["prng"] = Xoshiro256::kAlgorithm;
  m["reference_sample"] = kPascalReferenceSample;
  m["seed_derivation"] = "seed + instance index";
  if (format == ReportFormat::Json) {
    ordered_json j;
    j["report"] = "pairwise";
    j["dataset"] = reports.empty() ? "" : reports.front().dataset;
    auto rows = ordered_json::array();
    for (const auto& r : reports) {
      ordered_json row;
      row["metric"] = r.metric;
      ordered_json cats = ordered_json::object();
      for (const auto& [cat, ms] : r.per_category_accuracy) cats[std::string(to_string(cat))] = mean_std_json(ms);
      row["categories"] = cats;
      row["mean"] = mean_std_json(r.overall);
      row["seeds"] = r.seeds;
      auto inst = ordered_json::array();
      for (std::size_t i = 0; i < r.instances.size(); ++i) {
        const auto& a = r.instances[i];
        ordered_json ij;
        ij["seed"] = i < r.seeds.size() ? ordered_json(r.seeds[i]) : ordered_json(nullptr);
        ij["overall"] = a.overall;
        ordered_json pc = ordered_json::object();
        for (const auto& [cat, v] : a.per_category)
          pc[std::string(to_string(cat))] = {{"accuracy", v}, {"pairs", a.counts.at(cat)}};
        ij["categories"] = pc;
        inst.push_back(ij);
      }
      row["instances"] = inst;
      rows.push_back(row);
    }
    j["results"] = rows;
    j["meta"] = m;
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  csv_meta(out, m);
  out << "dataset,metric,category,mean,std,mean_pct,std_pct\n";
  for (const auto& r : reports) {
    auto line = [&](std::string_view cat, const MeanStd& ms) {
      out << csv_escape(r.dataset) << ',' << csv_escape(r.metric) << ',' << cat << ',' << format_double(ms.mean)
          << ',' << format_double(ms.std) << ',' << percent1(ms.mean) << ',' << percent1(ms.std) << "\n";
    };
    for (const auto& [cat, ms] : r.per_category_accuracy) line(to_string(cat), ms);
    line("Mean", r.overall);
  }
  return out.str();
}

std::string render_table(std::string_view report_json) {
  ordered_json j;
  try {
    j = ordered_json::parse(report_json);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("report is not valid JSON: {}", e.what()));
  }
  const auto type = j.value("report", "");
  const auto& results = j.at("results");
  std::size_t width = 6;
  for (const auto& r : results) width = std::max(width, r.at("metric").get<std::string>().size());
  std::ostringstream out;
  out << "# " << j.value("dataset", "") << "\n";

  if (type == "correlation") {
    out << pad("Metric", width) << "  " << pad(j.value("correlation_kind", "value"), 8, true) << "\n";
    for (const auto& r : results) {
      const auto& v = r.at("value");
      out << pad(r.at("metric").get<std::string>(), width) << "  "
          << pad(v.is_null() ? "n/a" : percent1(v.get<double>()), 8, true) << "\n";
    }
    return out.str();
  }
  if (type == "pairwise") {
    std::vector<std::string> cats;
    for (const auto& r : results)
      for (const auto& [c, _] : r.at("categories").items())
        if (std::find(cats.begin(), cats.end(), c) == cats.end()) cats.push_back(c);
    const bool single = cats.size() == 1;
    auto cell = [](const ordered_json& ms) {
      return percent1(ms.at("mean").get<double>()) + "±" + percent1(ms.at("std").get<double>());
    };
    constexpr std::size_t kCell = 13;
    out << pad("Metric", width);
    for (const auto& c : cats) out << "  " << pad(c, kCell, true);
    if (!single) out << "  " << pad("Mean", kCell, true);
    out << "\n";
    for (const auto& r : results) {
      out << pad(r.at("metric").get<std::string>(), width);
      const auto& rc = r.at("categories");
      for (const auto& c : cats) out << "  " << pad(rc.contains(c) ? cell(rc.at(c)) : "n/a", kCell + 1, true);
      if (!single) out << "  " << pad(cell(r.at("mean")), kCell + 1, true);
      out << "\n";
    }
    return out.str();
  }
  throw DataError(fmt::format("unknown report type '{}'", type));
}

}  // namespace capeval
