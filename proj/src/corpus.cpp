#include "capeval/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "capeval/error.hpp"
#include "capeval/textnorm.hpp"

namespace capeval {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string strip_separators(std::string_view s) {
  std::string out;
  for (char c : s)
    if (c != '-' && c != '_' && c != ' ') out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

[[noreturn]] void fail_line(std::string_view source, std::size_t line, const std::string& msg) {
  throw DataError(fmt::format("{}:{}: {}", source, line, msg));
}

std::string require_string(const json& rec, const char* key, std::string_view source, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string())
    fail_line(source, line, fmt::format("field '{}' missing or not a string", key));
  return it->get<std::string>();
}

std::vector<std::string> require_string_list(const json& rec, const char* key, std::string_view source,
                                             std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_array())
    fail_line(source, line, fmt::format("field '{}' missing or not a list", key));
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) fail_line(source, line, fmt::format("field '{}' must contain strings", key));
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::optional<int> optional_int(const json& rec, const char* key, std::string_view source, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) fail_line(source, line, fmt::format("field '{}' must be an integer", key));
  int v = it->get<int>();
  if (v < 0) fail_line(source, line, fmt::format("field '{}' must be non-negative", key));
  return v;
}

std::optional<PairCategory> parse_category(std::string_view s) {
  if (s == "HC") return PairCategory::HC;
  if (s == "HI") return PairCategory::HI;
  if (s == "HM") return PairCategory::HM;
  if (s == "MM") return PairCategory::MM;
  if (s == "REF") return PairCategory::Reformulation;
  return std::nullopt;
}

CaptionInstance parse_rating_record(const json& rec, std::string_view source, std::size_t line) {
  CaptionInstance inst;
  inst.instance_id = require_string(rec, "instance_id", source, line);
  inst.image_id = require_string(rec, "image_id", source, line);
  inst.candidate = require_string(rec, "candidate", source, line);
  inst.references = require_string_list(rec, "references", source, line);
  if (auto it = rec.find("rating"); it != rec.end() && !it->is_null()) {
    if (!it->is_number()) fail_line(source, line, "field 'rating' must be a number or null");
    inst.rating = it->get<double>();
  }
  if (auto it = rec.find("split"); it != rec.end() && !it->is_null()) {
    if (!it->is_string()) fail_line(source, line, "field 'split' must be a string");
    auto split = parse_split(it->get<std::string>());
    if (!split) fail_line(source, line, fmt::format("unknown split '{}'", it->get<std::string>()));
    inst.split = *split;
  }
  return inst;
}

PairInstance parse_pair_record(const json& rec, std::string_view source, std::size_t line) {
  PairInstance pair;
  pair.pair_id = require_string(rec, "pair_id", source, line);
  pair.image_id = require_string(rec, "image_id", source, line);
  pair.candidate_a = require_string(rec, "candidate_a", source, line);
  pair.candidate_b = require_string(rec, "candidate_b", source, line);
  pair.references = require_string_list(rec, "references", source, line);
  if (auto it = rec.find("preferred"); it != rec.end() && !it->is_null()) {
    if (!it->is_string()) fail_line(source, line, "field 'preferred' must be \"A\", \"B\" or null");
    auto s = it->get<std::string>();
    if (s == "A")
      pair.preferred = Side::A;
    else if (s == "B")
      pair.preferred = Side::B;
    else
      fail_line(source, line, fmt::format("invalid preferred side '{}'", s));
  }
  auto cat = parse_category(require_string(rec, "category", source, line));
  if (!cat) fail_line(source, line, "category must be one of HC, HI, HM, MM, REF");
  pair.category = *cat;
  pair.votes_a = optional_int(rec, "votes_a", source, line);
  pair.votes_b = optional_int(rec, "votes_b", source, line);
  return pair;
}

}  // namespace

std::string_view to_string(DatasetName name) {
  switch (name) {
    case DatasetName::Flickr8kExpert: return "Flickr8kExpert";
    case DatasetName::Flickr8kCF: return "Flickr8kCF";
    case DatasetName::Composite: return "Composite";
    case DatasetName::THumB: return "THumB";
    case DatasetName::Polaris: return "Polaris";
    case DatasetName::Pascal50S: return "Pascal50S";
    case DatasetName::Reformulations: return "Reformulations";
    case DatasetName::Custom: return "Custom";
  }
  return "Custom";
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
    case Split::Unsplit: return "unsplit";
  }
  return "unsplit";
}

std::string_view to_string(CorrelationKind kind) {
  switch (kind) {
    case CorrelationKind::TauB: return "TauB";
    case CorrelationKind::TauC: return "TauC";
    case CorrelationKind::Pearson: return "Pearson";
    case CorrelationKind::PairwiseOnly: return "PairwiseOnly";
  }
  return "Pearson";
}

std::string_view to_string(PairCategory category) {
  switch (category) {
    case PairCategory::HC: return "HC";
    case PairCategory::HI: return "HI";
    case PairCategory::HM: return "HM";
    case PairCategory::MM: return "MM";
    case PairCategory::Reformulation: return "REF";
  }
  return "REF";
}

std::string_view to_string(Side side) { return side == Side::A ? "A" : "B"; }

std::optional<DatasetName> parse_dataset_name(std::string_view text) {
  static const std::map<std::string, DatasetName> names = {
      {"flickr8kexpert", DatasetName::Flickr8kExpert}, {"flickr8kcf", DatasetName::Flickr8kCF},
      {"composite", DatasetName::Composite},           {"thumb", DatasetName::THumB},
      {"polaris", DatasetName::Polaris},               {"pascal50s", DatasetName::Pascal50S},
      {"reformulations", DatasetName::Reformulations}, {"custom", DatasetName::Custom}};
  auto it = names.find(strip_separators(text));
  if (it == names.end()) return std::nullopt;
  return it->second;
}

std::optional<Split> parse_split(std::string_view text) {
  auto s = lower(text);
  if (s == "train") return Split::Train;
  if (s == "val" || s == "validation") return Split::Val;
  if (s == "test") return Split::Test;
  if (s == "unsplit") return Split::Unsplit;
  return std::nullopt;
}

Interval default_rating_range(DatasetName name) {
  switch (name) {
    case DatasetName::Flickr8kExpert: return {1.0, 4.0};
    case DatasetName::Flickr8kCF: return {0.0, 1.0};
    case DatasetName::Composite: return {1.0, 5.0};
    case DatasetName::THumB: return {0.0, 5.0};
    case DatasetName::Polaris: return {0.0, 1.0};
    default: return {};
  }
}

CorrelationKind default_correlation_kind(DatasetName name) {
  switch (name) {
    case DatasetName::Flickr8kExpert:
    case DatasetName::Composite:
    case DatasetName::Polaris:
      return CorrelationKind::TauC;
    case DatasetName::Flickr8kCF:
      return CorrelationKind::TauB;
    case DatasetName::THumB:
    case DatasetName::Custom:
      return CorrelationKind::Pearson;
    case DatasetName::Pascal50S:
    case DatasetName::Reformulations:
      return CorrelationKind::PairwiseOnly;
  }
  return CorrelationKind::Pearson;
}

bool is_pair_dataset(DatasetName name) {
  return name == DatasetName::Pascal50S || name == DatasetName::Reformulations;
}

Dataset parse_dataset(std::istream& in, DatasetName name, std::string_view source, Notes* notes) {
  Dataset d;
  d.name = name;
  d.rating_range = default_rating_range(name);
  d.correlation_kind = default_correlation_kind(name);

  std::optional<bool> pair_mode;
  if (name != DatasetName::Custom) pair_mode = is_pair_dataset(name);

  std::unordered_set<std::string> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    json rec;
    try {
      rec = json::parse(text);
    } catch (const json::parse_error& e) {
      fail_line(source, line, fmt::format("malformed JSON: {}", e.what()));
    }
    if (!rec.is_object()) fail_line(source, line, "record is not a JSON object");
    const bool looks_pair = rec.contains("pair_id");
    if (!pair_mode) pair_mode = looks_pair;
    if (*pair_mode != looks_pair)
      fail_line(source, line,
                *pair_mode ? "expected a pair record (with pair_id)" : "expected a rating record (with instance_id)");

    if (*pair_mode) {
      auto pair = parse_pair_record(rec, source, line);
      if (!seen.insert(pair.pair_id).second)
        fail_line(source, line, fmt::format("duplicate pair_id '{}'", pair.pair_id));
      const bool ref_cat = pair.category == PairCategory::Reformulation;
      if (name == DatasetName::Pascal50S && ref_cat)
        fail_line(source, line, "Pascal50S pairs must use category HC, HI, HM or MM");
      if (name == DatasetName::Reformulations && !ref_cat)
        fail_line(source, line, "Reformulations pairs must use category REF");
      if (ref_cat && !pair.preferred) pair.preferred = Side::B;
      d.pairs.push_back(std::move(pair));
    } else {
      auto inst = parse_rating_record(rec, source, line);
      if (!seen.insert(inst.instance_id).second)
        fail_line(source, line, fmt::format("duplicate instance_id '{}'", inst.instance_id));
      if (inst.rating && !d.rating_range.contains(*inst.rating))
        fail_line(source, line,
                  fmt::format("rating {} outside [{}, {}] for {}", *inst.rating, d.rating_range.lo,
                              d.rating_range.hi, to_string(name)));
      d.instances.push_back(std::move(inst));
    }
  }
  if (d.instances.empty() && d.pairs.empty()) throw DataError(fmt::format("{}: no records", source));

  if (name == DatasetName::Reformulations) {
    std::size_t removed = 0;
    d.pairs = filter_reformulations(std::move(d.pairs), &removed);
    if (notes) notes->push_back(fmt::format("Reformulations: removed {} pairs with identical captions", removed));
    if (d.pairs.empty()) throw DataError(fmt::format("{}: no records after filtering", source));
  }
  if (notes)
    notes->push_back(fmt::format("{}: loaded {} {}", to_string(name), d.size(), d.is_pairwise() ? "pairs" : "instances"));
  return d;
}

Dataset load_dataset(const std::filesystem::path& path, DatasetName name, Notes* notes) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open dataset file '{}'", path.string()));
  return parse_dataset(in, name, path.string(), notes);
}

void write_dataset(const Dataset& dataset, std::ostream& out) {
  for (const auto& inst : dataset.instances) {
    json rec = {{"instance_id", inst.instance_id}, {"image_id", inst.image_id}, {"candidate", inst.candidate},
                {"references", inst.references}, {"rating", nullptr}, {"split", to_string(inst.split)}};
    if (inst.rating) rec["rating"] = *inst.rating;
    out << rec.dump() << '\n';
  }
  for (const auto& pair : dataset.pairs) {
    json rec = {{"pair_id", pair.pair_id},
                {"image_id", pair.image_id},
                {"candidate_a", pair.candidate_a},
                {"candidate_b", pair.candidate_b},
                {"references", pair.references},
                {"preferred", nullptr},
                {"category", to_string(pair.category)},
                {"votes_a", nullptr},
                {"votes_b", nullptr}};
    if (pair.preferred) rec["preferred"] = to_string(*pair.preferred);
    if (pair.votes_a) rec["votes_a"] = *pair.votes_a;
    if (pair.votes_b) rec["votes_b"] = *pair.votes_b;
    out << rec.dump() << '\n';
  }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write dataset file '{}'", path.string()));
  write_dataset(dataset, out);
}

Dataset apply_overlap_policy(const Dataset& dataset, Notes* notes) {
  enum class Policy { None, DropCandidate, DropReference };
  Policy policy = Policy::None;
  switch (dataset.name) {
    case DatasetName::Flickr8kExpert: policy = Policy::DropCandidate; break;
    case DatasetName::Flickr8kCF:
    case DatasetName::Composite:
    case DatasetName::THumB: policy = Policy::DropReference; break;
    default: break;
  }
  if (policy == Policy::None || dataset.is_pairwise()) return dataset;

  Dataset out = dataset;
  out.instances.clear();
  std::size_t removed_instances = 0;
  std::size_t removed_refs = 0;
  std::size_t emptied = 0;

  if (policy == Policy::DropCandidate) {
    std::unordered_map<std::string, std::unordered_set<std::string>> image_refs;
    for (const auto& inst : dataset.instances)
      for (const auto& r : inst.references) image_refs[inst.image_id].insert(surface_key(r));
    for (const auto& inst : dataset.instances) {
      if (image_refs[inst.image_id].contains(surface_key(inst.candidate))) {
        ++removed_instances;
        continue;
      }
      out.instances.push_back(inst);
    }
  } else {
    std::unordered_map<std::string, std::unordered_set<std::string>> image_cands;
    for (const auto& inst : dataset.instances) image_cands[inst.image_id].insert(surface_key(inst.candidate));
    for (const auto& inst : dataset.instances) {
      CaptionInstance kept = inst;
      kept.references.clear();
      const auto& cands = image_cands[inst.image_id];
      for (const auto& r : inst.references) {
        if (cands.contains(surface_key(r))) {
          ++removed_refs;
          continue;
        }
        kept.references.push_back(r);
      }
      if (kept.references.empty() && !inst.references.empty()) {
        ++emptied;
        continue;
      }
      out.instances.push_back(std::move(kept));
    }
  }
  if (notes) {
    if (policy == Policy::DropCandidate)
      notes->push_back(fmt::format("{}: removed {} candidates that also appear as references",
                                   to_string(dataset.name), removed_instances));
    else
      notes->push_back(fmt::format("{}: removed {} references that also appear as candidates",
                                   to_string(dataset.name), removed_refs));
    if (emptied)
      notes->push_back(fmt::format("warning: {}: dropped {} instances left without references",
                                   to_string(dataset.name), emptied));
  }
  return out;
}

double aggregate_cf_ratings(std::span<const int> labels) {
  if (labels.empty()) throw DataError("aggregate_cf_ratings: empty label list");
  std::size_t positive = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw DataError(fmt::format("aggregate_cf_ratings: label {} is not binary", l));
    positive += static_cast<std::size_t>(l);
  }
  return static_cast<double>(positive) / static_cast<double>(labels.size());
}

std::vector<CaptionInstance> select_composite_records(std::span<const CompositeImage> images) {
  std::vector<CaptionInstance> out;
  for (const auto& img : images) {
    const auto n = img.candidates.size();
    if (n < 3 || n > 4)
      throw DataError(fmt::format("Composite image '{}' has {} candidates (expected 3 or 4)", img.image_id, n));
    for (std::size_t i = 0; i < 3; ++i) {
      CaptionInstance inst;
      inst.instance_id = fmt::format("{}#{}", img.image_id, i);
      inst.image_id = img.image_id;
      inst.candidate = img.candidates[i].text;
      inst.references = img.references;
      inst.rating = img.candidates[i].correctness;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

std::vector<PairInstance> filter_reformulations(std::vector<PairInstance> pairs, std::size_t* removed) {
  const auto before = pairs.size();
  std::erase_if(pairs, [](const PairInstance& p) {
    return collapse_whitespace(p.candidate_a) == collapse_whitespace(p.candidate_b);
  });
  if (removed) *removed = before - pairs.size();
  return pairs;
}

}  // namespace capeval
