#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace capeval {

/// Closed real interval.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool operator==(const Interval&) const = default;
  bool contains(double v) const { return v >= lo && v <= hi; }
  bool bounded() const {
    return lo != -std::numeric_limits<double>::infinity() ||
           hi != std::numeric_limits<double>::infinity();
  }
};

enum class Split { Train, Val, Test, Unsplit };

enum class DatasetName {
  Flickr8kExpert,
  Flickr8kCF,
  Composite,
  THumB,
  Polaris,
  Pascal50S,
  Reformulations,
  Custom
};

enum class CorrelationKind { TauB, TauC, Pearson, PairwiseOnly };

enum class Side { A, B };

enum class PairCategory { HC, HI, HM, MM, Reformulation };

struct CaptionInstance {
  std::string instance_id;
  std::string image_id;
  std::string candidate;
  std::vector<std::string> references;
  std::optional<double> rating;
  Split split = Split::Unsplit;

  bool operator==(const CaptionInstance&) const = default;
};

/// Two candidates for one image plus the human preference. For Reformulations
/// `candidate_a` is the original caption and `candidate_b` its reformulation.
/// Raw Pascal50S pairs carry vote totals and no preference until resolved.
struct PairInstance {
  std::string pair_id;
  std::string image_id;
  std::string candidate_a;
  std::string candidate_b;
  std::vector<std::string> references;
  std::optional<Side> preferred;
  PairCategory category = PairCategory::HC;
  std::optional<int> votes_a;
  std::optional<int> votes_b;

  bool operator==(const PairInstance&) const = default;
};

struct Dataset {
  DatasetName name = DatasetName::Custom;
  std::vector<CaptionInstance> instances;
  std::vector<PairInstance> pairs;
  Interval rating_range;
  CorrelationKind correlation_kind = CorrelationKind::Pearson;

  bool is_pairwise() const { return !pairs.empty(); }
  std::size_t size() const { return is_pairwise() ? pairs.size() : instances.size(); }
  bool operator==(const Dataset&) const = default;
};

std::string_view to_string(DatasetName name);
std::string_view to_string(Split split);
std::string_view to_string(CorrelationKind kind);
std::string_view to_string(PairCategory category);
std::string_view to_string(Side side);

/// Case-insensitive; accepts the enum spelling ("Flickr8kExpert") and the
/// hyphenated form ("flickr8k-expert").
std::optional<DatasetName> parse_dataset_name(std::string_view text);
std::optional<Split> parse_split(std::string_view text);

Interval default_rating_range(DatasetName name);
CorrelationKind default_correlation_kind(DatasetName name);
bool is_pair_dataset(DatasetName name);

/// Informational messages produced while loading or filtering (counts of
/// removed records and similar). Never affects results.
using Notes = std::vector<std::string>;

/// Parses the unified JSONL schema. Throws DataError naming the line for
/// malformed records, out-of-range ratings and duplicate ids. Reformulations
/// pairs whose two captions are identical are dropped here.
Dataset load_dataset(const std::filesystem::path& path, DatasetName name, Notes* notes = nullptr);
Dataset parse_dataset(std::istream& in, DatasetName name, std::string_view source = "<stream>",
                      Notes* notes = nullptr);

/// Inverse of parse_dataset on the normalized schema.
void write_dataset(const Dataset& dataset, std::ostream& out);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// Removes sentences that are both a candidate and a reference of the same
/// image. Flickr8kExpert drops the candidate instance; Flickr8kCF, Composite
/// and THumB drop the reference. Instances left without references are
/// dropped. Other datasets are returned unchanged. Idempotent.
Dataset apply_overlap_policy(const Dataset& dataset, Notes* notes = nullptr);

/// Fraction of positive labels. Throws DataError on an empty list.
double aggregate_cf_ratings(std::span<const int> labels);

struct CompositeCandidate {
  std::string text;
  double correctness = 0;
  double thoroughness = 0;
};

struct CompositeImage {
  std::string image_id;
  std::vector<std::string> references;
  std::vector<CompositeCandidate> candidates;
};

/// Keeps the first three candidates of each image and rates them by
/// correctness. Instance ids are "<image_id>#<index>".
std::vector<CaptionInstance> select_composite_records(std::span<const CompositeImage> images);

/// Drops pairs whose captions are identical after whitespace collapsing.
std::vector<PairInstance> filter_reformulations(std::vector<PairInstance> pairs,
                                                std::size_t* removed = nullptr);

}  // namespace capeval
