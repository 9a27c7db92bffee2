#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "capeval/corpus.hpp"

namespace capeval {

/// Leaf categories of the automatic-metric taxonomy.
enum class TaxonomyCategory {
  LexicalSimilarity,
  PhraseSemanticSimilarity,
  SentenceSimilarity,
  ExtractedInformationSimilarity,
  ImageLexicalSimilarity,
  ImagePhraseSimilarity,
  ImageSimilarity,
  RetrievalBased,
  MultipleSourceSimilarity,
  QuestionAnswering,
  NaturalLanguageInference,
  Fluency,
  HumanLikeness,
  HumanRatingPrediction,
  Diversity,
  Bias,
};

enum class Provider { Native, External };

struct MetricDescriptor {
  std::string name;
  TaxonomyCategory category;
  Provider provider;
  std::optional<Interval> declared_range;
};

std::string_view to_string(TaxonomyCategory category);
std::string_view to_string(Provider provider);

/// Built-in descriptors for all metrics used in the experiments, in a fixed
/// order that also serves as the feature-selection tie-break order.
std::span<const MetricDescriptor> registry();

/// Exact, case-sensitive lookup.
const MetricDescriptor* find_metric(std::string_view name);

/// Position in `registry()`, or registry().size() for unknown names.
std::size_t registry_rank(std::string_view name);

}  // namespace capeval
