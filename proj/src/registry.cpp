#include "capeval/registry.hpp"

#include <vector>

namespace capeval {

std::string_view to_string(TaxonomyCategory category) {
  switch (category) {
    case TaxonomyCategory::LexicalSimilarity: return "Lexical similarity";
    case TaxonomyCategory::PhraseSemanticSimilarity: return "Phrase semantic similarity";
    case TaxonomyCategory::SentenceSimilarity: return "Sentence-level similarity";
    case TaxonomyCategory::ExtractedInformationSimilarity: return "Extracted information similarity";
    case TaxonomyCategory::ImageLexicalSimilarity: return "Image lexical similarity";
    case TaxonomyCategory::ImagePhraseSimilarity: return "Image phrase-level semantic similarity";
    case TaxonomyCategory::ImageSimilarity: return "Image similarity";
    case TaxonomyCategory::RetrievalBased: return "Retrieval-based";
    case TaxonomyCategory::MultipleSourceSimilarity: return "Multiple source similarity";
    case TaxonomyCategory::QuestionAnswering: return "Question generation and answering";
    case TaxonomyCategory::NaturalLanguageInference: return "Natural language inference";
    case TaxonomyCategory::Fluency: return "Candidate fluency";
    case TaxonomyCategory::HumanLikeness: return "Human-likeness";
    case TaxonomyCategory::HumanRatingPrediction: return "Human rating prediction";
    case TaxonomyCategory::Diversity: return "Candidate diversity";
    case TaxonomyCategory::Bias: return "Bias in candidates";
  }
  return "";
}

std::string_view to_string(Provider provider) { return provider == Provider::Native ? "native" : "external"; }

std::span<const MetricDescriptor> registry() {
  using C = TaxonomyCategory;
  constexpr auto N = Provider::Native;
  constexpr auto E = Provider::External;
  const Interval unit{0.0, 1.0};
  const Interval cosine{-1.0, 1.0};
  // CLIP-S and PAC-S carry rescaling weights of 2.5 and 2.0.
  const Interval clip{0.0, 2.5};
  const Interval pac{0.0, 2.0};
  static const std::vector<MetricDescriptor> entries = {
      {"BLIP2Score", C::ImageSimilarity, E, unit},
      {"Polos", C::HumanRatingPrediction, E, unit},
      {"PACScore", C::ImageSimilarity, E, pac},
      {"Exact NO", C::LexicalSimilarity, E, unit},
      {"BLEU1", C::LexicalSimilarity, N, unit},
      {"Fuzzy VO", C::PhraseSemanticSimilarity, E, unit},
      {"BLEU4", C::LexicalSimilarity, N, unit},
      {"CIDEr", C::LexicalSimilarity, N, Interval{0.0, 10.0}},
      {"ROUGE", C::LexicalSimilarity, N, unit},
      {"RefCLIPScore", C::MultipleSourceSimilarity, E, clip},
      {"BLEU2", C::LexicalSimilarity, N, unit},
      {"BLEU3", C::LexicalSimilarity, N, unit},
      {"METEOR", C::LexicalSimilarity, N, unit},
      {"SPICE", C::PhraseSemanticSimilarity, E, unit},
      {"CLIPScore", C::ImageSimilarity, E, clip},
      {"RefPACScore", C::MultipleSourceSimilarity, E, pac},
      {"MPNetScore", C::SentenceSimilarity, E, cosine},
      {"CLIPImageScore", C::ImageSimilarity, E, cosine},
      {"Exact VO", C::LexicalSimilarity, E, unit},
      {"Fuzzy NO", C::PhraseSemanticSimilarity, E, unit},
  };
  return entries;
}

const MetricDescriptor* find_metric(std::string_view name) {
  for (const auto& d : registry())
    if (d.name == name) return &d;
  return nullptr;
}

std::size_t registry_rank(std::string_view name) {
  auto reg = registry();
  for (std::size_t i = 0; i < reg.size(); ++i)
    if (reg[i].name == name) return i;
  return reg.size();
}

}  // namespace capeval
