#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "capeval/corpus.hpp"
#include "capeval/score_matrix.hpp"
#include "capeval/textnorm.hpp"

namespace capeval {

// ---------------------------------------------------------------------------
// BLEU

/// Sentence-level BLEU-n (n in 1..4) with clipped n-gram counts and the
/// brevity penalty computed against the reference length closest to the
/// candidate (shorter wins ties). Each modified precision is smoothed as
/// (matches + 1e-15) / (guesses + 1e-9), so zero-overlap candidates score ~0.
double bleu_n(const TokenSeq& candidate, std::span<const TokenSeq> references, int n);

/// BLEU-1..4 in one pass; element k holds BLEU-(k+1).
std::array<double, 4> bleu_all(const TokenSeq& candidate, std::span<const TokenSeq> references);

// ---------------------------------------------------------------------------
// ROUGE-L

inline constexpr double kRougeBeta = 1.2;

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b);

/// ROUGE-L F-measure with beta 1.2. The precision and recall entering the
/// F-measure are each maximized over the references independently.
double rouge_l(const TokenSeq& candidate, std::span<const TokenSeq> references);

// ---------------------------------------------------------------------------
// CIDEr-D

/// Document frequencies of 1..max_n-grams, one document per reference set.
struct DocFreqStats {
  int max_n = 4;
  std::unordered_map<std::string, int> df;
  int num_docs = 0;
  bool stemmed = false;

  /// Stored frequency, or 0 for unseen n-grams (floored to 1 by the IDF).
  int lookup(const std::string& ngram) const {
    auto it = df.find(ngram);
    return it == df.end() ? 0 : it->second;
  }
};

struct CiderOptions {
  double sigma = 6.0;
  /// Porter-stem tokens before counting. Off by default to match the
  /// MSCOCO caption evaluation package.
  bool stem = false;
};

DocFreqStats build_df(std::span<const std::vector<TokenSeq>> reference_sets, const CiderOptions& opts = {});

/// CIDEr-D in [0, 10]: TF-IDF n-gram vectors (n = 1..4), candidate counts
/// clipped by the reference, cosine averaged over references, Gaussian
/// penalty on the bigram-count length difference, scaled by 10.
double cider_d(const TokenSeq& candidate, std::span<const TokenSeq> references, const DocFreqStats& stats,
               const CiderOptions& opts = {});

// ---------------------------------------------------------------------------
// METEOR

/// Plain-text synonym sets, one per line, tokens space-separated. Words that
/// share any set are merged into one equivalence class.
class SynonymTable {
 public:
  SynonymTable() = default;
  static SynonymTable load(const std::filesystem::path& path);
  static SynonymTable from_sets(const std::vector<std::vector<std::string>>& sets);

  /// Class id for `word`, if it is listed.
  std::optional<int> class_of(const std::string& word) const;
  bool empty() const { return classes_.empty(); }

 private:
  std::unordered_map<std::string, int> classes_;
};

struct MeteorParams {
  double alpha = 0.9;
  double gamma = 0.5;
  double theta = 3.0;
  const SynonymTable* synonyms = nullptr;
};

/// Alignment statistics for one candidate/reference pair.
struct MeteorAlignment {
  int matches = 0;
  int chunks = 0;
  std::vector<std::pair<int, int>> links;  // (candidate index, reference index), by candidate index
};

/// Staged one-to-one unigram alignment (exact, Porter stem, synonyms). Each
/// stage maximizes the number of new links, then minimizes crossings against
/// all links fixed so far.
MeteorAlignment meteor_align(const TokenSeq& candidate, const TokenSeq& reference, const MeteorParams& params = {});

/// Classic METEOR: F_mean = PR / (alpha P + (1 - alpha) R), fragmentation
/// penalty gamma (chunks / m)^theta, best score over references.
double meteor(const TokenSeq& candidate, std::span<const TokenSeq> references, const MeteorParams& params = {});

// ---------------------------------------------------------------------------
// Dataset scoring

enum class NativeMetric { BLEU1, BLEU2, BLEU3, BLEU4, ROUGE, CIDEr, METEOR };

inline constexpr std::array<NativeMetric, 7> kAllNativeMetrics = {
    NativeMetric::BLEU1, NativeMetric::BLEU2, NativeMetric::BLEU3, NativeMetric::BLEU4,
    NativeMetric::ROUGE, NativeMetric::CIDEr, NativeMetric::METEOR};

/// Registry name of the metric ("BLEU1", "ROUGE", "CIDEr", ...).
std::string_view metric_name(NativeMetric metric);

/// Case-insensitive lookup by registry name or alias ("bleu1", "rouge-l", "cider-d").
std::optional<NativeMetric> parse_native_metric(std::string_view text);

struct ScoringOptions {
  int jobs = 1;
  CiderOptions cider;
  MeteorParams meteor;
};

struct ScoringResult {
  ScoreMatrix matrix;
  /// Instances whose reference list was empty; their rows are left missing.
  std::vector<std::string> missing_references;
};

/// Scores every instance of a rating dataset. The CIDEr document-frequency
/// table is built once over the instances' reference sets. Output is
/// independent of `jobs`.
ScoringResult score_dataset(const Dataset& dataset, std::span<const NativeMetric> metrics,
                            const ScoringOptions& opts = {});

/// Scores parallel candidate/reference-set lists, one value per candidate.
/// CIDEr statistics are built over `reference_sets`.
std::vector<std::vector<double>> score_texts(std::span<const std::string> candidates,
                                             std::span<const std::vector<std::string>> reference_sets,
                                             std::span<const NativeMetric> metrics,
                                             const ScoringOptions& opts = {});

}  // namespace capeval
