#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "capeval/corpus.hpp"
#include "capeval/score_matrix.hpp"

namespace capeval {

// ---------------------------------------------------------------------------
// Correlation coefficients

double pearson(std::span<const double> x, std::span<const double> y);

/// Concordance counts over all n(n-1)/2 pairs, computed in O(n log n).
struct ConcordanceCounts {
  std::int64_t n = 0;
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t tied_x = 0;   // pairs tied in x (including joint ties)
  std::int64_t tied_y = 0;   // pairs tied in y (including joint ties)
  std::int64_t tied_xy = 0;  // pairs tied in both
  std::int64_t distinct_x = 0;
  std::int64_t distinct_y = 0;

  std::int64_t total_pairs() const { return n * (n - 1) / 2; }
};

ConcordanceCounts concordance(std::span<const double> x, std::span<const double> y);

/// tau-b = (C - D) / sqrt((n0 - n1)(n0 - n2)).
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

/// Stuart's tau-c = 2m(C - D) / (n^2 (m - 1)), m = min(#distinct x, #distinct y).
double kendall_tau_c(std::span<const double> x, std::span<const double> y);

double correlation(CorrelationKind kind, std::span<const double> x, std::span<const double> y);

struct CorrelationReport {
  std::string dataset;
  std::string metric;
  CorrelationKind kind = CorrelationKind::Pearson;
  std::optional<double> value;
  std::size_t n = 0;
  /// Set when the coefficient is undefined for this column.
  std::string error;
};

/// One report per matrix column against `ratings` (aligned with the rows).
/// A degenerate column yields a report with `error` set; the other columns
/// are unaffected.
std::vector<CorrelationReport> correlate(const ScoreMatrix& scores, std::span<const double> ratings,
                                         CorrelationKind kind, std::string_view dataset = "");

// ---------------------------------------------------------------------------
// Pairwise protocols

inline constexpr std::size_t kPascalReferenceSample = 5;
inline constexpr double kTieCredit = 0.5;

/// Resolves the human preference by majority vote, breaking equal votes
/// uniformly at random, and samples kPascalReferenceSample references per
/// pair. Draw order per pair (file order): one tie draw if the votes are
/// equal, then the reference sample.
std::vector<PairInstance> resolve_pascal_pairs(std::span<const PairInstance> raw, std::uint64_t seed);

struct PairwiseAccuracy {
  double overall = 0;
  std::map<PairCategory, double> per_category;
  std::map<PairCategory, std::size_t> counts;
};

/// Credit 1 when the preferred side scores strictly higher, kTieCredit on an
/// exact tie, 0 otherwise.
PairwiseAccuracy pairwise_accuracy(std::span<const PairInstance> pairs, std::span<const double> scores_a,
                                   std::span<const double> scores_b);

struct MeanStd {
  double mean = 0;
  double std = 0;  // population standard deviation
};

struct PairwiseReport {
  std::string dataset;
  std::string metric;
  std::map<PairCategory, MeanStd> per_category_accuracy;
  /// Mean over the categories, with its spread across protocol instances.
  MeanStd overall;
  std::vector<std::uint64_t> seeds;
  /// Per-instance results, in seed order.
  std::vector<PairwiseAccuracy> instances;
};

/// Batch scorer: scores for side A and side B of every pair. Pairs arrive
/// resolved, with their sampled references.
using PairScorer =
    std::function<std::pair<std::vector<double>, std::vector<double>>(std::span<const PairInstance>)>;

/// Runs `instances` seeded protocol instances (seeds base_seed + i) of
/// tie-breaking, reference sampling and scoring; reports mean and
/// population std per category and for the category mean.
PairwiseReport pascal50s_run(const Dataset& dataset, std::string_view metric, const PairScorer& scorer,
                             std::uint64_t base_seed, int instances = 5);

/// Single-instance accuracy on pairs that already carry a preference.
PairwiseReport preference_run(const Dataset& dataset, std::string_view metric, const PairScorer& scorer);

}  // namespace capeval
