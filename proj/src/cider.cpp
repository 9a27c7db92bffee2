#include <cmath>
#include <unordered_set>

#include "capeval/error.hpp"
#include "capeval/metrics.hpp"

namespace capeval {
namespace {

struct TfIdfVector {
  std::array<std::unordered_map<std::string, double>, 4> weights;
  std::array<double, 4> norm{};
  int length = 0;  // number of bigrams
};

TfIdfVector to_tfidf(const TokenSeq& tokens, const DocFreqStats& stats) {
  TfIdfVector v;
  const double log_docs = std::log(static_cast<double>(stats.num_docs));
  for (int n = 1; n <= stats.max_n; ++n) {
    const auto idx = static_cast<size_t>(n - 1);
    for (const auto& [g, tf] : ngrams(tokens, n).counts) {
      const double log_df = std::log(std::max(1.0, static_cast<double>(stats.lookup(g))));
      const double w = static_cast<double>(tf) * (log_docs - log_df);
      v.weights[idx][g] = w;
      v.norm[idx] += w * w;
      if (n == 2) v.length += tf;
    }
  }
  for (auto& x : v.norm) x = std::sqrt(x);
  return v;
}

// Adds the penalized clipped cosine of each order to `per_n_sum`.
void accumulate_similarity(const TfIdfVector& hyp, const TfIdfVector& ref, double sigma, int max_n,
                           double* per_n_sum) {
  const double delta = static_cast<double>(hyp.length - ref.length);
  const double penalty = std::exp(-(delta * delta) / (2.0 * sigma * sigma));
  for (int n = 0; n < max_n; ++n) {
    const auto idx = static_cast<size_t>(n);
    double val = 0.0;
    for (const auto& [g, w] : hyp.weights[idx]) {
      auto it = ref.weights[idx].find(g);
      if (it != ref.weights[idx].end()) val += std::min(w, it->second) * it->second;
    }
    if (hyp.norm[idx] != 0.0 && ref.norm[idx] != 0.0) val /= hyp.norm[idx] * ref.norm[idx];
    per_n_sum[n] += val * penalty;
  }
}

}  // namespace

DocFreqStats build_df(std::span<const std::vector<TokenSeq>> reference_sets, const CiderOptions& opts) {
  if (reference_sets.empty()) throw DataError("CIDEr: empty reference corpus");
  DocFreqStats stats;
  stats.stemmed = opts.stem;
  stats.num_docs = static_cast<int>(reference_sets.size());
  std::unordered_set<std::string> seen;
  for (const auto& refs : reference_sets) {
    seen.clear();
    for (const auto& ref : refs) {
      const TokenSeq toks = opts.stem ? stem_all(ref) : ref;
      for (int n = 1; n <= stats.max_n; ++n)
        for (const auto& [g, _] : ngrams(toks, n).counts) seen.insert(g);
    }
    for (const auto& g : seen) ++stats.df[g];
  }
  return stats;
}

double cider_d(const TokenSeq& candidate, std::span<const TokenSeq> references, const DocFreqStats& stats,
               const CiderOptions& opts) {
  if (stats.num_docs <= 0) throw ConfigError("CIDEr: document-frequency statistics missing");
  if (references.empty()) throw DataError("CIDEr: no references");
  if (opts.stem != stats.stemmed) throw ConfigError("CIDEr: stemming option differs from the statistics");

  const TfIdfVector hyp = to_tfidf(opts.stem ? stem_all(candidate) : candidate, stats);
  double per_n[4] = {0, 0, 0, 0};
  for (const auto& ref : references) {
    const TfIdfVector r = to_tfidf(opts.stem ? stem_all(ref) : ref, stats);
    accumulate_similarity(hyp, r, opts.sigma, stats.max_n, per_n);
  }
  double mean = 0.0;
  for (int n = 0; n < stats.max_n; ++n) mean += per_n[n];
  mean /= static_cast<double>(stats.max_n);
  mean /= static_cast<double>(references.size());
  return mean * 10.0;
}

}  // namespace capeval
