#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "capeval/error.hpp"
#include "capeval/rng.hpp"
#include "capeval/stats.hpp"

namespace capeval {
namespace {

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  // Welford updates: equal inputs give exactly that mean and std 0.
  double ss = 0;
  std::size_t k = 0;
  for (double x : v) {
    const double delta = x - out.mean;
    out.mean += delta / static_cast<double>(++k);
    ss += delta * (x - out.mean);
  }
  out.std = std::sqrt(std::max(0.0, ss) / static_cast<double>(v.size()));
  return out;
}

double category_mean(const PairwiseAccuracy& acc) {
  if (acc.per_category.empty()) return acc.overall;
  double s = 0;
  for (const auto& [_, v] : acc.per_category) s += v;
  return s / static_cast<double>(acc.per_category.size());
}

PairwiseAccuracy score_instance(std::span<const PairInstance> pairs, const PairScorer& scorer) {
  auto [a, b] = scorer(pairs);
  if (a.size() != pairs.size() || b.size() != pairs.size())
    throw DataError(fmt::format("pairwise scorer returned {}/{} scores for {} pairs", a.size(), b.size(),
                                pairs.size()));
  return pairwise_accuracy(pairs, a, b);
}

PairwiseReport summarize(const Dataset& dataset, std::string_view metric, std::vector<PairwiseAccuracy> instances,
                         std::vector<std::uint64_t> seeds) {
  PairwiseReport rep;
  rep.dataset = std::string(to_string(dataset.name));
  rep.metric = std::string(metric);
  std::map<PairCategory, std::vector<double>> per_cat;
  std::vector<double> means;
  for (const auto& acc : instances) {
    for (const auto& [cat, v] : acc.per_category) per_cat[cat].push_back(v);
    means.push_back(category_mean(acc));
  }
  for (const auto& [cat, vals] : per_cat) rep.per_category_accuracy[cat] = mean_std(vals);
  rep.overall = mean_std(means);
  rep.seeds = std::move(seeds);
  rep.instances = std::move(instances);
  return rep;
}

}  // namespace

std::vector<PairInstance> resolve_pascal_pairs(std::span<const PairInstance> raw, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<PairInstance> out;
  out.reserve(raw.size());
  for (const auto& p : raw) {
    if (!p.votes_a || !p.votes_b) throw DataError(fmt::format("pair '{}' has no vote counts", p.pair_id));
    if (*p.votes_a + *p.votes_b <= 0) throw DataError(fmt::format("pair '{}' has zero votes", p.pair_id));
    PairInstance r = p;
    if (*p.votes_a > *p.votes_b)
      r.preferred = Side::A;
    else if (*p.votes_b > *p.votes_a)
      r.preferred = Side::B;
    else
      r.preferred = rng.below(2) == 0 ? Side::A : Side::B;
    if (p.references.size() > kPascalReferenceSample) {
      r.references.clear();
      for (auto i : rng.sample_indices(p.references.size(), kPascalReferenceSample))
        r.references.push_back(p.references[i]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

PairwiseAccuracy pairwise_accuracy(std::span<const PairInstance> pairs, std::span<const double> scores_a,
                                   std::span<const double> scores_b) {
  if (scores_a.size() != pairs.size() || scores_b.size() != pairs.size())
    throw DataError(fmt::format("pairwise_accuracy: {} pairs but {} / {} scores", pairs.size(), scores_a.size(),
                                scores_b.size()));
  if (pairs.empty()) throw DataError("pairwise_accuracy: no pairs");
  PairwiseAccuracy acc;
  std::map<PairCategory, double> credit;
  double total = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    if (!p.preferred) throw DataError(fmt::format("pair '{}' has no resolved preference", p.pair_id));
    const double preferred = *p.preferred == Side::A ? scores_a[i] : scores_b[i];
    const double other = *p.preferred == Side::A ? scores_b[i] : scores_a[i];
    const double c = preferred > other ? 1.0 : preferred == other ? kTieCredit : 0.0;
    credit[p.category] += c;
    ++acc.counts[p.category];
    total += c;
  }
  acc.overall = total / static_cast<double>(pairs.size());
  for (const auto& [cat, c] : credit) acc.per_category[cat] = c / static_cast<double>(acc.counts[cat]);
  return acc;
}

PairwiseReport pascal50s_run(const Dataset& dataset, std::string_view metric, const PairScorer& scorer,
                             std::uint64_t base_seed, int instances) {
  if (!dataset.is_pairwise()) throw DataError("pascal50s_run: dataset has no pairs");
  if (instances < 1) throw ConfigError("pascal50s_run: need at least one protocol instance");
  std::vector<PairwiseAccuracy> results;
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < instances; ++i) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    const auto resolved = resolve_pascal_pairs(dataset.pairs, seed);
    results.push_back(score_instance(resolved, scorer));
    seeds.push_back(seed);
  }
  return summarize(dataset, metric, std::move(results), std::move(seeds));
}

PairwiseReport preference_run(const Dataset& dataset, std::string_view metric, const PairScorer& scorer) {
  if (!dataset.is_pairwise()) throw DataError("preference_run: dataset has no pairs");
  std::vector<PairwiseAccuracy> results;
  results.push_back(score_instance(dataset.pairs, scorer));
  return summarize(dataset, metric, std::move(results), {});
}

}  // namespace capeval
