#include <algorithm>
#include <cctype>
#include <thread>

#include <fmt/format.h>

#include "capeval/error.hpp"
#include "capeval/metrics.hpp"

namespace capeval {
namespace {

struct TokenizedItem {
  TokenSeq candidate;
  std::vector<TokenSeq> references;
};

// Runs fn(i) for i in [0, n) over `jobs` workers with contiguous chunks.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n < 2 * workers) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

std::vector<std::vector<double>> score_items(const std::vector<TokenizedItem>& items,
                                             std::span<const NativeMetric> metrics, const ScoringOptions& opts) {
  const bool need_cider = std::find(metrics.begin(), metrics.end(), NativeMetric::CIDEr) != metrics.end();
  DocFreqStats stats;
  if (need_cider) {
    std::vector<std::vector<TokenSeq>> sets;
    sets.reserve(items.size());
    for (const auto& it : items)
      if (!it.references.empty()) sets.push_back(it.references);
    if (!sets.empty()) stats = build_df(sets, opts.cider);
  }

  std::vector<std::vector<double>> out(items.size(), std::vector<double>(metrics.size(), 0.0));
  parallel_for(items.size(), opts.jobs, [&](std::size_t i) {
    const auto& item = items[i];
    if (item.references.empty()) return;
    std::optional<std::array<double, 4>> bleu;
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      double v = 0;
      switch (metrics[m]) {
        case NativeMetric::BLEU1:
        case NativeMetric::BLEU2:
        case NativeMetric::BLEU3:
        case NativeMetric::BLEU4:
          if (!bleu) bleu = bleu_all(item.candidate, item.references);
          v = (*bleu)[static_cast<size_t>(metrics[m]) - static_cast<size_t>(NativeMetric::BLEU1)];
          break;
        case NativeMetric::ROUGE: v = rouge_l(item.candidate, item.references); break;
        case NativeMetric::CIDEr: v = cider_d(item.candidate, item.references, stats, opts.cider); break;
        case NativeMetric::METEOR: v = meteor(item.candidate, item.references, opts.meteor); break;
      }
      out[i][m] = v;
    }
  });
  return out;
}

std::vector<TokenizedItem> tokenize_items(std::span<const std::string> candidates,
                                          std::span<const std::vector<std::string>> reference_sets, int jobs) {
  std::vector<TokenizedItem> items(candidates.size());
  parallel_for(candidates.size(), jobs, [&](std::size_t i) {
    items[i].candidate = tokenize(candidates[i]);
    for (const auto& r : reference_sets[i]) items[i].references.push_back(tokenize(r));
  });
  return items;
}

}  // namespace

std::string_view metric_name(NativeMetric metric) {
  switch (metric) {
    case NativeMetric::BLEU1: return "BLEU1";
    case NativeMetric::BLEU2: return "BLEU2";
    case NativeMetric::BLEU3: return "BLEU3";
    case NativeMetric::BLEU4: return "BLEU4";
    case NativeMetric::ROUGE: return "ROUGE";
    case NativeMetric::CIDEr: return "CIDEr";
    case NativeMetric::METEOR: return "METEOR";
  }
  return "";
}

std::optional<NativeMetric> parse_native_metric(std::string_view text) {
  std::string key;
  for (char c : text)
    if (c != '-' && c != '_') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "bleu1") return NativeMetric::BLEU1;
  if (key == "bleu2") return NativeMetric::BLEU2;
  if (key == "bleu3") return NativeMetric::BLEU3;
  if (key == "bleu4" || key == "bleu") return NativeMetric::BLEU4;
  if (key == "rouge" || key == "rougel") return NativeMetric::ROUGE;
  if (key == "cider" || key == "ciderd") return NativeMetric::CIDEr;
  if (key == "meteor") return NativeMetric::METEOR;
  return std::nullopt;
}

std::vector<std::vector<double>> score_texts(std::span<const std::string> candidates,
                                             std::span<const std::vector<std::string>> reference_sets,
                                             std::span<const NativeMetric> metrics, const ScoringOptions& opts) {
  if (candidates.size() != reference_sets.size())
    throw DataError(fmt::format("score_texts: {} candidates but {} reference sets", candidates.size(),
                                reference_sets.size()));
  for (std::size_t i = 0; i < reference_sets.size(); ++i)
    if (reference_sets[i].empty()) throw DataError(fmt::format("score_texts: item {} has no references", i));
  return score_items(tokenize_items(candidates, reference_sets, opts.jobs), metrics, opts);
}

ScoringResult score_dataset(const Dataset& dataset, std::span<const NativeMetric> metrics,
                            const ScoringOptions& opts) {
  if (dataset.is_pairwise()) throw DataError("score_dataset: expected a rating dataset");
  std::vector<std::string> names;
  for (auto m : metrics) {
    std::string n(metric_name(m));
    if (std::find(names.begin(), names.end(), n) != names.end())
      throw ConfigError(fmt::format("metric '{}' requested twice", n));
    names.push_back(std::move(n));
  }

  std::vector<std::string> ids, candidates;
  std::vector<std::vector<std::string>> refs;
  for (const auto& inst : dataset.instances) {
    ids.push_back(inst.instance_id);
    candidates.push_back(inst.candidate);
    refs.push_back(inst.references);
  }

  ScoringResult result;
  result.matrix = ScoreMatrix(ids, names);
  const auto values = score_items(tokenize_items(candidates, refs, opts.jobs), metrics, opts);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (refs[r].empty()) {
      result.missing_references.push_back(ids[r]);
      continue;
    }
    for (std::size_t c = 0; c < names.size(); ++c) result.matrix.set(r, c, values[r][c]);
  }
  return result;
}

}  // namespace capeval
