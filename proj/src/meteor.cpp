#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "capeval/error.hpp"
#include "capeval/metrics.hpp"

namespace capeval {
namespace {

using Link = std::pair<int, int>;

// Beyond this many subset combinations in one stage the exhaustive search
// is replaced by a class-by-class greedy choice.
constexpr std::size_t kMaxCombinations = 50000;

struct MatchClass {
  std::vector<int> cand;
  std::vector<int> ref;
};

std::vector<std::vector<int>> combinations(const std::vector<int>& items, std::size_t k) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (current.size() == k) {
      out.push_back(current);
      return;
    }
    for (std::size_t i = start; i + (k - current.size()) <= items.size(); ++i) {
      current.push_back(items[i]);
      rec(i + 1);
      current.pop_back();
    }
  };
  rec(0);
  return out;
}

int crossings_with(const std::vector<Link>& added, const std::vector<Link>& fixed) {
  int n = 0;
  for (const auto& [c1, r1] : added)
    for (const auto& [c2, r2] : fixed)
      if ((c1 < c2 && r1 > r2) || (c1 > c2 && r1 < r2)) ++n;
  return n;
}

// Order-preserving links for one class given the chosen subset of its
// larger side.
std::vector<Link> class_links(const MatchClass& cls, const std::vector<int>& chosen) {
  std::vector<Link> out;
  const bool cand_larger = cls.cand.size() >= cls.ref.size();
  const auto& other = cand_larger ? cls.ref : cls.cand;
  for (std::size_t i = 0; i < chosen.size(); ++i)
    out.push_back(cand_larger ? Link{chosen[i], other[i]} : Link{other[i], chosen[i]});
  return out;
}

std::vector<Link> align_stage(const std::vector<MatchClass>& classes, const std::vector<Link>& fixed) {
  std::vector<std::vector<std::vector<int>>> options;
  std::size_t total = 1;
  for (const auto& cls : classes) {
    const bool cand_larger = cls.cand.size() >= cls.ref.size();
    const auto& larger = cand_larger ? cls.cand : cls.ref;
    const auto k = std::min(cls.cand.size(), cls.ref.size());
    options.push_back(combinations(larger, k));
    total = std::min(total * options.back().size(), kMaxCombinations + 1);
  }

  std::vector<Link> best;
  if (total <= kMaxCombinations) {
    int best_cross = std::numeric_limits<int>::max();
    std::vector<Link> current;
    std::function<void(std::size_t, int)> rec = [&](std::size_t idx, int cross) {
      if (cross >= best_cross) return;
      if (idx == classes.size()) {
        best_cross = cross;
        best = current;
        return;
      }
      for (const auto& chosen : options[idx]) {
        auto links = class_links(classes[idx], chosen);
        int extra = crossings_with(links, fixed) + crossings_with(links, current);
        const auto mark = current.size();
        current.insert(current.end(), links.begin(), links.end());
        rec(idx + 1, cross + extra);
        current.resize(mark);
      }
    };
    rec(0, 0);
    return best;
  }

  std::vector<Link> placed = fixed;
  for (std::size_t idx = 0; idx < classes.size(); ++idx) {
    std::vector<Link> pick;
    int pick_cross = std::numeric_limits<int>::max();
    for (const auto& chosen : options[idx]) {
      auto links = class_links(classes[idx], chosen);
      int c = crossings_with(links, placed);
      if (c < pick_cross) {
        pick_cross = c;
        pick = std::move(links);
      }
    }
    placed.insert(placed.end(), pick.begin(), pick.end());
    best.insert(best.end(), pick.begin(), pick.end());
  }
  return best;
}

}  // namespace

SynonymTable SynonymTable::from_sets(const std::vector<std::vector<std::string>>& sets) {
  // Union-find over set indices so overlapping sets collapse into one class.
  std::vector<int> parent(sets.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  std::unordered_map<std::string, int> first_set;
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (const auto& w : sets[i]) {
      auto [it, inserted] = first_set.emplace(w, static_cast<int>(i));
      if (!inserted) parent[find(static_cast<int>(i))] = find(it->second);
    }
  SynonymTable table;
  for (const auto& [w, s] : first_set) table.classes_[w] = find(s);
  return table;
}

SynonymTable SynonymTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open synonym table '{}'", path.string()));
  std::vector<std::vector<std::string>> sets;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = tokenize(line);
    if (toks.size() >= 2) sets.push_back(std::move(toks));
  }
  return from_sets(sets);
}

std::optional<int> SynonymTable::class_of(const std::string& word) const {
  auto it = classes_.find(word);
  if (it == classes_.end()) return std::nullopt;
  return it->second;
}

MeteorAlignment meteor_align(const TokenSeq& candidate, const TokenSeq& reference, const MeteorParams& params) {
  const int nc = static_cast<int>(candidate.size());
  const int nr = static_cast<int>(reference.size());
  std::vector<bool> cand_used(static_cast<size_t>(nc), false), ref_used(static_cast<size_t>(nr), false);
  std::vector<Link> links;

  using KeyFn = std::function<std::optional<std::string>(const std::string&)>;
  std::vector<KeyFn> stages = {
      [](const std::string& w) -> std::optional<std::string> { return w; },
      [](const std::string& w) -> std::optional<std::string> { return stem(w); },
  };
  if (params.synonyms && !params.synonyms->empty()) {
    const SynonymTable* table = params.synonyms;
    stages.push_back([table](const std::string& w) -> std::optional<std::string> {
      if (auto c = table->class_of(w)) return std::to_string(*c);
      return std::nullopt;
    });
  }

  for (const auto& key_of : stages) {
    std::map<std::string, MatchClass> by_key;
    for (int i = 0; i < nc; ++i)
      if (!cand_used[static_cast<size_t>(i)])
        if (auto k = key_of(candidate[static_cast<size_t>(i)])) by_key[*k].cand.push_back(i);
    for (int j = 0; j < nr; ++j)
      if (!ref_used[static_cast<size_t>(j)])
        if (auto k = key_of(reference[static_cast<size_t>(j)]))
          if (auto it = by_key.find(*k); it != by_key.end()) it->second.ref.push_back(j);

    // Classes in order of first candidate occurrence keep the search order
    // deterministic and independent of key spelling.
    std::vector<MatchClass> classes;
    for (auto& [_, cls] : by_key)
      if (!cls.cand.empty() && !cls.ref.empty()) classes.push_back(std::move(cls));
    std::sort(classes.begin(), classes.end(),
              [](const MatchClass& a, const MatchClass& b) { return a.cand.front() < b.cand.front(); });
    if (classes.empty()) continue;

    for (const auto& [c, r] : align_stage(classes, links)) {
      cand_used[static_cast<size_t>(c)] = true;
      ref_used[static_cast<size_t>(r)] = true;
      links.emplace_back(c, r);
    }
  }

  std::sort(links.begin(), links.end());
  MeteorAlignment out;
  out.matches = static_cast<int>(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (i == 0 || links[i].first != links[i - 1].first + 1 || links[i].second != links[i - 1].second + 1)
      ++out.chunks;
  }
  out.links = std::move(links);
  return out;
}

double meteor(const TokenSeq& candidate, std::span<const TokenSeq> references, const MeteorParams& params) {
  if (references.empty()) throw DataError("METEOR: no references");
  double best = 0.0;
  if (candidate.empty()) return best;
  for (const auto& ref : references) {
    if (ref.empty()) continue;
    const auto al = meteor_align(candidate, ref, params);
    if (al.matches == 0) continue;
    const double m = al.matches;
    const double p = m / static_cast<double>(candidate.size());
    const double r = m / static_cast<double>(ref.size());
    const double fmean = p * r / (params.alpha * p + (1.0 - params.alpha) * r);
    const double penalty = params.gamma * std::pow(static_cast<double>(al.chunks) / m, params.theta);
    best = std::max(best, fmean * (1.0 - penalty));
  }
  return best;
}

}  // namespace capeval
