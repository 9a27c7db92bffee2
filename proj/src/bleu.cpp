#include <cmath>
#include <cstdlib>
#include <unordered_map>

#include <fmt/format.h>

#include "capeval/error.hpp"
#include "capeval/metrics.hpp"

namespace capeval {
namespace {

constexpr int kMaxOrder = 4;
constexpr double kSmall = 1e-9;
constexpr double kTiny = 1e-15;

int closest_ref_length(int candidate_len, std::span<const TokenSeq> references) {
  int best = static_cast<int>(references.front().size());
  for (const auto& ref : references) {
    const int len = static_cast<int>(ref.size());
    const int d = std::abs(len - candidate_len);
    const int best_d = std::abs(best - candidate_len);
    if (d < best_d || (d == best_d && len < best)) best = len;
  }
  return best;
}

}  // namespace

std::array<double, 4> bleu_all(const TokenSeq& candidate, std::span<const TokenSeq> references) {
  if (references.empty()) throw DataError("BLEU: no references");

  const int testlen = static_cast<int>(candidate.size());
  std::array<double, kMaxOrder> guess{};
  std::array<double, kMaxOrder> correct{};
  for (int k = 0; k < kMaxOrder; ++k) {
    const int n = k + 1;
    auto cand = ngrams(candidate, n);
    std::unordered_map<std::string, int> max_ref;
    for (const auto& ref : references)
      for (const auto& [g, c] : ngrams(ref, n).counts) {
        auto& slot = max_ref[g];
        if (c > slot) slot = c;
      }
    guess[static_cast<size_t>(k)] = std::max(0, testlen - k);
    int clipped = 0;
    for (const auto& [g, c] : cand.counts) {
      auto it = max_ref.find(g);
      if (it != max_ref.end()) clipped += std::min(c, it->second);
    }
    correct[static_cast<size_t>(k)] = clipped;
  }

  const int reflen = closest_ref_length(testlen, references);
  std::array<double, kMaxOrder> out{};
  double product = 1.0;
  for (size_t k = 0; k < kMaxOrder; ++k) {
    product *= (correct[k] + kTiny) / (guess[k] + kSmall);
    out[k] = std::pow(product, 1.0 / static_cast<double>(k + 1));
  }
  const double ratio = (testlen + kTiny) / (reflen + kSmall);
  if (ratio < 1.0) {
    const double bp = std::exp(1.0 - 1.0 / ratio);
    for (auto& v : out) v *= bp;
  }
  return out;
}

double bleu_n(const TokenSeq& candidate, std::span<const TokenSeq> references, int n) {
  if (n < 1 || n > kMaxOrder) throw ConfigError(fmt::format("BLEU order {} outside 1..4", n));
  return bleu_all(candidate, references)[static_cast<size_t>(n - 1)];
}

}  // namespace capeval
