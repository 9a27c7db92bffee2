#include <algorithm>

#include "capeval/error.hpp"
#include "capeval/metrics.hpp"

namespace capeval {

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  const TokenSeq& longer = a.size() >= b.size() ? a : b;
  const TokenSeq& shorter = a.size() >= b.size() ? b : a;
  std::vector<std::size_t> prev(shorter.size() + 1, 0), cur(shorter.size() + 1, 0);
  for (const auto& tok : longer) {
    for (std::size_t j = 1; j <= shorter.size(); ++j)
      cur[j] = tok == shorter[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[shorter.size()];
}

double rouge_l(const TokenSeq& candidate, std::span<const TokenSeq> references) {
  if (references.empty()) throw DataError("ROUGE-L: no references");
  if (candidate.empty()) return 0.0;
  double prec_max = 0.0;
  double rec_max = 0.0;
  for (const auto& ref : references) {
    if (ref.empty()) continue;
    const auto lcs = static_cast<double>(lcs_length(candidate, ref));
    prec_max = std::max(prec_max, lcs / static_cast<double>(candidate.size()));
    rec_max = std::max(rec_max, lcs / static_cast<double>(ref.size()));
  }
  if (prec_max == 0.0 || rec_max == 0.0) return 0.0;
  const double b2 = kRougeBeta * kRougeBeta;
  return ((1 + b2) * prec_max * rec_max) / (rec_max + b2 * prec_max);
}

}  // namespace capeval
