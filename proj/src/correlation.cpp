#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "capeval/error.hpp"
#include "capeval/stats.hpp"

namespace capeval {
namespace {

void check_inputs(std::span<const double> x, std::span<const double> y, const char* what) {
  if (x.size() != y.size())
    throw DataError(fmt::format("{}: length mismatch ({} vs {})", what, x.size(), y.size()));
  if (x.size() < 2) throw DataError(fmt::format("{}: need at least 2 samples", what));
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw DataError(fmt::format("{}: non-finite value at index {}", what, i));
}

std::int64_t tie_pairs(std::int64_t run) { return run * (run - 1) / 2; }

// Sorts `idx` by key[idx] with a stable merge sort and returns the number of
// strict inversions among the input order.
std::int64_t merge_count(std::vector<std::size_t>& idx, std::span<const double> key) {
  std::vector<std::size_t> buf(idx.size());
  std::int64_t swaps = 0;
  for (std::size_t width = 1; width < idx.size(); width *= 2) {
    for (std::size_t lo = 0; lo < idx.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, idx.size());
      const std::size_t hi = std::min(lo + 2 * width, idx.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (key[idx[j]] < key[idx[i]]) {
          swaps += static_cast<std::int64_t>(mid - i);
          buf[k++] = idx[j++];
        } else {
          buf[k++] = idx[i++];
        }
      }
      while (i < mid) buf[k++] = idx[i++];
      while (j < hi) buf[k++] = idx[j++];
    }
    std::swap(idx, buf);
  }
  return swaps;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_inputs(x, y, "pearson");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericalError("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

ConcordanceCounts concordance(std::span<const double> x, std::span<const double> y) {
  check_inputs(x, y, "kendall");
  ConcordanceCounts c;
  c.n = static_cast<std::int64_t>(x.size());

  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  std::int64_t run_x = 1, run_xy = 1;
  c.distinct_x = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    const bool same_x = x[idx[i]] == x[idx[i - 1]];
    const bool same_y = y[idx[i]] == y[idx[i - 1]];
    if (same_x) {
      ++run_x;
      if (same_y) {
        ++run_xy;
      } else {
        c.tied_xy += tie_pairs(run_xy);
        run_xy = 1;
      }
    } else {
      c.tied_x += tie_pairs(run_x);
      c.tied_xy += tie_pairs(run_xy);
      run_x = run_xy = 1;
      ++c.distinct_x;
    }
  }
  c.tied_x += tie_pairs(run_x);
  c.tied_xy += tie_pairs(run_xy);

  // With rows ordered by (x, y), the strict y-inversions are exactly the
  // discordant pairs.
  c.discordant = merge_count(idx, y);

  std::int64_t run_y = 1;
  c.distinct_y = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    if (y[idx[i]] == y[idx[i - 1]]) {
      ++run_y;
    } else {
      c.tied_y += tie_pairs(run_y);
      run_y = 1;
      ++c.distinct_y;
    }
  }
  c.tied_y += tie_pairs(run_y);

  c.concordant = c.total_pairs() - c.tied_x - c.tied_y + c.tied_xy - c.discordant;
  return c;
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  const auto c = concordance(x, y);
  const auto n0 = c.total_pairs();
  if (n0 == c.tied_x || n0 == c.tied_y) throw NumericalError("kendall_tau_b: all values tied in one input");
  const double denom =
      std::sqrt(static_cast<double>(n0 - c.tied_x)) * std::sqrt(static_cast<double>(n0 - c.tied_y));
  return std::clamp(static_cast<double>(c.concordant - c.discordant) / denom, -1.0, 1.0);
}

double kendall_tau_c(std::span<const double> x, std::span<const double> y) {
  const auto c = concordance(x, y);
  const auto m = std::min(c.distinct_x, c.distinct_y);
  if (m < 2) throw NumericalError("kendall_tau_c: fewer than 2 distinct values in one input");
  const auto n = static_cast<double>(c.n);
  const auto md = static_cast<double>(m);
  return std::clamp(2.0 * md * static_cast<double>(c.concordant - c.discordant) / (n * n * (md - 1.0)), -1.0, 1.0);
}

double correlation(CorrelationKind kind, std::span<const double> x, std::span<const double> y) {
  switch (kind) {
    case CorrelationKind::TauB: return kendall_tau_b(x, y);
    case CorrelationKind::TauC: return kendall_tau_c(x, y);
    case CorrelationKind::Pearson: return pearson(x, y);
    case CorrelationKind::PairwiseOnly: break;
  }
  throw ConfigError("correlation: pairwise-only datasets have no correlation coefficient");
}

std::vector<CorrelationReport> correlate(const ScoreMatrix& scores, std::span<const double> ratings,
                                         CorrelationKind kind, std::string_view dataset) {
  if (ratings.size() != scores.rows())
    throw DataError(fmt::format("correlate: {} ratings for {} score rows", ratings.size(), scores.rows()));
  std::vector<CorrelationReport> out;
  for (std::size_t c = 0; c < scores.cols(); ++c) {
    CorrelationReport rep;
    rep.dataset = std::string(dataset);
    rep.metric = scores.metric_names()[c];
    rep.kind = kind;
    rep.n = scores.rows();
    try {
      const auto col = scores.column(c);
      rep.value = correlation(kind, col, ratings);
    } catch (const Error& e) {
      rep.error = e.what();
    }
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace capeval
