#include <cmath>

#include <fmt/format.h>

#include "capeval/ensemble.hpp"
#include "capeval/error.hpp"

namespace capeval {
namespace {

// Relative pivot size below which a design column counts as dependent.
constexpr double kRankThreshold = 1e-10;

std::string column_label(std::span<const std::string> names, Eigen::Index j, Eigen::Index p) {
  if (j == p) return "intercept";
  if (static_cast<std::size_t>(j) < names.size()) return names[static_cast<std::size_t>(j)];
  return fmt::format("x{}", j);
}

// Minimum-norm least squares on centered data, intercept from the means.
OlsFit lstsq_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::RowVectorXd xm = X.colwise().mean();
  const double ym = y.mean();
  const Eigen::MatrixXd Xc = X.rowwise() - xm;
  const Eigen::VectorXd yc = y.array() - ym;
  OlsFit fit;
  fit.weights = Xc.completeOrthogonalDecomposition().solve(yc);
  fit.intercept = ym - xm.dot(fit.weights);
  return fit;
}

}  // namespace

OlsFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::span<const std::string> names) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (y.size() != n) throw DataError(fmt::format("ols_fit: {} rows but {} targets", n, y.size()));
  if (n <= p) throw DataError(fmt::format("ols_fit: need more rows ({}) than columns ({})", n, p));
  if (!X.allFinite() || !y.allFinite()) throw DataError("ols_fit: non-finite input");

  Eigen::MatrixXd A(n, p + 1);
  A.leftCols(p) = X;
  A.col(p).setOnes();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < p + 1) {
    std::vector<std::string> dependent;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < p + 1; ++k) dependent.push_back(column_label(names, perm(k), p));
    std::string list;
    for (const auto& d : dependent) list += (list.empty() ? "" : ", ") + d;
    throw RankDeficientError(fmt::format("ols_fit: design matrix is rank deficient (dependent: {})", list),
                             std::move(dependent));
  }
  const Eigen::VectorXd beta = qr.solve(y);
  OlsFit fit;
  fit.weights = beta.head(p);
  fit.intercept = beta(p);
  return fit;
}

std::vector<std::size_t> fold_sizes(std::size_t n, int folds) {
  if (folds < 2) throw ConfigError(fmt::format("folds must be at least 2 (got {})", folds));
  const auto k = static_cast<std::size_t>(folds);
  if (k > n) throw ConfigError(fmt::format("{} folds exceed {} training rows", folds, n));
  std::vector<std::size_t> sizes(k, n / k);
  for (std::size_t i = 0; i < n % k; ++i) ++sizes[i];
  return sizes;
}

CvResult cv_r2_detail(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::span<const std::size_t> subset,
                      int folds) {
  if (subset.empty()) throw ConfigError("cv_r2: empty feature subset");
  const auto n = static_cast<std::size_t>(X.rows());
  if (static_cast<std::size_t>(y.size()) != n) throw DataError("cv_r2: row count mismatch");
  for (auto c : subset)
    if (c >= static_cast<std::size_t>(X.cols())) throw ConfigError(fmt::format("cv_r2: column {} out of range", c));

  Eigen::MatrixXd Xs(X.rows(), static_cast<Eigen::Index>(subset.size()));
  for (std::size_t j = 0; j < subset.size(); ++j) Xs.col(static_cast<Eigen::Index>(j)) = X.col(static_cast<Eigen::Index>(subset[j]));

  CvResult out;
  double sum = 0;
  std::size_t start = 0;
  const auto sizes = fold_sizes(n, folds);
  for (std::size_t f = 0; f < sizes.size(); ++f) {
    const auto lo = static_cast<Eigen::Index>(start);
    const auto len = static_cast<Eigen::Index>(sizes[f]);
    const auto rows = static_cast<Eigen::Index>(n);
    start += sizes[f];

    const Eigen::VectorXd y_test = y.segment(lo, len);
    const double ym = y_test.mean();
    const double ss_tot = (y_test.array() - ym).square().sum();
    if (ss_tot == 0.0) {
      out.skipped_folds.push_back(f);
      continue;
    }

    Eigen::MatrixXd X_train(rows - len, Xs.cols());
    Eigen::VectorXd y_train(rows - len);
    X_train.topRows(lo) = Xs.topRows(lo);
    X_train.bottomRows(rows - lo - len) = Xs.bottomRows(rows - lo - len);
    y_train.head(lo) = y.head(lo);
    y_train.tail(rows - lo - len) = y.tail(rows - lo - len);

    const OlsFit fit = lstsq_fit(X_train, y_train);
    const Eigen::VectorXd pred = (Xs.middleRows(lo, len) * fit.weights).array() + fit.intercept;
    const double ss_res = (y_test - pred).squaredNorm();
    const double r2 = 1.0 - ss_res / ss_tot;
    out.fold_r2.push_back(r2);
    sum += r2;
  }
  if (out.fold_r2.empty()) throw NumericalError("cv_r2: every held-out fold has constant targets");
  out.score = sum / static_cast<double>(out.fold_r2.size());
  return out;
}

double cv_r2(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::span<const std::size_t> subset, int folds) {
  return cv_r2_detail(X, y, subset, folds).score;
}

double cv_r2(const ScoreMatrix& X, std::span<const double> y, std::span<const std::string> subset, int folds) {
  std::vector<std::size_t> cols;
  Eigen::MatrixXd M(static_cast<Eigen::Index>(X.rows()), static_cast<Eigen::Index>(subset.size()));
  for (std::size_t j = 0; j < subset.size(); ++j) {
    const auto col = X.column(subset[j]);
    for (std::size_t i = 0; i < col.size(); ++i) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    cols.push_back(j);
  }
  if (y.size() != X.rows()) throw DataError(fmt::format("cv_r2: {} ratings for {} rows", y.size(), X.rows()));
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  return cv_r2(M, yv, cols, folds);
}

}  // namespace capeval
