#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "capeval/corpus.hpp"
#include "capeval/score_matrix.hpp"

namespace capeval {

struct EnsembleConfig {
  double epsilon = 1e-4;
  int folds = 5;
  std::optional<std::size_t> max_features;
  /// Contiguous unshuffled folds. The only supported mode; kept so the
  /// config snapshot records it.
  bool deterministic_folds = true;
  /// Fit on z-scored columns and map the weights back to raw scale.
  bool standardize = false;
  /// BLEU order standing in for "BLEU" in the dominant ensemble.
  int dominant_bleu_order = 4;
  /// Candidate evaluations per selection step run on this many threads.
  int jobs = 1;

  void validate() const;
};

struct OlsFit {
  Eigen::VectorXd weights;
  double intercept = 0;
};

/// Least squares with an intercept column, solved by column-pivoted QR.
/// Throws RankDeficientError naming the dependent columns; `names` labels
/// the columns of X (defaults to "x0", "x1", ...), the constant column is
/// "intercept".
OlsFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::span<const std::string> names = {});

/// Sizes of the contiguous folds: the first n % k folds get one extra row.
std::vector<std::size_t> fold_sizes(std::size_t n, int folds);

struct CvResult {
  double score = 0;
  std::vector<double> fold_r2;
  /// Folds whose held-out targets are constant.
  std::vector<std::size_t> skipped_folds;
};

/// Mean held-out R^2 over contiguous folds using the given columns of X.
/// Training fits inside folds use the minimum-norm least-squares solution,
/// so a collinear subset scores like its independent part rather than
/// failing. Throws NumericalError if every fold is skipped.
CvResult cv_r2_detail(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::span<const std::size_t> subset,
                      int folds);
double cv_r2(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::span<const std::size_t> subset, int folds);
double cv_r2(const ScoreMatrix& X, std::span<const double> y, std::span<const std::string> subset, int folds);

struct SelectionStep {
  /// Best candidate of the step; appended to the selection only if accepted.
  std::string added;
  double score = 0;
  bool accepted = false;
  /// cv_r2 of current + candidate for every remaining candidate at this step.
  std::map<std::string, double> candidate_scores;
};

struct SelectionResult {
  std::vector<std::string> selected;
  /// One entry per evaluated step, including the final rejected one.
  std::vector<SelectionStep> trace;
  double final_score = 0;
  std::vector<std::string> warnings;
};

/// Greedy forward selection. The first step always adds a column; later
/// steps add the best candidate only while it improves the score by at least
/// epsilon. Equal scores prefer the lower registry rank, then column order.
SelectionResult forward_select(const ScoreMatrix& X, std::span<const double> y, const EnsembleConfig& config);

struct TrainingMeta {
  std::string dataset;
  std::string split;
  std::size_t n_train = 0;
  bool intercept_known = true;
  std::string method;  // "forward_select", "dominant" or "published"
  std::optional<EnsembleConfig> config;
  std::vector<std::pair<std::string, double>> selection_trace;
  std::string note;
};

struct EnsembleModel {
  std::vector<std::string> metrics;
  std::vector<double> weights;
  double intercept = 0;
  TrainingMeta meta;

  /// Lengths agree and every metric is in the registry.
  void validate() const;
};

struct TrainingSource {
  DatasetName dataset = DatasetName::Custom;
  Split split = Split::Train;
  bool allow_non_train = false;
};

/// Throws ConfigError unless the source is a train split or explicitly allowed.
void check_training_provenance(const TrainingSource& source);

EnsembleModel fit_ensemble(const ScoreMatrix& train, std::span<const double> ratings, const EnsembleConfig& config,
                           const TrainingSource& source = {});

/// Columns of the dominant baseline for the configured BLEU order.
std::vector<std::string> dominant_metrics(int bleu_order = 4);

EnsembleModel dominant_ensemble(const ScoreMatrix& train, std::span<const double> ratings,
                                const EnsembleConfig& config = {}, const TrainingSource& source = {});

/// Fit on exactly these columns, no selection.
EnsembleModel fit_fixed(const ScoreMatrix& train, std::span<const double> ratings,
                        std::span<const std::string> metrics, bool standardize = false);

double score_ensemble(const EnsembleModel& model, const std::map<std::string, double>& row);
/// Ensemble output for every row of the matrix.
std::vector<double> ensemble_column(const EnsembleModel& model, const ScoreMatrix& scores);

/// The published ten-metric model. Its intercept is not known and is 0.
EnsembleModel table2_model();

std::string model_to_json(const EnsembleModel& model);
EnsembleModel model_from_json(std::string_view text, std::string_view source = "<string>");
void save_model(const EnsembleModel& model, const std::filesystem::path& path);
EnsembleModel load_model(const std::filesystem::path& path);

}  // namespace capeval
