#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "capeval/ensemble.hpp"
#include "capeval/error.hpp"
#include "capeval/registry.hpp"

namespace capeval {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kModelFormatVersion = 1;

Eigen::MatrixXd to_eigen(const ScoreMatrix& m, std::span<const std::string> metrics) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(metrics.size()));
  for (std::size_t j = 0; j < metrics.size(); ++j) {
    const auto col = m.column(metrics[j]);
    for (std::size_t i = 0; i < col.size(); ++i) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  return out;
}

Eigen::VectorXd to_eigen(std::span<const double> y) {
  return Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
}

void check_ratings(const ScoreMatrix& m, std::span<const double> ratings) {
  if (ratings.size() != m.rows())
    throw DataError(fmt::format("{} ratings for {} score rows", ratings.size(), m.rows()));
  for (std::size_t i = 0; i < ratings.size(); ++i)
    if (!std::isfinite(ratings[i])) throw DataError(fmt::format("non-finite rating at row {}", i));
}

// True when candidate a should win over b at equal score.
bool tie_prefers(const std::string& a, std::size_t col_a, const std::string& b, std::size_t col_b) {
  const auto ra = registry_rank(a), rb = registry_rank(b);
  if (ra != rb) return ra < rb;
  return col_a < col_b;
}

ordered_json config_to_json(const EnsembleConfig& c) {
  ordered_json j;
  j["epsilon"] = c.epsilon;
  j["folds"] = c.folds;
  j["max_features"] = c.max_features ? ordered_json(*c.max_features) : ordered_json(nullptr);
  j["deterministic_folds"] = c.deterministic_folds;
  j["standardize"] = c.standardize;
  j["dominant_bleu_order"] = c.dominant_bleu_order;
  return j;
}

EnsembleConfig config_from_json(const ordered_json& j) {
  EnsembleConfig c;
  c.epsilon = j.value("epsilon", c.epsilon);
  c.folds = j.value("folds", c.folds);
  if (j.contains("max_features") && !j["max_features"].is_null())
    c.max_features = j["max_features"].get<std::size_t>();
  c.deterministic_folds = j.value("deterministic_folds", c.deterministic_folds);
  c.standardize = j.value("standardize", c.standardize);
  c.dominant_bleu_order = j.value("dominant_bleu_order", c.dominant_bleu_order);
  return c;
}

std::string split_name(Split s) { return std::string(to_string(s)); }

}  // namespace

void EnsembleConfig::validate() const {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) throw ConfigError(fmt::format("epsilon must be > 0 (got {})", epsilon));
  if (folds < 2) throw ConfigError(fmt::format("folds must be at least 2 (got {})", folds));
  if (max_features && *max_features == 0) throw ConfigError("max_features must be positive");
  if (!deterministic_folds) throw ConfigError("only deterministic contiguous folds are supported");
  if (dominant_bleu_order < 1 || dominant_bleu_order > 4)
    throw ConfigError(fmt::format("dominant BLEU order must be 1..4 (got {})", dominant_bleu_order));
  if (jobs < 1) throw ConfigError("jobs must be positive");
}

void EnsembleModel::validate() const {
  if (metrics.size() != weights.size())
    throw ConfigError(fmt::format("model has {} metrics but {} weights", metrics.size(), weights.size()));
  if (metrics.empty()) throw ConfigError("model has no metrics");
  std::set<std::string> seen;
  for (const auto& m : metrics) {
    if (!find_metric(m)) throw ConfigError(fmt::format("model metric '{}' is not in the registry", m));
    if (!seen.insert(m).second) throw ConfigError(fmt::format("model metric '{}' listed twice", m));
  }
  for (double w : weights)
    if (!std::isfinite(w)) throw ConfigError("model has a non-finite weight");
  if (!std::isfinite(intercept)) throw ConfigError("model has a non-finite intercept");
}

SelectionResult forward_select(const ScoreMatrix& X, std::span<const double> y, const EnsembleConfig& config) {
  config.validate();
  if (X.cols() == 0) throw ConfigError("forward_select: no candidate columns");
  X.require_complete();
  check_ratings(X, y);
  fold_sizes(X.rows(), config.folds);

  const auto& names = X.metric_names();
  const Eigen::MatrixXd M = to_eigen(X, names);
  const Eigen::VectorXd yv = to_eigen(y);

  SelectionResult result;
  std::vector<std::size_t> selected;
  std::vector<std::size_t> remaining(names.size());
  for (std::size_t j = 0; j < remaining.size(); ++j) remaining[j] = j;
  std::set<std::size_t> skipped;
  double current = -std::numeric_limits<double>::infinity();

  while (!remaining.empty() && (!config.max_features || selected.size() < *config.max_features)) {
    std::vector<CvResult> evals(remaining.size());
    std::vector<std::exception_ptr> errors(remaining.size());
    auto evaluate = [&](std::size_t k) {
      try {
        auto subset = selected;
        subset.push_back(remaining[k]);
        evals[k] = cv_r2_detail(M, yv, subset, config.folds);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    };
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), remaining.size());
    if (workers <= 1) {
      for (std::size_t k = 0; k < remaining.size(); ++k) evaluate(k);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          for (std::size_t k = w; k < remaining.size(); k += workers) evaluate(k);
        });
      for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);

    SelectionStep step;
    std::size_t best = 0;
    for (std::size_t k = 0; k < remaining.size(); ++k) {
      const auto& name = names[remaining[k]];
      step.candidate_scores[name] = evals[k].score;
      skipped.insert(evals[k].skipped_folds.begin(), evals[k].skipped_folds.end());
      if (k == 0) continue;
      const double s = evals[k].score, b = evals[best].score;
      if (s > b || (s == b && tie_prefers(name, remaining[k], names[remaining[best]], remaining[best]))) best = k;
    }
    step.added = names[remaining[best]];
    step.score = evals[best].score;
    step.accepted = step.score - current >= config.epsilon;
    result.trace.push_back(step);
    if (!step.accepted) break;
    current = step.score;
    selected.push_back(remaining[best]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }

  for (auto f : skipped)
    result.warnings.push_back(fmt::format("fold {} has constant held-out ratings and was skipped", f));
  for (auto j : selected) result.selected.push_back(names[j]);
  result.final_score = current;
  return result;
}

void check_training_provenance(const TrainingSource& source) {
  if (source.split == Split::Train || source.allow_non_train) return;
  throw ConfigError(fmt::format(
      "refusing to fit on the '{}' split of {}; models may only be trained on a train split "
      "(override with --allow-non-train)",
      to_string(source.split), to_string(source.dataset)));
}

EnsembleModel fit_fixed(const ScoreMatrix& train, std::span<const double> ratings,
                        std::span<const std::string> metrics, bool standardize) {
  if (metrics.empty()) throw ConfigError("fit_fixed: no metrics");
  check_ratings(train, ratings);
  Eigen::MatrixXd M = to_eigen(train, metrics);
  const Eigen::VectorXd yv = to_eigen(ratings);

  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(M.cols());
  Eigen::RowVectorXd scale = Eigen::RowVectorXd::Ones(M.cols());
  if (standardize) {
    mean = M.colwise().mean();
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      const double sd = std::sqrt((M.col(j).array() - mean(j)).square().mean());
      if (sd == 0.0)
        throw RankDeficientError(fmt::format("column '{}' is constant", metrics[static_cast<std::size_t>(j)]),
                                 {metrics[static_cast<std::size_t>(j)]});
      scale(j) = sd;
    }
    M = (M.rowwise() - mean).array().rowwise() / scale.array();
  }

  const OlsFit fit = ols_fit(M, yv, metrics);
  EnsembleModel model;
  model.metrics.assign(metrics.begin(), metrics.end());
  model.intercept = fit.intercept;
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    const double w = fit.weights(j) / scale(j);
    model.weights.push_back(w);
    model.intercept -= w * mean(j);
  }
  model.meta.n_train = train.rows();
  return model;
}

EnsembleModel fit_ensemble(const ScoreMatrix& train, std::span<const double> ratings, const EnsembleConfig& config,
                           const TrainingSource& source) {
  check_training_provenance(source);
  const auto sel = forward_select(train, ratings, config);
  auto model = fit_fixed(train, ratings, sel.selected, config.standardize);
  model.meta.dataset = std::string(to_string(source.dataset));
  model.meta.split = split_name(source.split);
  model.meta.method = "forward_select";
  model.meta.config = config;
  for (const auto& step : sel.trace)
    if (step.accepted) model.meta.selection_trace.emplace_back(step.added, step.score);
  for (const auto& w : sel.warnings) model.meta.note += (model.meta.note.empty() ? "" : "; ") + w;
  return model;
}

std::vector<std::string> dominant_metrics(int bleu_order) {
  if (bleu_order < 1 || bleu_order > 4) throw ConfigError(fmt::format("BLEU order must be 1..4 (got {})", bleu_order));
  return {fmt::format("BLEU{}", bleu_order), "METEOR", "ROUGE", "CIDEr", "SPICE"};
}

EnsembleModel dominant_ensemble(const ScoreMatrix& train, std::span<const double> ratings,
                                const EnsembleConfig& config, const TrainingSource& source) {
  config.validate();
  check_training_provenance(source);
  const auto metrics = dominant_metrics(config.dominant_bleu_order);
  for (const auto& m : metrics)
    if (!train.col_of(m)) throw DataError(fmt::format("dominant ensemble needs column '{}'", m));
  auto model = fit_fixed(train, ratings, metrics, config.standardize);
  model.meta.dataset = std::string(to_string(source.dataset));
  model.meta.split = split_name(source.split);
  model.meta.method = "dominant";
  model.meta.config = config;
  return model;
}

double score_ensemble(const EnsembleModel& model, const std::map<std::string, double>& row) {
  if (model.metrics.size() != model.weights.size()) throw ConfigError("model metrics and weights differ in length");
  double s = model.intercept;
  for (std::size_t i = 0; i < model.metrics.size(); ++i) {
    auto it = row.find(model.metrics[i]);
    if (it == row.end()) throw DataError(fmt::format("row has no value for model metric '{}'", model.metrics[i]));
    s += model.weights[i] * it->second;
  }
  return s;
}

std::vector<double> ensemble_column(const EnsembleModel& model, const ScoreMatrix& scores) {
  if (model.metrics.size() != model.weights.size()) throw ConfigError("model metrics and weights differ in length");
  std::vector<double> out(scores.rows(), model.intercept);
  for (std::size_t i = 0; i < model.metrics.size(); ++i) {
    if (!scores.col_of(model.metrics[i]))
      throw DataError(fmt::format("scores have no column for model metric '{}'", model.metrics[i]));
    const auto col = scores.column(model.metrics[i]);
    for (std::size_t r = 0; r < out.size(); ++r) out[r] += model.weights[i] * col[r];
  }
  return out;
}

EnsembleModel table2_model() {
  EnsembleModel m;
  m.metrics = {"BLIP2Score", "Polos", "PACScore", "Exact NO", "BLEU1",
               "Fuzzy VO",   "BLEU4", "CIDEr",    "ROUGE",    "RefCLIPScore"};
  m.weights = {0.83, 0.82, 0.29, 0.08, 0.07, 0.02, 0.02, -0.02, -0.07, -0.16};
  m.intercept = 0;
  m.meta.dataset = "Polaris";
  m.meta.split = "train";
  m.meta.intercept_known = false;
  m.meta.method = "published";
  m.meta.note = "published coefficients rounded to two decimals; intercept not reported";
  return m;
}

std::string model_to_json(const EnsembleModel& model) {
  model.validate();
  ordered_json j;
  j["metrics"] = model.metrics;
  j["weights"] = model.weights;
  j["intercept"] = model.intercept;
  ordered_json meta;
  meta["format_version"] = kModelFormatVersion;
  meta["dataset"] = model.meta.dataset;
  meta["split"] = model.meta.split;
  meta["n_train"] = model.meta.n_train;
  meta["intercept_known"] = model.meta.intercept_known;
  meta["method"] = model.meta.method;
  meta["config"] = model.meta.config ? config_to_json(*model.meta.config) : ordered_json(nullptr);
  auto trace = ordered_json::array();
  for (const auto& [name, score] : model.meta.selection_trace) trace.push_back({{"metric", name}, {"cv_r2", score}});
  meta["selection_trace"] = trace;
  meta["note"] = model.meta.note;
  j["meta"] = meta;
  return j.dump(2) + "\n";
}

EnsembleModel model_from_json(std::string_view text, std::string_view source) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("{}: invalid model JSON: {}", source, e.what()));
  }
  EnsembleModel m;
  try {
    m.metrics = j.at("metrics").get<std::vector<std::string>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.intercept = j.at("intercept").get<double>();
    if (j.contains("meta") && j["meta"].is_object()) {
      const auto& meta = j["meta"];
      const int version = meta.value("format_version", kModelFormatVersion);
      if (version > kModelFormatVersion)
        throw DataError(fmt::format("{}: model format version {} is newer than supported", source, version));
      m.meta.dataset = meta.value("dataset", "");
      m.meta.split = meta.value("split", "");
      m.meta.n_train = meta.value("n_train", std::size_t{0});
      m.meta.intercept_known = meta.value("intercept_known", true);
      m.meta.method = meta.value("method", "");
      if (meta.contains("config") && meta["config"].is_object()) m.meta.config = config_from_json(meta["config"]);
      if (meta.contains("selection_trace"))
        for (const auto& t : meta["selection_trace"])
          m.meta.selection_trace.emplace_back(t.at("metric").get<std::string>(), t.at("cv_r2").get<double>());
      m.meta.note = meta.value("note", "");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("{}: malformed model: {}", source, e.what()));
  }
  try {
    m.validate();
  } catch (const ConfigError& e) {
    throw DataError(fmt::format("{}: {}", source, e.what()));
  }
  return m;
}

void save_model(const EnsembleModel& model, const std::filesystem::path& path) {
  const auto text = model_to_json(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

EnsembleModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open model '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str(), path.string());
}

}  // namespace capeval
