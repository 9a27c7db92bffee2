#include "cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "capeval/corpus.hpp"
#include "capeval/ensemble.hpp"
#include "capeval/error.hpp"
#include "capeval/metrics.hpp"
#include "capeval/reports.hpp"
#include "capeval/score_matrix.hpp"
#include "capeval/stats.hpp"

namespace capeval::cli {
namespace {

constexpr const char* kEnsembleColumn = "Ensemble";
constexpr std::size_t kMissingListed = 10;

struct Globals {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string format = "json";
  std::string out;
};

struct DatasetArgs {
  std::string path;
  std::string name = "custom";
};

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::string cur;
    for (char c : item) {
      if (c == ',') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else if (c != ' ') {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::vector<NativeMetric> parse_native_metrics(const std::vector<std::string>& names) {
  std::vector<NativeMetric> out;
  for (const auto& n : split_list(names)) {
    auto m = parse_native_metric(n);
    if (!m) {
      std::string valid;
      for (auto k : kAllNativeMetrics) valid += (valid.empty() ? "" : ", ") + std::string(metric_name(k));
      throw ConfigError(fmt::format("unknown metric '{}' (valid: {})", n, valid));
    }
    out.push_back(*m);
  }
  if (out.empty()) throw ConfigError("no metrics given");
  return out;
}

ReportFormat report_format(const Globals& g) {
  auto f = parse_report_format(g.format);
  if (!f) throw ConfigError(fmt::format("unknown format '{}' (valid: csv, json)", g.format));
  return *f;
}

Dataset load(const DatasetArgs& args, Notes& notes) {
  auto name = parse_dataset_name(args.name);
  if (!name) throw ConfigError(fmt::format("unknown dataset name '{}'", args.name));
  return load_dataset(args.path, *name, &notes);
}

void emit(const std::string& text, const Globals& g, std::ostream& out) {
  if (g.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw DataError(fmt::format("cannot write '{}'", g.out));
  f << text;
}

void print_notes(const Notes& notes, std::ostream& err) {
  for (const auto& n : notes) err << n << "\n";
}

std::string missing_list(const std::vector<std::string>& missing) {
  std::string s;
  for (std::size_t i = 0; i < missing.size() && i < kMissingListed; ++i) s += (i ? ", " : "") + missing[i];
  if (missing.size() > kMissingListed) s += ", ...";
  return s;
}

ScoreMatrix load_scores(const std::vector<std::string>& files, bool allow_unregistered, Notes& notes) {
  if (files.empty()) throw ConfigError("no score files given");
  IngestOptions opts;
  opts.require_registered = !allow_unregistered;
  std::vector<ScoreMatrix> parts;
  for (const auto& f : files) {
    auto r = ingest_external(f, opts);
    for (auto& w : r.warnings) notes.push_back(std::move(w));
    parts.push_back(std::move(r.matrix));
  }
  if (parts.size() == 1) return std::move(parts.front());
  return join(parts).matrix;
}

// Rows for `ids` in order; exits with a data error naming absent ids.
ScoreMatrix cover(const ScoreMatrix& scores, const std::vector<std::string>& ids, std::string_view what) {
  std::vector<std::string> missing;
  for (const auto& id : ids)
    if (!scores.row_of(id)) missing.push_back(id);
  if (!missing.empty())
    throw DataError(fmt::format("{} cover {} of {} instances; missing {}: {}", what, ids.size() - missing.size(),
                                ids.size(), missing.size(), missing_list(missing)));
  auto sel = scores.select_rows(ids);
  std::vector<std::string> gaps;
  for (std::size_t r = 0; r < sel.rows(); ++r)
    for (std::size_t c = 0; c < sel.cols(); ++c)
      if (!sel.at(r, c)) {
        gaps.push_back(sel.instance_ids()[r]);
        break;
      }
  if (!gaps.empty())
    throw DataError(fmt::format("{} have empty cells for {} instances: {}", what, gaps.size(), missing_list(gaps)));
  return sel;
}

ScoreMatrix restrict_metrics(const ScoreMatrix& m, const std::vector<std::string>& metrics) {
  auto names = split_list(metrics);
  if (names.empty()) return m;
  for (const auto& n : names)
    if (!m.col_of(n)) throw ConfigError(fmt::format("score files have no column '{}'", n));
  return m.select_columns(names);
}

std::vector<double> ratings_of(const std::vector<CaptionInstance>& instances) {
  std::vector<double> out;
  std::vector<std::string> missing;
  for (const auto& i : instances) {
    if (i.rating)
      out.push_back(*i.rating);
    else
      missing.push_back(i.instance_id);
  }
  if (!missing.empty())
    throw DataError(fmt::format("{} instances have no rating: {}", missing.size(), missing_list(missing)));
  return out;
}

// ---------------------------------------------------------------------------

struct ScoreArgs {
  DatasetArgs data;
  std::vector<std::string> metrics;
  std::string side;
};

void cmd_score(const ScoreArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  Notes notes;
  const auto d = load(a.data, notes);
  print_notes(notes, err);
  const auto metrics = parse_native_metrics(a.metrics);
  ScoringOptions opts;
  opts.jobs = g.jobs;

  ScoreMatrix matrix;
  if (d.is_pairwise()) {
    if (a.side != "a" && a.side != "b") throw ConfigError("pair datasets need --side a or --side b");
    std::vector<std::string> ids, cands;
    std::vector<std::vector<std::string>> refs;
    for (const auto& p : d.pairs) {
      ids.push_back(p.pair_id);
      cands.push_back(a.side == "a" ? p.candidate_a : p.candidate_b);
      refs.push_back(p.references);
    }
    std::vector<std::string> names;
    for (auto m : metrics) names.emplace_back(metric_name(m));
    matrix = ScoreMatrix(ids, names);
    const auto values = score_texts(cands, refs, metrics, opts);
    for (std::size_t r = 0; r < ids.size(); ++r)
      for (std::size_t c = 0; c < names.size(); ++c) matrix.set(r, c, values[r][c]);
  } else {
    auto result = score_dataset(d, metrics, opts);
    if (!result.missing_references.empty())
      err << fmt::format("warning: {} instances have no references; their rows are left empty: {}\n",
                         result.missing_references.size(), missing_list(result.missing_references));
    matrix = std::move(result.matrix);
  }
  std::ostringstream csv;
  write_score_csv(matrix, csv);
  emit(csv.str(), g, out);
}

struct CorrelateArgs {
  DatasetArgs data;
  std::vector<std::string> scores;
  std::vector<std::string> metrics;
  std::string model;
  bool allow_unregistered = false;
};

void cmd_correlate(const CorrelateArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  const auto format = report_format(g);
  Notes notes;
  auto raw = load(a.data, notes);
  if (raw.is_pairwise()) throw ConfigError("pair datasets have no correlation protocol; use 'pairwise'");
  auto d = apply_overlap_policy(raw, &notes);
  if (d.name == DatasetName::Polaris) {
    std::erase_if(d.instances, [](const CaptionInstance& i) { return i.split != Split::Test; });
    notes.push_back(fmt::format("Polaris: evaluating the test split ({} instances)", d.instances.size()));
    if (d.instances.empty()) throw DataError("Polaris file has no test-split instances");
  }

  auto scores = restrict_metrics(load_scores(a.scores, a.allow_unregistered, notes), a.metrics);
  std::vector<std::string> ids;
  for (const auto& i : d.instances) ids.push_back(i.instance_id);
  auto matrix = cover(scores, ids, "score files");
  if (!a.model.empty()) {
    const auto model = load_model(a.model);
    matrix.add_column(kEnsembleColumn, ensemble_column(model, matrix));
    if (!model.meta.intercept_known) notes.push_back("ensemble intercept unknown; correlations do not depend on it");
  }
  const auto ratings = ratings_of(d.instances);
  const auto reports = correlate(matrix, ratings, d.correlation_kind, to_string(d.name));
  for (const auto& r : reports)
    if (!r.error.empty()) err << fmt::format("warning: {}: {}\n", r.metric, r.error);
  print_notes(notes, err);

  ReportMeta meta;
  meta.command = "correlate";
  meta.notes = notes;
  emit(correlation_report(reports, meta, format), g, out);
}

struct PairwiseArgs {
  DatasetArgs data;
  std::vector<std::string> metrics;
  std::string scores_a;
  std::string scores_b;
  std::string model;
  int instances = 5;
  bool allow_unregistered = false;
};

PairScorer external_scorer(std::shared_ptr<const ScoreMatrix> a, std::shared_ptr<const ScoreMatrix> b,
                           std::size_t col) {
  return [a, b, col](std::span<const PairInstance> pairs) {
    std::pair<std::vector<double>, std::vector<double>> out;
    for (const auto& p : pairs) {
      out.first.push_back(*a->at(*a->row_of(p.pair_id), col));
      out.second.push_back(*b->at(*b->row_of(p.pair_id), col));
    }
    return out;
  };
}

PairScorer native_scorer(NativeMetric metric, const ScoringOptions& opts) {
  return [metric, opts](std::span<const PairInstance> pairs) {
    // Both sides are scored in one corpus, so CIDEr document frequencies
    // count each pair's references once per candidate.
    std::vector<std::string> cands;
    std::vector<std::vector<std::string>> refs;
    for (const auto& p : pairs) {
      cands.push_back(p.candidate_a);
      refs.push_back(p.references);
    }
    for (const auto& p : pairs) {
      cands.push_back(p.candidate_b);
      refs.push_back(p.references);
    }
    const NativeMetric ms[] = {metric};
    const auto values = score_texts(cands, refs, ms, opts);
    std::pair<std::vector<double>, std::vector<double>> out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      out.first.push_back(values[i][0]);
      out.second.push_back(values[pairs.size() + i][0]);
    }
    return out;
  };
}

void cmd_pairwise(const PairwiseArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  const auto format = report_format(g);
  Notes notes;
  const auto d = load(a.data, notes);
  if (!d.is_pairwise()) throw ConfigError("'pairwise' needs a pair dataset (Pascal50S or Reformulations)");
  // Vote-carrying pairs without a preference follow the seeded protocol.
  const bool use_votes = d.name == DatasetName::Pascal50S ||
                         std::any_of(d.pairs.begin(), d.pairs.end(),
                                     [](const PairInstance& p) { return !p.preferred && p.votes_a && p.votes_b; });

  std::vector<std::pair<std::string, PairScorer>> scorers;
  const bool external = !a.scores_a.empty() || !a.scores_b.empty();
  if (external) {
    if (a.scores_a.empty() || a.scores_b.empty()) throw ConfigError("--scores-a and --scores-b go together");
    auto sa = restrict_metrics(load_scores({a.scores_a}, a.allow_unregistered, notes), a.metrics);
    auto sb = restrict_metrics(load_scores({a.scores_b}, a.allow_unregistered, notes), a.metrics);
    std::vector<std::string> ids;
    for (const auto& p : d.pairs) ids.push_back(p.pair_id);
    auto ma = cover(sa, ids, "side-A scores");
    auto mb = cover(sb, ids, "side-B scores");
    for (const auto& n : ma.metric_names())
      if (!mb.col_of(n)) throw DataError(fmt::format("side-B scores lack column '{}'", n));
    mb = mb.select_columns(ma.metric_names());
    if (!a.model.empty()) {
      const auto model = load_model(a.model);
      ma.add_column(kEnsembleColumn, ensemble_column(model, ma));
      mb.add_column(kEnsembleColumn, ensemble_column(model, mb));
    }
    auto pa = std::make_shared<const ScoreMatrix>(std::move(ma));
    auto pb = std::make_shared<const ScoreMatrix>(std::move(mb));
    for (std::size_t c = 0; c < pa->cols(); ++c) scorers.emplace_back(pa->metric_names()[c], external_scorer(pa, pb, c));
  } else {
    if (!a.model.empty()) throw ConfigError("--model needs --scores-a/--scores-b");
    ScoringOptions opts;
    opts.jobs = g.jobs;
    for (auto m : parse_native_metrics(a.metrics)) scorers.emplace_back(std::string(metric_name(m)), native_scorer(m, opts));
  }

  std::vector<PairwiseReport> reports;
  for (const auto& [name, scorer] : scorers)
    reports.push_back(use_votes ? pascal50s_run(d, name, scorer, g.seed, a.instances) : preference_run(d, name, scorer));
  print_notes(notes, err);

  ReportMeta meta;
  meta.command = "pairwise";
  if (use_votes) meta.seed = g.seed;
  meta.notes = notes;
  emit(pairwise_report(reports, meta, format), g, out);
}

struct TrainArgs {
  DatasetArgs data;
  std::vector<std::string> scores;
  std::vector<std::string> metrics;
  std::string split = "train";
  bool dominant = false;
  int bleu_order = 4;
  double epsilon = 1e-4;
  int folds = 5;
  std::size_t max_features = 0;
  bool standardize = false;
  bool allow_non_train = false;
  bool allow_unregistered = false;
};

void cmd_train(const TrainArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  Notes notes;
  auto d = apply_overlap_policy(load(a.data, notes), &notes);
  if (d.is_pairwise()) throw ConfigError("training needs a rating dataset");
  const auto split = parse_split(a.split);
  if (!split) throw ConfigError(fmt::format("unknown split '{}'", a.split));

  TrainingSource source;
  source.dataset = d.name;
  source.split = *split;
  source.allow_non_train = a.allow_non_train;
  check_training_provenance(source);

  std::erase_if(d.instances, [&](const CaptionInstance& i) { return i.split != *split; });
  if (d.instances.empty()) throw DataError(fmt::format("no instances in the '{}' split", a.split));

  EnsembleConfig config;
  config.epsilon = a.epsilon;
  config.folds = a.folds;
  if (a.max_features > 0) config.max_features = a.max_features;
  config.standardize = a.standardize;
  config.dominant_bleu_order = a.bleu_order;
  config.jobs = g.jobs;
  config.validate();

  auto scores = restrict_metrics(load_scores(a.scores, a.allow_unregistered, notes), a.metrics);
  std::vector<std::string> ids;
  for (const auto& i : d.instances) ids.push_back(i.instance_id);
  const auto matrix = cover(scores, ids, "score files");
  const auto ratings = ratings_of(d.instances);

  const auto model = a.dominant ? dominant_ensemble(matrix, ratings, config, source)
                                : fit_ensemble(matrix, ratings, config, source);
  print_notes(notes, err);
  emit(model_to_json(model), g, out);
}

struct ReportArgs {
  std::string input;
};

void cmd_report(const ReportArgs& a, const Globals& g, std::ostream& out) {
  std::ifstream in(a.input, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open report '{}'", a.input));
  std::stringstream ss;
  ss << in.rdbuf();
  emit(render_table(ss.str()), g, out);
}

void add_dataset_options(CLI::App* cmd, DatasetArgs& d) {
  cmd->add_option("--dataset", d.path, "Dataset JSONL file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--name", d.name, "Dataset name (flickr8k-expert, flickr8k-cf, composite, thumb, polaris, "
                                    "pascal50s, reformulations, custom)")
      ->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Caption metric evaluation toolkit", "capeval"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Base seed for all randomness")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--format", g.format, "Report format: csv or json")->capture_default_str();
  app.add_option("--out", g.out, "Output file (default: standard output)");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Compute native metric scores for a dataset");
  add_dataset_options(score_cmd, score.data);
  score_cmd->add_option("--metrics", score.metrics, "Comma-separated native metrics")->required();
  score_cmd->add_option("--side", score.side, "Candidate side for pair datasets (a or b)");

  CorrelateArgs corr;
  auto* corr_cmd = app.add_subcommand("correlate", "Correlate score columns with human ratings");
  add_dataset_options(corr_cmd, corr.data);
  corr_cmd->add_option("--scores", corr.scores, "Score CSV files (wide or long)")->required();
  corr_cmd->add_option("--metrics", corr.metrics, "Restrict to these columns");
  corr_cmd->add_option("--model", corr.model, "Ensemble model JSON; adds an Ensemble column");
  corr_cmd->add_flag("--allow-unregistered", corr.allow_unregistered, "Accept columns outside the registry");

  PairwiseArgs pw;
  auto* pw_cmd = app.add_subcommand("pairwise", "Pairwise preference accuracy");
  add_dataset_options(pw_cmd, pw.data);
  pw_cmd->add_option("--metrics", pw.metrics, "Native metrics, or columns of the score files");
  pw_cmd->add_option("--scores-a", pw.scores_a, "Scores for candidate A keyed by pair_id");
  pw_cmd->add_option("--scores-b", pw.scores_b, "Scores for candidate B keyed by pair_id");
  pw_cmd->add_option("--model", pw.model, "Ensemble model JSON applied to both sides");
  pw_cmd->add_option("--instances", pw.instances, "Protocol instances for vote-based datasets")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  pw_cmd->add_flag("--allow-unregistered", pw.allow_unregistered, "Accept columns outside the registry");

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Fit an ensemble model");
  add_dataset_options(tr_cmd, tr.data);
  tr_cmd->add_option("--scores", tr.scores, "Score CSV files")->required();
  tr_cmd->add_option("--metrics", tr.metrics, "Candidate pool (default: every column)");
  tr_cmd->add_option("--split", tr.split, "Split to train on")->capture_default_str();
  tr_cmd->add_flag("--dominant", tr.dominant, "Fit the five-metric dominant baseline without selection");
  tr_cmd->add_option("--bleu-order", tr.bleu_order, "BLEU order used by --dominant")->capture_default_str();
  tr_cmd->add_option("--epsilon", tr.epsilon, "Minimum cross-validated R^2 gain per added metric")
      ->capture_default_str();
  tr_cmd->add_option("--folds", tr.folds, "Cross-validation folds")->capture_default_str();
  tr_cmd->add_option("--max-features", tr.max_features, "Cap on selected metrics (0: none)");
  tr_cmd->add_flag("--standardize", tr.standardize, "Fit on z-scored columns");
  tr_cmd->add_flag("--allow-non-train", tr.allow_non_train, "Permit fitting on a non-train split");
  tr_cmd->add_flag("--allow-unregistered", tr.allow_unregistered, "Accept columns outside the registry");

  ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "Render a JSON report as a table");
  rep_cmd->add_option("input", rep.input, "Report JSON")->required()->check(CLI::ExistingFile);

  std::vector<std::string> argv_store;
  argv_store.emplace_back("capeval");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    report_format(g);
    if (*score_cmd) cmd_score(score, g, out, err);
    else if (*corr_cmd) cmd_correlate(corr, g, out, err);
    else if (*pw_cmd) cmd_pairwise(pw, g, out, err);
    else if (*tr_cmd) cmd_train(tr, g, out, err);
    else if (*rep_cmd) cmd_report(rep, g, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Config: return kExitConfig;
      case ErrorKind::Data: return kExitData;
      case ErrorKind::Numerical: return kExitNumerical;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace capeval::cli
