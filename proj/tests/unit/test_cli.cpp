#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "capeval/corpus.hpp"
#include "capeval/ensemble.hpp"
#include "capeval/score_matrix.hpp"
#include "cli/commands.hpp"
#include "synthetic.hpp"

using namespace capeval;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("capeval_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Ratings 1..n on ids c0..c{n-1}; `split` applies to every instance.
  std::string write_rated(const std::string& name, DatasetName kind, std::size_t n, Split split = Split::Unsplit) {
    Dataset d;
    d.name = kind;
    d.rating_range = default_rating_range(kind);
    d.correlation_kind = default_correlation_kind(kind);
    oracle::Normal rng(n);
    for (std::size_t i = 0; i < n; ++i) {
      CaptionInstance c;
      c.instance_id = "c" + std::to_string(i);
      c.image_id = "img" + std::to_string(i);
      c.candidate = synthetic::sentence(rng, 6);
      c.references = {synthetic::sentence(rng, 7), synthetic::sentence(rng, 5)};
      const double lo = d.rating_range.bounded() ? d.rating_range.lo : 1, hi = d.rating_range.bounded() ? d.rating_range.hi : 4;
      c.rating = lo + (hi - lo) * static_cast<double>(i % 4) / 3.0;
      c.split = split;
      d.instances.push_back(c);
    }
    save_dataset(d, path(name));
    return path(name);
  }

  std::string write_scores(const std::string& name, const ScoreMatrix& m) {
    save_score_csv(m, path(name));
    return path(name);
  }

  fs::path dir_;
};

ScoreMatrix perfect_scores(const Dataset& d) {
  std::vector<std::string> ids;
  for (const auto& c : d.instances) ids.push_back(c.instance_id);
  ScoreMatrix m(ids, {"BLIP2Score", "Polos"});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    m.set(i, 0, d.rating_range.bounded() ? (*d.instances[i].rating - d.rating_range.lo) / (d.rating_range.hi - d.rating_range.lo)
                                         : *d.instances[i].rating / 10);
    m.set(i, 1, static_cast<double>((i * 7) % 5) / 4);
  }
  return m;
}

}  // namespace

TEST_F(CliTest, ScoreWritesOneColumnPerMetric) {
  const auto ds = write_rated("d.jsonl", DatasetName::Custom, 6);
  const auto r = run({"score", "--dataset", ds, "--metrics", "BLEU1,BLEU4,ROUGE,CIDEr,METEOR"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const auto got = read_score_csv(in, "out");
  EXPECT_EQ(got.matrix.metric_names(), (std::vector<std::string>{"BLEU1", "BLEU4", "ROUGE", "CIDEr", "METEOR"}));
  EXPECT_EQ(got.matrix.rows(), 6u);
  EXPECT_TRUE(got.matrix.complete());
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  const auto ds = write_rated("d.jsonl", DatasetName::Custom, 6);
  EXPECT_EQ(run({"score", "--dataset", ds, "--metrics", "BLEU9"}).code, cli::kExitConfig);
  EXPECT_EQ(run({"score", "--dataset", ds, "--metrics", "BLEU1", "--name", "nope"}).code, cli::kExitConfig);
  EXPECT_EQ(run({"--format", "xml", "score", "--dataset", ds, "--metrics", "BLEU1"}).code, cli::kExitConfig);
  EXPECT_NE(run({}).code, 0);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, CorrelatePerfectColumn) {
  const auto ds = write_rated("d.jsonl", DatasetName::Flickr8kExpert, 12);
  const auto d = load_dataset(ds, DatasetName::Flickr8kExpert);
  const auto sc = write_scores("s.csv", perfect_scores(d));
  const auto r = run({"correlate", "--dataset", ds, "--name", "flickr8k-expert", "--scores", sc});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["report"], "correlation");
  EXPECT_EQ(j["correlation_kind"], "TauC");
  ASSERT_EQ(j["results"].size(), 2u);
  EXPECT_EQ(j["results"][0]["metric"], "BLIP2Score");
  EXPECT_NEAR(j["results"][0]["value"].get<double>(), 1.0, 1e-12);
}

TEST_F(CliTest, CorrelateKindFollowsDataset) {
  for (auto [name, kind, label] : {std::tuple{"flickr8k-cf", DatasetName::Flickr8kCF, "TauB"},
                                   std::tuple{"thumb", DatasetName::THumB, "Pearson"}}) {
    const auto ds = write_rated(std::string(name) + ".jsonl", kind, 10);
    const auto d = load_dataset(ds, kind);
    const auto sc = write_scores(std::string(name) + ".csv", perfect_scores(d));
    const auto r = run({"correlate", "--dataset", ds, "--name", name, "--scores", sc});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["correlation_kind"], label);
    EXPECT_NEAR(j["results"][0]["value"].get<double>(), 1.0, 1e-12);
  }
}

TEST_F(CliTest, CorrelateMissingIdsIsDataError) {
  const auto ds = write_rated("d.jsonl", DatasetName::Custom, 8);
  const auto d = load_dataset(ds, DatasetName::Custom);
  std::vector<std::string> keep{"c0", "c1", "c2"};
  const auto sc = write_scores("s.csv", perfect_scores(d).select_rows(keep));
  const auto r = run({"correlate", "--dataset", ds, "--scores", sc});
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_NE(r.err.find("c3"), std::string::npos);
}

TEST_F(CliTest, CorrelateWithModelAddsEnsembleColumn) {
  const auto ds = write_rated("d.jsonl", DatasetName::Custom, 10);
  const auto d = load_dataset(ds, DatasetName::Custom);
  const auto sc = write_scores("s.csv", perfect_scores(d));
  EnsembleModel model;
  model.metrics = {"BLIP2Score"};
  model.weights = {0.5};
  model.intercept = 2;
  save_model(model, path("m.json"));
  const auto r = run({"--format", "csv", "correlate", "--dataset", ds, "--scores", sc, "--model", path("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Custom,Ensemble,Pearson,10,1,100.0,"), std::string::npos) << r.out;
}

TEST_F(CliTest, PairwiseIsDeterministicPerSeed) {
  auto d = synthetic::pascal();
  d.pairs.resize(400);
  for (std::size_t i = 0; i < d.pairs.size(); ++i) d.pairs[i].category = static_cast<PairCategory>(i % 4);
  save_dataset(d, path("p.jsonl"));
  const std::vector<std::string> base{"pairwise", "--dataset", path("p.jsonl"), "--name", "pascal50s",
                                      "--metrics", "BLEU1,CIDEr"};
  auto with_seed = [&](const std::string& seed) {
    std::vector<std::string> args{"--seed", seed};
    args.insert(args.end(), base.begin(), base.end());
    return run(args);
  };
  const auto a = with_seed("7"), b = with_seed("7"), c = with_seed("8");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["meta"]["reference_sample"], 5);
  EXPECT_EQ(j["results"][0]["seeds"], (std::vector<int>{7, 8, 9, 10, 11}));
}

TEST_F(CliTest, PairwiseWithExternalScores) {
  auto d = synthetic::reformulations();
  d.pairs.resize(50);
  save_dataset(d, path("rf.jsonl"));
  const auto loaded = load_dataset(path("rf.jsonl"), DatasetName::Reformulations);
  std::vector<std::string> ids;
  for (const auto& p : loaded.pairs) ids.push_back(p.pair_id);
  ScoreMatrix a(ids, {"Polos"}), b(ids, {"Polos"});
  for (std::size_t i = 0; i < ids.size(); ++i) a.set(i, 0, 0.1), b.set(i, 0, 0.9);
  const auto r = run({"pairwise", "--dataset", path("rf.jsonl"), "--name", "reformulations", "--scores-a",
                      write_scores("a.csv", a), "--scores-b", write_scores("b.csv", b)});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["results"][0]["mean"]["mean"].get<double>(), 1.0);
}

TEST_F(CliTest, TrainDominantAndProvenance) {
  const auto ds = write_rated("d.jsonl", DatasetName::Custom, 40, Split::Train);
  const auto d = load_dataset(ds, DatasetName::Custom);
  std::vector<std::string> ids;
  for (const auto& c : d.instances) ids.push_back(c.instance_id);
  ScoreMatrix m(ids, dominant_metrics());
  oracle::Normal rng(3);
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m.set(i, j, j == 3 ? *d.instances[i].rating / 10 : rng.uniform());
  const auto sc = write_scores("s.csv", m);

  const auto r = run({"train", "--dataset", ds, "--scores", sc, "--dominant"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto model = model_from_json(r.out);
  EXPECT_EQ(model.metrics.size(), 5u);
  EXPECT_EQ(model.meta.method, "dominant");

  const auto sel = run({"--out", path("m.json"), "train", "--dataset", ds, "--scores", sc});
  ASSERT_EQ(sel.code, 0) << sel.err;
  EXPECT_EQ(load_model(path("m.json")).metrics, (std::vector<std::string>{"CIDEr"}));

  const auto val = write_rated("v.jsonl", DatasetName::Custom, 40, Split::Val);
  EXPECT_EQ(run({"train", "--dataset", val, "--scores", sc, "--split", "val"}).code, cli::kExitConfig);
  EXPECT_EQ(run({"train", "--dataset", val, "--scores", sc, "--split", "val", "--allow-non-train"}).code, 0);
}

TEST_F(CliTest, ReportRendersTable) {
  const auto ds = write_rated("d.jsonl", DatasetName::Custom, 12);
  const auto d = load_dataset(ds, DatasetName::Custom);
  const auto sc = write_scores("s.csv", perfect_scores(d));
  ASSERT_EQ(run({"--out", path("r.json"), "correlate", "--dataset", ds, "--scores", sc}).code, 0);
  const auto r = run({"report", path("r.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("BLIP2Score"), std::string::npos);
  EXPECT_NE(r.out.find("100.0"), std::string::npos);
}
