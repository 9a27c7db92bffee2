#include <cmath>
#include <fstream>
#include <set>

#include <gtest/gtest.h>
#include <json.hpp>

#include "capeval/error.hpp"
#include "capeval/metrics.hpp"
#include "oracles.hpp"

using namespace capeval;

namespace {

std::vector<TokenSeq> toks(std::initializer_list<const char*> xs) {
  std::vector<TokenSeq> out;
  for (auto x : xs) out.push_back(tokenize(x));
  return out;
}

}  // namespace

TEST(Bleu, IdenticalSentenceIsOne) {
  const auto c = tokenize("a man rides a red bike down the street");
  const auto refs = toks({"a man rides a red bike down the street"});
  for (int n = 1; n <= 4; ++n) EXPECT_NEAR(bleu_n(c, refs, n), 1.0, 1e-9);
}

TEST(Bleu, HandComputedUnigramAndBrevity) {
  // 3 of 4 unigrams match; candidate 4 vs closest reference 6 -> BP = exp(1 - 6/4).
  const auto c = tokenize("the cat sat down");
  const auto refs = toks({"the cat sat on the mat"});
  const double p1 = 3.0 / 4.0;
  EXPECT_NEAR(bleu_n(c, refs, 1), p1 * std::exp(1.0 - 6.0 / 4.0), 1e-9);
}

TEST(Bleu, ClippedCounts) {
  // "the the the the" against "the cat": clip to 1 of 4.
  const auto c = tokenize("the the the the");
  const auto refs = toks({"the cat", "a cat on the big mat"});
  // closest reference length to 4: |2-4| = |6-4| -> shorter (2) wins, no penalty.
  EXPECT_NEAR(bleu_n(c, refs, 1), 0.25, 1e-9);
}

TEST(Bleu, NoOverlapIsNearZero) {
  EXPECT_LT(bleu_n(tokenize("zebra giraffe"), toks({"a cat on a mat"}), 1), 1e-6);
}

TEST(Bleu, RejectsBadOrder) {
  EXPECT_THROW(bleu_n(tokenize("a b"), toks({"a b"}), 0), std::exception);
  EXPECT_THROW(bleu_n(tokenize("a b"), toks({"a b"}), 5), std::exception);
}

TEST(Rouge, LcsAndF) {
  EXPECT_EQ(lcs_length(tokenize("a b c d"), tokenize("a c d b")), 3u);
  // LCS 3, P = 3/4, R = 3/4 -> F = 3/4.
  EXPECT_NEAR(rouge_l(tokenize("a b c d"), toks({"a c d b"})), 0.75, 1e-12);
  EXPECT_DOUBLE_EQ(rouge_l(tokenize("x y"), toks({"a b"})), 0.0);
  EXPECT_DOUBLE_EQ(rouge_l(tokenize("a b"), toks({"a b"})), 1.0);
}

TEST(Rouge, PrecisionAndRecallMaximizedSeparately) {
  // Ref 1 gives P=1, R=1/4; ref 2 gives P=1/2, R=1. Result uses P=1, R=1.
  const auto c = tokenize("a b");
  const auto refs = toks({"a b c d", "a"});
  const double r1 = rouge_l(c, refs);
  // max P = 1 (ref 1), max R = 1 (ref 2: lcs 1 / len 1).
  EXPECT_NEAR(r1, 1.0, 1e-12);
}

TEST(Cider, IdfZeroForSingleDocument) {
  const std::vector<std::vector<TokenSeq>> sets{toks({"a dog runs", "the dog runs"})};
  const auto stats = build_df(sets);
  EXPECT_EQ(stats.num_docs, 1);
  EXPECT_DOUBLE_EQ(cider_d(tokenize("a dog runs"), sets[0], stats), 0.0);
}

TEST(Cider, PerfectMatchBeatsPartial) {
  std::vector<std::vector<TokenSeq>> sets{toks({"a dog runs on the grass"}), toks({"a cat sleeps on a couch"}),
                                          toks({"two kids play soccer"})};
  const auto stats = build_df(sets);
  const double exact = cider_d(tokenize("a dog runs on the grass"), sets[0], stats);
  const double part = cider_d(tokenize("a dog sleeps"), sets[0], stats);
  EXPECT_GT(exact, part);
  EXPECT_LE(exact, 10.0 + 1e-12);
  EXPECT_GE(part, 0.0);
}

TEST(Cider, ErrorsOnMissingStatsOrReferences) {
  std::vector<std::vector<TokenSeq>> sets{toks({"a b"}), toks({"c d"})};
  const auto stats = build_df(sets);
  EXPECT_THROW(cider_d(tokenize("a b"), {}, stats), DataError);
  CiderOptions stemmed;
  stemmed.stem = true;
  EXPECT_THROW(cider_d(tokenize("a b"), sets[0], stats, stemmed), ConfigError);
}

TEST(Meteor, ExactMatchPenaltyOnly) {
  // One chunk over 5 matches: penalty 0.5 (1/5)^3.
  const auto c = tokenize("a dog runs on grass");
  EXPECT_NEAR(meteor(c, toks({"a dog runs on grass"})), 1.0 - 0.5 / 125.0, 1e-12);
}

TEST(Meteor, StemStage) {
  const auto al = meteor_align(tokenize("the dog runs"), tokenize("the dogs run"));
  EXPECT_EQ(al.matches, 3);
  EXPECT_EQ(al.chunks, 1);
  EXPECT_NEAR(meteor(tokenize("the dog runs"), toks({"the dogs run"})), 1.0 - 0.5 / 27.0, 1e-12);
}

TEST(Meteor, ReversedOrderIsFragmented) {
  const auto al = meteor_align(tokenize("red green blue"), tokenize("blue green red"));
  EXPECT_EQ(al.matches, 3);
  EXPECT_EQ(al.chunks, 3);
  EXPECT_NEAR(meteor(tokenize("red green blue"), toks({"blue green red"})), 0.5, 1e-12);
}

TEST(Meteor, HandComputedFmean) {
  // cand 4 tokens, ref 2 tokens, 2 matches adjacent: P = 1/2, R = 1.
  const double P = 0.5, R = 1.0;
  const double fmean = P * R / (0.9 * P + 0.1 * R);
  const double pen = 0.5 * std::pow(1.0 / 2.0, 3);
  EXPECT_NEAR(meteor(tokenize("big cat sat down"), toks({"big cat"})), fmean * (1 - pen), 1e-12);
}

TEST(Meteor, SynonymStage) {
  const auto syn = SynonymTable::from_sets({{"couch", "sofa"}});
  MeteorParams p;
  p.synonyms = &syn;
  EXPECT_EQ(meteor_align(tokenize("a sofa"), tokenize("a couch"), p).matches, 2);
  EXPECT_EQ(meteor_align(tokenize("a sofa"), tokenize("a couch")).matches, 1);
}

TEST(Meteor, AlignmentIsOneToOne) {
  const auto al = meteor_align(tokenize("the the cat"), tokenize("the cat the the"));
  std::set<int> cs, rs;
  for (auto [c, r] : al.links) {
    EXPECT_TRUE(cs.insert(c).second);
    EXPECT_TRUE(rs.insert(r).second);
  }
  EXPECT_EQ(al.matches, 3);
}

TEST(Meteor, NoMatchIsZero) { EXPECT_DOUBLE_EQ(meteor(tokenize("xx yy"), toks({"aa bb"})), 0.0); }

TEST(ScoreDataset, JobsDoNotChangeOutput) {
  Dataset d;
  for (int i = 0; i < 40; ++i) {
    CaptionInstance inst;
    inst.instance_id = "i" + std::to_string(i);
    inst.image_id = "img" + std::to_string(i / 4);
    inst.candidate = i % 3 ? "a dog runs in the park" : "two cats sleep on a red couch";
    inst.references = {"a dog is running in a park", "the cat sleeps", "kids " + std::to_string(i % 5)};
    d.instances.push_back(inst);
  }
  d.instances[7].references.clear();
  const auto all = std::vector<NativeMetric>(kAllNativeMetrics.begin(), kAllNativeMetrics.end());
  ScoringOptions one, four;
  four.jobs = 4;
  const auto a = score_dataset(d, all, one), b = score_dataset(d, all, four);
  EXPECT_EQ(a.matrix, b.matrix);
  ASSERT_EQ(a.missing_references.size(), 1u);
  EXPECT_EQ(a.missing_references[0], "i7");
  EXPECT_FALSE(a.matrix.at(7, 0).has_value());
  EXPECT_EQ(a.matrix.missing_count(), kAllNativeMetrics.size());
}

TEST(ScoreDataset, DuplicateMetricRejected) {
  Dataset d;
  d.instances.push_back({"i", "img", "a b", {"a b"}, std::nullopt, Split::Unsplit});
  const NativeMetric twice[] = {NativeMetric::BLEU1, NativeMetric::BLEU1};
  EXPECT_THROW(score_dataset(d, twice), ConfigError);
}

TEST(ScoreDataset, MetricNames) {
  EXPECT_EQ(parse_native_metric("rouge-l"), NativeMetric::ROUGE);
  EXPECT_EQ(parse_native_metric("CIDEr-D"), NativeMetric::CIDEr);
  EXPECT_EQ(parse_native_metric("bleu4"), NativeMetric::BLEU4);
  EXPECT_FALSE(parse_native_metric("spice"));
  for (auto m : kAllNativeMetrics) EXPECT_EQ(parse_native_metric(metric_name(m)), m);
}

// The COCO caption toolkit fixture, checked per instance. METEOR is covered
// by the acceptance binary, which reports its gap.
TEST(CocoFixture, LexicalMetricsMatchReferenceToolkit) {
  Notes notes;
  const auto d = load_dataset(CAPEVAL_FIXTURE_DIR "/coco_small.jsonl", DatasetName::Custom, &notes);
  const auto expected = oracle::read_wide_csv(CAPEVAL_FIXTURE_DIR "/coco_small_oracle.csv");
  const NativeMetric ms[] = {NativeMetric::BLEU1, NativeMetric::BLEU2, NativeMetric::BLEU3, NativeMetric::BLEU4,
                             NativeMetric::ROUGE, NativeMetric::CIDEr};
  const auto got = score_dataset(d, ms).matrix;
  ASSERT_EQ(got.rows(), 50u);
  for (std::size_t r = 0; r < got.rows(); ++r)
    for (std::size_t c = 0; c < got.cols(); ++c)
      EXPECT_NEAR(*got.at(r, c), expected.at(got.instance_ids()[r]).at(got.metric_names()[c]), 1e-4)
          << got.instance_ids()[r] << " " << got.metric_names()[c];
}

TEST(CocoFixture, TokensMatchReferenceTokenizer) {
  std::ifstream in(CAPEVAL_FIXTURE_DIR "/coco_small_tokens.json");
  ASSERT_TRUE(in);
  const auto j = nlohmann::json::parse(in);
  const auto d = load_dataset(CAPEVAL_FIXTURE_DIR "/coco_small.jsonl", DatasetName::Custom);
  for (const auto& inst : d.instances) {
    EXPECT_EQ(join(tokenize(inst.candidate)), j["candidates"][inst.instance_id].get<std::string>());
    const auto& refs = j["references"][inst.instance_id];
    ASSERT_EQ(refs.size(), inst.references.size());
    for (std::size_t k = 0; k < refs.size(); ++k)
      EXPECT_EQ(join(tokenize(inst.references[k])), refs[k].get<std::string>());
  }
}
