#include <sstream>

#include <gtest/gtest.h>

#include "capeval/error.hpp"
#include "capeval/registry.hpp"
#include "capeval/score_matrix.hpp"

using namespace capeval;

namespace {

IngestResult read(const std::string& text, IngestOptions opts = {}) {
  std::istringstream in(text);
  return read_score_csv(in, "s.csv", opts);
}

}  // namespace

TEST(Ingest, WideForm) {
  const auto r = read("# exporter header\ninstance_id,CLIPScore,BLEU4\na,0.5,0.1\nb,,0.2\n");
  const auto& m = r.matrix;
  ASSERT_EQ(m.rows(), 2u);
  ASSERT_EQ(m.cols(), 2u);
  EXPECT_EQ(m.at(0, 0), 0.5);
  EXPECT_FALSE(m.at(1, 0));
  EXPECT_EQ(m.missing_count(), 1u);
  EXPECT_THROW(m.require_complete(), DataError);
  EXPECT_EQ(m.complete_rows().rows(), 1u);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Ingest, LongFormEqualsWide) {
  const auto wide = read("instance_id,BLEU1,ROUGE\na,0.25,0.5\nb,0.75,1\n").matrix;
  const auto lng =
      read("instance_id,metric,score\na,BLEU1,0.25\na,ROUGE,0.5\nb,BLEU1,0.75\nb,ROUGE,1\n").matrix;
  EXPECT_EQ(wide, lng);
}

TEST(Ingest, Errors) {
  EXPECT_THROW(read(""), DataError);
  EXPECT_THROW(read("id,BLEU1\na,1\n"), DataError);
  EXPECT_THROW(read("instance_id,NotAMetric\na,1\n"), DataError);
  EXPECT_THROW(read("instance_id,BLEU1\na,abc\n"), DataError);
  EXPECT_THROW(read("instance_id,BLEU1\na,1.5\n"), DataError);  // outside [0, 1]
  EXPECT_THROW(read("instance_id,BLEU1\na,0.1\na,0.2\n"), DataError);
  EXPECT_THROW(read("instance_id,metric,score\na,BLEU1,0.1\na,BLEU1,0.2\n"), DataError);
  EXPECT_THROW(read("instance_id,BLEU1,BLEU1\na,0.1,0.1\n"), DataError);
  EXPECT_THROW(read("instance_id,BLEU1\na,0.1,0.3\n"), DataError);
  EXPECT_THROW(read("instance_id,BLEU1\na,nan\n"), DataError);
}

TEST(Ingest, OptionsRelaxChecks) {
  IngestOptions loose;
  loose.require_registered = false;
  loose.check_ranges = false;
  const auto r = read("instance_id,MyMetric,BLEU1\na,7,3\n", loose);
  EXPECT_EQ(r.matrix.at(0, 0), 7.0);
  EXPECT_EQ(r.matrix.at(0, 1), 3.0);
}

TEST(Ingest, RoundTripKeepsFullPrecision) {
  ScoreMatrix m({"x", "y,z"}, {"BLEU1", "CIDEr"});
  m.set(0, 0, 0.1 + 0.2);
  m.set(0, 1, 1.0 / 3.0);
  m.set(1, 1, 9.999999999999998);
  std::ostringstream out;
  write_score_csv(m, out);
  EXPECT_EQ(read(out.str()).matrix, m);
}

TEST(Matrix, JoinIntersectsAndReportsDropped) {
  ScoreMatrix a({"1", "2", "3"}, {"BLEU1"});
  ScoreMatrix b({"3", "1", "4"}, {"ROUGE"});
  for (std::size_t i = 0; i < 3; ++i) a.set(i, 0, 0.1 * i), b.set(i, 0, 0.2 * i);
  const ScoreMatrix parts[] = {a, b};
  const auto j = join(parts);
  EXPECT_EQ(j.matrix.instance_ids(), (std::vector<std::string>{"1", "3"}));
  EXPECT_EQ(j.matrix.at(1, 1), 0.0);  // id 3 is b's first row
  EXPECT_EQ(j.matrix.at(0, 1), 0.2);
  EXPECT_EQ(j.dropped[0], std::vector<std::string>{"2"});
  EXPECT_EQ(j.dropped[1], std::vector<std::string>{"4"});
  const ScoreMatrix same[] = {a, a};
  EXPECT_THROW(join(same), DataError);
}

TEST(Matrix, SelectAndAddColumn) {
  ScoreMatrix m({"a", "b"}, {"BLEU1", "BLEU2"});
  m.set(0, 0, 1), m.set(0, 1, 2), m.set(1, 0, 3), m.set(1, 1, 4);
  const std::string order[] = {"b", "a"};
  EXPECT_EQ(m.select_rows(order).column("BLEU2"), (std::vector<double>{4, 2}));
  const std::string cols[] = {"BLEU2"};
  EXPECT_EQ(m.select_columns(cols).cols(), 1u);
  const double extra[] = {5, 6};
  m.add_column("Ensemble", extra);
  EXPECT_EQ(m.column("Ensemble"), (std::vector<double>{5, 6}));
  EXPECT_THROW(m.add_column("BLEU1", extra), DataError);
  const std::string unknown[] = {"zz"};
  EXPECT_THROW(m.select_rows(unknown), DataError);
  EXPECT_THROW(ScoreMatrix({"a", "a"}, {"BLEU1"}), DataError);
}

TEST(Registry, OrderAndLookup) {
  ASSERT_FALSE(registry().empty());
  EXPECT_EQ(registry().front().name, "BLIP2Score");
  EXPECT_LT(registry_rank("BLEU1"), registry_rank("BLEU2"));
  EXPECT_EQ(registry_rank("nope"), registry().size());
  const auto* cider = find_metric("CIDEr");
  ASSERT_NE(cider, nullptr);
  EXPECT_EQ(cider->category, TaxonomyCategory::LexicalSimilarity);
  EXPECT_EQ(cider->provider, Provider::Native);
  EXPECT_EQ(find_metric("cider"), nullptr);
  EXPECT_EQ(to_string(find_metric("Polos")->category), "Human rating prediction");
  for (const char* name : {"CLIPScore", "RefCLIPScore", "PACScore", "RefPACScore", "BLIP2Score", "MPNetScore", "Polos",
                           "SPICE", "Exact NO", "Exact VO", "Fuzzy NO", "Fuzzy VO"})
    EXPECT_NE(find_metric(name), nullptr) << name;
}
