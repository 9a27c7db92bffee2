#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "capeval/textnorm.hpp"

using namespace capeval;

TEST(Tokenize, LowercasesAndStripsPunctuation) {
  EXPECT_EQ(tokenize("A Dog, running!  Fast."), (TokenSeq{"a", "dog", "running", "fast"}));
}

TEST(Tokenize, KeepsIntraWordHyphenAndApostrophe) {
  EXPECT_EQ(tokenize("A horse-drawn cart; the man's hat"),
            (TokenSeq{"a", "horse-drawn", "cart", "the", "man's", "hat"}));
  EXPECT_EQ(tokenize("- dash -edge- 'quoted'"), (TokenSeq{"dash", "edge", "quoted"}));
}

TEST(Tokenize, EmptyAndPunctuationOnlyGiveNoTokens) {
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize(" ... !? ").empty());
}

TEST(Tokenize, UnicodeLowercaseAndWhitespace) {
  // "ÉCOLE" with a no-break space before "Ünd".
  EXPECT_EQ(tokenize("\xC3\x89" "COLE\xC2\xA0\xC3\x9Cnd"), (TokenSeq{"\xC3\xA9" "cole", "\xC3\xBC" "nd"}));
}

TEST(Tokenize, TokensNeverEmptyOrContainSpaces) {
  for (const char* s : {"a  b", "\t\nx - y", "'' -- ,,", "word's-end", "we're done."})
    for (const auto& t : tokenize(s)) {
      EXPECT_FALSE(t.empty());
      EXPECT_EQ(t.find(' '), std::string::npos);
    }
}

TEST(NGrams, CountsWindows) {
  const TokenSeq t{"a", "b", "a", "b"};
  const auto bi = ngrams(t, 2);
  EXPECT_EQ(bi.total(), 3);
  EXPECT_EQ(bi.count("a b"), 2);
  EXPECT_EQ(bi.count("b a"), 1);
  EXPECT_EQ(bi.count("b b"), 0);
  EXPECT_EQ(ngrams(t, 5).total(), 0);
  EXPECT_THROW(ngrams(t, 0), std::invalid_argument);
}

TEST(NGrams, KeysSplitIntoNTokens) {
  const auto seq = tokenize("the quick brown fox jumps over the lazy dog");
  for (int n = 1; n <= 4; ++n) {
    const auto g = ngrams(seq, n);
    EXPECT_EQ(g.total(), static_cast<int>(seq.size()) - n + 1);
    for (const auto& [k, c] : g.counts) {
      EXPECT_GE(c, 1);
      EXPECT_EQ(static_cast<int>(std::count(k.begin(), k.end(), ' ')), n - 1);
    }
  }
}

TEST(Normalize, NfcAndWhitespace) {
  EXPECT_EQ(nfc("cafe\xCC\x81"), "caf\xC3\xA9");
  EXPECT_EQ(collapse_whitespace("  a \t b\n\nc  "), "a b c");
  EXPECT_EQ(surface_key(" cafe\xCC\x81  au lait"), surface_key("caf\xC3\xA9 au lait"));
  EXPECT_NE(surface_key("A cat"), surface_key("a cat"));
}

TEST(Porter, ShortWordsUnchanged) {
  EXPECT_EQ(stem("is"), "is");
  EXPECT_EQ(stem("as"), "as");
  EXPECT_EQ(stem("a"), "a");
}

TEST(Porter, KnownStems) {
  EXPECT_EQ(stem("caresses"), "caress");
  EXPECT_EQ(stem("ponies"), "poni");
  EXPECT_EQ(stem("relational"), "relat");
  EXPECT_EQ(stem("generalization"), "gener");
  EXPECT_EQ(stem("running"), "run");
}

TEST(Porter, MatchesReferenceVocabulary) {
  std::ifstream in(CAPEVAL_FIXTURE_DIR "/porter_vocab.tsv");
  ASSERT_TRUE(in) << "missing fixture";
  std::string line;
  int checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    const auto word = line.substr(0, tab), expected = line.substr(tab + 1);
    EXPECT_EQ(stem(word), expected) << word;
    ++checked;
  }
  EXPECT_GT(checked, 300);
}

TEST(Porter, Idempotent) {
  // Stemming twice must not loop or crash; the second pass may still shorten.
  for (const char* w : {"generalizations", "happiness", "ties", "sky", "bled"}) {
    const auto once = stem(w);
    EXPECT_LE(stem(once).size(), once.size());
  }
}
