#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace capeval {

/// Lowercased tokens with no empty entries and no embedded whitespace.
using TokenSeq = std::vector<std::string>;

/// Multiset of contiguous n-token windows. Keys are the n tokens joined by a
/// single space, so every key splits back into exactly `n` tokens.
struct NGramMultiset {
  int n = 1;
  std::unordered_map<std::string, int> counts;

  int total() const;
  int count(const std::string& key) const;
};

/// Lowercases, strips ASCII punctuation (apostrophes and hyphens between two
/// word characters survive) and splits on whitespace.
TokenSeq tokenize(std::string_view text);

/// Porter stemmer, following the reference C implementation: words of
/// length <= 2 are returned unchanged.
std::string stem(std::string_view token);

TokenSeq stem_all(const TokenSeq& tokens);

NGramMultiset ngrams(const TokenSeq& seq, int n);

std::string join(const TokenSeq& tokens, std::string_view sep = " ");

/// Unicode NFC normalization of UTF-8 text. Invalid UTF-8 is passed through
/// the ICU converter's substitution rules.
std::string nfc(std::string_view text);

/// Trims and collapses every whitespace run into a single ASCII space.
std::string collapse_whitespace(std::string_view text);

/// NFC followed by whitespace collapsing; the key used for sentence identity.
std::string surface_key(std::string_view text);

}  // namespace capeval
