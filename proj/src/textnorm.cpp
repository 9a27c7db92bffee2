#include "capeval/textnorm.hpp"

#include <stdexcept>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

namespace capeval {
namespace {

bool is_ascii_punct(UChar32 c) {
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
         (c >= 0x7B && c <= 0x7E);
}

bool is_space(UChar32 c) { return u_isUWhiteSpace(c) != 0; }

bool is_word(UChar32 c) { return !is_space(c) && !is_ascii_punct(c); }

void append_utf8(std::string& out, UChar32 c) {
  icu::UnicodeString tmp(c);
  tmp.toUTF8String(out);
}

}  // namespace

int NGramMultiset::total() const {
  int sum = 0;
  for (const auto& [_, c] : counts) sum += c;
  return sum;
}

int NGramMultiset::count(const std::string& key) const {
  auto it = counts.find(key);
  return it == counts.end() ? 0 : it->second;
}

TokenSeq tokenize(std::string_view text) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  u.toLower(icu::Locale::getRoot());

  std::vector<UChar32> cps;
  cps.reserve(static_cast<size_t>(u.length()));
  for (int32_t i = 0; i < u.length(); i = u.moveIndex32(i, 1)) cps.push_back(u.char32At(i));

  TokenSeq tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (size_t i = 0; i < cps.size(); ++i) {
    UChar32 c = cps[i];
    if (is_space(c)) {
      flush();
      continue;
    }
    if (is_ascii_punct(c)) {
      bool intra = (c == '\'' || c == '-') && i > 0 && i + 1 < cps.size() && is_word(cps[i - 1]) &&
                   is_word(cps[i + 1]);
      if (!intra) {
        flush();
        continue;
      }
    }
    append_utf8(current, c);
  }
  flush();
  return tokens;
}

TokenSeq stem_all(const TokenSeq& tokens) {
  TokenSeq out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(stem(t));
  return out;
}

NGramMultiset ngrams(const TokenSeq& seq, int n) {
  if (n < 1) throw std::invalid_argument("ngrams: n must be >= 1");
  NGramMultiset out;
  out.n = n;
  const auto len = static_cast<int>(seq.size());
  std::string key;
  for (int start = 0; start + n <= len; ++start) {
    key.clear();
    for (int k = 0; k < n; ++k) {
      if (k) key.push_back(' ');
      key += seq[static_cast<size_t>(start + k)];
    }
    ++out.counts[key];
  }
  return out;
}

std::string join(const TokenSeq& tokens, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

std::string nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString normalized = norm->normalize(u, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char ch : text) {
    bool space = ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v';
    if (space) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(ch);
  }
  return out;
}

std::string surface_key(std::string_view text) { return collapse_whitespace(nfc(text)); }

}  // namespace capeval
