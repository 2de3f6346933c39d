#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hdbnn/error.hpp"
#include "hdbnn/textprep/preprocess.hpp"
#include "hdbnn/utf8.hpp"

namespace hdbnn::textprep {

// A token is its surface form; it is never empty.
using Token = std::string;
using TokenStream = std::vector<Token>;

// End-of-word marker appended to the last symbol of a word by the character
// and BPE tokenizers. The same literal is used in memory and in model files.
inline constexpr std::string_view kEowMarker = "</w>";

inline TokenStream tokenize_word(std::string_view text) {
  TokenStream out;
  for (const auto& w : detail::split_ws(utf8::decode(text))) {
    auto stripped = detail::strip_punct(w);
    if (!stripped.empty()) out.push_back(utf8::encode(stripped));
  }
  return out;
}

// Character n-grams of "#word#" for every word, left to right.
inline TokenStream tokenize_semhash(std::string_view text, std::size_t n = 3) {
  require(n >= 1, Errc::InvalidN, "semhash n must be >= 1");
  TokenStream out;
  for (const auto& word : tokenize_word(text)) {
    std::u32string padded = U"#" + utf8::decode(word) + U"#";
    if (padded.size() <= n) {
      out.push_back(utf8::encode(padded));
      continue;
    }
    for (std::size_t i = 0; i + n <= padded.size(); ++i) {
      out.push_back(utf8::encode(std::u32string_view(padded).substr(i, n)));
    }
  }
  return out;
}

// Splits a single word into code points with the end-of-word marker on the last one.
inline TokenStream word_symbols(std::string_view word) {
  TokenStream syms = utf8::code_points(word);
  if (!syms.empty()) syms.back() += kEowMarker;
  return syms;
}

// Whitespace-delimited words, punctuation kept (character and BPE tokenizers).
inline std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& w : detail::split_ws(utf8::decode(text))) out.push_back(utf8::encode(w));
  return out;
}

inline TokenStream tokenize_char(std::string_view text) {
  TokenStream out;
  for (const auto& word : split_words(text)) {
    auto syms = word_symbols(word);
    out.insert(out.end(), syms.begin(), syms.end());
  }
  return out;
}

}  // namespace hdbnn::textprep
