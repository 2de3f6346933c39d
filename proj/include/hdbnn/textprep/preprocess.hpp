#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hdbnn/error.hpp"
#include "hdbnn/textprep/stoplist.hpp"
#include "hdbnn/utf8.hpp"

namespace hdbnn::textprep {

struct PrepConfig {
  bool remove_stopwords = false;
  bool lowercase = false;
  Stoplist stoplist;

  void validate() const {
    require(!remove_stopwords || !stoplist.empty(), Errc::InvalidArgument,
            "remove_stopwords requires a non-empty stoplist");
  }
};

namespace detail {

inline std::vector<std::u32string> split_ws(std::u32string_view s) {
  std::vector<std::u32string> words;
  std::u32string cur;
  for (char32_t cp : s) {
    if (utf8::is_space(cp)) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(cp);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

inline std::u32string strip_punct(std::u32string_view w) {
  std::size_t b = 0, e = w.size();
  while (b < e && utf8::is_punct(w[b])) ++b;
  while (e > b && utf8::is_punct(w[e - 1])) --e;
  return std::u32string(w.substr(b, e - b));
}

inline std::u32string lower(std::u32string_view w) {
  std::u32string out(w);
  for (auto& cp : out) cp = utf8::to_lower(cp);
  return out;
}

}  // namespace detail

// Drops [Cc] control code points, collapses whitespace runs into one space,
// trims, then optionally lowercases and removes stoplist words. Stopword
// matching is case-insensitive and ignores surrounding punctuation.
inline std::string preprocess(std::string_view text, const PrepConfig& cfg = {}) {
  cfg.validate();
  std::u32string cleaned;
  cleaned.reserve(text.size());
  for (char32_t cp : utf8::decode(text)) {
    if (utf8::is_space(cp)) {
      cleaned.push_back(U' ');
    } else if (!utf8::is_control(cp)) {
      cleaned.push_back(cfg.lowercase ? utf8::to_lower(cp) : cp);
    }
  }
  std::string out;
  for (const auto& w : detail::split_ws(cleaned)) {
    if (cfg.remove_stopwords) {
      const std::string key = utf8::encode(detail::lower(detail::strip_punct(w)));
      if (cfg.stoplist.contains(key)) continue;
    }
    if (!out.empty()) out.push_back(' ');
    out += utf8::encode(w);
  }
  return out;
}

}  // namespace hdbnn::textprep
