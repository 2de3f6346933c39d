#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdbnn/error.hpp"
#include "hdbnn/textprep/tokenize.hpp"

namespace hdbnn::vectorizer {

using textprep::Token;
using textprep::TokenStream;
using Ngram = std::vector<Token>;

// U+241F SYMBOL FOR UNIT SEPARATOR joins n-gram members in serialized keys.
inline constexpr std::string_view kTupleSeparator = "\xE2\x90\x9F";

// Sparse n-gram frequencies of one document.
class NgramStats {
 public:
  explicit NgramStats(std::size_t n) : n_(n) { require(n >= 1, Errc::InvalidN, "n-gram order must be >= 1"); }

  std::size_t n() const noexcept { return n_; }
  // Number of distinct n-grams (k).
  std::size_t distinct() const noexcept { return counts_.size(); }
  std::uint64_t total_frequency() const noexcept {
    std::uint64_t s = 0;
    for (const auto& [g, f] : counts_) s += f;
    return s;
  }
  bool empty() const noexcept { return counts_.empty(); }
  const std::map<Ngram, std::uint64_t>& counts() const noexcept { return counts_; }

  void add(const Ngram& gram, std::uint64_t f = 1) {
    require(gram.size() == n_, Errc::InvalidArgument, "n-gram arity mismatch");
    require(f >= 1, Errc::InvalidArgument, "frequency must be positive");
    counts_[gram] += f;
  }

  nlohmann::json to_json() const {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [g, f] : counts_) counts[join(g)] = f;
    return {{"n", n_}, {"counts", counts}};
  }

  static NgramStats from_json(const nlohmann::json& j) {
    try {
      NgramStats s(j.at("n").get<std::size_t>());
      for (const auto& [k, v] : j.at("counts").items()) s.add(split(k), v.get<std::uint64_t>());
      return s;
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::ParseError, e.what());
    }
  }

 private:
  static std::string join(const Ngram& g) {
    std::string out;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (i) out += kTupleSeparator;
      out += g[i];
    }
    return out;
  }
  static Ngram split(std::string_view key) {
    Ngram g;
    std::size_t pos = 0;
    while (true) {
      auto next = key.find(kTupleSeparator, pos);
      g.emplace_back(key.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
      if (next == std::string_view::npos) break;
      pos = next + kTupleSeparator.size();
    }
    return g;
  }

  std::size_t n_;
  std::map<Ngram, std::uint64_t> counts_;
};

inline NgramStats ngram_stats(const TokenStream& tokens, std::size_t n = 1) {
  NgramStats stats(n);
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    stats.add(Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i), tokens.begin() + static_cast<std::ptrdiff_t>(i + n)));
  }
  return stats;
}

}  // namespace hdbnn::vectorizer
