#pragma once

#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hdbnn/error.hpp"
#include "hdbnn/textprep/tokenize.hpp"

namespace hdbnn::textprep {

// Ordered merge rules learned by train_bpe. Immutable once built.
class BpeModel {
 public:
  using Merge = std::pair<std::string, std::string>;

  BpeModel() = default;
  BpeModel(std::vector<Merge> merges, std::set<std::string> vocab, std::size_t vocab_size)
      : merges_(std::move(merges)), vocab_(std::move(vocab)), vocab_size_(vocab_size) {
    for (std::size_t r = 0; r < merges_.size(); ++r) {
      ranks_.emplace(merges_[r], r);  // first occurrence wins
      vocab_.insert(merges_[r].first + merges_[r].second);
    }
  }

  const std::vector<Merge>& merges() const noexcept { return merges_; }
  const std::set<std::string>& vocab() const noexcept { return vocab_; }
  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::string_view eow_marker() const noexcept { return kEowMarker; }

  // Applies merges to one word's symbols in training order.
  TokenStream encode_word(std::string_view word) const {
    TokenStream syms = word_symbols(word);
    while (syms.size() > 1) {
      std::size_t best_rank = std::numeric_limits<std::size_t>::max();
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        auto it = ranks_.find(Merge(syms[i], syms[i + 1]));
        if (it != ranks_.end() && it->second < best_rank) best_rank = it->second;
      }
      if (best_rank == std::numeric_limits<std::size_t>::max()) break;
      const Merge& m = merges_[best_rank];
      TokenStream next;
      next.reserve(syms.size());
      for (std::size_t i = 0; i < syms.size(); ++i) {
        if (i + 1 < syms.size() && syms[i] == m.first && syms[i + 1] == m.second) {
          next.push_back(syms[i] + syms[i + 1]);
          ++i;
        } else {
          next.push_back(std::move(syms[i]));
        }
      }
      syms = std::move(next);
    }
    return syms;
  }

  std::string serialize() const {
    std::ostringstream os;
    os << "bpe v1 " << vocab_size_ << '\n';
    for (const auto& [l, r] : merges_) os << l << ' ' << r << '\n';
    return os.str();
  }

  static BpeModel parse(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string magic, version;
    std::size_t vocab_size = 0;
    std::string header;
    require(static_cast<bool>(std::getline(is, header)), Errc::ParseError, "empty BPE model");
    std::istringstream hs(header);
    require(static_cast<bool>(hs >> magic >> version >> vocab_size) && magic == "bpe", Errc::ParseError,
            "bad BPE header: " + header);
    require(version == "v1", Errc::FormatVersionMismatch, "unsupported BPE model version " + version);
    std::vector<Merge> merges;
    std::set<std::string> vocab;
    std::string line;
    while (std::getline(is, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string l, r, extra;
      require(static_cast<bool>(ls >> l >> r) && !(ls >> extra), Errc::ParseError, "bad merge line: " + line);
      vocab.insert(l);
      vocab.insert(r);
      merges.emplace_back(std::move(l), std::move(r));
    }
    return BpeModel(std::move(merges), std::move(vocab), vocab_size);
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), Errc::IoError, "cannot write " + path);
    out << serialize();
  }

  static BpeModel load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), Errc::IoError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

 private:
  std::vector<Merge> merges_;
  std::set<std::string> vocab_;
  std::size_t vocab_size_ = 0;
  std::map<Merge, std::size_t> ranks_;
};

// Learns merges until the vocabulary holds vocab_size symbols or no adjacent
// pair occurs at least twice. Equal counts go to the lexicographically
// smallest merged string (then the smallest left symbol).
inline BpeModel train_bpe(const std::vector<std::string>& corpus, std::size_t vocab_size) {
  std::map<std::string, std::int64_t> word_freq;
  for (const auto& doc : corpus) {
    for (auto& w : split_words(doc)) ++word_freq[w];
  }
  require(!word_freq.empty(), Errc::EmptyCorpus, "BPE training corpus has no words");

  // Interned symbols; words stored as id sequences.
  std::vector<std::string> names;
  std::unordered_map<std::string, std::uint32_t> ids;
  auto intern = [&](const std::string& s) {
    auto [it, inserted] = ids.emplace(s, static_cast<std::uint32_t>(names.size()));
    if (inserted) names.push_back(s);
    return it->second;
  };
  std::vector<std::vector<std::uint32_t>> words;
  std::vector<std::int64_t> freqs;
  std::set<std::string> vocab;
  for (const auto& [w, f] : word_freq) {
    std::vector<std::uint32_t> seq;
    for (auto& s : word_symbols(w)) {
      vocab.insert(s);
      seq.push_back(intern(s));
    }
    words.push_back(std::move(seq));
    freqs.push_back(f);
  }
  require(vocab_size >= vocab.size(), Errc::InvalidArgument,
          "vocab_size " + std::to_string(vocab_size) + " below initial symbol count " +
              std::to_string(vocab.size()));

  auto key = [](std::uint32_t a, std::uint32_t b) { return (std::uint64_t{a} << 32) | b; };
  std::unordered_map<std::uint64_t, std::int64_t> counts;
  std::unordered_map<std::uint64_t, std::set<std::size_t>> where;
  auto add_pairs = [&](std::size_t wi, std::int64_t sign) {
    const auto& seq = words[wi];
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      const auto k = key(seq[i], seq[i + 1]);
      counts[k] += sign * freqs[wi];
      if (sign > 0) where[k].insert(wi);
    }
  };
  for (std::size_t wi = 0; wi < words.size(); ++wi) add_pairs(wi, +1);

  std::vector<BpeModel::Merge> merges;
  while (vocab.size() < vocab_size) {
    std::uint64_t best = 0;
    std::int64_t best_count = 0;
    std::string best_merged;
    for (const auto& [k, c] : counts) {
      if (c < 2 || c < best_count) continue;
      const auto a = static_cast<std::uint32_t>(k >> 32);
      const auto b = static_cast<std::uint32_t>(k & 0xFFFFFFFFu);
      std::string merged = names[a] + names[b];
      if (c > best_count || merged < best_merged ||
          (merged == best_merged && names[a] < names[static_cast<std::uint32_t>(best >> 32)])) {
        best = k;
        best_count = c;
        best_merged = std::move(merged);
      }
    }
    if (best_count < 2) break;

    const auto a = static_cast<std::uint32_t>(best >> 32);
    const auto b = static_cast<std::uint32_t>(best & 0xFFFFFFFFu);
    const auto merged_id = intern(best_merged);
    merges.emplace_back(names[a], names[b]);
    vocab.insert(best_merged);

    const auto affected = where[best];
    for (std::size_t wi : affected) {
      add_pairs(wi, -1);
      auto& seq = words[wi];
      std::vector<std::uint32_t> next;
      next.reserve(seq.size());
      for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i + 1 < seq.size() && seq[i] == a && seq[i + 1] == b) {
          next.push_back(merged_id);
          ++i;
        } else {
          next.push_back(seq[i]);
        }
      }
      seq = std::move(next);
      add_pairs(wi, +1);
    }
    for (auto it = counts.begin(); it != counts.end();) {
      it = it->second == 0 ? counts.erase(it) : std::next(it);
    }
  }
  return BpeModel(std::move(merges), std::move(vocab), vocab_size);
}

inline TokenStream tokenize_bpe(const BpeModel& model, std::string_view text) {
  TokenStream out;
  for (const auto& word : split_words(text)) {
    auto syms = model.encode_word(word);
    out.insert(out.end(), syms.begin(), syms.end());
  }
  return out;
}

}  // namespace hdbnn::textprep
