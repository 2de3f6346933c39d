#pragma once

#include <fstream>
#include <optional>
#include <cctype>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hdbnn/error.hpp"
#include "hdbnn/textprep/tokenize.hpp"
#include "hdbnn/utf8.hpp"

namespace hdbnn::textprep {

// WordPiece vocabulary: one token per line, line number is the token id.
class WordPieceVocab {
 public:
  static constexpr std::string_view kContinuation = "##";
  static constexpr std::size_t kMaxWordChars = 100;

  explicit WordPieceVocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    for (std::size_t i = 0; i < tokens_.size(); ++i) ids_.emplace(tokens_[i], i);
    cls_ = find_special("[cls]");
    sep_ = find_special("[sep]");
    unk_ = find_special("[unk]");
  }

  static WordPieceVocab load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), Errc::IoError, "cannot open vocab " + path);
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      tokens.push_back(line);
    }
    return WordPieceVocab(std::move(tokens));
  }

  bool contains(std::string_view t) const { return ids_.contains(std::string(t)); }
  std::optional<std::size_t> id(std::string_view t) const {
    auto it = ids_.find(std::string(t));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& cls() const { return tokens_[cls_]; }
  const std::string& sep() const { return tokens_[sep_]; }
  const std::string& unk() const { return tokens_[unk_]; }

 private:
  // Accepts any casing of the bracketed name ("[CLS]" or "[cls]").
  std::size_t find_special(std::string_view lower_name) const {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      const auto& t = tokens_[i];
      if (t.size() != lower_name.size()) continue;
      bool eq = true;
      for (std::size_t k = 0; k < t.size() && eq; ++k) {
        eq = static_cast<char>(std::tolower(static_cast<unsigned char>(t[k]))) == lower_name[k];
      }
      if (eq) return i;
    }
    fail(Errc::MissingSpecialToken, "vocabulary lacks " + std::string(lower_name));
  }

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::size_t cls_ = 0, sep_ = 0, unk_ = 0;
};

// Greedy longest-prefix segmentation; a word that cannot be fully covered maps to [unk].
inline TokenStream tokenize_wordpiece(const WordPieceVocab& vocab, std::string_view text) {
  TokenStream out{vocab.cls()};
  for (const auto& word : tokenize_word(text)) {
    const std::u32string cps = utf8::decode(word);
    if (cps.size() > WordPieceVocab::kMaxWordChars) {
      out.push_back(vocab.unk());
      continue;
    }
    TokenStream pieces;
    std::size_t start = 0;
    bool ok = true;
    while (start < cps.size()) {
      std::size_t end = cps.size();
      std::string found;
      while (end > start) {
        std::string piece = utf8::encode(std::u32string_view(cps).substr(start, end - start));
        if (start > 0) piece = std::string(WordPieceVocab::kContinuation) + piece;
        if (vocab.contains(piece)) {
          found = std::move(piece);
          break;
        }
        --end;
      }
      if (found.empty()) {
        ok = false;
        break;
      }
      pieces.push_back(std::move(found));
      start = end;
    }
    if (ok) {
      out.insert(out.end(), pieces.begin(), pieces.end());
    } else {
      out.push_back(vocab.unk());
    }
  }
  out.push_back(vocab.sep());
  return out;
}

}  // namespace hdbnn::textprep
