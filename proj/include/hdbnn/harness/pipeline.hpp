#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hdbnn/bnn/train.hpp"
#include "hdbnn/harness/config.hpp"
#include "hdbnn/hdcore.hpp"
#include "hdbnn/textprep.hpp"
#include "hdbnn/vectorizer.hpp"

namespace hdbnn::harness {

// Stands in for documents whose token stream is empty, so every document
// has an embedding.
inline constexpr std::string_view kEmptyDocToken = "[empty]";

// preprocess -> tokenize -> ngram_stats -> embed, with any tokenizer model
// (BPE merges, WordPiece vocab) fixed at construction.
class Featurizer {
 public:
  // Trains BPE on the preprocessed training texts when the tokenizer needs it.
  Featurizer(const ExperimentConfig& cfg, const std::vector<std::string>& train_texts)
      : cfg_(cfg), mem_(cfg.dim, cfg.hd_seed) {
    init_prep();
    if (needs_bpe()) {
      std::vector<std::string> docs;
      for (const auto& t : train_texts) docs.push_back(textprep::preprocess(t, prep_));
      bpe_ = textprep::train_bpe(docs, cfg_.bpe_vocab_size);
    }
    init_wordpiece();
  }

  Featurizer(const ExperimentConfig& cfg, std::optional<textprep::BpeModel> bpe)
      : cfg_(cfg), mem_(cfg.dim, cfg.hd_seed), bpe_(std::move(bpe)) {
    init_prep();
    require(!needs_bpe() || bpe_.has_value(), Errc::InvalidArgument, "BPE tokenizer needs a trained model");
    init_wordpiece();
  }

  const ExperimentConfig& config() const noexcept { return cfg_; }
  const std::optional<textprep::BpeModel>& bpe() const noexcept { return bpe_; }
  bool needs_bpe() const {
    return cfg_.tokenizer == TokenizerKind::Bpe || cfg_.tokenizer == TokenizerKind::SentencePiece;
  }

  textprep::TokenStream tokenize(std::string_view text) const {
    const std::string clean = textprep::preprocess(text, prep_);
    switch (cfg_.tokenizer) {
      case TokenizerKind::Word: return textprep::tokenize_word(clean);
      case TokenizerKind::SemHash: return textprep::tokenize_semhash(clean, cfg_.semhash_n);
      case TokenizerKind::Bpe:
      case TokenizerKind::SentencePiece: return textprep::tokenize_bpe(*bpe_, clean);
      case TokenizerKind::Char: return textprep::tokenize_char(clean);
      case TokenizerKind::WordPiece: return textprep::tokenize_wordpiece(*wordpiece_, clean);
    }
    return {};
  }

  vectorizer::NgramStats stats(std::string_view text) const {
    auto s = vectorizer::ngram_stats(tokenize(text), cfg_.ngram_n);
    if (s.empty()) s = vectorizer::ngram_stats({std::string(kEmptyDocToken)}, 1);
    return s;
  }

  hdcore::HdVector embed(std::string_view text) const {
    const auto s = stats(text);
    switch (cfg_.embed) {
      case EmbedKind::Binary: return hdcore::embed_binary(mem_, s);
      case EmbedKind::Real: return hdcore::embed_real(mem_, s);
      case EmbedKind::BinaryCounts: return hashed_counts(s);
    }
    return {};
  }

  hdcore::BitVector embed_bits(std::string_view text) const {
    require(cfg_.binarized_input(), Errc::InvalidArgument, "embedding is not binary");
    return std::get<hdcore::BitVector>(embed(text));
  }

 private:
  void init_prep() {
    prep_.lowercase = cfg_.lowercase;
    prep_.remove_stopwords = cfg_.remove_stopwords || cfg_.tokenizer == TokenizerKind::SentencePiece;
    if (prep_.remove_stopwords) {
      prep_.stoplist = cfg_.stopwords.empty() ? textprep::english_stoplist() : textprep::load_stoplist(cfg_.stopwords);
    }
    prep_.validate();
  }

  void init_wordpiece() {
    if (cfg_.tokenizer == TokenizerKind::WordPiece) wordpiece_ = textprep::WordPieceVocab::load(cfg_.wordpiece_vocab);
  }

  // Localist bag of n-grams: each n-gram's count lands in one hashed slot,
  // and a slot is +1 when its count is positive.
  hdcore::BitVector hashed_counts(const vectorizer::NgramStats& s) const {
    std::vector<std::uint64_t> counts(cfg_.dim, 0);
    for (const auto& [gram, f] : s.counts()) {
      std::string key;
      for (std::size_t i = 0; i < gram.size(); ++i) key += (i ? std::string(vectorizer::kTupleSeparator) : "") + gram[i];
      counts[hash64(cfg_.hd_seed, key) % cfg_.dim] += f;
    }
    hdcore::BitVector v(cfg_.dim);
    for (std::size_t i = 0; i < cfg_.dim; ++i) v.set(i, counts[i] > 0);
    return v;
  }

  ExperimentConfig cfg_;
  textprep::PrepConfig prep_;
  hdcore::ItemMemory mem_;
  std::optional<textprep::BpeModel> bpe_;
  std::optional<textprep::WordPieceVocab> wordpiece_;
};

// Stacks embeddings as network inputs (one row per document).
inline bnn::Mat<float> to_matrix(const std::vector<hdcore::HdVector>& vecs) {
  require(!vecs.empty(), Errc::EmptyDataset, "no vectors");
  const auto d = std::visit([](const auto& v) { return v.dim(); }, vecs.front());
  bnn::Mat<float> m(static_cast<Eigen::Index>(vecs.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = std::visit([](const auto& v) { return bnn::to_row<float>(v); }, vecs[i]);
  }
  return m;
}

}  // namespace hdbnn::harness
