#pragma once

#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hdbnn/bnn/config.hpp"
#include "hdbnn/bytes.hpp"
#include "hdbnn/error.hpp"

namespace hdbnn::harness {

enum class TokenizerKind { Word, SemHash, Bpe, Char, SentencePiece, WordPiece };
enum class EmbedKind { Binary, Real, BinaryCounts };
enum class ClassifierKind { Bnn, TextLeNet, Centroid, Knn };

inline TokenizerKind parse_tokenizer(const std::string& s) {
  if (s == "word") return TokenizerKind::Word;
  if (s == "semhash") return TokenizerKind::SemHash;
  if (s == "bpe") return TokenizerKind::Bpe;
  if (s == "char") return TokenizerKind::Char;
  if (s == "sp" || s == "sentencepiece") return TokenizerKind::SentencePiece;
  if (s == "wordpiece") return TokenizerKind::WordPiece;
  fail(Errc::InvalidArgument, "unknown tokenizer '" + s + "'");
}

inline const char* tokenizer_name(TokenizerKind k) {
  switch (k) {
    case TokenizerKind::Word: return "word";
    case TokenizerKind::SemHash: return "semhash";
    case TokenizerKind::Bpe: return "bpe";
    case TokenizerKind::Char: return "char";
    case TokenizerKind::SentencePiece: return "sp";
    case TokenizerKind::WordPiece: return "wordpiece";
  }
  return "?";
}

inline EmbedKind parse_embed(const std::string& s) {
  if (s == "binary") return EmbedKind::Binary;
  if (s == "real") return EmbedKind::Real;
  if (s == "binary-counts") return EmbedKind::BinaryCounts;
  fail(Errc::InvalidArgument, "unknown embed mode '" + s + "'");
}

inline const char* embed_name(EmbedKind k) {
  switch (k) {
    case EmbedKind::Binary: return "binary";
    case EmbedKind::Real: return "real";
    case EmbedKind::BinaryCounts: return "binary-counts";
  }
  return "?";
}

inline ClassifierKind parse_classifier(const std::string& s) {
  if (s == "bnn") return ClassifierKind::Bnn;
  if (s == "text-lenet") return ClassifierKind::TextLeNet;
  if (s == "centroid") return ClassifierKind::Centroid;
  if (s == "knn") return ClassifierKind::Knn;
  fail(Errc::InvalidArgument, "unknown classifier '" + s + "'");
}

inline const char* classifier_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::Bnn: return "bnn";
    case ClassifierKind::TextLeNet: return "text-lenet";
    case ClassifierKind::Centroid: return "centroid";
    case ClassifierKind::Knn: return "knn";
  }
  return "?";
}

struct ExperimentConfig {
  std::string name = "experiment";
  std::string corpus;
  std::string corpus_format;  // empty: infer from the path

  TokenizerKind tokenizer = TokenizerKind::SemHash;
  std::size_t semhash_n = 3;
  std::size_t bpe_vocab_size = 1000;
  std::string wordpiece_vocab;
  std::string stopwords;  // empty: bundled English list
  bool lowercase = false;
  bool remove_stopwords = false;

  std::size_t ngram_n = 1;
  std::size_t dim = 512;
  EmbedKind embed = EmbedKind::Binary;
  std::uint64_t hd_seed = 1;

  ClassifierKind classifier = ClassifierKind::Bnn;
  std::size_t knn_k = 3;
  std::size_t kernel = 3;
  std::vector<std::size_t> conv_filters{128, 256, 512};
  std::vector<std::size_t> conv_pools{3, 2, 3};
  std::vector<std::size_t> dense_units{128};
  double bn_momentum = 0.1;
  double bn_epsilon = 1e-5;
  bnn::TrainConfig train;

  std::size_t folds = 5;
  std::size_t repeats = 5;
  std::uint64_t seed = 0;
  bool cross_validate = true;
  bool augment = true;
  bool report_timing = false;

  std::string report_out;
  std::string model_out;
  std::string packed_out;

  bool binarized_input() const { return embed != EmbedKind::Real; }

  bnn::Architecture architecture(std::size_t num_classes) const {
    bnn::Architecture a;
    a.d_in = dim;
    a.num_classes = num_classes;
    a.kernel = kernel;
    a.conv.clear();
    for (std::size_t i = 0; i < conv_filters.size(); ++i) a.conv.push_back({conv_filters[i], conv_pools[i]});
    a.dense = dense_units;
    a.mode = classifier == ClassifierKind::TextLeNet ? bnn::Mode::Real : bnn::Mode::Binarized;
    a.bn_momentum = bn_momentum;
    a.bn_epsilon = bn_epsilon;
    return a;
  }

  void validate() const {
    require(dim == 512 || dim == 1024 || dim == 4096 || dim == 8192 || dim == 16384, Errc::InvalidArgument,
            "dim must be one of 512, 1024, 4096, 8192, 16384");
    require(folds >= 2, Errc::InvalidArgument, "folds must be >= 2");
    require(repeats >= 1, Errc::InvalidArgument, "repeats must be >= 1");
    require(semhash_n >= 1, Errc::InvalidN, "semhash_n must be >= 1");
    require(ngram_n >= 1, Errc::InvalidN, "ngram_n must be >= 1");
    require(knn_k >= 1 && knn_k % 2 == 1, Errc::InvalidArgument, "knn_k must be a positive odd integer");
    require(conv_filters.size() == conv_pools.size(), Errc::InvalidArgument,
            "conv_filters and conv_pools differ in length");
    require(tokenizer != TokenizerKind::WordPiece || !wordpiece_vocab.empty(), Errc::InvalidArgument,
            "wordpiece tokenizer needs wordpiece_vocab");
    require(!(classifier == ClassifierKind::Bnn && embed == EmbedKind::Real), Errc::InvalidArgument,
            "the binarized network needs a binary embedding");
    require(!((classifier == ClassifierKind::Centroid || classifier == ClassifierKind::Knn) &&
              embed == EmbedKind::Real),
            Errc::InvalidArgument, "Hamming baselines need a binary embedding");
    train.validate();
    architecture(2).validate();
  }

  // Flat `key = value` text; '#' starts a comment.
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path) {
    const auto bytes = read_file(path);
    return parse(std::string(bytes.begin(), bytes.end()));
  }
  void set(const std::string& key, const std::string& value);
  std::string to_text() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) return s.substr(1, s.size() - 2);
  return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  require(ec == std::errc{} && p == end, Errc::ParseError, "bad number for " + key + ": '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(Errc::ParseError, "bad boolean for " + key + ": '" + v + "'");
}

inline std::vector<std::size_t> parse_list(const std::string& key, std::string v) {
  if (!v.empty() && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_number<std::size_t>(key, item));
  }
  return out;
}

inline std::string join_list(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

inline void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  using namespace detail;
  const std::string v = unquote(trim(raw));
  auto sz = [&] { return parse_number<std::size_t>(key, v); };
  auto u64 = [&] { return parse_number<std::uint64_t>(key, v); };
  auto dbl = [&] { return parse_number<double>(key, v); };
  auto flag = [&] { return parse_bool(key, v); };
  if (key == "name") name = v;
  else if (key == "corpus") corpus = v;
  else if (key == "corpus_format") corpus_format = v;
  else if (key == "tokenizer") tokenizer = parse_tokenizer(v);
  else if (key == "semhash_n") semhash_n = sz();
  else if (key == "bpe_vocab_size") bpe_vocab_size = sz();
  else if (key == "wordpiece_vocab") wordpiece_vocab = v;
  else if (key == "stopwords") stopwords = v;
  else if (key == "lowercase") lowercase = flag();
  else if (key == "remove_stopwords") remove_stopwords = flag();
  else if (key == "ngram_n") ngram_n = sz();
  else if (key == "dim") dim = sz();
  else if (key == "embed") embed = parse_embed(v);
  else if (key == "hd_seed") hd_seed = u64();
  else if (key == "classifier") classifier = parse_classifier(v);
  else if (key == "knn_k") knn_k = sz();
  else if (key == "kernel") kernel = sz();
  else if (key == "conv_filters") conv_filters = parse_list(key, v);
  else if (key == "conv_pools") conv_pools = parse_list(key, v);
  else if (key == "dense_units") dense_units = parse_list(key, v);
  else if (key == "bn_momentum") bn_momentum = dbl();
  else if (key == "bn_epsilon") bn_epsilon = dbl();
  else if (key == "learning_rate") train.learning_rate = dbl();
  else if (key == "rms_decay") train.rms_decay = dbl();
  else if (key == "rms_epsilon") train.rms_epsilon = dbl();
  else if (key == "batch_size") train.batch_size = sz();
  else if (key == "epochs") train.epochs = sz();
  else if (key == "clip_value") train.clip_value = dbl();
  else if (key == "dropout_rate") train.dropout_rate = dbl();
  else if (key == "folds") folds = sz();
  else if (key == "repeats") repeats = sz();
  else if (key == "seed") seed = u64();
  else if (key == "cross_validate") cross_validate = flag();
  else if (key == "augment") augment = flag();
  else if (key == "report_timing") report_timing = flag();
  else if (key == "report_out") report_out = v;
  else if (key == "model_out") model_out = v;
  else if (key == "packed_out") packed_out = v;
  else fail(Errc::ParseError, "unknown config key '" + key + "'");
}

inline ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (quote) {
        if (line[i] == quote) quote = 0;
      } else if (line[i] == '"' || line[i] == '\'') {
        quote = line[i];
      } else if (line[i] == '#') {
        line.resize(i);
        break;
      }
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, Errc::ParseError, "line " + std::to_string(lineno) + ": expected key = value");
    cfg.set(detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

inline std::string ExperimentConfig::to_text() const {
  using detail::fmt_double;
  using detail::join_list;
  std::map<std::string, std::string> kv{
      {"name", name},
      {"corpus", corpus},
      {"corpus_format", corpus_format},
      {"tokenizer", tokenizer_name(tokenizer)},
      {"semhash_n", std::to_string(semhash_n)},
      {"bpe_vocab_size", std::to_string(bpe_vocab_size)},
      {"wordpiece_vocab", wordpiece_vocab},
      {"stopwords", stopwords},
      {"lowercase", lowercase ? "true" : "false"},
      {"remove_stopwords", remove_stopwords ? "true" : "false"},
      {"ngram_n", std::to_string(ngram_n)},
      {"dim", std::to_string(dim)},
      {"embed", embed_name(embed)},
      {"hd_seed", std::to_string(hd_seed)},
      {"classifier", classifier_name(classifier)},
      {"knn_k", std::to_string(knn_k)},
      {"kernel", std::to_string(kernel)},
      {"conv_filters", join_list(conv_filters)},
      {"conv_pools", join_list(conv_pools)},
      {"dense_units", join_list(dense_units)},
      {"bn_momentum", fmt_double(bn_momentum)},
      {"bn_epsilon", fmt_double(bn_epsilon)},
      {"learning_rate", fmt_double(train.learning_rate)},
      {"rms_decay", fmt_double(train.rms_decay)},
      {"rms_epsilon", fmt_double(train.rms_epsilon)},
      {"batch_size", std::to_string(train.batch_size)},
      {"epochs", std::to_string(train.epochs)},
      {"clip_value", fmt_double(train.clip_value)},
      {"dropout_rate", fmt_double(train.dropout_rate)},
      {"folds", std::to_string(folds)},
      {"repeats", std::to_string(repeats)},
      {"seed", std::to_string(seed)},
      {"cross_validate", cross_validate ? "true" : "false"},
      {"augment", augment ? "true" : "false"},
      {"report_timing", report_timing ? "true" : "false"},
      {"report_out", report_out},
      {"model_out", model_out},
      {"packed_out", packed_out},
  };
  std::string out;
  for (const auto& [k, v] : kv) {
    const bool quote = v.empty() || v.find_first_of(" #=\t") != std::string::npos;
    out += k + " = " + (quote ? "\"" + v + "\"" : v) + "\n";
  }
  return out;
}

}  // namespace hdbnn::harness
