#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hdbnn/hdbnn.hpp"

using namespace hdbnn;
using namespace hdbnn::harness;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> lines;
  std::ifstream file;
  std::istream* in = &std::cin;
  if (!path.empty() && path != "-") {
    file.open(path);
    require(static_cast<bool>(file), Errc::IoError, "cannot open " + path);
    in = &file;
  }
  for (std::string line; std::getline(*in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

struct FeatureOpts {
  std::string tokenizer = "semhash";
  std::size_t semhash_n = 3;
  std::size_t bpe_vocab = 1000;
  std::string wordpiece_vocab;
  bool lowercase = false;
  bool remove_stopwords = false;
};

void add_feature_opts(CLI::App* cmd, FeatureOpts& o) {
  cmd->add_option("--semhash-n", o.semhash_n, "SemHash character n-gram length");
  cmd->add_option("--bpe-vocab", o.bpe_vocab, "BPE vocabulary size (trained on the input)");
  cmd->add_option("--wordpiece-vocab", o.wordpiece_vocab, "WordPiece vocabulary file");
  cmd->add_flag("--lowercase", o.lowercase, "Lowercase before tokenizing");
  cmd->add_flag("--remove-stopwords", o.remove_stopwords, "Drop English stopwords");
}

ExperimentConfig feature_config(const FeatureOpts& o) {
  ExperimentConfig cfg;
  cfg.tokenizer = parse_tokenizer(o.tokenizer);
  cfg.semhash_n = o.semhash_n;
  cfg.bpe_vocab_size = o.bpe_vocab;
  cfg.wordpiece_vocab = o.wordpiece_vocab;
  cfg.lowercase = o.lowercase;
  cfg.remove_stopwords = o.remove_stopwords;
  return cfg;
}

int cmd_tokenize(const FeatureOpts& o, const std::string& in) {
  auto cfg = feature_config(o);
  cfg.validate();
  const auto lines = read_lines(in);
  const Featurizer feat(cfg, lines);
  for (const auto& line : lines) {
    const auto toks = feat.tokenize(line);
    for (std::size_t i = 0; i < toks.size(); ++i) std::cout << (i ? " " : "") << toks[i];
    std::cout << '\n';
  }
  return 0;
}

int cmd_embed(FeatureOpts o, std::size_t dim, const std::string& mode, std::size_t n, std::uint64_t seed,
              const std::string& in) {
  auto cfg = feature_config(o);
  cfg.dim = dim;
  cfg.embed = parse_embed(mode);
  cfg.ngram_n = n;
  cfg.hd_seed = seed;
  if (cfg.embed == EmbedKind::Real) cfg.classifier = ClassifierKind::TextLeNet;
  cfg.validate();
  const auto lines = read_lines(in);
  const Featurizer feat(cfg, lines);
  for (const auto& line : lines) {
    const auto v = feat.embed(line);
    if (const auto* b = std::get_if<hdcore::BitVector>(&v)) {
      for (std::size_t i = 0; i < b->dim(); ++i) std::cout << (b->bit(i) ? '1' : '0');
    } else {
      const auto& r = std::get<hdcore::RealVector>(v);
      char buf[32];
      for (std::size_t i = 0; i < r.dim(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f", r.values[i]);
        std::cout << (i ? " " : "") << buf;
      }
    }
    std::cout << '\n';
  }
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& corpus_override, const std::string& report_override) {
  auto cfg = ExperimentConfig::load(config_path);
  if (!corpus_override.empty()) cfg.corpus = corpus_override;
  if (!report_override.empty()) cfg.report_out = report_override;
  require(!cfg.corpus.empty(), Errc::InvalidArgument, "no corpus given (config key 'corpus' or --corpus)");
  const auto corpus =
      cfg.corpus_format.empty() ? load_corpus(cfg.corpus) : load_corpus(cfg.corpus, parse_format(cfg.corpus_format));
  Artifacts art;
  const auto rep = run_experiment(cfg, corpus, &art);
  if (!cfg.model_out.empty()) {
    require(art.model.has_value(), Errc::InvalidArgument, "model_out needs a network classifier");
    const auto bytes = bnn::save_checkpoint(*art.model);
    write_file(cfg.model_out, bytes);
    write_sidecars(cfg.model_out, cfg, corpus.labels, art.bpe);
  }
  if (!cfg.packed_out.empty() && art.packed) write_sidecars(cfg.packed_out, cfg, corpus.labels, art.bpe);
  const auto j = rep.to_json();
  std::cout << nlohmann::json{{"corpus", corpus.name}, {"summary", j["summary"]}}.dump(2) << '\n';
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& corpus_path, const std::string& format) {
  const auto bundle = ModelBundle::load(model_path);
  const auto corpus = format.empty() ? load_corpus(corpus_path) : load_corpus(corpus_path, parse_format(format));
  auto samples = corpus.split(Split::Test);
  if (samples.empty()) samples = corpus.samples;
  const auto& labels = bundle.labels();
  std::vector<std::size_t> preds, golds;
  for (const auto& s : samples) {
    const auto it = std::find(labels.begin(), labels.end(), s.intent);
    require(it != labels.end(), Errc::LabelOutOfRange, "label '" + s.intent + "' is unknown to the model");
    golds.push_back(static_cast<std::size_t>(it - labels.begin()));
    preds.push_back(bundle.predict_index(s.text));
  }
  const auto m = f1_metrics(preds, golds, labels.size());
  std::cout << nlohmann::json{{"samples", samples.size()},
                              {"micro_f1", detail::round6(m.micro_f1)},
                              {"macro_f1", detail::round6(m.macro_f1)},
                              {"accuracy", detail::round6(m.accuracy)}}
                   .dump(2)
            << '\n';
  return 0;
}

int cmd_infer(const std::string& model_path, const std::string& text) {
  std::cout << ModelBundle::load(model_path).predict(text) << '\n';
  return 0;
}

int cmd_export(const std::string& checkpoint, const std::string& out) {
  const auto model = bnn::load_checkpoint<float>(read_file(checkpoint));
  const auto pm = packrt::export_model(model);
  packrt::PackedLayout layout;
  const auto bytes = packrt::serialize(pm, &layout);
  write_file(out, bytes);
  copy_sidecars(checkpoint, out);
  std::size_t payload = 0;
  for (const auto& l : layout) payload += l.bytes;
  std::cout << "wrote " << out << ": " << bytes.size() << " bytes, weight payload " << payload << " bytes\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperdimensional binarized text classification"};
  app.require_subcommand(1);

  FeatureOpts tok_opts, emb_opts;
  std::string tok_in, emb_in, emb_mode = "binary";
  std::size_t emb_dim = 512, emb_n = 1;
  std::uint64_t emb_seed = 1;
  auto* tok = app.add_subcommand("tokenize", "Print the tokens of each input line");
  tok->add_option("--method", tok_opts.tokenizer, "word, semhash, bpe, char, sp or wordpiece")->required();
  tok->add_option("--in", tok_in, "Input text file, one document per line (default: stdin)");
  add_feature_opts(tok, tok_opts);

  auto* emb = app.add_subcommand("embed", "Print the HD embedding of each input line");
  emb->add_option("--dim", emb_dim, "Vector dimension")->required();
  emb->add_option("--mode", emb_mode, "binary, real or binary-counts");
  emb->add_option("--tokenizer", emb_opts.tokenizer, "Tokenizer (default semhash)");
  emb->add_option("--ngram", emb_n, "Token n-gram size");
  emb->add_option("--seed", emb_seed, "Item memory seed");
  emb->add_option("--in", emb_in, "Input text file (default: stdin)");
  add_feature_opts(emb, emb_opts);

  std::string config, corpus_override, report_override;
  auto* tr = app.add_subcommand("train", "Run the experiment described by a config file");
  tr->add_option("--config", config, "Config file")->required();
  tr->add_option("--corpus", corpus_override, "Override the config's corpus path");
  tr->add_option("--report", report_override, "Override the config's report path");

  std::string model, corpus, format;
  auto* ev = app.add_subcommand("eval", "Score a saved model on a corpus's test split");
  ev->add_option("--model", model, "Checkpoint or packed model")->required();
  ev->add_option("--corpus", corpus, "Corpus path")->required();
  ev->add_option("--format", format, "json, tsv or folder (default: from the path)");

  std::string text;
  auto* inf = app.add_subcommand("infer", "Label one text");
  inf->add_option("--model", model, "Checkpoint or packed model")->required();
  inf->add_option("--text", text, "Input text")->required();

  std::string checkpoint, out;
  auto* ex = app.add_subcommand("export", "Pack a checkpoint for XNOR/popcount inference");
  ex->add_option("--checkpoint", checkpoint, "Float checkpoint")->required();
  ex->add_option("--out", out, "Packed model path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*tok) return cmd_tokenize(tok_opts, tok_in);
    if (*emb) return cmd_embed(emb_opts, emb_dim, emb_mode, emb_n, emb_seed, emb_in);
    if (*tr) return cmd_train(config, corpus_override, report_override);
    if (*ev) return cmd_eval(model, corpus, format);
    if (*inf) return cmd_infer(model, text);
    if (*ex) return cmd_export(checkpoint, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::IoError ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
