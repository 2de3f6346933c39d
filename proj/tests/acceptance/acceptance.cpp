// Acceptance checks, one PASS/FAIL line per criterion.
//
//   acceptance properties   criteria 7-12 (self-contained)
//   acceptance corpus       criteria 1-6 (needs the benchmark corpora)
//
// The corpus group looks for ChatbotCorpus.json, AskUbuntuCorpus.json and
// WebApplicationsCorpus.json in $HDBNN_DATA_DIR, else <source>/data/corpora,
// and exits 77 (skipped) when any is missing.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>

#include "../oracles.hpp"
#include "../support.hpp"
#include "../synthetic.hpp"
#include "hdbnn/hdbnn.hpp"

using namespace hdbnn;
namespace fs = std::filesystem;

namespace {

// Criteria 1-6
constexpr double kChatbotMinF1 = 0.90;
constexpr double kWebAppMinF1 = 0.73;
constexpr double kAskUbuntuMinF1 = 0.74;
constexpr double kAblationMinGap = 0.02;
constexpr double kCentroidMinF1 = 0.80;
constexpr double kKnnMinF1 = 0.74;
constexpr double kMinCompression = 30.0;
constexpr std::size_t kSeeds = 5;
constexpr std::size_t kEpochs = 30;
constexpr std::size_t kBaselineDim = 8192;

// Criteria 7-12
constexpr std::size_t kDotPairs = 10000;
constexpr std::size_t kPackedPairs = 1000;
constexpr std::size_t kOrthoPairs = 1000;
constexpr double kOrthoMaxCos = 0.1;
constexpr std::size_t kBundleTrials = 1000;
constexpr std::size_t kBundleMinOk = 999;
constexpr std::size_t kGradInstances = 100;
constexpr double kGradMaxRelError = 1e-4;
constexpr double kGradMargin = 1e-3;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << id << "  " << name << "  (" << detail << ")"
            << std::endl;
}

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

// 7: XNOR/popcount dot equals the integer dot.
void xnor_dot() {
  std::mt19937_64 gen(7);
  std::vector<std::size_t> dims;
  for (std::size_t d = 1; d <= 65; ++d) dims.push_back(d);
  dims.push_back(512);
  dims.push_back(1024);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < kDotPairs; ++i) {
    const std::size_t d = dims[i % dims.size()];
    const auto a = testing::random_bipolar(d, gen), b = testing::random_bipolar(d, gen);
    ok += hdcore::dot(hdcore::pack(a), hdcore::pack(b)) == testing::int_dot(a, b);
  }
  report(7, "xnor-popcount dot is exact", ok == kDotPairs,
         std::to_string(ok) + "/" + std::to_string(kDotPairs) + " pairs, d in 1..65, 512, 1024");
}

// 8: packed inference labels equal float eval-mode labels.
void packed_equivalence() {
  std::mt19937_64 gen(8);
  std::size_t ok = 0, total = 0;
  while (total < kPackedPairs) {
    bnn::BnnModel<float> m(testing::random_packed_arch(gen), gen());
    testing::randomize_batch_norms(m, gen);
    const auto pm = packrt::load_model(packrt::serialize(packrt::export_model(m)));
    for (int i = 0; i < 4 && total < kPackedPairs; ++i, ++total) {
      ok += testing::packed_matches_float(m, pm, testing::random_bits(m.arch().d_in, gen));
    }
  }
  report(8, "packed inference matches float inference", ok == kPackedPairs,
         std::to_string(ok) + "/" + std::to_string(kPackedPairs) + " model/input pairs");
}

// 9: quasi-orthogonality and bundling capacity at d = 8192.
void quasi_orthogonality() {
  const std::size_t d = 8192;
  std::mt19937_64 gen(9);
  const hdcore::ItemMemory mem(d, 9);
  std::size_t ortho_ok = 0;
  double worst = 0;
  for (std::size_t i = 0; i < kOrthoPairs; ++i) {
    const std::string a = "a" + std::to_string(gen()), b = "b" + std::to_string(gen());
    const double c = std::abs(hdcore::cosine(mem.token_hv(a), mem.token_hv(b)));
    worst = std::max(worst, c);
    ortho_ok += c < kOrthoMaxCos;
  }

  std::size_t bundle_ok = 0;
  for (std::size_t t = 0; t < kBundleTrials; ++t) {
    const hdcore::ItemMemory tmem(d, 1000 + t);
    vectorizer::TokenStream members;
    for (int i = 0; i < 20; ++i) members.push_back("m" + std::to_string(i));
    const auto acc = hdcore::accumulate(tmem, vectorizer::ngram_stats(members, 1));
    auto score = [&](const std::string& tok) {
      const auto v = hdcore::ngram_hv(tmem, {tok});
      std::int64_t s = 0;
      for (std::size_t i = 0; i < d; ++i) s += acc.values[i] * v[i];
      return s;
    };
    std::int64_t best_distractor = std::numeric_limits<std::int64_t>::min();
    for (int i = 0; i < 1000; ++i) best_distractor = std::max(best_distractor, score("x" + std::to_string(i)));
    bool all = true;
    for (const auto& m : members) all = all && score(m) > best_distractor;
    bundle_ok += all;
  }
  report(9, "quasi-orthogonality and bundling capacity", ortho_ok == kOrthoPairs && bundle_ok >= kBundleMinOk,
         std::to_string(ortho_ok) + "/" + std::to_string(kOrthoPairs) + " pairs |cos| < 0.1 (max " + fmt(worst) +
             "), bundling " + std::to_string(bundle_ok) + "/" + std::to_string(kBundleTrials) + " trials");
}

// 10: hard-tanh surrogate gradients vs central finite differences.
void gradient_oracle() {
  std::size_t accepted = 0, ok = 0;
  double worst = 0;
  for (std::uint64_t seed = 1; accepted < kGradInstances && seed < 100000; ++seed) {
    const auto r = testing::hardtanh_grad_check(seed, kGradMargin);
    if (!r) continue;
    ++accepted;
    worst = std::max(worst, r->rel_error);
    ok += r->rel_error < kGradMaxRelError;
  }
  report(10, "STE hard-tanh gradient oracle", accepted == kGradInstances && ok == kGradInstances,
         std::to_string(ok) + "/" + std::to_string(accepted) + " instances, max relative error " + fmt(worst, 10));
}

// 11: the five tokenizer worked examples.
void tokenizer_golden() {
  using textprep::TokenStream;
  int ok = 0;
  ok += textprep::tokenize_word("hello! how are you?") == TokenStream{"hello", "how", "are", "you"};
  ok += textprep::tokenize_semhash("hello", 3) == TokenStream{"#he", "hel", "ell", "llo", "lo#"};
  const auto bpe = textprep::train_bpe(std::vector<std::string>(5, "hello how are you"), 1000);
  ok += textprep::tokenize_bpe(bpe, "hello how are you") == TokenStream{"hello</w>", "how</w>", "are</w>", "you</w>"};
  ok += textprep::tokenize_char("hello how are you") ==
        TokenStream{"h", "e", "l", "l", "o</w>", "h", "o", "w</w>", "a", "r", "e</w>", "y", "o", "u</w>"};
  const textprep::WordPieceVocab wp({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "hello", "how", "are", "you"});
  ok += textprep::tokenize_wordpiece(wp, "hello how are you") ==
        TokenStream{"[CLS]", "hello", "how", "are", "you", "[SEP]"};
  report(11, "tokenizer worked examples", ok == 5, std::to_string(ok) + "/5 examples");
}

// 12: repeated runs serialize identically.
void determinism() {
  const auto corpus = testing::synthetic_corpus();
  int ok = 0, total = 0;
  auto cfg = testing::small_config();
  for (auto kind : {harness::ClassifierKind::Bnn, harness::ClassifierKind::Centroid, harness::ClassifierKind::Knn}) {
    cfg.classifier = kind;
    ++total;
    ok += harness::run_experiment(cfg, corpus).dump() == harness::run_experiment(cfg, corpus).dump();
  }
  report(12, "run_experiment is deterministic", ok == total,
         std::to_string(ok) + "/" + std::to_string(total) + " configs byte-identical");
}

int run_properties() {
  xnor_dot();
  packed_equivalence();
  quasi_orthogonality();
  gradient_oracle();
  tokenizer_golden();
  determinism();
  return failures == 0 ? 0 : 1;
}

fs::path data_dir() {
  if (const char* env = std::getenv("HDBNN_DATA_DIR")) return env;
  return fs::path(HDBNN_SOURCE_DIR) / "data" / "corpora";
}

harness::ExperimentConfig bnn_config(const std::string& name) {
  harness::ExperimentConfig cfg;
  cfg.name = name;
  cfg.tokenizer = harness::TokenizerKind::SemHash;
  cfg.dim = 512;
  cfg.train.epochs = kEpochs;
  cfg.repeats = kSeeds;
  cfg.cross_validate = false;
  return cfg;
}

harness::Report run_logged(const harness::ExperimentConfig& cfg, const harness::Corpus& corpus) {
  std::cout << "running " << cfg.name << " on " << corpus.name << " ..." << std::endl;
  return harness::run_experiment(cfg, corpus);
}

int run_corpus() {
  const auto dir = data_dir();
  const std::vector<std::string> files{"ChatbotCorpus.json", "AskUbuntuCorpus.json", "WebApplicationsCorpus.json"};
  for (const auto& f : files) {
    if (!fs::exists(dir / f)) {
      for (int id = 1; id <= 6; ++id) {
        std::cout << "BLOCKED  criterion " << id << "  (corpus file " << (dir / f).string() << " not found)" << std::endl;
      }
      return 77;
    }
  }
  const auto chatbot = harness::load_corpus((dir / files[0]).string());
  const auto askubuntu = harness::load_corpus((dir / files[1]).string());
  const auto webapps = harness::load_corpus((dir / files[2]).string());

  const auto chat = run_logged(bnn_config("chatbot-hd-bnn"), chatbot);
  const double chat_f1 = chat.mean_test_micro_f1();
  report(1, "Chatbot HD BNN micro-F1", chat_f1 >= kChatbotMinF1, "mean " + fmt(chat_f1) + " >= " + fmt(kChatbotMinF1, 2));

  const double web_f1 = run_logged(bnn_config("webapps-hd-bnn"), webapps).mean_test_micro_f1();
  report(2, "WebApplications HD BNN micro-F1", web_f1 >= kWebAppMinF1, "mean " + fmt(web_f1) + " >= " + fmt(kWebAppMinF1, 2));

  const double ask_f1 = run_logged(bnn_config("askubuntu-hd-bnn"), askubuntu).mean_test_micro_f1();
  report(3, "AskUbuntu HD BNN micro-F1", ask_f1 >= kAskUbuntuMinF1, "mean " + fmt(ask_f1) + " >= " + fmt(kAskUbuntuMinF1, 2));

  auto counts_cfg = bnn_config("chatbot-semhash-counts-bnn");
  counts_cfg.embed = harness::EmbedKind::BinaryCounts;
  const double counts_f1 = run_logged(counts_cfg, chatbot).mean_test_micro_f1();
  report(4, "binarized HD beats binarized SemHash counts", chat_f1 - counts_f1 >= kAblationMinGap,
         "HD " + fmt(chat_f1) + " vs counts " + fmt(counts_f1) + ", gap >= " + fmt(kAblationMinGap, 2));

  auto nc_cfg = bnn_config("askubuntu-centroid");
  nc_cfg.classifier = harness::ClassifierKind::Centroid;
  nc_cfg.dim = kBaselineDim;
  const double nc_f1 = run_logged(nc_cfg, askubuntu).mean_test_micro_f1();
  auto knn_cfg = nc_cfg;
  knn_cfg.name = "askubuntu-knn3";
  knn_cfg.classifier = harness::ClassifierKind::Knn;
  knn_cfg.knn_k = 3;
  const double knn_f1 = run_logged(knn_cfg, askubuntu).mean_test_micro_f1();
  report(5, "Hamming centroid and kNN on AskUbuntu", nc_f1 >= kCentroidMinF1 && knn_f1 >= kKnnMinF1,
         "centroid " + fmt(nc_f1) + " >= " + fmt(kCentroidMinF1, 2) + ", kNN " + fmt(knn_f1) + " >= " +
             fmt(kKnnMinF1, 2));

  const auto& sizes = chat.repeats.front().test.sizes;
  bool exact = sizes.has_value();
  std::size_t float_payload = 0, packed_payload = 0;
  if (sizes) {
    for (const auto& l : sizes->layers) {
      exact = exact && l.packed_bytes == (l.weights + 63) / 64 * 8 && l.float_bytes == 4 * l.weights;
      float_payload += l.float_bytes;
      packed_payload += l.packed_bytes;
    }
  }
  const double ratio = packed_payload ? double(float_payload) / double(packed_payload) : 0.0;
  report(6, "packed weight payload", exact && ratio >= kMinCompression,
         "per-layer ceil(W/64)*8 " + std::string(exact ? "exact" : "MISMATCH") + ", float " +
             std::to_string(float_payload) + " B / packed " + std::to_string(packed_payload) + " B = " + fmt(ratio, 2) +
             "x >= " + fmt(kMinCompression, 0) + "x");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string group = argc > 1 ? argv[1] : "properties";
  try {
    if (group == "properties") return run_properties();
    if (group == "corpus") return run_corpus();
    if (group == "all") {
      const int a = run_properties();
      const int b = run_corpus();
      return a != 0 ? a : b;
    }
  } catch (const std::exception& e) {
    std::cout << "FAIL  aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cerr << "usage: acceptance [properties|corpus|all]\n";
  return 2;
}
