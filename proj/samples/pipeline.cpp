// End-to-end walk through the library: tokenize, embed, train a small
// binarized network, pack it and label new text with XNOR/popcount.
//
//   sample_pipeline [corpus.tsv]
//
// Without an argument a tiny built-in intent set is used.

#include <iostream>

#include "hdbnn/hdbnn.hpp"

using namespace hdbnn;

namespace {

harness::Corpus builtin_corpus() {
  const char* rows[][3] = {
      {"when does the next train leave", "Departure", "train"},
      {"next bus to the airport", "Departure", "train"},
      {"what time is the last train tonight", "Departure", "train"},
      {"when is the first bus tomorrow", "Departure", "train"},
      {"when does the tram leave the station", "Departure", "train"},
      {"what time does the next bus leave", "Departure", "train"},
      {"is there a late train to the airport", "Departure", "train"},
      {"when is the next departure to the city", "Departure", "train"},
      {"what time is the next tram", "Departure", "train"},
      {"first train in the morning please", "Departure", "train"},
      {"how do i get from the station to the zoo", "Route", "train"},
      {"route from main street to the park", "Route", "train"},
      {"best way from home to the office", "Route", "train"},
      {"how can i reach the museum from here", "Route", "train"},
      {"how do i get to the university", "Route", "train"},
      {"directions from the hotel to the beach", "Route", "train"},
      {"how can i get from the park to the museum", "Route", "train"},
      {"show me the way to the library", "Route", "train"},
      {"which way to the old town from the bridge", "Route", "train"},
      {"route to the stadium from the center", "Route", "train"},
      {"when does the next bus leave", "Departure", "test"},
      {"what time is the first tram tomorrow", "Departure", "test"},
      {"how do i get to the park from the station", "Route", "test"},
      {"directions from the office to the zoo", "Route", "test"},
  };
  harness::Corpus c;
  c.name = "builtin";
  for (const auto& r : rows) c.samples.push_back({r[0], r[1], std::string(r[2]) == "train" ? harness::Split::Train : harness::Split::Test});
  c.finalize();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    const auto corpus = argc > 1 ? harness::load_corpus(argv[1]) : builtin_corpus();

    harness::ExperimentConfig cfg;
    cfg.tokenizer = harness::TokenizerKind::SemHash;
    cfg.dim = 512;
    cfg.conv_filters = {16, 16, 32};
    cfg.dense_units = {32};
    cfg.train.epochs = 30;
    cfg.repeats = 1;
    cfg.cross_validate = false;

    const harness::Featurizer feat(cfg, std::vector<std::string>{});
    std::cout << "tokens of \"" << corpus.samples[0].text << "\":";
    for (const auto& t : feat.tokenize(corpus.samples[0].text)) std::cout << ' ' << t;
    std::cout << "\n";

    harness::Artifacts art;
    const auto rep = harness::run_experiment(cfg, corpus, &art);
    std::cout << "test micro-F1 " << rep.repeats[0].test.metrics.micro_f1 << "\n";

    const auto& sizes = *rep.repeats[0].test.sizes;
    std::cout << "checkpoint " << sizes.checkpoint_bytes << " bytes, packed " << sizes.packed_bytes << " bytes\n";
    for (const auto& l : sizes.layers) {
      std::cout << "  " << l.name << ": " << l.weights << " weights, float " << l.float_bytes << " B, packed "
                << l.packed_bytes << " B\n";
    }

    for (const auto& s : corpus.split(harness::Split::Test)) {
      const auto r = packrt::infer_packed(*art.packed, feat.embed_bits(s.text));
      std::cout << "\"" << s.text << "\" -> " << corpus.labels[r.label] << " (gold " << s.intent << ")\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
