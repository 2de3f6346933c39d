#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hdbnn/harness.hpp"

namespace hdbnn::testing {

// Intent corpus where each label owns a few keywords mixed with shared filler.
inline harness::Corpus synthetic_corpus(std::size_t per_class_train = 12, std::size_t per_class_test = 4,
                                        std::uint64_t seed = 1) {
  const std::vector<std::pair<std::string, std::vector<std::string>>> intents{
      {"BookFlight", {"flight", "plane", "airport", "fly", "ticket"}},
      {"CheckWeather", {"weather", "rain", "sunny", "forecast", "cold"}},
      {"PlayMusic", {"music", "song", "playlist", "album", "guitar"}},
  };
  const std::vector<std::string> filler{"please", "can", "you", "tell", "me", "about", "the", "today", "now", "my"};
  std::mt19937_64 gen(seed);
  harness::Corpus c;
  c.name = "synthetic";
  for (const auto& [label, words] : intents) {
    for (std::size_t i = 0; i < per_class_train + per_class_test; ++i) {
      std::ostringstream s;
      const std::size_t len = 4 + gen() % 4;
      for (std::size_t w = 0; w < len; ++w) {
        if (w) s << ' ';
        s << ((gen() % 3 == 0) ? filler[gen() % filler.size()] : words[gen() % words.size()]);
      }
      c.samples.push_back({s.str(), label, i < per_class_train ? harness::Split::Train : harness::Split::Test});
    }
  }
  c.finalize();
  return c;
}

// Writes the corpus as text<TAB>label<TAB>split lines.
inline std::string to_tsv(const harness::Corpus& c) {
  std::string out;
  for (const auto& s : c.samples) {
    out += s.text + "\t" + s.intent + "\t" + (s.split == harness::Split::Train ? "train" : "test") + "\n";
  }
  return out;
}

// Small network that keeps unit tests fast at d = 512.
inline harness::ExperimentConfig small_config() {
  harness::ExperimentConfig cfg;
  cfg.name = "small";
  cfg.dim = 512;
  cfg.conv_filters = {8, 8, 8};
  cfg.conv_pools = {3, 2, 3};
  cfg.dense_units = {16};
  cfg.train.epochs = 3;
  cfg.repeats = 2;
  cfg.folds = 2;
  return cfg;
}

}  // namespace hdbnn::testing
