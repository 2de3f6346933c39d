#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "hdbnn/error.hpp"
#include "hdbnn/harness/corpus.hpp"
#include "hdbnn/rng.hpp"

namespace hdbnn::harness {

// Brings every class up to the largest class size by drawing duplicates
// uniformly with replacement. Originals come first, in input order.
inline std::vector<Sample> augment_oversample(const std::vector<Sample>& train, std::uint64_t seed) {
  require(!train.empty(), Errc::EmptyClass, "cannot oversample an empty training set");
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < train.size(); ++i) by_class[train[i].intent].push_back(i);
  std::size_t target = 0;
  for (const auto& [label, idx] : by_class) target = std::max(target, idx.size());
  Rng rng(seed);
  std::vector<Sample> out = train;
  for (const auto& [label, idx] : by_class) {
    for (std::size_t k = idx.size(); k < target; ++k) out.push_back(train[idx[rng.below(idx.size())]]);
  }
  return out;
}

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Stratified k-fold over sample indices. Each class is shuffled and dealt
// round-robin, continuing across classes so fold sizes differ by at most one.
inline std::vector<Fold> kfold_split(const std::vector<std::string>& labels, std::size_t k, std::uint64_t seed) {
  require(k >= 2, Errc::InvalidArgument, "k must be >= 2");
  require(labels.size() >= k, Errc::TooFewSamples,
          std::to_string(labels.size()) + " samples cannot fill " + std::to_string(k) + " folds");
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> members(k);
  std::size_t next = 0;
  for (auto& [label, idx] : by_class) {
    rng.shuffle(idx);
    for (auto i : idx) {
      members[next].push_back(i);
      next = (next + 1) % k;
    }
  }
  std::vector<Fold> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(members[f].begin(), members[f].end());
    folds[f].validation = members[f];
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) folds[f].train.insert(folds[f].train.end(), members[g].begin(), members[g].end());
    }
    std::sort(folds[f].train.begin(), folds[f].train.end());
  }
  return folds;
}

inline std::vector<Fold> kfold_split(const std::vector<Sample>& samples, std::size_t k, std::uint64_t seed) {
  std::vector<std::string> labels;
  for (const auto& s : samples) labels.push_back(s.intent);
  return kfold_split(labels, k, seed);
}

}  // namespace hdbnn::harness
