#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "hdbnn/error.hpp"
#include "hdbnn/hdcore/vectors.hpp"

namespace hdbnn::baselines {

using hdcore::BitVector;

struct LabeledVector {
  BitVector vec;
  std::size_t label = 0;
};

struct CentroidModel {
  std::size_t d = 0;
  std::vector<BitVector> centroids;  // one per class index
};

// Per-bit majority of each class's members; a tie gives +1.
inline CentroidModel fit_centroid(const std::vector<LabeledVector>& train, std::size_t num_classes) {
  require(!train.empty(), Errc::EmptyClass, "no training samples");
  CentroidModel m;
  m.d = train.front().vec.dim();
  std::vector<std::vector<std::int64_t>> sums(num_classes, std::vector<std::int64_t>(m.d, 0));
  std::vector<std::size_t> counts(num_classes, 0);
  for (const auto& s : train) {
    require(s.vec.dim() == m.d, Errc::DimMismatch, "training vectors differ in dimension");
    require(s.label < num_classes, Errc::LabelOutOfRange, "label out of range");
    ++counts[s.label];
    for (std::size_t i = 0; i < m.d; ++i) sums[s.label][i] += s.vec.component(i);
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    require(counts[c] > 0, Errc::EmptyClass, "class " + std::to_string(c) + " has no samples");
    BitVector v(m.d);
    for (std::size_t i = 0; i < m.d; ++i) v.set(i, sums[c][i] >= 0);
    m.centroids.push_back(std::move(v));
  }
  return m;
}

inline CentroidModel fit_centroid(const std::vector<LabeledVector>& train) {
  std::size_t nc = 0;
  for (const auto& s : train) nc = std::max(nc, s.label + 1);
  return fit_centroid(train, nc);
}

// Minimal Hamming distance; ties go to the lowest class index.
inline std::size_t predict_centroid(const CentroidModel& m, const BitVector& x) {
  require(x.dim() == m.d, Errc::DimMismatch, "input dimension does not match centroids");
  std::size_t best = 0;
  std::uint64_t best_dist = hdcore::hamming(x, m.centroids.front());
  for (std::size_t c = 1; c < m.centroids.size(); ++c) {
    const auto dist = hdcore::hamming(x, m.centroids[c]);
    if (dist < best_dist) {
      best = c;
      best_dist = dist;
    }
  }
  return best;
}

// Majority label among the k nearest by Hamming distance. Distance ties keep
// training order; label ties go to the lowest class index.
inline std::size_t knn_predict(const std::vector<LabeledVector>& train, const BitVector& x, std::size_t k = 3) {
  require(!train.empty(), Errc::EmptyTrain, "kNN needs training samples");
  require(k >= 1 && k <= train.size(), Errc::InvalidArgument, "k must be in [1, |train|]");
  std::vector<std::pair<std::uint64_t, std::size_t>> dist(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    require(train[i].vec.dim() == x.dim(), Errc::DimMismatch, "input dimension does not match training set");
    dist[i] = {hdcore::hamming(x, train[i].vec), i};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::size_t nc = 0;
  for (std::size_t i = 0; i < k; ++i) nc = std::max(nc, train[dist[i].second].label + 1);
  std::vector<std::size_t> votes(nc, 0);
  for (std::size_t i = 0; i < k; ++i) ++votes[train[dist[i].second].label];
  return static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

}  // namespace hdbnn::baselines
