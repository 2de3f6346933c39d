#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "hdbnn/bnn/model.hpp"
#include "hdbnn/hdcore/vectors.hpp"

namespace hdbnn::bnn {

// Inputs as rows (batch x d_in) with integer class labels.
template <typename S = float>
struct Dataset {
  Mat<S> inputs;
  std::vector<std::size_t> labels;
  std::size_t size() const noexcept { return labels.size(); }
};

template <typename S = float>
RowVec<S> to_row(const hdcore::BitVector& v) {
  RowVec<S> r(static_cast<Eigen::Index>(v.dim()));
  for (std::size_t i = 0; i < v.dim(); ++i) r(static_cast<Eigen::Index>(i)) = v.bit(i) ? S(1) : S(-1);
  return r;
}

template <typename S = float>
RowVec<S> to_row(const hdcore::RealVector& v) {
  RowVec<S> r(static_cast<Eigen::Index>(v.dim()));
  for (std::size_t i = 0; i < v.dim(); ++i) r(static_cast<Eigen::Index>(i)) = static_cast<S>(v.values[i]);
  return r;
}

template <typename S, typename V>
Dataset<S> make_dataset(const std::vector<V>& vectors, const std::vector<std::size_t>& labels) {
  require(vectors.size() == labels.size(), Errc::LengthMismatch, "vectors and labels differ in length");
  Dataset<S> ds;
  ds.labels = labels;
  if (vectors.empty()) return ds;
  ds.inputs.resize(static_cast<Eigen::Index>(vectors.size()), static_cast<Eigen::Index>(vectors[0].dim()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    require(vectors[i].dim() == vectors[0].dim(), Errc::DimMismatch, "dataset vectors differ in dimension");
    ds.inputs.row(static_cast<Eigen::Index>(i)) = to_row<S>(vectors[i]);
  }
  return ds;
}

template <typename S>
RowVec<S> softmax(const RowVec<S>& logits) {
  const S mx = logits.maxCoeff();
  RowVec<S> e = (logits.array() - mx).exp().matrix();
  return e / e.sum();
}

// Cross-entropy of one row of logits: loss = -log softmax[label],
// grad = softmax - onehot.
template <typename S>
std::pair<S, RowVec<S>> loss_and_grad(const RowVec<S>& logits, std::size_t label) {
  require(label < static_cast<std::size_t>(logits.cols()), Errc::LabelOutOfRange, "label out of range");
  const S mx = logits.maxCoeff();
  const S lse = mx + std::log((logits.array() - mx).exp().sum());
  RowVec<S> grad = softmax(logits);
  grad(static_cast<Eigen::Index>(label)) -= S(1);
  return {lse - logits(static_cast<Eigen::Index>(label)), grad};
}

// Mean loss over the batch; gradient already divided by the batch size.
template <typename S>
std::pair<S, Mat<S>> batch_loss(const Mat<S>& logits, const std::vector<std::size_t>& labels) {
  Mat<S> grad(logits.rows(), logits.cols());
  S total = 0;
  const auto n = static_cast<S>(logits.rows());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    auto [l, g] = loss_and_grad<S>(logits.row(r), labels[static_cast<std::size_t>(r)]);
    total += l;
    grad.row(r) = g / n;
  }
  return {total / n, grad};
}

// s <- rho * s + (1 - rho) * g^2;  w <- w - lr * g / (sqrt(s) + eps); then latent clip.
template <typename S>
void rmsprop_step(Param<S>& p, const TrainConfig& cfg) {
  const auto rho = static_cast<S>(cfg.rms_decay);
  const auto lr = static_cast<S>(cfg.learning_rate);
  const auto eps = static_cast<S>(cfg.rms_epsilon);
  p.rms = rho * p.rms + (S(1) - rho) * p.grad.cwiseProduct(p.grad);
  p.value.array() -= lr * p.grad.array() / (p.rms.array().sqrt() + eps);
  if (p.latent_clip) p.value = p.value.cwiseMax(S(-1)).cwiseMin(S(1));
}

struct EpochStats {
  double loss = 0;
  double train_micro_f1 = 0;  // accuracy of the training-mode predictions seen during the epoch
};

template <typename S>
std::size_t argmax_row(const RowVec<S>& v) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < v.cols(); ++i) {
    if (v(i) > v(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
  }
  return best;
}

// Mini-batch training with RMSProp. Continues from the model's stored RNG and
// epoch counter, so train(E1) then train(E2) equals train(E1 + E2). A final
// batch of one sample is folded into the previous batch (batch norm needs two).
template <typename S>
std::vector<EpochStats> train(BnnModel<S>& model, const Dataset<S>& data, const TrainConfig& cfg) {
  cfg.validate();
  require(data.size() > 0, Errc::EmptyDataset, "training set is empty");
  require(static_cast<std::size_t>(data.inputs.cols()) == model.arch().d_in, Errc::DimMismatch,
          "training vectors do not match d_in");
  for (auto l : data.labels) require(l < model.arch().num_classes, Errc::LabelOutOfRange, "label out of range");
  require(data.size() >= 2, Errc::DegenerateBatch, "need at least two training samples");

  const std::size_t n = data.size();
  std::vector<std::pair<std::size_t, std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += cfg.batch_size) {
    batches.emplace_back(start, std::min(n, start + cfg.batch_size));
  }
  if (batches.size() > 1 && batches.back().second - batches.back().first == 1) {
    batches[batches.size() - 2].second = n;
    batches.pop_back();
  }
  require(batches.front().second - batches.front().first >= 2, Errc::DegenerateBatch,
          "batch_size 1 cannot train batch norm");

  Rng& rng = model.train_rng();
  const auto clip = static_cast<S>(cfg.clip_value);
  std::vector<EpochStats> history;
  std::vector<std::size_t> order(n);
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    double loss_sum = 0;
    std::size_t correct = 0;
    for (const auto& [b0, b1] : batches) {
      const std::size_t bs = b1 - b0;
      Mat<S> x(static_cast<Eigen::Index>(bs), data.inputs.cols());
      std::vector<std::size_t> y(bs);
      for (std::size_t i = 0; i < bs; ++i) {
        x.row(static_cast<Eigen::Index>(i)) = data.inputs.row(static_cast<Eigen::Index>(order[b0 + i]));
        y[i] = data.labels[order[b0 + i]];
      }
      model.zero_grad();
      const Mat<S> logits = model.forward(x, true, cfg.dropout_rate, &rng, clip);
      auto [loss, grad] = batch_loss<S>(logits, y);
      loss_sum += static_cast<double>(loss) * static_cast<double>(bs);
      for (std::size_t i = 0; i < bs; ++i) {
        if (argmax_row<S>(logits.row(static_cast<Eigen::Index>(i))) == y[i]) ++correct;
      }
      model.backward(grad);
      for (auto* p : model.params()) rmsprop_step(*p, cfg);
    }
    history.push_back({loss_sum / static_cast<double>(n), static_cast<double>(correct) / static_cast<double>(n)});
    model.set_epochs_done(model.epochs_done() + 1);
  }
  return history;
}

struct Prediction {
  std::size_t label = 0;
  std::vector<double> probabilities;
};

// Eval-mode prediction; ties go to the lowest class index.
template <typename S>
std::vector<Prediction> predict(const BnnModel<S>& model, const Mat<S>& inputs) {
  constexpr Eigen::Index kChunk = 32;
  Mat<S> logits(inputs.rows(), static_cast<Eigen::Index>(model.arch().num_classes));
  for (Eigen::Index r0 = 0; r0 < inputs.rows(); r0 += kChunk) {
    const Eigen::Index n = std::min(kChunk, inputs.rows() - r0);
    logits.middleRows(r0, n) = model.infer(inputs.middleRows(r0, n));
  }
  std::vector<Prediction> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const RowVec<S> row = logits.row(r);
    auto& p = out[static_cast<std::size_t>(r)];
    p.label = argmax_row<S>(row);
    const RowVec<S> prob = softmax<S>(row);
    p.probabilities.assign(prob.data(), prob.data() + prob.size());
  }
  return out;
}

template <typename S, typename V>
Prediction predict(const BnnModel<S>& model, const V& input) {
  Mat<S> x = to_row<S>(input);
  return predict(model, x).front();
}

}  // namespace hdbnn::bnn
