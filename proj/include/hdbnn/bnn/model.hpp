#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hdbnn/bnn/config.hpp"
#include "hdbnn/bnn/layers.hpp"
#include "hdbnn/rng.hpp"

namespace hdbnn::bnn {

// Text-LeNet: latent weights, batch-norm state and the training RNG. The
// training RNG lives in the model so a checkpoint resumes bit-identically.
template <typename S = float>
class BnnModel {
 public:
  BnnModel(Architecture arch, std::uint64_t seed) : arch_(std::move(arch)), seed_(seed), rng_(derive_seed(seed, 1)) {
    arch_.validate();
    const bool clip = arch_.mode != Mode::Real;
    std::size_t in_ch = 1;
    for (std::size_t i = 0; i < arch_.conv.size(); ++i) {
      const auto& b = arch_.conv[i];
      const std::string n = "conv" + std::to_string(i + 1);
      convs_.emplace_back(arch_.kernel, in_ch, b.filters, clip, n);
      pools_.emplace_back(b.pool);
      conv_bns_.emplace_back(b.filters, arch_.bn_momentum, arch_.bn_epsilon, n + ".bn");
      in_ch = b.filters;
    }
    std::size_t width = arch_.flatten_size();
    for (std::size_t j = 0; j < arch_.dense.size(); ++j) {
      const std::string n = "dense" + std::to_string(j + 1);
      denses_.emplace_back(width, arch_.dense[j], clip, n);
      dense_bns_.emplace_back(arch_.dense[j], arch_.bn_momentum, arch_.bn_epsilon, n + ".bn");
      width = arch_.dense[j];
    }
    classifier_ = Dense<S>(width, arch_.num_classes, clip, "classifier");
    classifier_bn_ = BatchNorm<S>(arch_.num_classes, arch_.bn_momentum, arch_.bn_epsilon, "classifier.bn");

    Rng init_rng(derive_seed(seed, 0));
    for (auto& c : convs_) c.init(init_rng);
    for (auto& d : denses_) d.init(init_rng);
    classifier_.init(init_rng);
  }

  const Architecture& arch() const noexcept { return arch_; }
  std::uint64_t seed() const noexcept { return seed_; }
  Rng& train_rng() noexcept { return rng_; }
  const Rng& train_rng() const noexcept { return rng_; }
  std::size_t epochs_done() const noexcept { return epochs_done_; }
  void set_epochs_done(std::size_t e) noexcept { epochs_done_ = e; }

  std::vector<Conv1d<S>>& convs() noexcept { return convs_; }
  const std::vector<Conv1d<S>>& convs() const noexcept { return convs_; }
  std::vector<BatchNorm<S>>& conv_bns() noexcept { return conv_bns_; }
  const std::vector<BatchNorm<S>>& conv_bns() const noexcept { return conv_bns_; }
  std::vector<Dense<S>>& denses() noexcept { return denses_; }
  const std::vector<Dense<S>>& denses() const noexcept { return denses_; }
  std::vector<BatchNorm<S>>& dense_bns() noexcept { return dense_bns_; }
  const std::vector<BatchNorm<S>>& dense_bns() const noexcept { return dense_bns_; }
  Dense<S>& classifier() noexcept { return classifier_; }
  const Dense<S>& classifier() const noexcept { return classifier_; }
  BatchNorm<S>& classifier_bn() noexcept { return classifier_bn_; }
  const BatchNorm<S>& classifier_bn() const noexcept { return classifier_bn_; }

  std::vector<Param<S>*> params() { return collect_params<Param<S>>(*this); }
  std::vector<const Param<S>*> params() const { return collect_params<const Param<S>>(*this); }
  std::vector<BatchNorm<S>*> batch_norms() { return collect_bns<BatchNorm<S>>(*this); }
  std::vector<const BatchNorm<S>*> batch_norms() const { return collect_bns<const BatchNorm<S>>(*this); }

  // Inputs of every activation site from the last training-mode forward.
  const std::vector<Mat<S>>& conv_preactivations() const noexcept { return conv_pre_; }
  const std::vector<Mat<S>>& dense_preactivations() const noexcept { return dense_pre_; }

  void zero_grad() {
    for (auto* p : params()) p->zero_grad();
  }

  // input: batch x d_in. Returns raw logits, batch x num_classes. Dropout is
  // applied only when training and a generator is supplied.
  Mat<S> forward(const Mat<S>& input, bool training, double dropout_rate = 0.0, Rng* rng = nullptr,
                 S clip = S(1)) {
    if (!training) return infer(input);
    require(static_cast<std::size_t>(input.cols()) == arch_.d_in, Errc::DimMismatch,
            "input dimension " + std::to_string(input.cols()) + " != d_in " + std::to_string(arch_.d_in));
    const auto batch = static_cast<std::size_t>(input.rows());
    require(batch > 0, Errc::EmptyDataset, "empty batch");
    clip_ = clip;

    Mat<S> x = Eigen::Map<const Mat<S>>(input.data(), input.rows() * input.cols(), 1);
    conv_pre_.resize(convs_.size());
    for (std::size_t i = 0; i < convs_.size(); ++i) {
      Mat<S> c = convs_[i].forward(x, batch, arch_.mode);
      Mat<S> p = pools_[i].forward(c, batch);
      conv_pre_[i] = conv_bns_[i].forward(p, training, batch);
      x = activation_forward(conv_pre_[i], arch_.mode, clip);
    }
    conv_out_rows_ = x.rows();
    conv_out_cols_ = x.cols();
    Mat<S> h = Eigen::Map<const Mat<S>>(x.data(), static_cast<Eigen::Index>(batch), x.size() / static_cast<Eigen::Index>(batch));

    dense_pre_.resize(denses_.size());
    masks_.assign(denses_.size(), Mat<S>());
    for (std::size_t j = 0; j < denses_.size(); ++j) {
      dense_pre_[j] = dense_bns_[j].forward(denses_[j].forward(h, arch_.mode), training, batch);
      h = activation_forward(dense_pre_[j], arch_.mode, clip);
      if (training && dropout_rate > 0 && rng != nullptr) {
        const S keep_scale = S(1) / static_cast<S>(1.0 - dropout_rate);
        masks_[j].resize(h.rows(), h.cols());
        for (Eigen::Index k = 0; k < h.size(); ++k) {
          masks_[j].data()[k] = rng->bernoulli(dropout_rate) ? S(0) : keep_scale;
        }
        h = h.cwiseProduct(masks_[j]);
      }
    }
    return classifier_bn_.forward(classifier_.forward(h, arch_.mode), training, batch);
  }

  // Eval-mode forward; touches no cached state, so a trained model can be
  // shared between threads.
  Mat<S> infer(const Mat<S>& input) const {
    require(static_cast<std::size_t>(input.cols()) == arch_.d_in, Errc::DimMismatch,
            "input dimension " + std::to_string(input.cols()) + " != d_in " + std::to_string(arch_.d_in));
    const auto batch = static_cast<std::size_t>(input.rows());
    require(batch > 0, Errc::EmptyDataset, "empty batch");
    Mat<S> x = Eigen::Map<const Mat<S>>(input.data(), input.rows() * input.cols(), 1);
    for (std::size_t i = 0; i < convs_.size(); ++i) {
      x = activation_forward(conv_bns_[i].infer(pools_[i].infer(convs_[i].infer(x, batch, arch_.mode), batch)),
                             arch_.mode, S(1));
    }
    Mat<S> h = Eigen::Map<const Mat<S>>(x.data(), static_cast<Eigen::Index>(batch), x.size() / static_cast<Eigen::Index>(batch));
    for (std::size_t j = 0; j < denses_.size(); ++j) {
      h = activation_forward(dense_bns_[j].infer(denses_[j].infer(h, arch_.mode)), arch_.mode, S(1));
    }
    return classifier_bn_.infer(classifier_.infer(h, arch_.mode));
  }

  // Accumulates parameter gradients for the last training-mode forward.
  void backward(const Mat<S>& grad_logits) {
    Mat<S> g = classifier_.backward(classifier_bn_.backward(grad_logits), arch_.mode);
    for (std::size_t j = denses_.size(); j-- > 0;) {
      if (masks_[j].size() > 0) g = g.cwiseProduct(masks_[j]);
      g = activation_backward(dense_pre_[j], g, arch_.mode, clip_);
      g = denses_[j].backward(dense_bns_[j].backward(g), arch_.mode);
    }
    g = Eigen::Map<const Mat<S>>(g.data(), conv_out_rows_, conv_out_cols_);
    for (std::size_t i = convs_.size(); i-- > 0;) {
      g = activation_backward(conv_pre_[i], g, arch_.mode, clip_);
      g = pools_[i].backward(conv_bns_[i].backward(g));
      g = convs_[i].backward(g, arch_.mode, i > 0);
    }
  }

 private:
  template <typename P, typename Self>
  static std::vector<P*> collect_params(Self& self) {
    std::vector<P*> out;
    for (std::size_t i = 0; i < self.convs_.size(); ++i) {
      out.push_back(&self.convs_[i].weights());
      out.push_back(&self.conv_bns_[i].gamma());
      out.push_back(&self.conv_bns_[i].beta());
    }
    for (std::size_t j = 0; j < self.denses_.size(); ++j) {
      out.push_back(&self.denses_[j].weights());
      out.push_back(&self.dense_bns_[j].gamma());
      out.push_back(&self.dense_bns_[j].beta());
    }
    out.push_back(&self.classifier_.weights());
    out.push_back(&self.classifier_bn_.gamma());
    out.push_back(&self.classifier_bn_.beta());
    return out;
  }

  template <typename B, typename Self>
  static std::vector<B*> collect_bns(Self& self) {
    std::vector<B*> out;
    for (auto& b : self.conv_bns_) out.push_back(&b);
    for (auto& b : self.dense_bns_) out.push_back(&b);
    out.push_back(&self.classifier_bn_);
    return out;
  }

  Architecture arch_;
  std::uint64_t seed_;
  Rng rng_;
  std::size_t epochs_done_ = 0;

  std::vector<Conv1d<S>> convs_;
  std::vector<MaxPool1d<S>> pools_;
  std::vector<BatchNorm<S>> conv_bns_;
  std::vector<Dense<S>> denses_;
  std::vector<BatchNorm<S>> dense_bns_;
  Dense<S> classifier_;
  BatchNorm<S> classifier_bn_;

  S clip_ = S(1);
  std::vector<Mat<S>> conv_pre_, dense_pre_, masks_;
  Eigen::Index conv_out_rows_ = 0, conv_out_cols_ = 0;
};

}  // namespace hdbnn::bnn
