#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hdbnn/error.hpp"

namespace hdbnn::bnn {

// Binarized: sign() weights and activations, straight-through gradients.
// Real: float weights, ReLU activations (the non-binarized Text-LeNet).
// HardTanhSurrogate: every sign replaced by clip(x, -1, 1); only used to check
// gradients against finite differences.
enum class Mode : std::uint8_t { Binarized = 0, Real = 1, HardTanhSurrogate = 2 };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Binarized: return "binarized";
    case Mode::Real: return "real";
    case Mode::HardTanhSurrogate: return "hardtanh";
  }
  return "?";
}

struct ConvBlock {
  std::size_t filters = 0;
  std::size_t pool = 1;
  friend bool operator==(const ConvBlock&, const ConvBlock&) = default;
};

// conv(k, valid) -> maxpool -> BN -> act, per block; then flatten,
// dense -> BN -> act -> dropout, per hidden layer; then classifier -> BN.
struct Architecture {
  std::size_t d_in = 512;
  std::size_t num_classes = 2;
  std::size_t kernel = 3;
  std::vector<ConvBlock> conv{{128, 3}, {256, 2}, {512, 3}};
  std::vector<std::size_t> dense{128};
  Mode mode = Mode::Binarized;
  double bn_momentum = 0.1;  // running <- (1 - m) * running + m * batch
  double bn_epsilon = 1e-5;

  static Architecture text_lenet(std::size_t d_in, std::size_t num_classes, Mode mode = Mode::Binarized) {
    Architecture a;
    a.d_in = d_in;
    a.num_classes = num_classes;
    a.mode = mode;
    return a;
  }

  // Sequence length after each conv and each pool, in order:
  // [conv1, pool1, conv2, pool2, ...].
  std::vector<std::size_t> length_chain() const {
    std::vector<std::size_t> out;
    std::size_t len = d_in;
    for (const auto& b : conv) {
      require(len >= kernel, Errc::ShapeMismatch,
              "sequence length " + std::to_string(len) + " shorter than kernel");
      len = len - kernel + 1;
      out.push_back(len);
      len /= b.pool;
      require(len >= 1, Errc::ShapeMismatch, "pooling reduced sequence to zero length");
      out.push_back(len);
    }
    return out;
  }

  std::size_t flatten_size() const {
    if (conv.empty()) return d_in;
    return length_chain().back() * conv.back().filters;
  }

  void validate() const {
    require(d_in > 0 && num_classes >= 1 && kernel >= 1, Errc::InvalidArgument, "bad architecture sizes");
    for (const auto& b : conv) require(b.filters > 0 && b.pool > 0, Errc::InvalidArgument, "bad conv block");
    for (auto u : dense) require(u > 0, Errc::InvalidArgument, "bad dense width");
    require(bn_epsilon > 0, Errc::InvalidArgument, "bn epsilon must be positive");
    require(bn_momentum >= 0 && bn_momentum <= 1, Errc::InvalidArgument, "bn momentum must be in [0,1]");
    (void)length_chain();
  }

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  double rms_decay = 0.9;
  double rms_epsilon = 1e-8;
  std::size_t batch_size = 4;
  std::size_t epochs = 30;
  double clip_value = 1.0;
  double dropout_rate = 0.5;
  std::uint64_t rng_seed = 0;

  void validate() const {
    require(learning_rate >= 0, Errc::InvalidArgument, "learning_rate must be >= 0");
    require(dropout_rate >= 0 && dropout_rate < 1, Errc::InvalidArgument, "dropout_rate must be in [0,1)");
    require(clip_value > 0, Errc::InvalidArgument, "clip_value must be positive");
    require(batch_size >= 1, Errc::InvalidArgument, "batch_size must be >= 1");
    require(rms_decay >= 0 && rms_decay < 1 && rms_epsilon > 0, Errc::InvalidArgument, "bad RMSProp settings");
  }
};

}  // namespace hdbnn::bnn
