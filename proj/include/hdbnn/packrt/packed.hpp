#pragma once

#include <algorithm>
#include <bit>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdbnn/bnn/model.hpp"
#include "hdbnn/bytes.hpp"
#include "hdbnn/hdcore/vectors.hpp"

namespace hdbnn::packrt {

// File layout, little-endian:
//   "HBNN" u16 version u32 d_in u32 num_classes u16 n_layers
//   per layer: u8 kind, u32 kernel, u32 in_ch, u32 out_ch, u32 pool,
//              u64 weights[ceil(kernel*in_ch*out_ch / 64)]
//              hidden: f32 threshold[out_ch], u8 flip[out_ch] (1 -> +1, 0 -> -1)
//              output: f32 mean[out_ch], f32 scale[out_ch], f32 beta[out_ch]
// Weight bit ((o * kernel) + t) * in_ch + c is sign(W[t * in_ch + c][o]).
inline constexpr char kPackedMagic[4] = {'H', 'B', 'N', 'N'};
inline constexpr std::uint16_t kPackedVersion = 1;

// A dense layer is stored as a conv whose kernel spans its whole input.
enum class LayerKind : std::uint8_t { Conv = 0, Dense = 1, Output = 2 };

struct PackedLayer {
  LayerKind kind = LayerKind::Conv;
  std::uint32_t kernel = 1, in_ch = 1, out_ch = 1, pool = 1;
  std::vector<std::uint64_t> weights;  // tightly packed, as in the file
  std::vector<float> thresholds;
  std::vector<std::int8_t> flips;
  std::vector<float> mean, scale, beta;  // output layer only

  std::size_t weight_count() const noexcept { return std::size_t{kernel} * in_ch * out_ch; }
  std::size_t fan_in() const noexcept { return std::size_t{kernel} * in_ch; }
  friend bool operator==(const PackedLayer&, const PackedLayer&) = default;
};

struct PackedModel {
  std::uint16_t version = kPackedVersion;
  std::uint32_t d_in = 0, num_classes = 0;
  std::vector<PackedLayer> layers;
  friend bool operator==(const PackedModel&, const PackedModel&) = default;
};

// Byte range of a layer's weight words inside the serialized file.
struct WeightSpan {
  std::size_t offset = 0;
  std::size_t bytes = 0;
  std::size_t weights = 0;
};
using PackedLayout = std::vector<WeightSpan>;

// Real-valued fold of BN followed by sign: sign(bn(x)) = flip * sign(x - tau).
inline double fold_threshold(double mean, double var, double gamma, double beta, double eps) {
  return mean - beta * std::sqrt(var + eps) / gamma;
}

namespace detail {

inline std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

// Integer threshold equivalent to the float eval expression
// (x - mean) * scale + beta >= 0 over the reachable range x in [-fan_in, fan_in].
template <typename S>
std::pair<float, std::int8_t> integer_threshold(S mean, S scale, S beta, std::int64_t fan_in) {
  auto positive = [&](std::int64_t x) { return (static_cast<S>(x) - mean) * scale + beta >= S(0); };
  const std::int64_t lo = -fan_in, hi = fan_in;
  if (scale == S(0)) {
    return {positive(0) ? static_cast<float>(lo) : static_cast<float>(hi + 1), std::int8_t{1}};
  }
  if (scale > S(0)) {
    // smallest x with positive(x)
    std::int64_t a = lo, b = hi + 1;
    while (a < b) {
      const std::int64_t m = a + (b - a) / 2;
      if (positive(m)) b = m; else a = m + 1;
    }
    return {static_cast<float>(a), std::int8_t{1}};
  }
  // largest x with positive(x); output +1 iff x < tau with tau = that + 1
  std::int64_t a = lo - 1, b = hi;
  while (a < b) {
    const std::int64_t m = a + (b - a + 1) / 2;
    if (positive(m)) a = m; else b = m - 1;
  }
  return {static_cast<float>(a + 1), std::int8_t{-1}};
}

template <typename S>
std::vector<std::uint64_t> pack_weights(const bnn::Mat<S>& w, std::size_t kernel, std::size_t in_ch) {
  const std::size_t out = static_cast<std::size_t>(w.cols());
  std::vector<std::uint64_t> words(words_for(kernel * in_ch * out), 0);
  for (std::size_t o = 0; o < out; ++o) {
    for (std::size_t r = 0; r < kernel * in_ch; ++r) {
      if (w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(o)) >= S(0)) {
        const std::size_t bit = o * kernel * in_ch + r;
        words[bit / 64] |= std::uint64_t{1} << (bit % 64);
      }
    }
  }
  return words;
}

template <typename S>
PackedLayer hidden_layer(LayerKind kind, const bnn::Mat<S>& w, std::size_t kernel, std::size_t in_ch,
                         std::size_t pool, const bnn::BatchNorm<S>& bn) {
  PackedLayer l;
  l.kind = kind;
  l.kernel = static_cast<std::uint32_t>(kernel);
  l.in_ch = static_cast<std::uint32_t>(in_ch);
  l.out_ch = static_cast<std::uint32_t>(w.cols());
  l.pool = static_cast<std::uint32_t>(pool);
  l.weights = pack_weights(w, kernel, in_ch);
  const bnn::RowVec<S> scale = bn.eval_scale();
  const auto fan = static_cast<std::int64_t>(kernel * in_ch);
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    auto [tau, flip] = integer_threshold<S>(bn.running_mean()(c), scale(c), bn.beta().value(0, c), fan);
    l.thresholds.push_back(tau);
    l.flips.push_back(flip);
  }
  return l;
}

}  // namespace detail

// Folds every BN + sign pair into per-channel thresholds and bit-packs the
// signs of the latent weights. The model must be binarized with populated
// running statistics.
template <typename S>
PackedModel export_model(const bnn::BnnModel<S>& model) {
  const auto& a = model.arch();
  require(a.mode == bnn::Mode::Binarized, Errc::InvalidArgument, "only binarized models can be packed");
  for (const auto* bn : model.batch_norms()) {
    require(bn->has_running_stats(), Errc::UntrainedModel, "batch norm running statistics are missing");
  }
  PackedModel pm;
  pm.d_in = static_cast<std::uint32_t>(a.d_in);
  pm.num_classes = static_cast<std::uint32_t>(a.num_classes);
  std::size_t len = a.d_in, ch = 1;
  for (std::size_t i = 0; i < a.conv.size(); ++i) {
    pm.layers.push_back(detail::hidden_layer(LayerKind::Conv, model.convs()[i].weights().value, a.kernel, ch,
                                             a.conv[i].pool, model.conv_bns()[i]));
    len = (len - a.kernel + 1) / a.conv[i].pool;
    ch = a.conv[i].filters;
  }
  for (std::size_t j = 0; j < a.dense.size(); ++j) {
    pm.layers.push_back(detail::hidden_layer(LayerKind::Dense, model.denses()[j].weights().value, len, ch, 1,
                                             model.dense_bns()[j]));
    len = 1;
    ch = a.dense[j];
  }
  PackedLayer out;
  out.kind = LayerKind::Output;
  out.kernel = static_cast<std::uint32_t>(len);
  out.in_ch = static_cast<std::uint32_t>(ch);
  out.out_ch = pm.num_classes;
  out.weights = detail::pack_weights(model.classifier().weights().value, len, ch);
  const auto& bn = model.classifier_bn();
  const bnn::RowVec<S> scale = bn.eval_scale();
  for (Eigen::Index c = 0; c < scale.cols(); ++c) {
    out.mean.push_back(static_cast<float>(bn.running_mean()(c)));
    out.scale.push_back(static_cast<float>(scale(c)));
    out.beta.push_back(static_cast<float>(bn.beta().value(0, c)));
  }
  pm.layers.push_back(std::move(out));
  return pm;
}

inline std::vector<std::uint8_t> serialize(const PackedModel& pm, PackedLayout* layout = nullptr) {
  ByteWriter w;
  for (char c : kPackedMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u16(pm.version);
  w.u32(pm.d_in);
  w.u32(pm.num_classes);
  w.u16(static_cast<std::uint16_t>(pm.layers.size()));
  if (layout) layout->clear();
  for (const auto& l : pm.layers) {
    w.u8(static_cast<std::uint8_t>(l.kind));
    w.u32(l.kernel);
    w.u32(l.in_ch);
    w.u32(l.out_ch);
    w.u32(l.pool);
    const std::size_t start = w.size();
    for (auto word : l.weights) w.u64(word);
    if (layout) layout->push_back({start, w.size() - start, l.weight_count()});
    if (l.kind == LayerKind::Output) {
      for (float v : l.mean) w.f32(v);
      for (float v : l.scale) w.f32(v);
      for (float v : l.beta) w.f32(v);
    } else {
      for (float v : l.thresholds) w.f32(v);
      for (auto f : l.flips) w.u8(f > 0 ? 1 : 0);
    }
  }
  return w.take();
}

// Structural validation of every shape; rejects trailing bytes.
inline PackedModel load_model(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  for (char c : kPackedMagic) {
    require(r.remaining() > 0, Errc::CorruptLength, "truncated header");
    require(r.u8() == static_cast<std::uint8_t>(c), Errc::BadMagic, "not a packed model");
  }
  PackedModel pm;
  pm.version = r.u16();
  require(pm.version == kPackedVersion, Errc::FormatVersionMismatch,
          "packed model version " + std::to_string(pm.version));
  pm.d_in = r.u32();
  pm.num_classes = r.u32();
  const std::uint16_t n = r.u16();
  require(pm.d_in > 0 && pm.num_classes > 0 && n > 0, Errc::CorruptLength, "empty model header");

  std::size_t len = pm.d_in, ch = 1;
  for (std::uint16_t i = 0; i < n; ++i) {
    PackedLayer l;
    const auto kind = r.u8();
    require(kind <= 2, Errc::CorruptLength, "unknown layer kind");
    l.kind = static_cast<LayerKind>(kind);
    l.kernel = r.u32();
    l.in_ch = r.u32();
    l.out_ch = r.u32();
    l.pool = r.u32();
    const bool last = i + 1 == n;
    require((l.kind == LayerKind::Output) == last, Errc::CorruptLength, "output layer must be last");
    require(l.in_ch == ch && l.out_ch > 0 && l.pool > 0 && l.kernel > 0, Errc::CorruptLength, "layer shape mismatch");
    if (l.kind == LayerKind::Conv) {
      require(len >= l.kernel && (len - l.kernel + 1) / l.pool >= 1, Errc::CorruptLength, "conv shape mismatch");
      len = (len - l.kernel + 1) / l.pool;
    } else {
      require(l.kernel == len && l.pool == 1, Errc::CorruptLength, "dense shape mismatch");
      len = 1;
    }
    ch = l.out_ch;
    const std::size_t nwords = detail::words_for(l.weight_count());
    r.need(nwords * 8);
    l.weights.resize(nwords);
    for (auto& word : l.weights) word = r.u64();
    if (l.weight_count() % 64 != 0) {
      require((l.weights.back() >> (l.weight_count() % 64)) == 0, Errc::CorruptLength, "nonzero weight pad bits");
    }
    if (l.kind == LayerKind::Output) {
      require(l.out_ch == pm.num_classes, Errc::CorruptLength, "output width != num_classes");
      r.need(std::size_t{l.out_ch} * 12);
      for (auto* v : {&l.mean, &l.scale, &l.beta}) {
        v->resize(l.out_ch);
        for (auto& x : *v) x = r.f32();
      }
    } else {
      r.need(std::size_t{l.out_ch} * 5);
      l.thresholds.resize(l.out_ch);
      for (auto& t : l.thresholds) {
        t = r.f32();
        require(std::isfinite(t) && t == std::nearbyint(t) && std::abs(t) <= 2147483647.0f, Errc::CorruptLength,
                "threshold is not a finite integer");
      }
      l.flips.resize(l.out_ch);
      for (auto& f : l.flips) {
        const auto b = r.u8();
        require(b <= 1, Errc::CorruptLength, "flip byte must be 0 or 1");
        f = b ? 1 : -1;
      }
    }
    pm.layers.push_back(std::move(l));
  }
  r.expect_end();
  return pm;
}

struct PackedResult {
  std::size_t label = 0;
  std::vector<std::int64_t> scores;  // integer classifier dots
  std::vector<float> logits;
};

namespace detail {

// Activations: `len` positions, each a row of `wpp` words holding `ch` bits.
struct BitActs {
  std::size_t len = 0, ch = 0, wpp = 0;
  std::vector<std::uint64_t> bits;
};

// Filter rows re-laid out with the same per-position padding as BitActs.
inline std::vector<std::uint64_t> expand_filters(const PackedLayer& l, std::size_t wpp) {
  std::vector<std::uint64_t> out(std::size_t{l.out_ch} * l.kernel * wpp, 0);
  for (std::size_t o = 0; o < l.out_ch; ++o) {
    for (std::size_t t = 0; t < l.kernel; ++t) {
      for (std::size_t c = 0; c < l.in_ch; ++c) {
        const std::size_t bit = (o * l.kernel + t) * l.in_ch + c;
        if ((l.weights[bit / 64] >> (bit % 64)) & 1u) {
          out[(o * l.kernel + t) * wpp + c / 64] |= std::uint64_t{1} << (c % 64);
        }
      }
    }
  }
  return out;
}

// 2 * popcount(XNOR) - fan_in over one window, written as fan_in - 2 * hamming.
inline std::vector<std::int64_t> layer_dots(const PackedLayer& l, const BitActs& a, std::size_t& lout) {
  const std::size_t span = l.kernel * a.wpp;
  const auto filters = expand_filters(l, a.wpp);
  lout = a.len - l.kernel + 1;
  const auto fan = static_cast<std::int64_t>(l.fan_in());
  std::vector<std::int64_t> dots(lout * l.out_ch);
  for (std::size_t p = 0; p < lout; ++p) {
    const std::uint64_t* win = a.bits.data() + p * a.wpp;
    for (std::size_t o = 0; o < l.out_ch; ++o) {
      const std::uint64_t* f = filters.data() + o * span;
      std::int64_t ham = 0;
      for (std::size_t i = 0; i < span; ++i) ham += std::popcount(win[i] ^ f[i]);
      dots[p * l.out_ch + o] = fan - 2 * ham;
    }
  }
  return dots;
}

}  // namespace detail

inline PackedResult infer_packed(const PackedModel& pm, const hdcore::BitVector& input) {
  require(pm.version == kPackedVersion, Errc::FormatVersionMismatch, "unsupported packed model version");
  require(input.dim() == pm.d_in, Errc::DimMismatch,
          "input dimension " + std::to_string(input.dim()) + " != d_in " + std::to_string(pm.d_in));
  detail::BitActs a{pm.d_in, 1, 1, std::vector<std::uint64_t>(pm.d_in, 0)};
  for (std::size_t i = 0; i < pm.d_in; ++i) a.bits[i] = input.bit(i) ? 1u : 0u;

  PackedResult res;
  for (const auto& l : pm.layers) {
    std::size_t lout = 0;
    const auto dots = detail::layer_dots(l, a, lout);
    if (l.kind == LayerKind::Output) {
      res.scores = dots;
      for (std::size_t o = 0; o < l.out_ch; ++o) {
        res.logits.push_back((static_cast<float>(dots[o]) - l.mean[o]) * l.scale[o] + l.beta[o]);
      }
      break;
    }
    const std::size_t plen = lout / l.pool;
    detail::BitActs next{plen, l.out_ch, detail::words_for(l.out_ch), {}};
    next.bits.assign(plen * next.wpp, 0);
    for (std::size_t p = 0; p < plen; ++p) {
      for (std::size_t o = 0; o < l.out_ch; ++o) {
        std::int64_t m = dots[p * l.pool * l.out_ch + o];
        for (std::size_t t = 1; t < l.pool; ++t) m = std::max(m, dots[(p * l.pool + t) * l.out_ch + o]);
        const auto tau = static_cast<std::int64_t>(l.thresholds[o]);
        const bool pos = (m - tau >= 0) == (l.flips[o] > 0);
        if (pos) next.bits[p * next.wpp + o / 64] |= std::uint64_t{1} << (o % 64);
      }
    }
    a = std::move(next);
  }
  for (std::size_t o = 1; o < res.logits.size(); ++o) {
    if (res.logits[o] > res.logits[res.label]) res.label = o;
  }
  return res;
}

}  // namespace hdbnn::packrt
