#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hdbnn/bnn/model.hpp"
#include "hdbnn/bytes.hpp"

namespace hdbnn::bnn {

// Checkpoint container, little-endian throughout:
//   "HBCK" u16 version
//   architecture: u8 mode, u32 d_in, u32 num_classes, u32 kernel,
//                 u16 n_conv {u32 filters, u32 pool}*, u16 n_dense {u32 units}*,
//                 f64 bn_momentum, f64 bn_epsilon
//   u64 seed, u64 rng_state, u32 epochs_done
//   u16 n_params, per param: str name, u8 latent_clip, u32 rows, u32 cols,
//                 f32 value[rows*cols], f32 rms[rows*cols]
//   u16 n_bn, per batch norm: u8 has_stats, u32 channels, f32 mean[c], f32 var[c]
inline constexpr char kCheckpointMagic[4] = {'H', 'B', 'C', 'K'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

// Byte range of a tensor's latent values inside the file.
struct TensorSpan {
  std::size_t offset = 0;
  std::size_t bytes = 0;
  std::size_t elements = 0;
};
using CheckpointLayout = std::map<std::string, TensorSpan>;

namespace detail {

inline void write_arch(ByteWriter& w, const Architecture& a) {
  w.u8(static_cast<std::uint8_t>(a.mode));
  w.u32(static_cast<std::uint32_t>(a.d_in));
  w.u32(static_cast<std::uint32_t>(a.num_classes));
  w.u32(static_cast<std::uint32_t>(a.kernel));
  w.u16(static_cast<std::uint16_t>(a.conv.size()));
  for (const auto& b : a.conv) {
    w.u32(static_cast<std::uint32_t>(b.filters));
    w.u32(static_cast<std::uint32_t>(b.pool));
  }
  w.u16(static_cast<std::uint16_t>(a.dense.size()));
  for (auto u : a.dense) w.u32(static_cast<std::uint32_t>(u));
  w.f64(a.bn_momentum);
  w.f64(a.bn_epsilon);
}

inline Architecture read_arch(ByteReader& r) {
  Architecture a;
  const auto mode = r.u8();
  require(mode <= 2, Errc::ParseError, "unknown model mode");
  a.mode = static_cast<Mode>(mode);
  a.d_in = r.u32();
  a.num_classes = r.u32();
  a.kernel = r.u32();
  a.conv.resize(r.u16());
  for (auto& b : a.conv) {
    b.filters = r.u32();
    b.pool = r.u32();
  }
  a.dense.resize(r.u16());
  for (auto& u : a.dense) u = r.u32();
  a.bn_momentum = r.f64();
  a.bn_epsilon = r.f64();
  try {
    a.validate();
  } catch (const Error& e) {
    fail(Errc::ParseError, std::string("invalid architecture: ") + e.what());
  }
  return a;
}

}  // namespace detail

template <typename S>
std::vector<std::uint8_t> save_checkpoint(const BnnModel<S>& model, CheckpointLayout* layout = nullptr) {
  ByteWriter w;
  for (char c : kCheckpointMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u16(kCheckpointVersion);
  detail::write_arch(w, model.arch());
  w.u64(model.seed());
  w.u64(model.train_rng().state());
  w.u32(static_cast<std::uint32_t>(model.epochs_done()));
  const auto params = model.params();
  w.u16(static_cast<std::uint16_t>(params.size()));
  for (const auto* p : params) {
    w.str(p->name);
    w.u8(p->latent_clip ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(p->value.rows()));
    w.u32(static_cast<std::uint32_t>(p->value.cols()));
    const std::size_t start = w.size();
    for (Eigen::Index i = 0; i < p->value.size(); ++i) w.f32(static_cast<float>(p->value.data()[i]));
    if (layout) {
      (*layout)[p->name] = {start, w.size() - start, static_cast<std::size_t>(p->value.size())};
    }
    for (Eigen::Index i = 0; i < p->rms.size(); ++i) w.f32(static_cast<float>(p->rms.data()[i]));
  }
  const auto bns = model.batch_norms();
  w.u16(static_cast<std::uint16_t>(bns.size()));
  for (const auto* bn : bns) {
    w.u8(bn->has_running_stats() ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(bn->channels()));
    for (Eigen::Index c = 0; c < bn->running_mean().size(); ++c) w.f32(static_cast<float>(bn->running_mean()(c)));
    for (Eigen::Index c = 0; c < bn->running_var().size(); ++c) w.f32(static_cast<float>(bn->running_var()(c)));
  }
  return w.take();
}

template <typename S = float>
BnnModel<S> load_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  for (char c : kCheckpointMagic) require(r.u8() == static_cast<std::uint8_t>(c), Errc::BadMagic, "not a checkpoint");
  const auto version = r.u16();
  require(version == kCheckpointVersion, Errc::FormatVersionMismatch,
          "checkpoint version " + std::to_string(version));
  Architecture arch = detail::read_arch(r);
  const std::uint64_t seed = r.u64();
  BnnModel<S> model(arch, seed);
  model.train_rng().set_state(r.u64());
  model.set_epochs_done(r.u32());
  auto params = model.params();
  require(r.u16() == params.size(), Errc::CorruptLength, "parameter count mismatch");
  for (auto* p : params) {
    require(r.str() == p->name, Errc::ParseError, "parameter order mismatch at " + p->name);
    p->latent_clip = r.u8() != 0;
    const auto rows = r.u32();
    const auto cols = r.u32();
    require(rows == p->value.rows() && cols == p->value.cols(), Errc::CorruptLength, "shape mismatch for " + p->name);
    for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] = static_cast<S>(r.f32());
    for (Eigen::Index i = 0; i < p->rms.size(); ++i) p->rms.data()[i] = static_cast<S>(r.f32());
  }
  auto bns = model.batch_norms();
  require(r.u16() == bns.size(), Errc::CorruptLength, "batch norm count mismatch");
  for (auto* bn : bns) {
    const bool has = r.u8() != 0;
    require(r.u32() == bn->channels(), Errc::CorruptLength, "batch norm width mismatch");
    for (Eigen::Index c = 0; c < bn->running_mean().size(); ++c) bn->running_mean()(c) = static_cast<S>(r.f32());
    for (Eigen::Index c = 0; c < bn->running_var().size(); ++c) bn->running_var()(c) = static_cast<S>(r.f32());
    bn->mark_running_stats(has);
  }
  r.expect_end();
  return model;
}

}  // namespace hdbnn::bnn
