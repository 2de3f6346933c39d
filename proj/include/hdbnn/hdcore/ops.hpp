#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <variant>

#include "hdbnn/error.hpp"
#include "hdbnn/hdcore/vectors.hpp"
#include "hdbnn/rng.hpp"
#include "hdbnn/vectorizer.hpp"

namespace hdbnn::hdcore {

// Virtual item memory: a token's vector is regenerated from a counter-based
// stream keyed by hash64(global_seed, token), so the d x |vocab| matrix is
// never stored.
class ItemMemory {
 public:
  ItemMemory(std::size_t d, std::uint64_t global_seed) : d_(d), seed_(global_seed) {
    require(d > 0, Errc::InvalidArgument, "dimension must be positive");
  }

  std::size_t dim() const noexcept { return d_; }
  std::uint64_t seed() const noexcept { return seed_; }

  BipolarVector token_hv(std::string_view token) const {
    require(!token.empty(), Errc::InvalidArgument, "empty token");
    const std::uint64_t key = hash64(seed_, token);
    BipolarVector v(d_);
    std::int8_t* out = v.data();
    for (std::size_t w = 0; w * 64 < d_; ++w) {
      const std::uint64_t bits = splitmix64(key + w * 0xD1B54A32D192ED03ULL);
      for (std::size_t b = 0; b < 64 && w * 64 + b < d_; ++b) {
        out[w * 64 + b] = ((bits >> b) & 1u) ? 1 : -1;
      }
    }
    return v;
  }

 private:
  std::size_t d_;
  std::uint64_t seed_;
};

// Cyclic rotation: out[(i + j) mod d] = v[i].
inline BipolarVector permute(const BipolarVector& v, std::size_t j) {
  const std::size_t d = v.dim();
  const std::size_t shift = j % d;
  BipolarVector out(d);
  std::int8_t* o = out.data();
  for (std::size_t i = 0; i < d; ++i) {
    std::size_t k = i + shift;
    if (k >= d) k -= d;
    o[k] = v[i];
  }
  return out;
}

inline BipolarVector bind(const BipolarVector& a, const BipolarVector& b) {
  require(a.dim() == b.dim(), Errc::DimMismatch, "bind on vectors of different dimension");
  BipolarVector out(a.dim());
  std::int8_t* o = out.data();
  for (std::size_t i = 0; i < a.dim(); ++i) o[i] = static_cast<std::int8_t>(a[i] * b[i]);
  return out;
}

// Position j (1-based) of the n-gram is rotated j times before binding.
inline BipolarVector ngram_hv(const ItemMemory& mem, const vectorizer::Ngram& gram) {
  require(!gram.empty(), Errc::InvalidArgument, "empty n-gram");
  BipolarVector m = permute(mem.token_hv(gram[0]), 1);
  for (std::size_t j = 1; j < gram.size(); ++j) m = bind(m, permute(mem.token_hv(gram[j]), j + 1));
  return m;
}

// sign with sign(0) = +1.
inline BipolarVector sign(const AccumVector& acc) {
  std::vector<std::int8_t> vals(acc.dim());
  for (std::size_t i = 0; i < acc.dim(); ++i) vals[i] = acc.values[i] >= 0 ? 1 : -1;
  return BipolarVector(std::move(vals));
}

inline RealVector normalize(const AccumVector& acc) {
  RealVector out{std::vector<double>(acc.values.begin(), acc.values.end())};
  const double n = out.norm();
  require(n > 0, Errc::ZeroVector, "cannot normalize an all-zero accumulator");
  for (double& v : out.values) v /= n;
  return out;
}

inline double cosine(const RealVector& a, const RealVector& b) {
  require(a.dim() == b.dim(), Errc::DimMismatch, "cosine on vectors of different dimension");
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    ab += a.values[i] * b.values[i];
    aa += a.values[i] * a.values[i];
    bb += b.values[i] * b.values[i];
  }
  require(aa > 0 && bb > 0, Errc::ZeroVector, "cosine of a zero vector");
  return ab / std::sqrt(aa * bb);
}

inline double cosine(const BipolarVector& a, const BipolarVector& b) {
  require(a.dim() == b.dim(), Errc::DimMismatch, "cosine on vectors of different dimension");
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return static_cast<double>(s) / static_cast<double>(a.dim());
}

// acc = sum_i f_i * m_i over every n-gram of the document.
inline AccumVector accumulate(const ItemMemory& mem, const vectorizer::NgramStats& stats) {
  require(!stats.empty(), Errc::EmptyStats, "no n-grams to embed");
  AccumVector acc{std::vector<std::int64_t>(mem.dim(), 0)};
  for (const auto& [gram, f] : stats.counts()) {
    const BipolarVector m = ngram_hv(mem, gram);
    const auto w = static_cast<std::int64_t>(f);
    for (std::size_t i = 0; i < mem.dim(); ++i) acc.values[i] += w * m[i];
  }
  return acc;
}

enum class EmbedMode { Binary, Real };

using HdVector = std::variant<BitVector, RealVector>;

inline BitVector embed_binary(const ItemMemory& mem, const vectorizer::NgramStats& stats) {
  return pack(sign(accumulate(mem, stats)));
}

inline RealVector embed_real(const ItemMemory& mem, const vectorizer::NgramStats& stats) {
  return normalize(accumulate(mem, stats));
}

inline HdVector embed_stats(const ItemMemory& mem, const vectorizer::NgramStats& stats, EmbedMode mode) {
  if (mode == EmbedMode::Binary) return embed_binary(mem, stats);
  return embed_real(mem, stats);
}

}  // namespace hdbnn::hdcore
