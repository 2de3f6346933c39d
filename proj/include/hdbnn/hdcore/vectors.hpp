#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "hdbnn/error.hpp"

namespace hdbnn::hdcore {

// d components, each -1 or +1.
class BipolarVector {
 public:
  BipolarVector() = default;
  explicit BipolarVector(std::size_t d, std::int8_t fill = 1) : values_(d, fill) {
    require(d > 0, Errc::InvalidArgument, "dimension must be positive");
    require(fill == 1 || fill == -1, Errc::InvalidArgument, "bipolar fill must be +/-1");
  }
  explicit BipolarVector(std::vector<std::int8_t> values) : values_(std::move(values)) {
    require(!values_.empty(), Errc::InvalidArgument, "dimension must be positive");
    for (auto v : values_) require(v == 1 || v == -1, Errc::InvalidArgument, "component not in {-1,+1}");
  }

  std::size_t dim() const noexcept { return values_.size(); }
  std::int8_t operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const std::int8_t> values() const noexcept { return values_; }

  // Caller keeps components in {-1,+1}.
  std::int8_t* data() noexcept { return values_.data(); }

  friend bool operator==(const BipolarVector&, const BipolarVector&) = default;

 private:
  std::vector<std::int8_t> values_;
};

// Bundling accumulator; components are integer sums of weighted bipolar vectors.
struct AccumVector {
  std::vector<std::int64_t> values;
  std::size_t dim() const noexcept { return values.size(); }
};

struct RealVector {
  std::vector<double> values;
  std::size_t dim() const noexcept { return values.size(); }
  double norm() const noexcept {
    double s = 0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
  }
};

// Packed form: bit i of the LSB-first word stream is component i (1 -> +1,
// 0 -> -1). Bits past d in the final word are always zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t d) : d_(d), words_(word_count(d), 0) {
    require(d > 0, Errc::InvalidArgument, "dimension must be positive");
  }
  BitVector(std::size_t d, std::vector<std::uint64_t> words) : d_(d), words_(std::move(words)) {
    require(d > 0, Errc::InvalidArgument, "dimension must be positive");
    require(words_.size() == word_count(d), Errc::CorruptLength, "word count does not match dimension");
    require((words_.back() & ~tail_mask(d)) == 0, Errc::CorruptLength, "nonzero pad bits");
  }

  static constexpr std::size_t word_count(std::size_t d) noexcept { return (d + 63) / 64; }
  static constexpr std::uint64_t tail_mask(std::size_t d) noexcept {
    const std::size_t r = d % 64;
    return r == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << r) - 1;
  }

  std::size_t dim() const noexcept { return d_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  bool bit(std::size_t i) const noexcept { return (words_[i / 64] >> (i % 64)) & 1u; }
  int component(std::size_t i) const noexcept { return bit(i) ? 1 : -1; }
  void set(std::size_t i, bool on) noexcept {
    const std::uint64_t m = std::uint64_t{1} << (i % 64);
    if (on) {
      words_[i / 64] |= m;
    } else {
      words_[i / 64] &= ~m;
    }
  }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t d_ = 0;
  std::vector<std::uint64_t> words_;
};

inline BitVector pack(const BipolarVector& v) {
  BitVector out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) {
    if (v[i] > 0) out.set(i, true);
  }
  return out;
}

inline BipolarVector unpack(const BitVector& b) {
  std::vector<std::int8_t> vals(b.dim());
  for (std::size_t i = 0; i < b.dim(); ++i) vals[i] = b.bit(i) ? 1 : -1;
  return BipolarVector(std::move(vals));
}

inline std::uint64_t hamming(const BitVector& a, const BitVector& b) {
  require(a.dim() == b.dim(), Errc::DimMismatch, "hamming on vectors of different dimension");
  const auto wa = a.words();
  const auto wb = b.words();
  std::uint64_t h = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) h += std::popcount(wa[i] ^ wb[i]);
  return h;
}

// The +/-1 inner product recovered from the Hamming distance.
inline std::int64_t dot(const BitVector& a, const BitVector& b) {
  return static_cast<std::int64_t>(a.dim()) - 2 * static_cast<std::int64_t>(hamming(a, b));
}

}  // namespace hdbnn::hdcore
