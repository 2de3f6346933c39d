#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdbnn/bytes.hpp"
#include "hdbnn/hdcore/vectors.hpp"

namespace hdbnn::hdcore {

// u32 d followed by ceil(d/64) little-endian u64 words.
inline void write_bitvector(ByteWriter& w, const BitVector& v) {
  w.u32(static_cast<std::uint32_t>(v.dim()));
  for (auto word : v.words()) w.u64(word);
}

inline BitVector read_bitvector(ByteReader& r) {
  const std::uint32_t d = r.u32();
  require(d > 0, Errc::CorruptLength, "zero-dimensional bit vector");
  std::vector<std::uint64_t> words(BitVector::word_count(d));
  for (auto& word : words) word = r.u64();
  return BitVector(d, std::move(words));
}

inline std::vector<std::uint8_t> serialize_bitvector(const BitVector& v) {
  ByteWriter w;
  write_bitvector(w, v);
  return w.take();
}

inline BitVector deserialize_bitvector(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  BitVector v = read_bitvector(r);
  r.expect_end();
  return v;
}

}  // namespace hdbnn::hdcore
