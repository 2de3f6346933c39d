#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hdbnn/error.hpp"
#include "hdbnn/hdcore/vectors.hpp"

namespace hdbnn::testing {

inline hdcore::BipolarVector random_bipolar(std::size_t d, std::mt19937_64& gen) {
  std::vector<std::int8_t> v(d);
  for (auto& x : v) x = (gen() & 1u) ? 1 : -1;
  return hdcore::BipolarVector(std::move(v));
}

inline hdcore::BitVector random_bits(std::size_t d, std::mt19937_64& gen) {
  return hdcore::pack(random_bipolar(d, gen));
}

// Plain +-1 multiply-accumulate.
inline std::int64_t int_dot(const hdcore::BipolarVector& a, const hdcore::BipolarVector& b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

inline std::string temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hdbnn_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

// Code of the Error thrown by f; nullopt when nothing is thrown.
template <typename F>
std::optional<Errc> error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace hdbnn::testing
