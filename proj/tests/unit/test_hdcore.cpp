#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "../support.hpp"
#include "hdbnn/hdcore.hpp"

using namespace hdbnn;
using namespace hdbnn::hdcore;
using hdbnn::testing::int_dot;
using hdbnn::testing::random_bipolar;
using hdbnn::vectorizer::ngram_stats;

namespace {

BipolarVector bp(std::initializer_list<int> v) {
  std::vector<std::int8_t> out;
  for (int x : v) out.push_back(static_cast<std::int8_t>(x));
  return BipolarVector(out);
}

}  // namespace

TEST(ItemMemory, Deterministic) {
  const ItemMemory mem(512, 7);
  EXPECT_EQ(mem.token_hv("he"), mem.token_hv("he"));
  EXPECT_EQ(ItemMemory(512, 7).token_hv("he"), mem.token_hv("he"));
  EXPECT_NE(ItemMemory(512, 8).token_hv("he"), mem.token_hv("he"));
}

TEST(ItemMemory, MeanNearZero) {
  const ItemMemory mem(8192, 1);
  for (const char* t : {"a", "he", "hello", "#he"}) {
    const auto v = mem.token_hv(t);
    double s = 0;
    for (std::size_t i = 0; i < v.dim(); ++i) s += v[i];
    EXPECT_LE(std::abs(s / 8192.0), 0.04) << t;
  }
}

TEST(ItemMemory, QuasiOrthogonal) {
  const ItemMemory mem(8192, 1);
  EXPECT_LT(std::abs(cosine(mem.token_hv("a"), mem.token_hv("b"))), 0.1);
}

TEST(ItemMemory, EmptyTokenRejected) {
  EXPECT_THROW(ItemMemory(64, 1).token_hv(""), Error);
}

TEST(Permute, Examples) {
  EXPECT_EQ(permute(bp({1, -1, -1, 1}), 0), bp({1, -1, -1, 1}));
  EXPECT_EQ(permute(bp({1, -1, -1, 1}), 1), bp({1, 1, -1, -1}));
}

TEST(Permute, InverseRotation) {
  std::mt19937_64 gen(4);
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 1 + gen() % 100;
    const auto v = random_bipolar(d, gen);
    const std::size_t j = gen() % d;
    EXPECT_EQ(permute(permute(v, j), d - j), v);
  }
}

TEST(Bind, Examples) {
  std::mt19937_64 gen(5);
  const auto v = random_bipolar(64, gen);
  EXPECT_EQ(bind(v, v), BipolarVector(64, 1));
  EXPECT_EQ(bind(bp({1, -1}), bp({-1, -1})), bp({-1, 1}));
  const auto b = random_bipolar(64, gen);
  EXPECT_EQ(bind(bind(v, b), b), v);
  EXPECT_THROW(bind(bp({1}), bp({1, 1})), Error);
}

TEST(Bind, DistributesOverPermutation) {
  std::mt19937_64 gen(6);
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 1 + gen() % 200;
    const auto a = random_bipolar(d, gen), b = random_bipolar(d, gen);
    const std::size_t j = gen() % (2 * d);
    EXPECT_EQ(permute(bind(a, b), j), bind(permute(a, j), permute(b, j)));
  }
}

TEST(NgramHv, TrigramFormula) {
  const ItemMemory mem(512, 3);
  const auto expected =
      bind(bind(permute(mem.token_hv("#"), 1), permute(mem.token_hv("h"), 2)), permute(mem.token_hv("e"), 3));
  EXPECT_EQ(ngram_hv(mem, {"#", "h", "e"}), expected);
}

TEST(NgramHv, UnigramIsRotatedOnce) {
  const ItemMemory mem(512, 3);
  EXPECT_EQ(ngram_hv(mem, {"t"}), permute(mem.token_hv("t"), 1));
}

TEST(NgramHv, OrderMatters) {
  const ItemMemory mem(512, 3);
  EXPECT_LT(cosine(ngram_hv(mem, {"a", "b"}), ngram_hv(mem, {"b", "a"})), 0.2);
}

TEST(Sign, ZeroMapsToPlusOne) {
  EXPECT_EQ(sign(AccumVector{{0, -3, 2}}), bp({1, -1, 1}));
}

TEST(Embed, SingleUnigram) {
  const ItemMemory mem(512, 9);
  const auto one = ngram_stats({"a"}, 1);
  EXPECT_EQ(embed_binary(mem, one), pack(permute(mem.token_hv("a"), 1)));
  const auto three = ngram_stats({"a", "a", "a"}, 1);
  EXPECT_EQ(embed_binary(mem, three), embed_binary(mem, one));
}

TEST(Embed, MatchesDirectSum) {
  const ItemMemory mem(256, 2);
  const auto stats = ngram_stats({"x", "y", "x", "z", "x"}, 2);
  std::vector<std::int64_t> acc(256, 0);
  for (const auto& [g, f] : stats.counts()) {
    auto m = permute(mem.token_hv(g[0]), 1);
    m = bind(m, permute(mem.token_hv(g[1]), 2));
    for (std::size_t i = 0; i < 256; ++i) acc[i] += static_cast<std::int64_t>(f) * m[i];
  }
  const auto bits = embed_binary(mem, stats);
  const auto real = embed_real(mem, stats);
  double n = 0;
  for (auto v : acc) n += double(v) * double(v);
  n = std::sqrt(n);
  for (std::size_t i = 0; i < 256; ++i) {
    EXPECT_EQ(bits.bit(i), acc[i] >= 0);
    EXPECT_NEAR(real.values[i], double(acc[i]) / n, 1e-12);
  }
  EXPECT_NEAR(real.norm(), 1.0, 1e-6);
}

TEST(Embed, Errors) {
  const ItemMemory mem(64, 2);
  try {
    embed_binary(mem, vectorizer::NgramStats(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyStats);
  }
  try {
    normalize(AccumVector{{0, 0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ZeroVector);
  }
}

TEST(Embed, RealCosineScaleInvariant) {
  const ItemMemory mem(1024, 5);
  const auto s1 = ngram_stats({"a", "b", "b", "c"}, 1);
  const auto s3 = ngram_stats({"a", "b", "b", "c", "a", "b", "b", "c", "a", "b", "b", "c"}, 1);
  const auto other = ngram_stats({"c", "d"}, 1);
  EXPECT_NEAR(cosine(embed_real(mem, s1), embed_real(mem, other)), cosine(embed_real(mem, s3), embed_real(mem, other)),
              1e-6);
}

TEST(Embed, UnigramOrderInvariant) {
  const ItemMemory mem(512, 5);
  std::mt19937 gen(8);
  vectorizer::TokenStream toks{"he", "ll", "o", "wo", "rl", "d", "he"};
  const auto base = embed_binary(mem, ngram_stats(toks, 1));
  for (int t = 0; t < 10; ++t) {
    std::shuffle(toks.begin(), toks.end(), gen);
    EXPECT_EQ(embed_binary(mem, ngram_stats(toks, 1)), base);
  }
}

TEST(Embed, BundlingCapacity) {
  const ItemMemory mem(8192, 12);
  vectorizer::TokenStream members;
  for (int i = 0; i < 20; ++i) members.push_back("member" + std::to_string(i));
  const auto acc = accumulate(mem, ngram_stats(members, 1));
  auto acc_dot = [&](const BipolarVector& v) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < v.dim(); ++i) s += acc.values[i] * v[i];
    return s;
  };
  std::int64_t worst_distractor = std::numeric_limits<std::int64_t>::min();
  for (int i = 0; i < 1000; ++i) {
    worst_distractor = std::max(worst_distractor, acc_dot(ngram_hv(mem, {"distractor" + std::to_string(i)})));
  }
  for (const auto& m : members) EXPECT_GT(acc_dot(ngram_hv(mem, {m})), worst_distractor);
}

TEST(Pack, WordLayout) {
  const auto b = pack(bp({1, 1, -1, 1}));
  ASSERT_EQ(b.words().size(), 1u);
  EXPECT_EQ(b.words()[0], 0b1011u);
  EXPECT_EQ(pack(BipolarVector(64, -1)).words()[0], 0u);
}

TEST(Pack, RoundTrip) {
  std::mt19937_64 gen(13);
  for (std::size_t d : {1, 63, 64, 65, 512}) {
    for (int t = 0; t < 20; ++t) {
      const auto v = random_bipolar(d, gen);
      const auto b = pack(v);
      EXPECT_EQ(unpack(b), v);
      EXPECT_EQ(b.words().back() & ~BitVector::tail_mask(d), 0u);
    }
  }
}

TEST(Hamming, Examples) {
  std::mt19937_64 gen(14);
  const auto v = pack(random_bipolar(100, gen));
  EXPECT_EQ(hamming(v, v), 0u);
  EXPECT_EQ(dot(v, v), 100);
  EXPECT_EQ(dot(pack(bp({1, 1, -1, 1})), pack(bp({-1, 1, 1, 1}))), 0);
  EXPECT_THROW(hamming(BitVector(3), BitVector(4)), Error);
}

TEST(Hamming, DotMatchesIntegerOracle) {
  std::mt19937_64 gen(15);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t d = t < 500 ? 512 : 1 + gen() % 200;
    const auto a = random_bipolar(d, gen), b = random_bipolar(d, gen);
    EXPECT_EQ(dot(pack(a), pack(b)), int_dot(a, b));
  }
}

TEST(BitVectorIo, RoundTripAndValidation) {
  std::mt19937_64 gen(16);
  const auto v = pack(random_bipolar(70, gen));
  const auto bytes = serialize_bitvector(v);
  EXPECT_EQ(bytes.size(), 4u + 16u);
  EXPECT_EQ(deserialize_bitvector(bytes), v);
  auto extra = bytes;
  extra.push_back(0);
  EXPECT_THROW(deserialize_bitvector(extra), Error);
  auto padded = bytes;
  padded.back() = 0xFF;  // sets pad bits of the last word
  EXPECT_THROW(deserialize_bitvector(padded), Error);
  EXPECT_THROW(deserialize_bitvector(std::span(bytes).first(10)), Error);
}
