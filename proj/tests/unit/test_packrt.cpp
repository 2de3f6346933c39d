#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "hdbnn/packrt.hpp"

using namespace hdbnn;
using namespace hdbnn::packrt;
using hdbnn::testing::random_bits;

namespace {

bnn::BnnModel<float> random_model(std::mt19937_64& gen) {
  bnn::BnnModel<float> m(hdbnn::testing::random_packed_arch(gen), gen());
  hdbnn::testing::randomize_batch_norms(m, gen);
  return m;
}

Errc load_error(std::span<const std::uint8_t> bytes) {
  try {
    load_model(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;
}

// Single-conv model with one filter whose latent weights are all +1.
bnn::BnnModel<float> identity_model(std::size_t d) {
  bnn::Architecture a;
  a.d_in = d;
  a.kernel = d;
  a.conv = {{1, 1}};
  a.dense.clear();
  a.num_classes = 2;
  bnn::BnnModel<float> m(a, 1);
  m.convs()[0].weights().value.setOnes();
  for (auto* bn : m.batch_norms()) bn->mark_running_stats();
  return m;
}

}  // namespace

TEST(FoldThreshold, Examples) {
  EXPECT_NEAR(fold_threshold(0, 1, 1, 0, 1e-5), 0.0, 1e-12);
  EXPECT_NEAR(fold_threshold(2, 4 - 1e-5, -2, 1, 1e-5), 3.0, 1e-9);
}

TEST(IntegerThreshold, NegativeGammaFlips) {
  // scale -1: positive iff x <= 2, so +1 iff x < 3.
  const auto [tau, flip] = detail::integer_threshold<float>(2.0f, -1.0f, 0.0f, 10);
  EXPECT_EQ(tau, 3.0f);
  EXPECT_EQ(flip, -1);
}

TEST(IntegerThreshold, ZeroGammaIsConstant) {
  const auto [tau_pos, f1] = detail::integer_threshold<float>(0.3f, 0.0f, 0.5f, 9);
  EXPECT_EQ(tau_pos, -9.0f);
  EXPECT_EQ(f1, 1);
  const auto [tau_neg, f2] = detail::integer_threshold<float>(0.3f, 0.0f, -0.5f, 9);
  EXPECT_EQ(tau_neg, 10.0f);
  EXPECT_EQ(f2, 1);
}

TEST(IntegerThreshold, MatchesFloatExpressionEverywhere) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<float> u(-3, 3);
  for (int t = 0; t < 500; ++t) {
    const float mean = u(gen), scale = (t % 7 == 0) ? 0.0f : u(gen), beta = u(gen);
    const std::int64_t fan = 1 + static_cast<std::int64_t>(gen() % 40);
    const auto [tau, flip] = detail::integer_threshold<float>(mean, scale, beta, fan);
    for (std::int64_t x = -fan; x <= fan; ++x) {
      const bool want = (static_cast<float>(x) - mean) * scale + beta >= 0.0f;
      const bool got = (static_cast<float>(x) >= tau) == (flip > 0);
      ASSERT_EQ(got, want) << "x=" << x;
    }
  }
}

TEST(PackedInference, SelfDotAndSingleFlip) {
  std::mt19937_64 gen(5);
  for (std::size_t d : {7u, 64u, 65u, 130u}) {
    auto m = identity_model(d);
    // Conv threshold just below d: only a perfect match with the all-ones
    // filter fires, and one flipped bit drops the dot to d - 2.
    m.conv_bns()[0].running_mean()(0) = static_cast<float>(d) - 1.5f;
    m.classifier().weights().value.setOnes();
    const auto pm = export_model(m);
    EXPECT_EQ(pm.layers[0].thresholds[0], static_cast<float>(d) - 1.0f);
    const hdcore::BipolarVector ones(d, 1);
    EXPECT_GT(infer_packed(pm, hdcore::pack(ones)).scores[0], 0);
    std::vector<std::int8_t> v(d, 1);
    v[gen() % d] = -1;
    EXPECT_LT(infer_packed(pm, hdcore::pack(hdcore::BipolarVector(v))).scores[0], 0);
  }
}

TEST(PackedInference, AgreesWithFloatModelOnRandomModels) {
  std::mt19937_64 gen(7);
  for (int t = 0; t < 200; ++t) {
    const auto m = random_model(gen);
    const auto pm = export_model(m);
    for (int i = 0; i < 3; ++i) {
      const auto x = random_bits(m.arch().d_in, gen);
      const auto pr = infer_packed(pm, x);
      const auto logits = m.infer(bnn::to_row<float>(x));
      ASSERT_EQ(pr.logits.size(), static_cast<std::size_t>(logits.cols()));
      for (std::size_t c = 0; c < pr.logits.size(); ++c) ASSERT_EQ(pr.logits[c], logits(0, static_cast<Eigen::Index>(c)));
      ASSERT_EQ(pr.label, bnn::predict(m, x).label);
    }
  }
}

TEST(PackedInference, AgreesAfterTraining) {
  std::mt19937_64 gen(8);
  bnn::Architecture a;
  a.d_in = 64;
  a.num_classes = 3;
  a.conv = {{16, 2}, {24, 3}};
  a.dense = {20};
  bnn::BnnModel<float> m(a, 3);
  std::vector<hdcore::BitVector> xs;
  std::vector<std::size_t> ys;
  for (int i = 0; i < 30; ++i) {
    xs.push_back(random_bits(64, gen));
    ys.push_back(static_cast<std::size_t>(i % 3));
  }
  bnn::TrainConfig cfg;
  cfg.epochs = 3;
  bnn::train(m, bnn::make_dataset<float>(xs, ys), cfg);
  const auto pm = load_model(serialize(export_model(m)));
  for (int i = 0; i < 100; ++i) {
    const auto x = random_bits(64, gen);
    EXPECT_TRUE(hdbnn::testing::packed_matches_float(m, pm, x));
  }
}

TEST(PackedFormat, RoundTripIsByteIdentical) {
  std::mt19937_64 gen(9);
  for (int t = 0; t < 20; ++t) {
    const auto pm = export_model(random_model(gen));
    const auto bytes = serialize(pm);
    const auto back = load_model(bytes);
    EXPECT_EQ(back, pm);
    EXPECT_EQ(serialize(back), bytes);
  }
}

TEST(PackedFormat, PayloadIsCeilBitsOver64Words) {
  std::mt19937_64 gen(10);
  for (int t = 0; t < 20; ++t) {
    const auto pm = export_model(random_model(gen));
    PackedLayout layout;
    serialize(pm, &layout);
    ASSERT_EQ(layout.size(), pm.layers.size());
    for (std::size_t i = 0; i < layout.size(); ++i) {
      EXPECT_EQ(layout[i].weights, pm.layers[i].weight_count());
      EXPECT_EQ(layout[i].bytes, (layout[i].weights + 63) / 64 * 8);
    }
  }
}

TEST(PackedFormat, CorruptInputsRejected) {
  std::mt19937_64 gen(11);
  const auto bytes = serialize(export_model(random_model(gen)));
  EXPECT_EQ(load_error(std::span(bytes).first(bytes.size() - 1)), Errc::CorruptLength);
  EXPECT_EQ(load_error(std::span(bytes).first(7)), Errc::CorruptLength);
  auto bad = bytes;
  bad[1] = 'X';
  EXPECT_EQ(load_error(bad), Errc::BadMagic);
  bad = bytes;
  bad[4] = 2;
  EXPECT_EQ(load_error(bad), Errc::FormatVersionMismatch);
  bad = bytes;
  bad.push_back(0);
  EXPECT_EQ(load_error(bad), Errc::CorruptLength);
}

TEST(PackedFormat, InputDimensionChecked) {
  std::mt19937_64 gen(12);
  const auto m = random_model(gen);
  const auto pm = export_model(m);
  try {
    infer_packed(pm, random_bits(m.arch().d_in + 1, gen));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimMismatch);
  }
}

TEST(Export, RequiresRunningStatistics) {
  bnn::BnnModel<float> m(bnn::Architecture::text_lenet(512, 2), 1);
  try {
    export_model(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UntrainedModel);
  }
  bnn::BnnModel<float> real(bnn::Architecture::text_lenet(512, 2, bnn::Mode::Real), 1);
  EXPECT_THROW(export_model(real), Error);
}
