#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "hdbnn/bnn.hpp"
#include "hdbnn/packrt.hpp"
#include "support.hpp"

namespace hdbnn::testing {

// Hard-tanh surrogate network: input 16, one conv of 2 filters, a dense layer
// of 2 units, 2 classes.
inline bnn::Architecture tiny_surrogate_arch() {
  bnn::Architecture a;
  a.d_in = 16;
  a.num_classes = 2;
  a.kernel = 3;
  a.conv = {{2, 1}};
  a.dense = {2};
  a.mode = bnn::Mode::HardTanhSurrogate;
  return a;
}

struct GradCheck {
  double rel_error = 0;
  std::size_t params = 0;
};

// Analytic backward vs central differences on one random instance. Returns
// nullopt when some activation input or latent weight lies within `margin`
// of a clip boundary (the caller draws another instance).
inline std::optional<GradCheck> hardtanh_grad_check(std::uint64_t seed, double margin = 1e-3, double h = 1e-6) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  bnn::BnnModel<double> model(tiny_surrogate_arch(), seed);
  for (auto* p : model.params()) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      const bool is_weight = p->latent_clip;
      p->value.data()[i] = is_weight ? 0.95 * u(gen) : 1.0 + 0.5 * u(gen);
      if (p->name.ends_with(".beta")) p->value.data()[i] = 0.3 * u(gen);
    }
  }
  const std::size_t batch = 4;
  bnn::Mat<double> x(batch, 16);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(gen);
  std::vector<std::size_t> y(batch);
  for (auto& l : y) l = gen() % 2;

  auto loss_at = [&](bnn::BnnModel<double>& m) {
    return bnn::batch_loss<double>(m.forward(x, true, 0.0, nullptr, 1.0), y).first;
  };

  model.zero_grad();
  const auto logits = model.forward(x, true, 0.0, nullptr, 1.0);
  for (const auto& pre : model.conv_preactivations()) {
    for (Eigen::Index i = 0; i < pre.size(); ++i) {
      if (std::abs(std::abs(pre.data()[i]) - 1.0) < margin) return std::nullopt;
    }
  }
  for (const auto& pre : model.dense_preactivations()) {
    for (Eigen::Index i = 0; i < pre.size(); ++i) {
      if (std::abs(std::abs(pre.data()[i]) - 1.0) < margin) return std::nullopt;
    }
  }
  model.backward(bnn::batch_loss<double>(logits, y).second);

  double diff2 = 0, a2 = 0, n2 = 0;
  GradCheck out;
  for (auto* p : model.params()) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      const double w = p->value.data()[i];
      if (p->latent_clip && std::abs(std::abs(w) - 1.0) < margin) return std::nullopt;
      p->value.data()[i] = w + h;
      const double lp = loss_at(model);
      p->value.data()[i] = w - h;
      const double lm = loss_at(model);
      p->value.data()[i] = w;
      const double numeric = (lp - lm) / (2 * h);
      const double analytic = p->grad.data()[i];
      diff2 += (numeric - analytic) * (numeric - analytic);
      a2 += analytic * analytic;
      n2 += numeric * numeric;
      ++out.params;
    }
  }
  out.rel_error = std::sqrt(diff2) / std::max(1e-12, std::sqrt(a2) + std::sqrt(n2));
  return out;
}

// Random binarized architecture that exercises multi-word channel rows,
// pooling remainders and several dense layers.
inline bnn::Architecture random_packed_arch(std::mt19937_64& gen) {
  bnn::Architecture a;
  a.kernel = 1 + gen() % 3;
  a.d_in = 24 + gen() % 60;
  a.num_classes = 2 + gen() % 4;
  a.conv.clear();
  const std::size_t nconv = 1 + gen() % 2;
  for (std::size_t i = 0; i < nconv; ++i) a.conv.push_back({1 + gen() % 70, 1 + gen() % 3});
  a.dense.clear();
  const std::size_t ndense = gen() % 3;
  for (std::size_t j = 0; j < ndense; ++j) a.dense.push_back(1 + gen() % 70);
  a.mode = bnn::Mode::Binarized;
  return a;
}

// Random running statistics and affine parameters, including negative and
// zero gammas, with means on and near integer pre-activation values.
template <typename S>
void randomize_batch_norms(bnn::BnnModel<S>& model, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto bns = model.batch_norms();
  for (auto* bn : bns) {
    for (std::size_t c = 0; c < bn->channels(); ++c) {
      const auto ci = static_cast<Eigen::Index>(c);
      const double r = u(gen);
      double g = 2 * u(gen);
      if (r > 0.85) g = 0;
      bn->gamma().value(0, ci) = static_cast<S>(g);
      bn->beta().value(0, ci) = static_cast<S>(u(gen) < -0.7 ? 0.0 : 2 * u(gen));
      const double mean = std::round(6 * u(gen)) + (u(gen) > 0 ? 0.0 : 0.5 * u(gen));
      bn->running_mean()(ci) = static_cast<S>(mean);
      bn->running_var()(ci) = static_cast<S>(0.05 + 9 * (u(gen) + 1));
    }
    bn->mark_running_stats();
  }
}

inline bool packed_matches_float(const bnn::BnnModel<float>& model, const packrt::PackedModel& pm,
                                 const hdcore::BitVector& input) {
  const auto pr = packrt::infer_packed(pm, input);
  const auto fp = bnn::predict(model, input);
  return pr.label == fp.label;
}

}  // namespace hdbnn::testing
