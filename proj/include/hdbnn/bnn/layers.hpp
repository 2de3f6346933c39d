#pragma once

#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hdbnn/bnn/config.hpp"
#include "hdbnn/error.hpp"
#include "hdbnn/rng.hpp"

namespace hdbnn::bnn {

// Activations of a batch: row b * length + l, one column per channel.
template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using RowVec = Eigen::Matrix<S, 1, Eigen::Dynamic>;

template <typename S>
constexpr S sign_of(S x) noexcept {
  return x >= S(0) ? S(1) : S(-1);
}

template <typename S>
Mat<S> sign_forward(const Mat<S>& x) {
  return x.unaryExpr([](S v) { return sign_of(v); });
}

// Gradient of sign through the straight-through estimator: upstream passes
// where |x| < clip, zero elsewhere.
template <typename S>
Mat<S> ste_backward(const Mat<S>& x, const Mat<S>& upstream, S clip) {
  require(x.rows() == upstream.rows() && x.cols() == upstream.cols(), Errc::ShapeMismatch,
          "ste_backward shape mismatch");
  require(clip > S(0), Errc::InvalidArgument, "clip must be positive");
  return upstream.binaryExpr(x, [clip](S g, S v) { return std::abs(v) < clip ? g : S(0); });
}

// Trainable tensor with its gradient and RMSProp accumulator.
template <typename S>
struct Param {
  std::string name;
  Mat<S> value;
  Mat<S> grad;
  Mat<S> rms;
  bool latent_clip = false;  // kept in [-1, 1] after every step

  Param() = default;
  Param(std::string n, Eigen::Index rows, Eigen::Index cols, bool clip)
      : name(std::move(n)), value(Mat<S>::Zero(rows, cols)), grad(Mat<S>::Zero(rows, cols)),
        rms(Mat<S>::Zero(rows, cols)), latent_clip(clip) {}

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

// Forward view of latent weights for the model's mode.
template <typename S>
Mat<S> quantize_weights(const Mat<S>& w, Mode mode) {
  switch (mode) {
    case Mode::Binarized: return sign_forward(w);
    case Mode::HardTanhSurrogate: return w.cwiseMax(S(-1)).cwiseMin(S(1));
    case Mode::Real: return w;
  }
  return w;
}

// Latent-weight gradient from the gradient of the quantized view. Binarized
// weights pass straight through; the [-1, 1] latent clip bounds them instead.
template <typename S>
Mat<S> weight_grad(const Mat<S>& w, const Mat<S>& dq, Mode mode) {
  if (mode == Mode::HardTanhSurrogate) {
    return dq.binaryExpr(w, [](S g, S v) { return std::abs(v) < S(1) ? g : S(0); });
  }
  return dq;
}

template <typename S>
Mat<S> activation_forward(const Mat<S>& x, Mode mode, S clip) {
  switch (mode) {
    case Mode::Binarized: return sign_forward(x);
    case Mode::HardTanhSurrogate: return x.cwiseMax(-clip).cwiseMin(clip);
    case Mode::Real: return x.cwiseMax(S(0));
  }
  return x;
}

template <typename S>
Mat<S> activation_backward(const Mat<S>& x, const Mat<S>& upstream, Mode mode, S clip) {
  if (mode == Mode::Real) return upstream.binaryExpr(x, [](S g, S v) { return v > S(0) ? g : S(0); });
  return ste_backward(x, upstream, clip);
}

template <typename S>
void xavier_uniform(Mat<S>& w, double fan_in, double fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<S>(rng.uniform(-limit, limit));
}

// Valid 1-D cross-correlation, no bias. Weight row t * in_ch + c, column = filter.
template <typename S>
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(std::size_t kernel, std::size_t in_ch, std::size_t out_ch, bool clip, std::string name)
      : k_(kernel), in_(in_ch), out_(out_ch),
        w_(std::move(name), static_cast<Eigen::Index>(kernel * in_ch), static_cast<Eigen::Index>(out_ch), clip) {}

  std::size_t kernel() const noexcept { return k_; }
  std::size_t in_channels() const noexcept { return in_; }
  std::size_t out_channels() const noexcept { return out_; }
  Param<S>& weights() noexcept { return w_; }
  const Param<S>& weights() const noexcept { return w_; }

  void init(Rng& rng) { xavier_uniform(w_.value, double(k_ * in_), double(k_ * out_), rng); }

  // x: (batch * length) x in_ch. Returns (batch * (length - k + 1)) x out_ch.
  Mat<S> forward(const Mat<S>& x, std::size_t batch, Mode mode) {
    require(static_cast<std::size_t>(x.cols()) == in_ && batch > 0 && x.rows() % batch == 0,
            Errc::ShapeMismatch, "conv input shape");
    len_ = static_cast<std::size_t>(x.rows()) / batch;
    require(len_ >= k_, Errc::ShapeMismatch, "conv input shorter than kernel");
    batch_ = batch;
    const std::size_t lout = len_ - k_ + 1;
    const std::size_t span = k_ * in_;
    xcol_.resize(static_cast<Eigen::Index>(batch * lout), static_cast<Eigen::Index>(span));
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t l = 0; l < lout; ++l) {
        std::memcpy(xcol_.data() + (b * lout + l) * span, x.data() + (b * len_ + l) * in_, span * sizeof(S));
      }
    }
    wq_ = quantize_weights(w_.value, mode);
    return xcol_ * wq_;
  }

  Mat<S> infer(const Mat<S>& x, std::size_t batch, Mode mode) const {
    Conv1d copy(k_, in_, out_, false, "");
    copy.w_.value = w_.value;
    return copy.forward(x, batch, mode);
  }

  // Accumulates the weight gradient; returns dL/dx when need_dx.
  Mat<S> backward(const Mat<S>& dy, Mode mode, bool need_dx) {
    const Mat<S> dwq = xcol_.transpose() * dy;
    w_.grad += weight_grad(w_.value, dwq, mode);
    if (!need_dx) return {};
    const Mat<S> dcol = dy * wq_.transpose();
    const std::size_t lout = len_ - k_ + 1;
    const std::size_t span = k_ * in_;
    Mat<S> dx = Mat<S>::Zero(static_cast<Eigen::Index>(batch_ * len_), static_cast<Eigen::Index>(in_));
    for (std::size_t b = 0; b < batch_; ++b) {
      for (std::size_t l = 0; l < lout; ++l) {
        S* dst = dx.data() + (b * len_ + l) * in_;
        const S* src = dcol.data() + (b * lout + l) * span;
        for (std::size_t i = 0; i < span; ++i) dst[i] += src[i];
      }
    }
    return dx;
  }

 private:
  std::size_t k_ = 0, in_ = 0, out_ = 0;
  Param<S> w_;
  std::size_t len_ = 0, batch_ = 0;
  Mat<S> xcol_, wq_;
};

// Non-overlapping max over windows of `width` positions; the remainder is dropped.
template <typename S>
class MaxPool1d {
 public:
  explicit MaxPool1d(std::size_t width = 1) : width_(width) {
    require(width >= 1, Errc::InvalidArgument, "pool width must be >= 1");
  }
  std::size_t width() const noexcept { return width_; }

  Mat<S> forward(const Mat<S>& x, std::size_t batch) {
    const std::size_t len = static_cast<std::size_t>(x.rows()) / batch;
    const std::size_t lout = len / width_;
    const auto ch = static_cast<std::size_t>(x.cols());
    in_rows_ = x.rows();
    Mat<S> y(static_cast<Eigen::Index>(batch * lout), x.cols());
    argmax_.assign(batch * lout * ch, 0);
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t p = 0; p < lout; ++p) {
        const std::size_t base = b * len + p * width_;
        for (std::size_t c = 0; c < ch; ++c) {
          std::size_t best = base;
          S m = x(static_cast<Eigen::Index>(base), static_cast<Eigen::Index>(c));
          for (std::size_t t = 1; t < width_; ++t) {
            const S v = x(static_cast<Eigen::Index>(base + t), static_cast<Eigen::Index>(c));
            if (v > m) {
              m = v;
              best = base + t;
            }
          }
          const std::size_t row = b * lout + p;
          y(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c)) = m;
          argmax_[row * ch + c] = best;
        }
      }
    }
    return y;
  }

  Mat<S> infer(const Mat<S>& x, std::size_t batch) const {
    MaxPool1d copy(width_);
    return copy.forward(x, batch);
  }

  Mat<S> backward(const Mat<S>& dy) const {
    Mat<S> dx = Mat<S>::Zero(in_rows_, dy.cols());
    const auto ch = static_cast<std::size_t>(dy.cols());
    for (Eigen::Index r = 0; r < dy.rows(); ++r) {
      for (std::size_t c = 0; c < ch; ++c) {
        dx(static_cast<Eigen::Index>(argmax_[static_cast<std::size_t>(r) * ch + c]), static_cast<Eigen::Index>(c)) +=
            dy(r, static_cast<Eigen::Index>(c));
      }
    }
    return dx;
  }

 private:
  std::size_t width_;
  Eigen::Index in_rows_ = 0;
  std::vector<std::size_t> argmax_;
};

// Per-channel batch normalization; each row of the input is one observation.
template <typename S>
class BatchNorm {
 public:
  BatchNorm() = default;
  BatchNorm(std::size_t channels, double momentum, double epsilon, std::string name)
      : gamma_(name + ".gamma", 1, static_cast<Eigen::Index>(channels), false),
        beta_(name + ".beta", 1, static_cast<Eigen::Index>(channels), false),
        running_mean_(RowVec<S>::Zero(static_cast<Eigen::Index>(channels))),
        running_var_(RowVec<S>::Ones(static_cast<Eigen::Index>(channels))),
        momentum_(momentum), epsilon_(epsilon) {
    gamma_.value.setOnes();
  }

  std::size_t channels() const noexcept { return static_cast<std::size_t>(gamma_.value.cols()); }
  Param<S>& gamma() noexcept { return gamma_; }
  Param<S>& beta() noexcept { return beta_; }
  const Param<S>& gamma() const noexcept { return gamma_; }
  const Param<S>& beta() const noexcept { return beta_; }
  RowVec<S>& running_mean() noexcept { return running_mean_; }
  RowVec<S>& running_var() noexcept { return running_var_; }
  const RowVec<S>& running_mean() const noexcept { return running_mean_; }
  const RowVec<S>& running_var() const noexcept { return running_var_; }
  double momentum() const noexcept { return momentum_; }
  double epsilon() const noexcept { return epsilon_; }
  bool has_running_stats() const noexcept { return has_stats_; }
  void mark_running_stats(bool v = true) noexcept { has_stats_ = v; }

  // Eval-mode multiplier gamma / sqrt(var + eps), computed the same way
  // everywhere that folds or applies it.
  RowVec<S> eval_scale() const {
    RowVec<S> s(gamma_.value.cols());
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      s(c) = gamma_.value(0, c) / std::sqrt(running_var_(c) + static_cast<S>(epsilon_));
    }
    return s;
  }

  // Eval mode: (x - running_mean) * eval_scale + beta.
  Mat<S> infer(const Mat<S>& x) const {
    require(static_cast<std::size_t>(x.cols()) == channels(), Errc::ShapeMismatch, "batchnorm channel count");
    const RowVec<S> scale = eval_scale();
    Mat<S> y(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        y(r, c) = (x(r, c) - running_mean_(c)) * scale(c) + beta_.value(0, c);
      }
    }
    return y;
  }

  Mat<S> forward(const Mat<S>& x, bool training, std::size_t batch) {
    if (!training) return infer(x);
    require(static_cast<std::size_t>(x.cols()) == channels(), Errc::ShapeMismatch, "batchnorm channel count");
    require(batch >= 2, Errc::DegenerateBatch, "training batch norm needs at least 2 samples");
    const auto n = static_cast<S>(x.rows());
    const RowVec<S> mean = x.colwise().sum() / n;
    const Mat<S> centered = x.rowwise() - mean;
    const RowVec<S> var = centered.cwiseProduct(centered).colwise().sum() / n;
    inv_std_ = (var.array() + static_cast<S>(epsilon_)).rsqrt().matrix();
    xhat_ = centered.array().rowwise() * inv_std_.array();
    const auto m = static_cast<S>(momentum_);
    running_mean_ = (S(1) - m) * running_mean_ + m * mean;
    running_var_ = (S(1) - m) * running_var_ + m * var;
    has_stats_ = true;
    return (xhat_.array().rowwise() * gamma_.value.row(0).array()).rowwise() + beta_.value.row(0).array();
  }

  Mat<S> backward(const Mat<S>& dy) {
    const auto n = static_cast<S>(dy.rows());
    gamma_.grad.row(0) += dy.cwiseProduct(xhat_).colwise().sum();
    beta_.grad.row(0) += dy.colwise().sum();
    const Mat<S> dxhat = dy.array().rowwise() * gamma_.value.row(0).array();
    const RowVec<S> sum_dxhat = dxhat.colwise().sum();
    const RowVec<S> sum_dxhat_xhat = dxhat.cwiseProduct(xhat_).colwise().sum();
    Mat<S> dx = (n * dxhat).rowwise() - sum_dxhat;
    dx -= (xhat_.array().rowwise() * sum_dxhat_xhat.array()).matrix();
    dx = dx.array().rowwise() * (inv_std_.array() / n);
    return dx;
  }

 private:
  Param<S> gamma_, beta_;
  RowVec<S> running_mean_, running_var_;
  double momentum_ = 0.1, epsilon_ = 1e-5;
  bool has_stats_ = false;
  RowVec<S> inv_std_;
  Mat<S> xhat_;
};

// Fully connected, no bias.
template <typename S>
class Dense {
 public:
  Dense() = default;
  Dense(std::size_t in, std::size_t out, bool clip, std::string name)
      : w_(std::move(name), static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out), clip) {}

  std::size_t in_features() const noexcept { return static_cast<std::size_t>(w_.value.rows()); }
  std::size_t out_features() const noexcept { return static_cast<std::size_t>(w_.value.cols()); }
  Param<S>& weights() noexcept { return w_; }
  const Param<S>& weights() const noexcept { return w_; }

  void init(Rng& rng) { xavier_uniform(w_.value, double(in_features()), double(out_features()), rng); }

  Mat<S> forward(const Mat<S>& x, Mode mode) {
    require(static_cast<std::size_t>(x.cols()) == in_features(), Errc::ShapeMismatch, "dense input width");
    x_ = x;
    wq_ = quantize_weights(w_.value, mode);
    return x * wq_;
  }

  Mat<S> infer(const Mat<S>& x, Mode mode) const {
    require(static_cast<std::size_t>(x.cols()) == in_features(), Errc::ShapeMismatch, "dense input width");
    return x * quantize_weights(w_.value, mode);
  }

  Mat<S> backward(const Mat<S>& dy, Mode mode) {
    w_.grad += weight_grad(w_.value, Mat<S>(x_.transpose() * dy), mode);
    return dy * wq_.transpose();
  }

 private:
  Param<S> w_;
  Mat<S> x_, wq_;
};

// Free-function forms of the layer kernels for single inputs.
template <typename S>
Mat<S> conv1d_forward(const Mat<S>& input, const Mat<S>& weights, std::size_t kernel, bool binarize) {
  require(weights.rows() == static_cast<Eigen::Index>(kernel) * input.cols(), Errc::ShapeMismatch,
          "conv weights do not match kernel x in_channels");
  Conv1d<S> conv(kernel, static_cast<std::size_t>(input.cols()), static_cast<std::size_t>(weights.cols()), false, "w");
  conv.weights().value = weights;
  return conv.forward(input, 1, binarize ? Mode::Binarized : Mode::Real);
}

template <typename S>
Mat<S> maxpool1d(const Mat<S>& input, std::size_t width) {
  MaxPool1d<S> pool(width);
  return pool.forward(input, 1);
}

}  // namespace hdbnn::bnn
