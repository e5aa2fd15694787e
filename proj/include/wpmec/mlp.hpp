#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wpmec/quantizer.hpp"
#include "wpmec/rng.hpp"

#include <json.hpp>

namespace wpmec {

// Training sample: scaled channel vector and the binary action chosen for it.
struct ReplaySample {
  std::vector<double> h_scaled;
  std::vector<std::uint8_t> label;
};

// Fixed-capacity ring; once full, each push overwrites the oldest entry.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity = 1024) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("ReplayMemory: capacity must be positive");
  }

  void push(std::vector<double> h_scaled, std::vector<std::uint8_t> label) {
    if (buffer_.size() < capacity_) {
      buffer_.push_back({std::move(h_scaled), std::move(label)});
    } else {
      buffer_[cursor_] = {std::move(h_scaled), std::move(label)};
    }
    cursor_ = (cursor_ + 1) % capacity_;
  }

  std::size_t size() const { return buffer_.size(); }
  std::size_t capacity() const { return capacity_; }
  const ReplaySample& at(std::size_t i) const { return buffer_[i]; }

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<ReplaySample> buffer_;
};

struct TrainConfig {
  std::size_t batch_size = 128;
  std::size_t train_interval = 10;  // train every this many frames
  double input_scale = 1e6;         // gain multiplier in front of the network

  void validate(std::size_t memory_capacity) const {
    if (batch_size == 0 || batch_size > memory_capacity)
      throw std::invalid_argument("TrainConfig: batch_size outside [1, memory capacity]");
    if (train_interval < 1) throw std::invalid_argument("TrainConfig: train_interval must be >= 1");
    if (!(input_scale > 0.0)) throw std::invalid_argument("TrainConfig: input_scale must be positive");
  }
};

// Fully connected policy network with ReLU hidden layers and a sigmoid output
// head, trained by Adam on the averaged cross-entropy between its relaxed
// output and the stored best actions.
struct PolicyNet {
  std::vector<std::size_t> layer_dims;       // e.g. {N, 120, 80, N}
  std::vector<std::vector<double>> weights;  // weights[l]: dims[l+1] x dims[l], row-major
  std::vector<std::vector<double>> biases;
  std::vector<std::vector<double>> m_w, v_w, m_b, v_b;  // Adam moments
  std::uint64_t adam_step = 0;
  double learning_rate = 0.01;

  std::size_t layers() const { return layer_dims.empty() ? 0 : layer_dims.size() - 1; }
  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t output_dim() const { return layer_dims.back(); }
};

namespace nn_detail {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr double kProbClamp = 1e-12;  // keeps logs finite and outputs open-interval

inline double sigmoid(double z) {
  const double s = 1.0 / (1.0 + std::exp(-z));
  return std::min(1.0 - kProbClamp, std::max(kProbClamp, s));
}

// Activations of every layer for one input; scratch for backprop.
struct ForwardTrace {
  std::vector<std::vector<double>> act;  // act[0] = input, act.back() = output
};

inline void forward_into(const PolicyNet& net, const std::vector<double>& input,
                         ForwardTrace& trace) {
  const std::size_t layers = net.layers();
  trace.act.resize(layers + 1);
  trace.act[0] = input;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t rows = net.layer_dims[l + 1];
    const std::size_t cols = net.layer_dims[l];
    auto& out = trace.act[l + 1];
    out.assign(rows, 0.0);
    const auto& in = trace.act[l];
    const auto& w = net.weights[l];
    for (std::size_t r = 0; r < rows; ++r) {
      double z = net.biases[l][r];
      const double* row = w.data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) z += row[c] * in[c];
      out[r] = (l + 1 == layers) ? sigmoid(z) : std::max(z, 0.0);
    }
  }
}

}  // namespace nn_detail

// He-style initialization: weights ~ Normal(0, 2/fan_in), biases zero.
inline PolicyNet init_policy(const std::vector<std::size_t>& layer_dims, std::uint64_t seed) {
  if (layer_dims.size() < 2) throw std::invalid_argument("init_policy: need at least two layer dims");
  for (std::size_t d : layer_dims)
    if (d == 0) throw std::invalid_argument("init_policy: zero layer width");

  PolicyNet net;
  net.layer_dims = layer_dims;
  const std::size_t layers = net.layers();
  net.weights.resize(layers);
  net.biases.resize(layers);
  net.m_w.resize(layers);
  net.v_w.resize(layers);
  net.m_b.resize(layers);
  net.v_b.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t rows = layer_dims[l + 1];
    const std::size_t cols = layer_dims[l];
    const double sigma = std::sqrt(2.0 / static_cast<double>(cols));
    net.weights[l].resize(rows * cols);
    for (std::size_t j = 0; j < rows * cols; ++j)
      net.weights[l][j] = sigma * rng::normal(seed, rng::kNetInit, l, j);
    net.biases[l].assign(rows, 0.0);
    net.m_w[l].assign(rows * cols, 0.0);
    net.v_w[l].assign(rows * cols, 0.0);
    net.m_b[l].assign(rows, 0.0);
    net.v_b[l].assign(rows, 0.0);
  }
  return net;
}

inline RelaxedAction forward(const PolicyNet& net, const std::vector<double>& h_scaled) {
  if (h_scaled.size() != net.input_dim())
    throw std::invalid_argument("forward: input length mismatch");
  thread_local nn_detail::ForwardTrace trace;
  nn_detail::forward_into(net, h_scaled, trace);
  return RelaxedAction{trace.act.back()};
}

// Averaged cross-entropy over the batch, natural-log convention: the inner
// products run over devices, the mean over samples only.
inline double loss(const PolicyNet& net, const std::vector<ReplaySample>& batch) {
  if (batch.empty()) throw std::invalid_argument("loss: empty batch");
  thread_local nn_detail::ForwardTrace trace;
  double total = 0.0;
  for (const ReplaySample& s : batch) {
    nn_detail::forward_into(net, s.h_scaled, trace);
    const auto& out = trace.act.back();
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double p = out[i];
      total -= s.label[i] ? std::log(p) : std::log(1.0 - p);
    }
  }
  return total / static_cast<double>(batch.size());
}

// Parameter gradients of the batch loss, laid out like the net itself.
struct PolicyGradients {
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> b;
  double loss = 0.0;
};

inline PolicyGradients compute_gradients(const PolicyNet& net,
                                         const std::vector<ReplaySample>& batch) {
  if (batch.empty()) throw std::invalid_argument("compute_gradients: empty batch");
  const std::size_t layers = net.layers();
  PolicyGradients g;
  g.w.resize(layers);
  g.b.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    g.w[l].assign(net.weights[l].size(), 0.0);
    g.b[l].assign(net.biases[l].size(), 0.0);
  }

  thread_local nn_detail::ForwardTrace trace;
  std::vector<double> delta, delta_prev;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  for (const ReplaySample& s : batch) {
    nn_detail::forward_into(net, s.h_scaled, trace);
    const auto& out = trace.act.back();
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double p = out[i];
      g.loss -= (s.label[i] ? std::log(p) : std::log(1.0 - p)) * inv_batch;
    }

    // sigmoid + cross-entropy collapses to (p - y) at the output pre-activation
    delta.resize(out.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      delta[i] = (out[i] - static_cast<double>(s.label[i])) * inv_batch;

    for (std::size_t l = layers; l-- > 0;) {
      const std::size_t rows = net.layer_dims[l + 1];
      const std::size_t cols = net.layer_dims[l];
      const auto& in = trace.act[l];
      for (std::size_t r = 0; r < rows; ++r) {
        const double d = delta[r];
        g.b[l][r] += d;
        double* grow = g.w[l].data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) grow[c] += d * in[c];
      }
      if (l == 0) break;
      delta_prev.assign(cols, 0.0);
      const auto& w = net.weights[l];
      for (std::size_t r = 0; r < rows; ++r) {
        const double d = delta[r];
        const double* row = w.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) delta_prev[c] += d * row[c];
      }
      // ReLU gate of the layer below
      for (std::size_t c = 0; c < cols; ++c)
        if (in[c] <= 0.0) delta_prev[c] = 0.0;
      std::swap(delta, delta_prev);
    }
  }
  return g;
}

namespace nn_detail {

inline void adam_update(std::vector<double>& theta, std::vector<double>& m,
                        std::vector<double>& v, const std::vector<double>& grad,
                        double lr, double bc1, double bc2) {
  for (std::size_t j = 0; j < theta.size(); ++j) {
    m[j] = kAdamBeta1 * m[j] + (1.0 - kAdamBeta1) * grad[j];
    v[j] = kAdamBeta2 * v[j] + (1.0 - kAdamBeta2) * grad[j] * grad[j];
    theta[j] -= lr * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + kAdamEps);
  }
}

}  // namespace nn_detail

// One Adam step on a uniformly-with-replacement sampled batch. Returns the
// pre-update loss, or nothing when the memory cannot fill a batch yet.
inline std::optional<double> train_step(PolicyNet& net, const ReplayMemory& memory,
                                        const TrainConfig& cfg, std::uint64_t seed) {
  if (memory.size() < cfg.batch_size) return std::nullopt;

  std::vector<ReplaySample> batch(cfg.batch_size);
  for (std::size_t j = 0; j < cfg.batch_size; ++j) {
    const double u = rng::uniform(seed, rng::kReplay, net.adam_step, j);
    const auto idx = std::min(memory.size() - 1,
                              static_cast<std::size_t>(u * static_cast<double>(memory.size())));
    batch[j] = memory.at(idx);
  }

  const PolicyGradients g = compute_gradients(net, batch);
  net.adam_step += 1;
  const double bc1 = 1.0 - std::pow(nn_detail::kAdamBeta1, static_cast<double>(net.adam_step));
  const double bc2 = 1.0 - std::pow(nn_detail::kAdamBeta2, static_cast<double>(net.adam_step));
  for (std::size_t l = 0; l < net.layers(); ++l) {
    nn_detail::adam_update(net.weights[l], net.m_w[l], net.v_w[l], g.w[l], net.learning_rate, bc1, bc2);
    nn_detail::adam_update(net.biases[l], net.m_b[l], net.v_b[l], g.b[l], net.learning_rate, bc1, bc2);
  }
  return g.loss;
}

// Snapshot round-trip; doubles survive exactly through the JSON encoding.
inline nlohmann::json policy_to_json(const PolicyNet& net) {
  return nlohmann::json{
      {"layer_dims", net.layer_dims}, {"weights", net.weights}, {"biases", net.biases},
      {"m_w", net.m_w},               {"v_w", net.v_w},         {"m_b", net.m_b},
      {"v_b", net.v_b},               {"adam_step", net.adam_step},
      {"learning_rate", net.learning_rate}};
}

inline PolicyNet policy_from_json(const nlohmann::json& j) {
  PolicyNet net;
  net.layer_dims = j.at("layer_dims").get<std::vector<std::size_t>>();
  net.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  net.biases = j.at("biases").get<std::vector<std::vector<double>>>();
  net.m_w = j.at("m_w").get<std::vector<std::vector<double>>>();
  net.v_w = j.at("v_w").get<std::vector<std::vector<double>>>();
  net.m_b = j.at("m_b").get<std::vector<std::vector<double>>>();
  net.v_b = j.at("v_b").get<std::vector<std::vector<double>>>();
  net.adam_step = j.at("adam_step").get<std::uint64_t>();
  net.learning_rate = j.at("learning_rate").get<double>();
  return net;
}

}  // namespace wpmec
