#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedloc/error.hpp"
#include "fedloc/rng.hpp"

namespace fedloc {

// Dense feed-forward regression network: ReLU hidden layers, linear output,
// two output coordinates (a position estimate in meters).
struct MlpArch {
  int input_dim = 520;
  std::vector<int> hidden_dims = {20, 10, 10, 10};
  int output_dim = 2;

  friend bool operator==(const MlpArch&, const MlpArch&) = default;

  int num_layers() const { return static_cast<int>(hidden_dims.size()) + 1; }

  // Dimension chain: input, hidden..., output.
  std::vector<int> dims() const {
    std::vector<int> d;
    d.reserve(hidden_dims.size() + 2);
    d.push_back(input_dim);
    d.insert(d.end(), hidden_dims.begin(), hidden_dims.end());
    d.push_back(output_dim);
    return d;
  }

  std::size_t param_count() const {
    std::size_t n = 0;
    const auto d = dims();
    for (std::size_t l = 0; l + 1 < d.size(); ++l) {
      n += static_cast<std::size_t>(d[l]) * d[l + 1] + d[l + 1];
    }
    return n;
  }

  void validate() const {
    if (input_dim < 1) throw InvalidInputError("MlpArch: input_dim must be >= 1");
    if (output_dim != 2) throw InvalidInputError("MlpArch: output_dim must be 2");
    for (int h : hidden_dims) {
      if (h < 1) throw InvalidInputError("MlpArch: hidden dims must be >= 1");
    }
  }
};

namespace detail {

struct LayerShape {
  std::size_t w_offset;  // start of the row-major (out x in) weight block
  std::size_t b_offset;  // start of the bias block
  int in;
  int out;
};

inline LayerShape layer_shape(const MlpArch& arch, int layer) {
  const auto d = arch.dims();
  std::size_t off = 0;
  for (int l = 0; l < layer; ++l) {
    off += static_cast<std::size_t>(d[l]) * d[l + 1] + d[l + 1];
  }
  const std::size_t w = static_cast<std::size_t>(d[layer]) * d[layer + 1];
  return {off, off + w, d[layer], d[layer + 1]};
}

inline double dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline void axpy(double* y, const double* x, double a, int n) {
  for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

template <typename Vec>
std::span<double> weight_span(const MlpArch& arch, Vec& flat, int layer) {
  const auto s = layer_shape(arch, layer);
  return {flat.data() + s.w_offset, static_cast<std::size_t>(s.in) * s.out};
}

template <typename Vec>
std::span<const double> weight_span(const MlpArch& arch, const Vec& flat, int layer) {
  const auto s = layer_shape(arch, layer);
  return {flat.data() + s.w_offset, static_cast<std::size_t>(s.in) * s.out};
}

template <typename Vec>
std::span<double> bias_span(const MlpArch& arch, Vec& flat, int layer) {
  const auto s = layer_shape(arch, layer);
  return {flat.data() + s.b_offset, static_cast<std::size_t>(s.out)};
}

template <typename Vec>
std::span<const double> bias_span(const MlpArch& arch, const Vec& flat, int layer) {
  const auto s = layer_shape(arch, layer);
  return {flat.data() + s.b_offset, static_cast<std::size_t>(s.out)};
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace detail

// Flat parameter block. Layout per layer: weight matrix row-major
// (out x in), then bias vector. This layout is also the wire layout.
struct ModelWeights {
  MlpArch arch;
  std::vector<double> params;

  std::span<double> layer_w(int l) { return detail::weight_span(arch, params, l); }
  std::span<const double> layer_w(int l) const { return detail::weight_span(arch, params, l); }
  std::span<double> layer_b(int l) { return detail::bias_span(arch, params, l); }
  std::span<const double> layer_b(int l) const { return detail::bias_span(arch, params, l); }

  bool finite() const { return detail::all_finite(params); }
};

// Same shape as the model it was computed from, one value per parameter.
struct Gradients {
  MlpArch arch;
  std::vector<double> values;
};

inline ModelWeights zero_weights(const MlpArch& arch) {
  arch.validate();
  return {arch, std::vector<double>(arch.param_count(), 0.0)};
}

// Uniform(-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))) weights,
// zero biases. Entries are drawn in storage order, so a fixed seed gives a
// fixed model.
inline ModelWeights init_weights(const MlpArch& arch, std::uint64_t seed) {
  ModelWeights model = zero_weights(arch);
  Rng rng(seed);
  for (int l = 0; l < arch.num_layers(); ++l) {
    const auto s = detail::layer_shape(arch, l);
    const double bound = std::sqrt(6.0 / (s.in + s.out));
    auto w = model.layer_w(l);
    for (double& x : w) x = rng.uniform(-bound, bound);
  }
  return model;
}

// Single input -> 2-D output. Thread-safe: scratch space is thread_local.
inline std::array<double, 2> forward(const ModelWeights& model, std::span<const double> input) {
  const MlpArch& arch = model.arch;
  if (static_cast<int>(input.size()) != arch.input_dim) {
    throw InvalidInputError("forward: input length " + std::to_string(input.size()) +
                            " does not match input_dim " + std::to_string(arch.input_dim));
  }
  thread_local std::vector<double> buf_a, buf_b;
  const double* cur = input.data();
  double* out = nullptr;
  const int layers = arch.num_layers();
  for (int l = 0; l < layers; ++l) {
    const auto s = detail::layer_shape(arch, l);
    const double* w = model.params.data() + s.w_offset;
    const double* b = model.params.data() + s.b_offset;
    std::vector<double>& dst = (l % 2 == 0) ? buf_a : buf_b;
    dst.resize(s.out);
    out = dst.data();
    for (int o = 0; o < s.out; ++o) {
      out[o] = b[o] + detail::dot(w + static_cast<std::size_t>(o) * s.in, cur, s.in);
    }
    if (l + 1 < layers) {
      for (int o = 0; o < s.out; ++o) out[o] = out[o] > 0.0 ? out[o] : 0.0;
    }
    cur = out;
  }
  return {out[0], out[1]};
}

// Mean absolute error over all samples and both coordinates. Rows are
// (x, y) pairs packed flat, so predictions.size() == 2 * sample count.
inline double loss_mae(std::span<const double> predictions, std::span<const double> labels) {
  if (predictions.empty()) throw InvalidInputError("loss_mae: empty input");
  if (predictions.size() != labels.size() || predictions.size() % 2 != 0) {
    throw InvalidInputError("loss_mae: prediction/label size mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    sum += std::abs(predictions[i] - labels[i]);
  }
  return sum / static_cast<double>(predictions.size());
}

// Reusable buffers for batched forward/backward passes.
struct BatchWorkspace {
  std::vector<int> dims;
  std::vector<std::vector<double>> acts;    // acts[l]: output of layer l, batch x dims[l+1]
  std::vector<std::vector<double>> deltas;  // same shapes as acts

  void prepare(const MlpArch& arch, int batch) {
    dims = arch.dims();
    const std::size_t layers = dims.size() - 1;
    acts.resize(layers);
    deltas.resize(layers);
    for (std::size_t l = 0; l < layers; ++l) {
      acts[l].resize(static_cast<std::size_t>(batch) * dims[l + 1]);
      deltas[l].resize(static_cast<std::size_t>(batch) * dims[l + 1]);
    }
  }
};

// Analytic gradient of the batch-mean MAE loss. Subgradient 0 both at the
// |.| kink and at ReLU(0). Returns the loss; gradients land in `grads`.
inline double backward_into(const ModelWeights& model, std::span<const double> inputs,
                            std::span<const double> labels, Gradients& grads,
                            BatchWorkspace& ws) {
  const MlpArch& arch = model.arch;
  if (labels.empty() || labels.size() % 2 != 0) {
    throw InvalidInputError("backward: labels must be a nonempty batch of (x, y) pairs");
  }
  const int batch = static_cast<int>(labels.size() / 2);
  if (inputs.size() != static_cast<std::size_t>(batch) * arch.input_dim) {
    throw InvalidInputError("backward: input size does not match batch * input_dim");
  }
  ws.prepare(arch, batch);
  const int layers = arch.num_layers();

  for (int l = 0; l < layers; ++l) {
    const auto s = detail::layer_shape(arch, l);
    const double* w = model.params.data() + s.w_offset;
    const double* b = model.params.data() + s.b_offset;
    const double* prev = (l == 0) ? inputs.data() : ws.acts[l - 1].data();
    double* out = ws.acts[l].data();
    const bool relu = l + 1 < layers;
    for (int smp = 0; smp < batch; ++smp) {
      const double* x = prev + static_cast<std::size_t>(smp) * s.in;
      double* y = out + static_cast<std::size_t>(smp) * s.out;
      for (int o = 0; o < s.out; ++o) {
        double v = b[o] + detail::dot(w + static_cast<std::size_t>(o) * s.in, x, s.in);
        y[o] = (relu && v < 0.0) ? 0.0 : v;
      }
    }
  }

  // Loss and top delta: d(mean |e|)/d yhat = sign(e) / (2 * batch).
  const double inv = 1.0 / (2.0 * batch);
  const double* yhat = ws.acts[layers - 1].data();
  double* dtop = ws.deltas[layers - 1].data();
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double e = yhat[i] - labels[i];
    abs_sum += std::abs(e);
    dtop[i] = (e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0)) * inv;
  }

  grads.arch = arch;
  grads.values.assign(model.params.size(), 0.0);

  for (int l = layers - 1; l >= 0; --l) {
    const auto s = detail::layer_shape(arch, l);
    const double* prev = (l == 0) ? inputs.data() : ws.acts[l - 1].data();
    const double* delta = ws.deltas[l].data();
    double* dw = grads.values.data() + s.w_offset;
    double* db = grads.values.data() + s.b_offset;
    for (int smp = 0; smp < batch; ++smp) {
      const double* d = delta + static_cast<std::size_t>(smp) * s.out;
      const double* a = prev + static_cast<std::size_t>(smp) * s.in;
      for (int o = 0; o < s.out; ++o) {
        if (d[o] != 0.0) {
          detail::axpy(dw + static_cast<std::size_t>(o) * s.in, a, d[o], s.in);
          db[o] += d[o];
        }
      }
    }
    if (l > 0) {
      const double* w = model.params.data() + s.w_offset;
      double* dprev = ws.deltas[l - 1].data();
      for (int smp = 0; smp < batch; ++smp) {
        double* dp = dprev + static_cast<std::size_t>(smp) * s.in;
        const double* d = delta + static_cast<std::size_t>(smp) * s.out;
        for (int i = 0; i < s.in; ++i) dp[i] = 0.0;
        for (int o = 0; o < s.out; ++o) {
          if (d[o] != 0.0) detail::axpy(dp, w + static_cast<std::size_t>(o) * s.in, d[o], s.in);
        }
        const double* a = prev + static_cast<std::size_t>(smp) * s.in;
        for (int i = 0; i < s.in; ++i) {
          if (a[i] <= 0.0) dp[i] = 0.0;  // ReLU subgradient, 0 at the kink
        }
      }
    }
  }
  return abs_sum * inv;
}

inline std::pair<Gradients, double> backward(const ModelWeights& model,
                                             std::span<const double> inputs,
                                             std::span<const double> labels) {
  Gradients g;
  BatchWorkspace ws;
  const double loss = backward_into(model, inputs, labels, g, ws);
  return {std::move(g), loss};
}

}  // namespace fedloc
