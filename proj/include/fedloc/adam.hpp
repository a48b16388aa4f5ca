#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "fedloc/error.hpp"
#include "fedloc/mlp.hpp"

namespace fedloc {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.1;
  double beta2 = 0.99;
  double epsilon = 1e-8;

  void validate() const {
    if (!(learning_rate > 0.0)) throw InvalidInputError("AdamConfig: learning_rate must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw InvalidInputError("AdamConfig: beta1 must be in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw InvalidInputError("AdamConfig: beta2 must be in [0, 1)");
    if (!(epsilon > 0.0)) throw InvalidInputError("AdamConfig: epsilon must be > 0");
  }
};

// First/second moment accumulators plus the step counter.
struct AdamState {
  MlpArch arch;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;
};

inline AdamState adam_init(const ModelWeights& model) {
  return {model.arch, std::vector<double>(model.params.size(), 0.0),
          std::vector<double>(model.params.size(), 0.0), 0};
}

// One bias-corrected update:
//   m <- b1*m + (1-b1)*g        v <- b2*v + (1-b2)*g^2
//   w <- w - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
inline void adam_step_inplace(AdamState& state, ModelWeights& model, const Gradients& grads,
                              const AdamConfig& cfg) {
  if (grads.values.size() != model.params.size() || state.m.size() != model.params.size()) {
    throw InvalidInputError("adam_step: state/model/gradient shapes disagree");
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  double* w = model.params.data();
  double* m = state.m.data();
  double* v = state.v.data();
  const double* g = grads.values.data();
  const std::size_t n = model.params.size();
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    w[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

// Value-returning form of the same update.
inline std::pair<ModelWeights, AdamState> adam_step(AdamState state, ModelWeights model,
                                                    const Gradients& grads,
                                                    const AdamConfig& cfg) {
  adam_step_inplace(state, model, grads, cfg);
  return {std::move(model), std::move(state)};
}

}  // namespace fedloc
