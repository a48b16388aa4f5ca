#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "fedloc/adam.hpp"
#include "fedloc/dataset.hpp"
#include "fedloc/mlp.hpp"
#include "fedloc/rng.hpp"

namespace fedloc {

struct TrainConfig {
  AdamConfig adam;
  int batch_size = 100;
  int epochs_per_round = 10;
  std::uint64_t train_seed = 0;  // base seed; shuffles derive from (seed, stream, round)

  void validate() const {
    adam.validate();
    if (batch_size < 1) throw InvalidInputError("TrainConfig: batch_size must be >= 1");
    if (epochs_per_round < 0) throw InvalidInputError("TrainConfig: epochs_per_round must be >= 0");
  }
};

// Runs epochs x ceil(|shard|/batch) Adam steps on shuffled mini-batches of
// the given rows, starting from a fresh optimizer state. The shuffle order
// is fully determined by shuffle_seed.
inline ModelWeights train_epochs(ModelWeights model, const Dataset& data,
                                 std::span<const std::uint32_t> shard, const TrainConfig& cfg,
                                 std::uint64_t shuffle_seed) {
  if (shard.empty()) throw InvalidInputError("train_epochs: empty shard");
  cfg.validate();

  AdamState state = adam_init(model);
  Rng rng(shuffle_seed);
  std::vector<std::uint32_t> order(shard.begin(), shard.end());

  const std::size_t k = data.k;
  const int batch = cfg.batch_size;
  const double inv_scale = 1.0 / data.label_scale;
  std::vector<double> bx(static_cast<std::size_t>(batch) * k);
  std::vector<double> by(static_cast<std::size_t>(batch) * 2);
  Gradients grads;
  BatchWorkspace ws;

  for (int epoch = 0; epoch < cfg.epochs_per_round; ++epoch) {
    rng.shuffle(order);
    for (std::size_t pos = 0; pos < order.size(); pos += batch) {
      const std::size_t count = std::min<std::size_t>(batch, order.size() - pos);
      for (std::size_t s = 0; s < count; ++s) {
        const std::uint32_t row = order[pos + s];
        std::copy_n(data.features.data() + row * k, k, bx.data() + s * k);
        by[s * 2] = data.labels[row * 2] * inv_scale;
        by[s * 2 + 1] = data.labels[row * 2 + 1] * inv_scale;
      }
      backward_into(model, {bx.data(), count * k}, {by.data(), count * 2}, grads, ws);
      adam_step_inplace(state, model, grads, cfg.adam);
    }
  }
  return model;
}

}  // namespace fedloc
