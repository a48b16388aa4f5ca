#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedloc/fed.hpp"

namespace fedloc {

enum class Scenario { S1, S2, S3 };

inline const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::S1: return "S-1";
    case Scenario::S2: return "S-2";
    case Scenario::S3: return "S-3";
  }
  return "?";
}

// The three heterogeneity regimes:
//   S1: fixed 3000-sample server pool; each user adds 500 samples per
//       round; the centralized arm is the server pool alone and its
//       reported columns are a constant baseline.
//   S2: 1000 uniformly drawn samples per user; the centralized arm pools
//       exactly the same user data.
//   S3: Gaussian share sizes (mean 1000, std 500) over exclusive x-ranges;
//       centralized arm pools the same data.
struct ScenarioConfig {
  Scenario scenario = Scenario::S2;
  int n_users = 15;
  std::uint32_t rounds = 100;

  std::size_t s1_server_samples = 3000;
  std::size_t s1_per_user = 500;
  std::size_t s2_per_user = 1000;
  double s3_mean_samples = 1000.0;
  double s3_stddev = 500.0;

  std::uint64_t seed_partition = 2;
  std::uint64_t seed_init = 3;
  TrainConfig train;

  MlpArch arch;  // input_dim is overwritten with the dataset's k
  int threads = 0;
  EarlyStopConfig early_stop;
};

struct ScenarioResult {
  std::vector<RoundReport> reports;
  ModelWeights federated_model;
  ModelWeights centralized_model;
  Partition partition;
  std::vector<std::uint32_t> federated_pool;    // union of every trained share
  std::vector<std::uint32_t> centralized_pool;  // rows consumed by the centralized arm
};

// Centralized comparison arm: one model trained on a fixed pool, advanced
// by epochs_per_round every round so round counts line up with the
// federated runs. Its shuffle stream is the server stream (user id 0).
class CentralizedTrainer {
 public:
  CentralizedTrainer(const Dataset& data, std::vector<std::uint32_t> pool, const MlpArch& arch,
                     std::uint64_t seed_init, TrainConfig cfg)
      : data_(data), pool_(std::move(pool)), model_(init_weights(arch, seed_init)), cfg_(cfg) {
    if (pool_.empty()) throw InvalidInputError("CentralizedTrainer: empty pool");
  }

  ArmMetrics step(std::uint32_t round, const Dataset& test) {
    model_ = train_epochs(std::move(model_), data_, pool_, cfg_,
                          mix_seed(cfg_.train_seed, kServerUserId, round));
    return {localization_error(model_, test), localization_error(model_, data_, pool_)};
  }

  // Advances without evaluating; used when only the final state matters.
  void step_silent(std::uint32_t round) {
    model_ = train_epochs(std::move(model_), data_, pool_, cfg_,
                          mix_seed(cfg_.train_seed, kServerUserId, round));
  }

  const ModelWeights& model() const { return model_; }

 private:
  const Dataset& data_;
  std::vector<std::uint32_t> pool_;
  ModelWeights model_;
  TrainConfig cfg_;
};

// Per-coordinate MAE in meters, for comparison against the Euclidean
// localization figure.
inline double coordinate_mae(const ModelWeights& model, const Dataset& ds) {
  if (ds.size() == 0) throw InvalidInputError("coordinate_mae: empty evaluation set");
  double sum = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto yhat = forward(model, ds.feature_row(i));
    sum += std::abs(yhat[0] * ds.label_scale - ds.labels[i * 2]) +
           std::abs(yhat[1] * ds.label_scale - ds.labels[i * 2 + 1]);
  }
  return sum / static_cast<double>(2 * ds.size());
}

namespace detail {

inline std::vector<std::uint32_t> sorted_union(const Partition& p, bool include_server) {
  std::vector<std::uint32_t> all;
  if (include_server) all.insert(all.end(), p.server_share.begin(), p.server_share.end());
  for (const auto& s : p.user_shares) all.insert(all.end(), s.begin(), s.end());
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace detail

inline Partition make_partition(const ScenarioConfig& cfg, const Dataset& train) {
  switch (cfg.scenario) {
    case Scenario::S1:
      return partition_uniform(train, cfg.n_users, cfg.s1_per_user, cfg.s1_server_samples,
                               cfg.seed_partition);
    case Scenario::S2:
      return partition_uniform(train, cfg.n_users, cfg.s2_per_user, 0, cfg.seed_partition);
    case Scenario::S3:
      return partition_gaussian_spatial(train, cfg.n_users, cfg.s3_mean_samples, cfg.s3_stddev,
                                        cfg.seed_partition);
  }
  throw InvalidInputError("run_scenario: unknown scenario");
}

inline ScenarioResult run_scenario(ScenarioConfig cfg, const Dataset& train, const Dataset& test,
                                   const RoundObserver& observer = {}) {
  cfg.arch.input_dim = static_cast<int>(train.k);
  cfg.arch.validate();
  cfg.train.validate();

  ScenarioResult result;
  result.partition = make_partition(cfg, train);
  result.federated_pool = detail::sorted_union(result.partition, true);
  result.centralized_pool = cfg.scenario == Scenario::S1
                                ? result.partition.server_share
                                : detail::sorted_union(result.partition, false);

  InProcessExecutor executor(train, result.partition, cfg.train, cfg.threads);

  FedRunConfig run_cfg{cfg.arch, cfg.seed_init, cfg.rounds, cfg.early_stop};

  CentralizedTrainer arm(train, result.centralized_pool, cfg.arch, cfg.seed_init, cfg.train);
  CentralizedArm arm_fn;
  if (cfg.scenario == Scenario::S1) {
    // Constant baseline: the server-pool model trained through the full
    // round budget; every report row carries its final figures.
    for (std::uint32_t t = 1; t < cfg.rounds; ++t) arm.step_silent(t);
    const ArmMetrics final_metrics = arm.step(cfg.rounds, test);
    arm_fn = [final_metrics](std::uint32_t) { return final_metrics; };
  } else {
    arm_fn = [&arm, &test](std::uint32_t round) { return arm.step(round, test); };
  }

  FedRunResult fed = run_federated(executor, train, result.federated_pool, test, run_cfg, observer,
                                   arm_fn);
  result.reports = std::move(fed.reports);
  result.federated_model = std::move(fed.global);
  result.centralized_model = arm.model();
  return result;
}

}  // namespace fedloc
