#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <thread>
#include <vector>

#include "fedloc/dataset.hpp"
#include "fedloc/mlp.hpp"
#include "fedloc/partition.hpp"
#include "fedloc/train.hpp"

namespace fedloc {

// Server-side identity of the coordinator's own training share; real users
// are numbered from 1.
inline constexpr std::uint32_t kServerUserId = 0;

// One user's contribution to a round: trained weights plus the sample
// count that weights them.
struct LocalUpdate {
  ModelWeights weights;
  std::uint64_t sample_count = 0;
  std::uint32_t user_id = 0;
};

// Per-round train/test localization error for both arms. The centralized
// columns are zero when a run has no centralized arm configured.
struct RoundReport {
  std::uint32_t round = 0;
  double federated_test_mae_m = 0.0;
  double federated_train_mae_m = 0.0;
  double centralized_test_mae_m = 0.0;
  double centralized_train_mae_m = 0.0;

  friend bool operator==(const RoundReport&, const RoundReport&) = default;
};

// Trains one user's copy of the global model on its shard. The shuffle
// stream is keyed by (train_seed, user_id, round) so reruns and remote
// executions reproduce bit-exactly.
inline LocalUpdate local_train(const ModelWeights& global, const Dataset& data,
                               std::span<const std::uint32_t> shard, const TrainConfig& cfg,
                               std::uint32_t user_id, std::uint32_t round) {
  if (shard.empty()) throw InvalidInputError("local_train: empty shard");
  ModelWeights trained = train_epochs(global, data, shard, cfg,
                                      mix_seed(cfg.train_seed, user_id, round));
  return {std::move(trained), shard.size(), user_id};
}

// Sample-count-weighted mean of the updates, summed in ascending user_id
// order. Each parameter is clamped into the [min, max] envelope of the
// contributions so the convex-combination bound survives rounding.
inline ModelWeights federated_average(const std::vector<LocalUpdate>& updates) {
  if (updates.empty()) throw InvalidInputError("federated_average: no updates");
  std::vector<const LocalUpdate*> ordered;
  ordered.reserve(updates.size());
  std::uint64_t total = 0;
  for (const LocalUpdate& u : updates) {
    if (u.weights.arch != updates.front().weights.arch ||
        u.weights.params.size() != updates.front().weights.params.size()) {
      throw InvalidInputError("federated_average: update shapes disagree");
    }
    if (u.sample_count == 0) throw InvalidInputError("federated_average: zero sample count");
    total += u.sample_count;
    ordered.push_back(&u);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const LocalUpdate* a, const LocalUpdate* b) { return a->user_id < b->user_id; });

  if (ordered.size() == 1) return ordered.front()->weights;

  const std::size_t n = updates.front().weights.params.size();
  ModelWeights avg{updates.front().weights.arch, std::vector<double>(n, 0.0)};
  for (const LocalUpdate* u : ordered) {
    const double coef = static_cast<double>(u->sample_count) / static_cast<double>(total);
    const double* w = u->weights.params.data();
    double* acc = avg.params.data();
    for (std::size_t i = 0; i < n; ++i) acc[i] += coef * w[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    double lo = ordered.front()->weights.params[i];
    double hi = lo;
    for (const LocalUpdate* u : ordered) {
      lo = std::min(lo, u->weights.params[i]);
      hi = std::max(hi, u->weights.params[i]);
    }
    avg.params[i] = std::clamp(avg.params[i], lo, hi);
  }
  return avg;
}

// Where the round's local updates come from: in-process training or remote
// clients behind a wire protocol.
class ClientExecutor {
 public:
  virtual ~ClientExecutor() = default;
  virtual std::vector<LocalUpdate> run_round(std::uint32_t round, const ModelWeights& global) = 0;
};

// Trains every share of a Partition in-process. Shares are independent, so
// they may be trained on several threads; results are keyed by user id and
// do not depend on the schedule.
class InProcessExecutor : public ClientExecutor {
 public:
  InProcessExecutor(const Dataset& train, Partition partition, TrainConfig cfg, int threads = 0)
      : train_(train), partition_(std::move(partition)), cfg_(cfg) {
    threads_ = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (threads_ < 1) threads_ = 1;
    partition_.validate(train.size());
  }

  std::vector<LocalUpdate> run_round(std::uint32_t round, const ModelWeights& global) override {
    struct Job {
      std::uint32_t user_id;
      const std::vector<std::uint32_t>* shard;
    };
    std::vector<Job> jobs;
    if (!partition_.server_share.empty()) jobs.push_back({kServerUserId, &partition_.server_share});
    for (std::size_t u = 0; u < partition_.user_shares.size(); ++u) {
      jobs.push_back({static_cast<std::uint32_t>(u + 1), &partition_.user_shares[u]});
    }

    std::vector<LocalUpdate> updates(jobs.size());
    const int workers = std::min<int>(threads_, static_cast<int>(jobs.size()));
    if (workers <= 1) {
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        updates[j] = local_train(global, train_, *jobs[j].shard, cfg_, jobs[j].user_id, round);
      }
    } else {
      std::vector<std::future<void>> futs;
      std::atomic<std::size_t> next{0};
      for (int w = 0; w < workers; ++w) {
        futs.push_back(std::async(std::launch::async, [&] {
          for (std::size_t j = next.fetch_add(1); j < jobs.size(); j = next.fetch_add(1)) {
            updates[j] = local_train(global, train_, *jobs[j].shard, cfg_, jobs[j].user_id, round);
          }
        }));
      }
      for (auto& f : futs) f.get();
    }
    return updates;
  }

  const Partition& partition() const { return partition_; }

 private:
  const Dataset& train_;
  Partition partition_;
  TrainConfig cfg_;
  int threads_ = 1;
};

struct EarlyStopConfig {
  bool enabled = false;
  double min_improvement_m = 0.01;
  int patience_rounds = 10;
};

struct FedRunConfig {
  MlpArch arch;
  std::uint64_t seed_init = 0;
  std::uint32_t rounds = 100;
  EarlyStopConfig early_stop;
};

using RoundObserver = std::function<void(const RoundReport&)>;

// Per-round metrics of the centralized comparison arm, stepped in lockstep
// with the federated rounds.
struct ArmMetrics {
  double test_mae_m = 0.0;
  double train_mae_m = 0.0;
};
using CentralizedArm = std::function<ArmMetrics(std::uint32_t round)>;

// Mean Euclidean distance in meters between predicted and true positions.
inline double localization_error(const ModelWeights& model, const Dataset& ds,
                                 std::span<const std::uint32_t> idx) {
  if (idx.empty()) throw InvalidInputError("localization_error: empty evaluation set");
  double sum = 0.0;
  for (std::uint32_t i : idx) {
    const auto yhat = forward(model, ds.feature_row(i));
    const double dx = yhat[0] * ds.label_scale - ds.labels[i * 2];
    const double dy = yhat[1] * ds.label_scale - ds.labels[i * 2 + 1];
    sum += std::sqrt(dx * dx + dy * dy);
  }
  return sum / static_cast<double>(idx.size());
}

inline double localization_error(const ModelWeights& model, const Dataset& ds) {
  if (ds.size() == 0) throw InvalidInputError("localization_error: empty evaluation set");
  std::vector<std::uint32_t> all(ds.size());
  std::iota(all.begin(), all.end(), 0u);
  return localization_error(model, ds, all);
}

struct FedRunResult {
  std::vector<RoundReport> reports;
  ModelWeights global;
};

// The round loop: broadcast the global model, train every user, average by
// sample count, evaluate on the training union and the test set. The same
// loop drives the in-process simulator and the networked server, which is
// what makes the two modes bit-identical.
inline FedRunResult run_federated(ClientExecutor& clients, const Dataset& train,
                                  std::span<const std::uint32_t> train_eval, const Dataset& test,
                                  const FedRunConfig& cfg, const RoundObserver& observer = {},
                                  const CentralizedArm& centralized = {}) {
  if (cfg.rounds < 1) throw InvalidInputError("run_federated: rounds must be >= 1");
  cfg.arch.validate();

  FedRunResult result;
  result.global = init_weights(cfg.arch, cfg.seed_init);
  double best_test = std::numeric_limits<double>::infinity();
  int rounds_since_improvement = 0;

  for (std::uint32_t t = 1; t <= cfg.rounds; ++t) {
    std::future<ArmMetrics> arm_fut;
    if (centralized) {
      arm_fut = std::async(std::launch::async, centralized, t);
    }
    std::vector<LocalUpdate> updates = clients.run_round(t, result.global);
    result.global = federated_average(updates);

    RoundReport report;
    report.round = t;
    report.federated_train_mae_m = localization_error(result.global, train, train_eval);
    report.federated_test_mae_m = localization_error(result.global, test);
    if (arm_fut.valid()) {
      const ArmMetrics arm = arm_fut.get();
      report.centralized_test_mae_m = arm.test_mae_m;
      report.centralized_train_mae_m = arm.train_mae_m;
    }
    if (observer) observer(report);
    result.reports.push_back(report);

    if (report.federated_test_mae_m < best_test - cfg.early_stop.min_improvement_m) {
      rounds_since_improvement = 0;
    } else {
      ++rounds_since_improvement;
    }
    best_test = std::min(best_test, report.federated_test_mae_m);
    if (cfg.early_stop.enabled && rounds_since_improvement >= cfg.early_stop.patience_rounds) {
      break;
    }
  }
  return result;
}

}  // namespace fedloc
