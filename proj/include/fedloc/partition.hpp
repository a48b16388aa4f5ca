#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "fedloc/dataset.hpp"
#include "fedloc/error.hpp"
#include "fedloc/rng.hpp"

namespace fedloc {

// Disjoint assignment of training-sample indices to users, optionally plus
// a server-held pool.
struct Partition {
  std::vector<std::vector<std::uint32_t>> user_shares;
  std::vector<std::uint32_t> server_share;

  std::size_t total_assigned() const {
    std::size_t n = server_share.size();
    for (const auto& s : user_shares) n += s.size();
    return n;
  }

  void validate(std::size_t dataset_size) const {
    std::vector<std::uint32_t> all(server_share);
    for (const auto& s : user_shares) all.insert(all.end(), s.begin(), s.end());
    for (std::uint32_t i : all) {
      if (i >= dataset_size) throw InvalidInputError("Partition: index out of range");
    }
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
      throw InvalidInputError("Partition: shares overlap");
    }
  }
};

// Random disjoint draws: exactly per_user samples for each of n users and
// server_count for the server pool. Deterministic per seed.
inline Partition partition_uniform(const Dataset& train, int n_users, std::size_t per_user,
                                   std::size_t server_count, std::uint64_t seed) {
  if (n_users < 0) throw InvalidInputError("partition_uniform: negative user count");
  const std::size_t need = static_cast<std::size_t>(n_users) * per_user + server_count;
  if (need > train.size()) {
    throw InvalidInputError("partition_uniform: need " + std::to_string(need) +
                            " samples, training set has " + std::to_string(train.size()));
  }
  std::vector<std::uint32_t> perm(train.size());
  std::iota(perm.begin(), perm.end(), 0u);
  Rng rng(seed);
  rng.shuffle(perm);

  Partition p;
  auto take = [&perm](std::size_t offset, std::size_t count) {
    std::vector<std::uint32_t> s(perm.begin() + offset, perm.begin() + offset + count);
    std::sort(s.begin(), s.end());
    return s;
  };
  p.server_share = take(0, server_count);
  for (int u = 0; u < n_users; ++u) {
    p.user_shares.push_back(take(server_count + static_cast<std::size_t>(u) * per_user, per_user));
  }
  return p;
}

// Heterogeneous shares: per-user sizes drawn from Normal(mean, stddev),
// rounded and clamped to [50, train size]; samples are ordered by their
// x-coordinate and handed out as consecutive slabs, so every user covers
// an exclusive x-range. If the drawn sizes exceed the training set they
// are rescaled proportionally rather than rejected.
inline Partition partition_gaussian_spatial(const Dataset& train, int n_users, double mean_samples,
                                            double stddev, std::uint64_t seed) {
  if (n_users < 1) throw InvalidInputError("partition_gaussian_spatial: need at least one user");
  if (!(mean_samples > 0.0)) throw InvalidInputError("partition_gaussian_spatial: mean must be > 0");
  constexpr std::size_t kMinShare = 50;
  if (kMinShare * static_cast<std::size_t>(n_users) > train.size()) {
    throw InvalidInputError("partition_gaussian_spatial: training set too small for " +
                            std::to_string(n_users) + " users");
  }

  Rng rng(seed);
  std::vector<std::size_t> sizes(n_users);
  for (auto& s : sizes) {
    const double draw = std::round(rng.normal(mean_samples, stddev));
    s = static_cast<std::size_t>(std::clamp(draw, static_cast<double>(kMinShare),
                                            static_cast<double>(train.size())));
  }
  std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (total > train.size()) {
    const double scale = static_cast<double>(train.size()) / static_cast<double>(total);
    for (auto& s : sizes) {
      s = std::max(kMinShare, static_cast<std::size_t>(std::floor(s * scale)));
    }
    total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    // floor() plus the clamp can still leave a small overshoot
    for (std::size_t u = 0; total > train.size(); u = (u + 1) % sizes.size()) {
      if (sizes[u] > kMinShare) {
        --sizes[u];
        --total;
      }
    }
  }

  std::vector<std::uint32_t> order(train.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&train](std::uint32_t a, std::uint32_t b) {
    const double xa = train.labels[a * 2], xb = train.labels[b * 2];
    return xa != xb ? xa < xb : a < b;
  });

  Partition p;
  std::size_t offset = 0;
  for (int u = 0; u < n_users; ++u) {
    std::vector<std::uint32_t> share(order.begin() + offset, order.begin() + offset + sizes[u]);
    std::sort(share.begin(), share.end());
    p.user_shares.push_back(std::move(share));
    offset += sizes[u];
  }
  return p;
}

}  // namespace fedloc
