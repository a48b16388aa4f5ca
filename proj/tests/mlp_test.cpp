#include "fedloc/mlp.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "fedloc/rng.hpp"
#include "support/oracles.hpp"

using namespace fedloc;

namespace {

MlpArch small_arch(int input, std::vector<int> hidden) {
  MlpArch a;
  a.input_dim = input;
  a.hidden_dims = std::move(hidden);
  return a;
}

ModelWeights random_model(const MlpArch& arch, std::uint64_t seed, double scale = 1.0) {
  ModelWeights m = init_weights(arch, seed);
  Rng rng(mix_seed(seed, 99));
  for (double& p : m.params) p += scale * rng.uniform(-0.5, 0.5);
  return m;
}

}  // namespace

TEST(MlpArchTest, ParamCountMatchesLayerShapes) {
  MlpArch a;  // 520 -> 20 -> 10 -> 10 -> 10 -> 2
  EXPECT_EQ(a.param_count(), 520u * 20 + 20 + 20 * 10 + 10 + 10 * 10 + 10 + 10 * 10 + 10 + 10 * 2 + 2);
  EXPECT_EQ(a.num_layers(), 5);
}

TEST(MlpArchTest, ValidateRejectsBadDims) {
  EXPECT_THROW(small_arch(0, {4}).validate(), InvalidInputError);
  EXPECT_THROW(small_arch(3, {0}).validate(), InvalidInputError);
  MlpArch bad;
  bad.output_dim = 3;
  EXPECT_THROW(bad.validate(), InvalidInputError);
}

TEST(InitWeightsTest, BiasesAreZero) {
  const ModelWeights m = init_weights(small_arch(1, {1}), 7);
  for (int l = 0; l < m.arch.num_layers(); ++l) {
    for (double b : m.layer_b(l)) EXPECT_EQ(b, 0.0);
  }
  const ModelWeights big = init_weights(MlpArch{}, 7);
  for (int l = 0; l < big.arch.num_layers(); ++l) {
    for (double b : big.layer_b(l)) EXPECT_EQ(b, 0.0);
  }
}

TEST(InitWeightsTest, DeterministicPerSeed) {
  const ModelWeights a = init_weights(MlpArch{}, 42);
  const ModelWeights b = init_weights(MlpArch{}, 42);
  EXPECT_EQ(a.params, b.params);
  const ModelWeights c = init_weights(MlpArch{}, 43);
  EXPECT_NE(a.params, c.params);
}

TEST(InitWeightsTest, EveryWeightWithinLayerBound) {
  const ModelWeights m = init_weights(MlpArch{}, 5);
  const auto dims = m.arch.dims();
  for (int l = 0; l < m.arch.num_layers(); ++l) {
    const double bound = std::sqrt(6.0 / (dims[l] + dims[l + 1]));
    for (double w : m.layer_w(l)) {
      EXPECT_LE(std::abs(w), bound);
    }
  }
}

TEST(ForwardTest, ZeroNetworkMapsEverythingToOrigin) {
  const ModelWeights m = zero_weights(MlpArch{});
  std::vector<double> x(520, -37.5);
  const auto y = forward(m, x);
  EXPECT_EQ(y[0], 0.0);
  EXPECT_EQ(y[1], 0.0);
}

TEST(ForwardTest, SingleIdentityLayerIsPassThrough) {
  ModelWeights m = zero_weights(small_arch(2, {}));
  auto w = m.layer_w(0);  // 2x2 row-major
  w[0] = 1.0;
  w[3] = 1.0;
  const std::vector<double> x = {3.0, -4.0};
  const auto y = forward(m, x);
  EXPECT_EQ(y[0], 3.0);
  EXPECT_EQ(y[1], -4.0);
}

TEST(ForwardTest, MatchesNaiveLayerByLayerOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const MlpArch arch = small_arch(2 + static_cast<int>(rng.below(8)),
                                    {2 + static_cast<int>(rng.below(8)),
                                     1 + static_cast<int>(rng.below(9))});
    const ModelWeights m = random_model(arch, rng.next());
    std::vector<double> x(arch.input_dim);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    const auto got = forward(m, x);
    const auto want = oracle::naive_forward(m, x);
    EXPECT_NEAR(got[0], want[0], 1e-12);
    EXPECT_NEAR(got[1], want[1], 1e-12);
  }
}

TEST(ForwardTest, RejectsDimensionMismatch) {
  const ModelWeights m = zero_weights(MlpArch{});
  std::vector<double> x(519, 0.0);
  EXPECT_THROW(forward(m, x), InvalidInputError);
}

TEST(ForwardTest, BitDeterministic) {
  const ModelWeights m = random_model(MlpArch{}, 3);
  std::vector<double> x(520);
  Rng rng(4);
  for (double& v : x) v = rng.uniform(-104.0, 0.0);
  const auto a = forward(m, x);
  const auto b = forward(m, x);
  EXPECT_EQ(a[0], b[0]);
  EXPECT_EQ(a[1], b[1]);
}

TEST(LossMaeTest, ZeroResidual) {
  const std::vector<double> p = {1.0, 2.0, 3.0, 4.0};
  EXPECT_EQ(loss_mae(p, p), 0.0);
}

TEST(LossMaeTest, HandArithmetic) {
  const std::vector<double> p = {1.0, 2.0};
  const std::vector<double> y = {4.0, 6.0};
  EXPECT_DOUBLE_EQ(loss_mae(p, y), 3.5);
}

TEST(LossMaeTest, MatchesAccumulationOracle) {
  Rng rng(8);
  std::vector<double> p(200), y(200);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = rng.uniform(-300.0, 300.0);
    y[i] = rng.uniform(-300.0, 300.0);
  }
  long double sum = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::fabs((long double)p[i] - y[i]);
  EXPECT_NEAR(loss_mae(p, y), static_cast<double>(sum / p.size()), 1e-12);
}

TEST(LossMaeTest, RejectsEmptyAndMismatched) {
  const std::vector<double> empty;
  const std::vector<double> two = {1.0, 2.0};
  const std::vector<double> four = {1.0, 2.0, 3.0, 4.0};
  EXPECT_THROW(loss_mae(empty, empty), InvalidInputError);
  EXPECT_THROW(loss_mae(two, four), InvalidInputError);
}

TEST(LossMaeTest, ZeroOnlyWhenIdentical) {
  Rng rng(9);
  std::vector<double> p(50), y(50);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = y[i] = rng.uniform(-10.0, 10.0);
  EXPECT_EQ(loss_mae(p, y), 0.0);
  y[17] += 1e-9;
  EXPECT_GT(loss_mae(p, y), 0.0);
}

TEST(LossMaeTest, BatchMeanConsistency) {
  Rng rng(10);
  std::vector<double> p1(60), y1(60), p2(140), y2(140);
  for (auto* v : {&p1, &y1, &p2, &y2}) {
    for (double& x : *v) x = rng.uniform(-50.0, 50.0);
  }
  std::vector<double> pc(p1), yc(y1);
  pc.insert(pc.end(), p2.begin(), p2.end());
  yc.insert(yc.end(), y2.begin(), y2.end());
  const double combined = loss_mae(pc, yc);
  const double weighted =
      (loss_mae(p1, y1) * p1.size() + loss_mae(p2, y2) * p2.size()) / (p1.size() + p2.size());
  EXPECT_NEAR(combined, weighted, 1e-12);
}

TEST(BackwardTest, ZeroGradientAtExactFit) {
  // Zero network predicts (0, 0); labels at the origin sit exactly on the
  // subgradient convention, so every gradient entry is 0.
  const MlpArch arch = small_arch(4, {3});
  const ModelWeights m = zero_weights(arch);
  std::vector<double> x(8, 0.5);
  std::vector<double> y(4, 0.0);
  const auto [grads, loss] = backward(m, x, y);
  EXPECT_EQ(loss, 0.0);
  for (double g : grads.values) EXPECT_EQ(g, 0.0);
}

TEST(BackwardTest, MatchesCentralFiniteDifferences) {
  Rng rng(21);
  int tested = 0;
  for (int trial = 0; trial < 16 && tested < 10; ++trial) {
    const MlpArch arch = small_arch(1 + static_cast<int>(rng.below(10)),
                                    {1 + static_cast<int>(rng.below(10)),
                                     1 + static_cast<int>(rng.below(10))});
    const ModelWeights m = random_model(arch, rng.next());
    const int batch = 3;
    std::vector<std::vector<double>> xs(batch), ys(batch);
    std::vector<double> flat_x, flat_y;
    for (int s = 0; s < batch; ++s) {
      xs[s].resize(arch.input_dim);
      for (double& v : xs[s]) v = rng.uniform(-1.5, 1.5);
      ys[s] = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
      flat_x.insert(flat_x.end(), xs[s].begin(), xs[s].end());
      flat_y.insert(flat_y.end(), ys[s].begin(), ys[s].end());
    }
    if (oracle::kink_distance(m, xs, ys) < 1e-6) continue;  // FD unreliable at kinks
    ++tested;

    const auto [grads, loss] = backward(m, flat_x, flat_y);
    EXPECT_NEAR(loss, oracle::naive_batch_loss(m, xs, ys), 1e-12);
    const auto fd = oracle::finite_difference_gradient(m, xs, ys);
    for (std::size_t p = 0; p < fd.size(); ++p) {
      const double denom = std::max({std::abs(fd[p]), std::abs(grads.values[p]), 1e-8});
      EXPECT_LT(std::abs(fd[p] - grads.values[p]) / denom, 1e-4)
          << "param " << p << " analytic " << grads.values[p] << " fd " << fd[p];
    }
  }
  EXPECT_GE(tested, 8);
}

TEST(BackwardTest, DuplicatingTheBatchKeepsTheGradient) {
  Rng rng(31);
  const MlpArch arch = small_arch(5, {4, 3});
  const ModelWeights m = random_model(arch, 77);
  std::vector<double> x(3 * 5), y(3 * 2);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  for (double& v : y) v = rng.uniform(-1.0, 1.0);
  std::vector<double> x2(x), y2(y);
  x2.insert(x2.end(), x.begin(), x.end());
  y2.insert(y2.end(), y.begin(), y.end());
  const auto [g1, l1] = backward(m, x, y);
  const auto [g2, l2] = backward(m, x2, y2);
  EXPECT_NEAR(l1, l2, 1e-12);
  for (std::size_t p = 0; p < g1.values.size(); ++p) {
    EXPECT_NEAR(g1.values[p], g2.values[p], 1e-12);
  }
}

TEST(BackwardTest, RejectsShapeMismatch) {
  const ModelWeights m = zero_weights(small_arch(4, {3}));
  std::vector<double> x(7, 0.0);  // not a multiple of input_dim
  std::vector<double> y(4, 0.0);
  EXPECT_THROW(backward(m, x, y), InvalidInputError);
  const std::vector<double> empty;
  EXPECT_THROW(backward(m, empty, empty), InvalidInputError);
}
