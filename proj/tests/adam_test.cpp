#include "fedloc/adam.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "fedloc/rng.hpp"

using namespace fedloc;

namespace {

MlpArch tiny_arch() {
  MlpArch a;
  a.input_dim = 1;
  a.hidden_dims = {};
  return a;  // 1 -> 2: four parameters
}

Gradients grads_like(const ModelWeights& m, double fill) {
  return {m.arch, std::vector<double>(m.params.size(), fill)};
}

}  // namespace

TEST(AdamInitTest, ZeroMomentsAndCounter) {
  const ModelWeights m = init_weights(MlpArch{}, 12);
  const AdamState s = adam_init(m);
  EXPECT_EQ(s.t, 0u);
  EXPECT_EQ(s.m.size(), m.params.size());
  EXPECT_EQ(s.v.size(), m.params.size());
  for (double x : s.m) EXPECT_EQ(x, 0.0);
  for (double x : s.v) EXPECT_EQ(x, 0.0);
  const AdamState s2 = adam_init(m);
  EXPECT_EQ(s.m, s2.m);
  EXPECT_EQ(s.v, s2.v);
}

TEST(AdamStepTest, ZeroGradientLeavesWeights) {
  ModelWeights m = init_weights(MlpArch{}, 5);
  const std::vector<double> before = m.params;
  AdamState s = adam_init(m);
  adam_step_inplace(s, m, grads_like(m, 0.0), AdamConfig{});
  EXPECT_EQ(s.t, 1u);
  EXPECT_EQ(m.params, before);
}

TEST(AdamStepTest, MatchesHandEvaluatedUpdate) {
  // One parameter with w=0, g=1 under lr=1e-4, b1=0.1, b2=0.99, eps=1e-8:
  //   m=0.9, v=0.01, m_hat=1, v_hat=1, w = -1e-4 / (1 + 1e-8).
  const AdamConfig cfg{};
  ModelWeights m = zero_weights(tiny_arch());
  Gradients g = grads_like(m, 0.0);
  g.values[0] = 1.0;
  AdamState s = adam_init(m);
  adam_step_inplace(s, m, g, cfg);

  const double m1 = (1.0 - cfg.beta1) * 1.0;
  const double v1 = (1.0 - cfg.beta2) * 1.0;
  const double m_hat = m1 / (1.0 - cfg.beta1);
  const double v_hat = v1 / (1.0 - cfg.beta2);
  const double expected = -cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  EXPECT_NEAR(m.params[0], expected, 1e-18);
  EXPECT_NEAR(m.params[0], -1e-4 / (1.0 + 1e-8), 1e-12);
  for (std::size_t i = 1; i < m.params.size(); ++i) EXPECT_EQ(m.params[i], 0.0);
}

TEST(AdamStepTest, FirstStepMovesAgainstGradientSign) {
  Rng rng(3);
  ModelWeights m = init_weights(MlpArch{}, 6);
  const std::vector<double> before = m.params;
  Gradients g = grads_like(m, 0.0);
  for (double& x : g.values) {
    const double r = rng.uniform();
    x = r < 0.3 ? 0.0 : rng.uniform(-5.0, 5.0);
  }
  AdamState s = adam_init(m);
  adam_step_inplace(s, m, g, AdamConfig{});
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    const double delta = m.params[i] - before[i];
    if (g.values[i] == 0.0) {
      EXPECT_EQ(delta, 0.0);
    } else {
      EXPECT_LT(delta * g.values[i], 0.0);
    }
  }
}

TEST(AdamStepTest, StepSizeBoundedOnConstantGradients) {
  const AdamConfig cfg{};
  ModelWeights m = init_weights(MlpArch{}, 7);
  Gradients g = grads_like(m, 0.0);
  Rng rng(8);
  for (double& x : g.values) x = rng.uniform(-3.0, 3.0);
  AdamState s = adam_init(m);
  std::vector<double> prev = m.params;
  for (int step = 0; step < 25; ++step) {
    adam_step_inplace(s, m, g, cfg);
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      EXPECT_LE(std::abs(m.params[i] - prev[i]), 2.0 * cfg.learning_rate);
    }
    prev = m.params;
  }
  EXPECT_EQ(s.t, 25u);
}

TEST(AdamStepTest, SequencesAreBitReproducible) {
  auto run = [] {
    ModelWeights m = init_weights(MlpArch{}, 9);
    AdamState s = adam_init(m);
    Rng rng(10);
    for (int step = 0; step < 10; ++step) {
      Gradients g{m.arch, std::vector<double>(m.params.size())};
      for (double& x : g.values) x = rng.uniform(-1.0, 1.0);
      adam_step_inplace(s, m, g, AdamConfig{});
    }
    return m.params;
  };
  EXPECT_EQ(run(), run());
}

TEST(AdamStepTest, PureFormEqualsInplaceForm) {
  ModelWeights m = init_weights(MlpArch{}, 11);
  Gradients g = grads_like(m, 0.25);
  AdamState s = adam_init(m);

  ModelWeights m2 = m;
  AdamState s2 = adam_init(m2);
  adam_step_inplace(s2, m2, g, AdamConfig{});

  const auto [m3, s3] = adam_step(s, m, g, AdamConfig{});
  EXPECT_EQ(m3.params, m2.params);
  EXPECT_EQ(s3.m, s2.m);
  EXPECT_EQ(s3.v, s2.v);
  EXPECT_EQ(s3.t, s2.t);
}

TEST(AdamStepTest, RejectsShapeMismatch) {
  ModelWeights m = init_weights(MlpArch{}, 12);
  Gradients g{m.arch, std::vector<double>(m.params.size() - 1, 0.0)};
  AdamState s = adam_init(m);
  EXPECT_THROW(adam_step_inplace(s, m, g, AdamConfig{}), InvalidInputError);
}

TEST(AdamConfigTest, ValidateRejectsBadValues) {
  AdamConfig c;
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), InvalidInputError);
  c = {};
  c.beta1 = 1.0;
  EXPECT_THROW(c.validate(), InvalidInputError);
  c = {};
  c.beta2 = -0.1;
  EXPECT_THROW(c.validate(), InvalidInputError);
  c = {};
  c.epsilon = 0.0;
  EXPECT_THROW(c.validate(), InvalidInputError);
  EXPECT_NO_THROW(AdamConfig{}.validate());
}
