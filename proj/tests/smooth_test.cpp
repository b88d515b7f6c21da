// Copyright 2026 The snsmpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sns/smooth.hpp"

#include <gtest/gtest.h>

#include "test_helpers.hpp"

namespace sns {
namespace {

MlpParams net_with_theta(const std::vector<double>& thetas) {
  Rng rng(99);
  std::vector<int> hidden(thetas.size() - 1, 4);
  MlpParams p = test::random_net(rng, 3, hidden, 2);
  for (size_t l = 0; l < thetas.size(); ++l) p.layers[l].theta_c = thetas[l];
  return p;
}

TEST(LipschitzBound, TwoLayerClosedForm) {
  const MlpParams p = net_with_theta({std::log(2.0), std::log(3.0)});
  const BoundReport r = lipschitz_bound(p);
  EXPECT_NEAR(r.C, 6.0, 1e-12);
  EXPECT_NEAR(r.S, 2.0 + 2.0 * 3.0, 1e-12);
  EXPECT_NEAR(r.jac_bound, 48.0, 1e-11);
  EXPECT_TRUE(r.from_theta);
}

TEST(LipschitzBound, AllUnitConstants) {
  for (int L = 1; L <= 5; ++L) {
    const MlpParams p = net_with_theta(std::vector<double>(L, 0.0));
    const BoundReport r = lipschitz_bound(p);
    EXPECT_NEAR(r.C, 1.0, 1e-14);
    EXPECT_NEAR(r.S, static_cast<double>(L), 1e-14);
  }
}

TEST(LipschitzBound, SingleLayer) {
  Rng rng(3);
  MlpParams p = test::random_net(rng, 2, {}, 2);
  p.layers[0].theta_c = std::log(5.0);
  const BoundReport r = lipschitz_bound(p);
  EXPECT_NEAR(r.C, 5.0, 1e-12);
  EXPECT_NEAR(r.S, 5.0, 1e-12);
  EXPECT_NEAR(r.jac_bound, 25.0, 1e-11);
}

TEST(LipschitzBound, PlainMlpUsesRowSumNorms) {
  Rng rng(5);
  MlpParams p = test::random_net(rng, 2, {4}, 1, Activation::kSoftplus, false);
  const BoundReport r = lipschitz_bound(p);
  EXPECT_FALSE(r.from_theta);
  double c0 = 0, c1 = 0;
  for (Eigen::Index i = 0; i < p.layers[0].W.rows(); ++i)
    c0 = std::max(c0, p.layers[0].W.row(i).cwiseAbs().sum());
  for (Eigen::Index i = 0; i < p.layers[1].W.rows(); ++i)
    c1 = std::max(c1, p.layers[1].W.row(i).cwiseAbs().sum());
  EXPECT_NEAR(r.C, c0 * c1, 1e-12);
  EXPECT_NEAR(r.S, c0 + c0 * c1, 1e-12);
}

TEST(SmoothnessPenalty, InsideBudgetEqualsWeight) {
  const MlpParams p = net_with_theta({std::log(2.0)});
  SmoothnessBudget b{1, 4.0, 3.0};  // C = 2 = B/2
  EXPECT_DOUBLE_EQ(smoothness_penalty(p, b), 3.0);
}

TEST(SmoothnessPenalty, ActiveFirstOrder) {
  const MlpParams p = net_with_theta({std::log(4.0)});
  SmoothnessBudget b{1, 2.0, 10.0};  // C = 2 B
  EXPECT_NEAR(smoothness_penalty(p, b), 20.0, 1e-12);
}

TEST(SmoothnessPenalty, SecondOrderInsideBudget) {
  const MlpParams p = net_with_theta({std::log(2.0), std::log(3.0)});
  SmoothnessBudget b{2, 96.0, 7.0};  // C S = 48 = B/2
  EXPECT_DOUBLE_EQ(smoothness_penalty(p, b), 7.0);
}

TEST(SmoothnessPenalty, GradientUniformAcrossLayersForFirstOrder) {
  const MlpParams p =
      net_with_theta({std::log(1.7), std::log(0.6), std::log(2.4)});
  SmoothnessBudget b{1, 0.5, 2.0};  // active: C = 2.448 > 0.5
  MlpGradients g = MlpGradients::zeros_like(p);
  smoothness_penalty_backward(p, b, g);
  ASSERT_EQ(g.dtheta_c.size(), 3u);
  EXPECT_GT(g.dtheta_c[0], 0.0);
  EXPECT_EQ(g.dtheta_c[0], g.dtheta_c[1]);  // identical to machine precision
  EXPECT_EQ(g.dtheta_c[1], g.dtheta_c[2]);
}

TEST(SmoothnessPenalty, GradientsMatchFiniteDifferences) {
  Rng rng(13);
  for (int order = 1; order <= 2; ++order) {
    for (int trial = 0; trial < 20; ++trial) {
      MlpParams p = test::random_net(rng, 2, {4, 3}, 1);
      for (auto& layer : p.layers) layer.theta_c = rng.uniform(-0.5, 0.8);
      SmoothnessBudget b{order, rng.uniform(0.05, 0.5), rng.uniform(0.5, 3.0)};
      if (smoothness_penalty(p, b) == b.weight) continue;  // inactive branch
      MlpGradients g = MlpGradients::zeros_like(p);
      smoothness_penalty_backward(p, b, g);
      for (size_t l = 0; l < p.layers.size(); ++l) {
        auto f = [&](double th) {
          MlpParams q = p;
          q.layers[l].theta_c = th;
          return smoothness_penalty(q, b);
        };
        const double fd = test::central_diff(f, p.layers[l].theta_c);
        EXPECT_LT(test::rel_err(g.dtheta_c[l], fd, 1e-8), 1e-5)
            << "order " << order << " trial " << trial << " layer " << l;
      }
    }
  }
}

TEST(DubConstruction, EqualLayerFormula) {
  // c_ub * sum_l c_ub^(l/L)
  const double c = 3.0;
  const int L = 4;
  double want = 0;
  for (int l = 1; l <= L; ++l) want += std::pow(c, l / 4.0);
  want *= c;
  EXPECT_NEAR(d_ub_from_c_ub(c, L), want, 1e-12);
  // all layers sharing c_ub^(1/L) reproduce exactly this curvature bound
  const double cl = std::pow(c, 1.0 / L);
  const MlpParams p = net_with_theta(std::vector<double>(L, std::log(cl)));
  const BoundReport r = lipschitz_bound(p);
  EXPECT_NEAR(r.jac_bound, d_ub_from_c_ub(c, L), 1e-9);
}

TEST(EmpiricalLipschitz, IdentityMapRatioOne) {
  MlpParams p;
  p.activation = Activation::kIdentity;
  p.normalization_enabled = true;
  MlpLayer layer;
  layer.W = Eigen::MatrixXd::Identity(2, 2);
  layer.b = Eigen::VectorXd::Zero(2);
  layer.theta_c = 2.0;
  p.layers.push_back(layer);
  Rng rng(1);
  const auto e = empirical_lipschitz(p, Eigen::Vector2d(-1, -1),
                                     Eigen::Vector2d(1, 1), 200, rng);
  EXPECT_NEAR(e.pair_ratio_max, 1.0, 1e-9);
  EXPECT_NEAR(e.jacobian_norm_max, 1.0, 1e-12);
}

TEST(EmpiricalLipschitz, ConstantNetworkIsZero) {
  MlpParams p;
  p.activation = Activation::kSoftplus;
  p.normalization_enabled = true;
  MlpLayer layer;
  layer.W = Eigen::MatrixXd::Zero(2, 2);
  layer.b = Eigen::VectorXd::Ones(2);
  layer.theta_c = 0.0;
  p.layers.push_back(layer);
  Rng rng(2);
  const auto e = empirical_lipschitz(p, Eigen::Vector2d(-1, -1),
                                     Eigen::Vector2d(1, 1), 100, rng);
  EXPECT_EQ(e.value(), 0.0);
}

TEST(EmpiricalLipschitz, BoundedByCOnRandomSoftplusNets) {
  Rng rng(43);
  for (int trial = 0; trial < 25; ++trial) {
    MlpParams p = test::random_net(rng, 3, {8, 8}, 2);
    test::tighten_theta(p, rng.uniform(0.2, 1.0));
    const double C = lipschitz_bound(p).C;
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, -2);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(3, 2);
    Rng probe = rng.fork(trial);
    const auto e = empirical_lipschitz(p, lo, hi, 500, probe);
    EXPECT_LE(e.value(), C * (1 + 1e-10));
  }
}

}  // namespace
}  // namespace sns
