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

#include "sns/tasks.hpp"

#include <gtest/gtest.h>

namespace sns {
namespace {

TEST(PiecewiseFn, BranchValues) {
  EXPECT_DOUBLE_EQ(piecewise_fn(0.0), -0.2);
  EXPECT_DOUBLE_EQ(piecewise_fn(-4.0), 0.4);
  // continuity conditions pin the line: f(2.2) = 0.048, f(5) = 1,
  // hence m = 0.34, b = -0.7
  EXPECT_NEAR(piecewise_fn(2.2), 0.048, 1e-12);
  EXPECT_NEAR(piecewise_fn(5.0), 1.0, 1e-12);
  EXPECT_NEAR(piecewise_fn(3.0), 0.34 * 3.0 - 0.7, 1e-12);
}

TEST(PiecewiseFn, ContinuityAtQuadraticJoints) {
  const double h = 1e-9;
  EXPECT_NEAR(piecewise_fn(1.3 - h), piecewise_fn(1.3 + h), 1e-7);
  EXPECT_NEAR(piecewise_fn(2.2 - h), piecewise_fn(2.2 + h), 1e-7);
  EXPECT_NEAR(piecewise_fn(1.3), -0.6, 1e-12);
}

TEST(PiecewiseFn, JumpAtOne) {
  const double h = 1e-12;
  const double jump = piecewise_fn(1.0) - piecewise_fn(1.0 - h);
  EXPECT_NEAR(jump, -0.4, 1e-9);
}

// The first two branches meet continuously at x = -3 (value -0.2 from both
// sides); the kink there is in slope, not value.
TEST(PiecewiseFn, SlopeKinkAtMinusThree) {
  const double h = 1e-9;
  EXPECT_NEAR(piecewise_fn(-3.0 - h), piecewise_fn(-3.0 + h), 1e-7);
  const double left_slope =
      (piecewise_fn(-3.0 - 1e-6) - piecewise_fn(-3.0 - 2e-6)) / 1e-6;
  EXPECT_NEAR(left_slope, -0.6, 1e-6);
}

TEST(ReluTarget, Values) {
  EXPECT_DOUBLE_EQ(relu_target(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(relu_target(0.0), 0.0);
  EXPECT_DOUBLE_EQ(relu_target(2.0), 2.0);
}

TEST(ShapeSdf, CircleValues) {
  EXPECT_DOUBLE_EQ(shape_sdf(Shape::kCircle, 0, 0), -0.6);
  EXPECT_NEAR(shape_sdf(Shape::kCircle, 0.6, 0), 0.0, 1e-15);
  EXPECT_NEAR(shape_sdf(Shape::kCircle, 1.0, 0), 0.4, 1e-15);
}

TEST(ShapeSdf, SquareValues) {
  EXPECT_NEAR(shape_sdf(Shape::kSquare, 0.8, 0), 0.2, 1e-15);
  EXPECT_DOUBLE_EQ(shape_sdf(Shape::kSquare, 0, 0), -0.6);
  EXPECT_NEAR(shape_sdf(Shape::kSquare, 0.6, 0.3), 0.0, 1e-15);
  // outside a corner: Euclidean distance to the corner point
  EXPECT_NEAR(shape_sdf(Shape::kSquare, 0.9, 0.9),
              std::sqrt(2 * 0.3 * 0.3), 1e-15);
}

TEST(ParticleStep, FreeFallArithmetic) {
  ParticleConfig cfg;
  ParticleState s{1.0, 0.0};
  const ParticleState out = particle_step(s, 0.0, cfg);
  EXPECT_NEAR(out.v, -0.1962, 1e-12);
  EXPECT_NEAR(out.q, 0.996076, 1e-12);
}

TEST(ParticleStep, InelasticContactZeroesBoth) {
  ParticleConfig cfg;
  const ParticleState out = particle_step({0.001, -5.0}, 0.0, cfg);
  EXPECT_EQ(out.q, 0.0);
  EXPECT_EQ(out.v, 0.0);
}

TEST(ParticleStep, RestOnGroundUnderBalancedForce) {
  ParticleConfig cfg;
  const ParticleState out = particle_step({0.0, 0.0}, cfg.gravity, cfg);
  EXPECT_EQ(out.q, 0.0);
  EXPECT_EQ(out.v, 0.0);
}

TEST(ParticleStep, GroundInvariantHoldsEverywhere) {
  ParticleConfig cfg;
  Rng rng(77);
  for (int k = 0; k < 2000; ++k) {
    ParticleState s{rng.uniform(0, 5), rng.uniform(-10, 10)};
    const double u = rng.uniform(-4, 4) * cfg.gravity;
    EXPECT_GE(particle_step(s, u, cfg).q, 0.0);
  }
}

// Away from contact the step is affine in (q, v, u): differences of steps
// equal the step of differences plus the constant drift.
TEST(ParticleStep, AffineAwayFromContact) {
  ParticleConfig cfg;
  auto step = [&](double q, double v, double u) {
    return particle_step({q, v}, u, cfg);
  };
  const auto a = step(3.0, 1.0, 2.0);
  const auto b = step(3.5, 0.5, 4.0);
  const auto mid = step(0.5 * (3.0 + 3.5), 0.5 * (1.0 + 0.5), 0.5 * (2.0 + 4.0));
  EXPECT_NEAR(mid.q, 0.5 * (a.q + b.q), 1e-12);
  EXPECT_NEAR(mid.v, 0.5 * (a.v + b.v), 1e-12);
}

TEST(ParticleDataset, DeterministicAndCounts) {
  ParticleConfig cfg;
  const auto set1 = generate_particle_dataset(cfg, 20, 5);
  const auto set2 = generate_particle_dataset(cfg, 20, 5);
  ASSERT_EQ(set1.size(), 20u);
  int transitions = 0;
  for (size_t i = 0; i < set1.size(); ++i) {
    EXPECT_EQ(set1[i].states, set2[i].states);  // bitwise
    EXPECT_EQ(set1[i].actions, set2[i].actions);
    EXPECT_GE(set1[i].states.col(0).minCoeff(), 0.0);
    transitions += static_cast<int>(set1[i].actions.rows());
  }
  EXPECT_EQ(transitions, 20 * 300);
}

TEST(ParticleDataset, PaperScaleTransitionCount) {
  ParticleConfig cfg;
  EXPECT_EQ(cfg.steps(), 300);  // 6 s at 50 Hz
  // 500 trajectories -> 150,000 transitions; count without materializing
  EXPECT_EQ(500 * cfg.steps(), 150000);
}

TEST(SampleFnDataset, CountRepeatabilityAndDegenerateRange) {
  const auto [x1, y1] = sample_fn_dataset(relu_target, 15000, -1, 1, 42);
  const auto [x2, y2] = sample_fn_dataset(relu_target, 15000, -1, 1, 42);
  EXPECT_EQ(x1.size(), 15000);
  EXPECT_EQ(x1, x2);
  EXPECT_EQ(y1, y2);
  const auto [xc, yc] = sample_fn_dataset(relu_target, 10, 2.0, 2.0, 1);
  EXPECT_TRUE((xc.array() == 2.0).all());
}

}  // namespace
}  // namespace sns
