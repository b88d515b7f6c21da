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
//
// Desk-scale benchmark generators: 1-D nonsmooth targets, analytic 2-D
// signed-distance shapes, and a particle-mass system with inelastic ground
// contact at q = 0.

#ifndef SNSMPC_TASKS_HPP_
#define SNSMPC_TASKS_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sns/rng.hpp"

namespace sns {

// Five-branch 1-D function with two jump discontinuities (x = 1 is a 0.4
// jump), a flat valley, and a quadratic segment joined continuously at
// x = 2.2 to a line through f(5) = 1.
inline double piecewise_fn(double x) {
  if (x < -3.0) return -0.6 * x - 2.0;
  if (x < 1.0) return -0.2;
  if (x < 1.3) return -0.6;
  if (x < 2.2) return -0.6 + 0.8 * (x - 1.3) * (x - 1.3);
  const double f22 = -0.6 + 0.8 * 0.9 * 0.9;  // quadratic value at 2.2
  const double m = (1.0 - f22) / (5.0 - 2.2);
  const double b = 1.0 - 5.0 * m;
  return m * x + b;
}

inline double relu_target(double x) { return x > 0.0 ? x : 0.0; }

enum class Shape { kCircle, kSquare };

// Exact signed distance in [-1,1]^2: circle of radius 0.6 at the origin, or
// the axis-aligned square of half-width 0.6.
inline double shape_sdf(Shape shape, double x, double y) {
  constexpr double r = 0.6;
  if (shape == Shape::kCircle) return std::sqrt(x * x + y * y) - r;
  const double dx = std::abs(x) - r;
  const double dy = std::abs(y) - r;
  const double ox = std::max(dx, 0.0);
  const double oy = std::max(dy, 0.0);
  const double outside = std::sqrt(ox * ox + oy * oy);
  const double inside = std::min(std::max(dx, dy), 0.0);
  return outside + inside;
}

struct ParticleState {
  double q = 0.0;  // position [m], ground at q = 0
  double v = 0.0;  // velocity [m/s]
};

struct ParticleConfig {
  double gravity = 9.81;
  double dt = 0.02;              // 50 Hz
  double episode_seconds = 6.0;  // 300 steps
  double forcing_amplitude_g = 2.0;
  double omega_min = 0.1, omega_max = 3.0;  // [Hz]
  double q0_min = 0.1, q0_max = 4.0;
  double v0_min = -5.0, v0_max = 5.0;

  int steps() const { return static_cast<int>(episode_seconds / dt + 0.5); }

  void validate() const {
    if (!(dt > 0)) throw std::invalid_argument("ParticleConfig: dt must be > 0");
  }
};

// Semi-implicit Euler step of q'' = -g + u with inelastic contact: if the
// updated position would penetrate the ground, both position and velocity
// are zeroed in the same step.
inline ParticleState particle_step(const ParticleState& s, double u,
                                   const ParticleConfig& cfg) {
  ParticleState out;
  out.v = s.v + (-cfg.gravity + u) * cfg.dt;
  out.q = s.q + out.v * cfg.dt;
  if (out.q <= 0.0) {
    out.q = 0.0;
    out.v = 0.0;
  }
  return out;
}

// One aligned episode: states has one more row than actions; measurements
// are the exact position readings (noise is applied by consumers).
struct Trajectory {
  Eigen::MatrixXd states;        // (T+1) x n
  Eigen::MatrixXd actions;       // T x m
  Eigen::MatrixXd measurements;  // (T+1) x p
  std::uint64_t seed = 0;
};

// Sinusoidal forcing policy used for data collection:
// u_t = 2g sin(2 pi omega t dt) with omega drawn per episode.
inline double sinusoid_action(const ParticleConfig& cfg, double omega,
                              int step) {
  return cfg.forcing_amplitude_g * cfg.gravity *
         std::sin(2.0 * std::numbers::pi * omega * step * cfg.dt);
}

inline Trajectory simulate_particle_episode(const ParticleConfig& cfg,
                                            Rng rng) {
  const int T = cfg.steps();
  Trajectory tr;
  tr.seed = rng.seed();
  tr.states.resize(T + 1, 2);
  tr.actions.resize(T, 1);
  tr.measurements.resize(T + 1, 1);
  ParticleState s;
  s.q = rng.uniform(cfg.q0_min, cfg.q0_max);
  s.v = rng.uniform(cfg.v0_min, cfg.v0_max);
  const double omega = rng.uniform(cfg.omega_min, cfg.omega_max);
  tr.states(0, 0) = s.q;
  tr.states(0, 1) = s.v;
  tr.measurements(0, 0) = s.q;
  for (int t = 0; t < T; ++t) {
    const double u = sinusoid_action(cfg, omega, t);
    tr.actions(t, 0) = u;
    s = particle_step(s, u, cfg);
    tr.states(t + 1, 0) = s.q;
    tr.states(t + 1, 1) = s.v;
    tr.measurements(t + 1, 0) = s.q;
  }
  return tr;
}

// n_traj episodes under per-episode forked seeds; bitwise reproducible for
// a fixed (cfg, n_traj, seed) triple.
inline std::vector<Trajectory> generate_particle_dataset(
    const ParticleConfig& cfg, int n_traj, std::uint64_t seed) {
  cfg.validate();
  if (n_traj < 1)
    throw std::invalid_argument("generate_particle_dataset: n_traj >= 1");
  const Rng root(seed);
  std::vector<Trajectory> out;
  out.reserve(n_traj);
  for (int i = 0; i < n_traj; ++i)
    out.push_back(simulate_particle_episode(cfg, root.fork(i)));
  return out;
}

// Uniformly sampled (x, f(x)) pairs over [lo, hi].
template <typename Fn>
std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_fn_dataset(
    Fn&& fn, int n, double lo, double hi, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_fn_dataset: n >= 1");
  Rng rng(seed);
  Eigen::VectorXd x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x(i) = rng.uniform(lo, hi);
    y(i) = fn(x(i));
  }
  return {x, y};
}

}  // namespace sns

#endif  // SNSMPC_TASKS_HPP_
