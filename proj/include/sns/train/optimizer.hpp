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

#ifndef SNSMPC_TRAIN_OPTIMIZER_HPP_
#define SNSMPC_TRAIN_OPTIMIZER_HPP_

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sns/net.hpp"

namespace sns {

// Adaptive per-parameter first-order optimizer. Default is Adam with
// decoupled weight decay available but off; sign_update switches to a
// sign-based (Lion-style) variant.
struct OptimConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  bool sign_update = false;
  enum class Schedule { kConstant, kCosine } schedule = Schedule::kConstant;
  int total_steps = 0;  // required for the cosine schedule
};

class Optimizer {
 public:
  Optimizer(const MlpParams& shape, OptimConfig cfg)
      : cfg_(cfg),
        m_(MlpGradients::zeros_like(shape)),
        v_(MlpGradients::zeros_like(shape)) {
    if (cfg_.schedule == OptimConfig::Schedule::kCosine &&
        cfg_.total_steps <= 0)
      throw std::invalid_argument("Optimizer: cosine schedule needs total_steps");
  }

  double current_lr() const {
    if (cfg_.schedule == OptimConfig::Schedule::kConstant) return cfg_.lr;
    const double frac =
        std::min(1.0, static_cast<double>(t_) / cfg_.total_steps);
    return cfg_.lr * 0.5 * (1.0 + std::cos(std::numbers::pi * frac));
  }

  // One update in place; returns the learning rate that was applied.
  double step(MlpParams& p, const MlpGradients& g) {
    const double lr = current_lr();
    ++t_;
    if (cfg_.sign_update) {
      lion_step(p, g, lr);
    } else {
      adam_step(p, g, lr);
    }
    return lr;
  }

 private:
  template <typename Mat>
  void adam_update(Mat& param, const Mat& grad, Mat& m, Mat& v, double lr,
                   double bc1, double bc2) {
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * grad;
    v = cfg_.beta2 * v.array().matrix() +
        (1.0 - cfg_.beta2) * grad.array().square().matrix();
    param.array() -= lr * (m.array() / bc1) /
                     ((v.array() / bc2).sqrt() + cfg_.eps);
    if (cfg_.weight_decay > 0) param *= (1.0 - lr * cfg_.weight_decay);
  }

  void adam_step(MlpParams& p, const MlpGradients& g, double lr) {
    const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    for (size_t l = 0; l < p.layers.size(); ++l) {
      adam_update(p.layers[l].W, g.dW[l], m_.dW[l], v_.dW[l], lr, bc1, bc2);
      adam_update(p.layers[l].b, g.db[l], m_.db[l], v_.db[l], lr, bc1, bc2);
      double& mt = m_.dtheta_c[l];
      double& vt = v_.dtheta_c[l];
      mt = cfg_.beta1 * mt + (1.0 - cfg_.beta1) * g.dtheta_c[l];
      vt = cfg_.beta2 * vt + (1.0 - cfg_.beta2) * g.dtheta_c[l] * g.dtheta_c[l];
      p.layers[l].theta_c -=
          lr * (mt / bc1) / (std::sqrt(vt / bc2) + cfg_.eps);
    }
  }

  template <typename Mat>
  void lion_update(Mat& param, const Mat& grad, Mat& m, double lr) {
    const Mat u = (cfg_.beta1 * m + (1.0 - cfg_.beta1) * grad)
                      .array()
                      .sign()
                      .matrix();
    param -= lr * u;
    if (cfg_.weight_decay > 0) param *= (1.0 - lr * cfg_.weight_decay);
    m = cfg_.beta2 * m + (1.0 - cfg_.beta2) * grad;
  }

  void lion_step(MlpParams& p, const MlpGradients& g, double lr) {
    for (size_t l = 0; l < p.layers.size(); ++l) {
      lion_update(p.layers[l].W, g.dW[l], m_.dW[l], lr);
      lion_update(p.layers[l].b, g.db[l], m_.db[l], lr);
      double& mt = m_.dtheta_c[l];
      const double u = cfg_.beta1 * mt + (1.0 - cfg_.beta1) * g.dtheta_c[l];
      p.layers[l].theta_c -= lr * (u > 0 ? 1.0 : (u < 0 ? -1.0 : 0.0));
      mt = cfg_.beta2 * mt + (1.0 - cfg_.beta2) * g.dtheta_c[l];
    }
  }

  OptimConfig cfg_;
  MlpGradients m_, v_;
  long t_ = 0;
};

}  // namespace sns

#endif  // SNSMPC_TRAIN_OPTIMIZER_HPP_
