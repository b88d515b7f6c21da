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
// Smoothness bookkeeping for Lipschitz-normalized MLPs: the product bound
// C = prod_l c_l, the propagated curvature sum S = sum_l c_l prod_{j<l} c_j,
// the budgeted penalty max(1, C S^{k-1} / B_k), and empirical probes that
// lower-bound the true Lipschitz constant from samples.

#ifndef SNSMPC_SMOOTH_HPP_
#define SNSMPC_SMOOTH_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sns/net.hpp"
#include "sns/rng.hpp"

namespace sns {

// Smoothness contract: order k in {1,2}, budget B_k (> 0) and penalty
// weight lambda (>= 0). B_1 is the sensitivity budget c_ub, B_2 the
// curvature budget d_ub.
struct SmoothnessBudget {
  int order = 1;
  double budget = 1.0;
  double weight = 0.0;

  void validate() const {
    if (order != 1 && order != 2)
      throw std::invalid_argument("SmoothnessBudget: order must be 1 or 2");
    if (!(budget > 0))
      throw std::invalid_argument("SmoothnessBudget: budget must be > 0");
    if (weight < 0)
      throw std::invalid_argument("SmoothnessBudget: weight must be >= 0");
  }
};

struct BoundReport {
  double C = 1.0;          // prod_l c_l
  double S = 0.0;          // sum_l c_l prod_{j<l} c_j
  double jac_bound = 0.0;  // C * S
  bool from_theta = true;  // false: layer constants taken from row-sum norms
  std::vector<double> layer_constants;
};

// For normalized networks the layer constants are exp(theta_c); for plain
// MLPs they fall back to the actual infinity-operator norms (max absolute
// row sums) so the same report stays meaningful for baselines.
inline BoundReport lipschitz_bound(const MlpParams& p) {
  BoundReport r;
  r.from_theta = p.normalization_enabled;
  for (const auto& layer : p.layers) {
    if (p.normalization_enabled) {
      r.layer_constants.push_back(std::exp(layer.theta_c));
    } else {
      double c = 0.0;
      for (Eigen::Index i = 0; i < layer.W.rows(); ++i)
        c = std::max(c, layer.W.row(i).cwiseAbs().sum());
      r.layer_constants.push_back(c);
    }
  }
  if (p.normalization_enabled) {
    double theta_sum = 0.0;
    for (const auto& layer : p.layers) theta_sum += layer.theta_c;
    r.C = std::exp(theta_sum);
  } else {
    r.C = 1.0;
    for (double c : r.layer_constants) r.C *= c;
  }
  r.S = 0.0;
  double prefix = 1.0;
  for (double c : r.layer_constants) {
    prefix *= c;  // P_l = prod_{j<=l} c_j; S = sum_l P_l
    r.S += prefix;
  }
  r.jac_bound = r.C * r.S;
  return r;
}

// lambda * max(1, C S^{k-1} / B_k). Equals lambda exactly inside budget.
inline double smoothness_penalty(const MlpParams& p,
                                 const SmoothnessBudget& budget) {
  budget.validate();
  const BoundReport r = lipschitz_bound(p);
  const double ratio =
      (budget.order == 1 ? r.C : r.jac_bound) / budget.budget;
  return budget.weight * std::max(1.0, ratio);
}

// Accumulates d penalty / d theta_c into grads. Requires a normalized
// network (the exp parameterization is what makes the k=1 gradient
// identical across layers). At the kink ratio == 1 the inside branch
// (zero gradient) is chosen.
inline void smoothness_penalty_backward(const MlpParams& p,
                                        const SmoothnessBudget& budget,
                                        MlpGradients& grads) {
  budget.validate();
  if (!p.normalization_enabled)
    throw std::invalid_argument(
        "smoothness_penalty_backward: requires a normalized network");
  const BoundReport r = lipschitz_bound(p);
  const int L = p.depth();
  if (budget.order == 1) {
    if (r.C <= budget.budget) return;
    const double g = budget.weight * r.C / budget.budget;
    for (int l = 0; l < L; ++l) grads.dtheta_c[l] += g;
    return;
  }
  if (r.jac_bound <= budget.budget) return;
  // d(C S)/d theta_m = C S + C * sum_{l >= m} P_l with P_l the prefix
  // products; every prefix containing c_m differentiates to itself.
  std::vector<double> prefix(L);
  double acc = 0.0;
  for (int l = 0; l < L; ++l) {
    acc += p.layers[l].theta_c;
    prefix[l] = std::exp(acc);
  }
  double suffix_sum = 0.0;
  std::vector<double> tail(L);
  for (int l = L - 1; l >= 0; --l) {
    suffix_sum += prefix[l];
    tail[l] = suffix_sum;
  }
  const double scale = budget.weight / budget.budget;
  for (int l = 0; l < L; ++l)
    grads.dtheta_c[l] += scale * (r.C * r.S + r.C * tail[l]);
}

// Curvature budget derived from a sensitivity budget under the equal-layer
// assumption: d_ub = c_ub * sum_l c_ub^(l/L).
inline double d_ub_from_c_ub(double c_ub, int num_layers) {
  if (!(c_ub > 0) || num_layers < 1)
    throw std::invalid_argument("d_ub_from_c_ub: bad arguments");
  double s = 0.0;
  for (int l = 1; l <= num_layers; ++l)
    s += std::pow(c_ub, static_cast<double>(l) / num_layers);
  return c_ub * s;
}

// Sampled lower-bound probe of the true Lipschitz constant, in the
// infinity norm to match the row-sum bound: the max difference ratio over
// random pairs and the max Jacobian infinity-norm over the same points.
struct EmpiricalLipschitz {
  double pair_ratio_max = 0.0;
  double jacobian_norm_max = 0.0;
  double value() const { return std::max(pair_ratio_max, jacobian_norm_max); }
};

inline EmpiricalLipschitz empirical_lipschitz(const MlpParams& p,
                                              const Eigen::VectorXd& lo,
                                              const Eigen::VectorXd& hi,
                                              int n_pairs, Rng& rng) {
  if (n_pairs < 1)
    throw std::invalid_argument("empirical_lipschitz: n_pairs must be >= 1");
  const int d = p.input_dim();
  EmpiricalLipschitz out;
  Eigen::VectorXd a(d), b(d);
  for (int k = 0; k < n_pairs; ++k) {
    for (int i = 0; i < d; ++i) a(i) = rng.uniform(lo(i), hi(i));
    for (int i = 0; i < d; ++i) b(i) = rng.uniform(lo(i), hi(i));
    const double dist = (a - b).lpNorm<Eigen::Infinity>();
    if (dist == 0.0) continue;
    const double num =
        (forward(p, a) - forward(p, b)).lpNorm<Eigen::Infinity>();
    out.pair_ratio_max = std::max(out.pair_ratio_max, num / dist);
    const Eigen::MatrixXd J = input_jacobian(p, a);
    double jn = 0.0;
    for (Eigen::Index i = 0; i < J.rows(); ++i)
      jn = std::max(jn, J.row(i).cwiseAbs().sum());
    out.jacobian_norm_max = std::max(out.jacobian_norm_max, jn);
  }
  return out;
}

}  // namespace sns

#endif  // SNSMPC_SMOOTH_HPP_
