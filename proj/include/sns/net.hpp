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
// Lipschitz-normalized MLP: forward evaluation, exact input Jacobians, and
// reverse-mode parameter gradients that differentiate through the weight
// normalization. Hidden layers are activated; the final layer is linear so
// regression outputs keep unbounded range (its learned layer constant still
// participates in the product bound).

#ifndef SNSMPC_NET_HPP_
#define SNSMPC_NET_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sns/activation.hpp"
#include "sns/rng.hpp"

namespace sns {

struct MlpLayer {
  Eigen::MatrixXd W;   // [out x in]
  Eigen::VectorXd b;   // [out]
  double theta_c = 0;  // log of the learned layer Lipschitz constant
};

struct MlpParams {
  std::vector<MlpLayer> layers;
  Activation activation = Activation::kSoftplus;
  bool normalization_enabled = true;

  int input_dim() const { return static_cast<int>(layers.front().W.cols()); }
  int output_dim() const { return static_cast<int>(layers.back().W.rows()); }
  int depth() const { return static_cast<int>(layers.size()); }

  // Layer shapes must chain: in(l+1) == out(l).
  void validate() const {
    if (layers.empty()) throw std::invalid_argument("MlpParams: no layers");
    for (size_t l = 0; l < layers.size(); ++l) {
      if (layers[l].b.size() != layers[l].W.rows())
        throw std::invalid_argument("MlpParams: bias/weight shape mismatch");
      if (l + 1 < layers.size() &&
          layers[l + 1].W.cols() != layers[l].W.rows())
        throw std::invalid_argument("MlpParams: layer shapes do not chain");
    }
  }
};

// Row-sum weight normalization. Each row i of W is scaled by
// min(1, c / sum_k |W_ik|) with c = exp(theta_c), so the result's absolute
// row sums never exceed c and rows already within budget pass through.
inline Eigen::MatrixXd normalize_weights(const Eigen::MatrixXd& W,
                                         double theta_c) {
  if (!W.allFinite())
    throw std::invalid_argument("normalize_weights: non-finite entries");
  const double c = std::exp(theta_c);
  Eigen::MatrixXd out = W;
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    const double rowsum = W.row(i).cwiseAbs().sum();
    if (rowsum > c) out.row(i) *= c / rowsum;
  }
  return out;
}

inline Eigen::MatrixXd effective_weights(const MlpLayer& layer,
                                         bool normalization_enabled) {
  return normalization_enabled ? normalize_weights(layer.W, layer.theta_c)
                               : layer.W;
}

// Everything the backward pass needs from one forward evaluation.
struct ForwardTrace {
  std::vector<Eigen::VectorXd> inputs;   // per-layer input a_{l-1}
  std::vector<Eigen::VectorXd> preacts;  // per-layer z_l = W_hat a + b
  std::vector<Eigen::MatrixXd> w_hat;    // normalized weights
  Eigen::VectorXd output;
};

inline ForwardTrace forward_trace(const MlpParams& p,
                                  const Eigen::VectorXd& x) {
  if (x.size() != p.input_dim())
    throw std::invalid_argument("forward: input dimension mismatch");
  ForwardTrace t;
  const int L = p.depth();
  t.inputs.reserve(L);
  t.preacts.reserve(L);
  t.w_hat.reserve(L);
  Eigen::VectorXd a = x;
  for (int l = 0; l < L; ++l) {
    t.w_hat.push_back(effective_weights(p.layers[l], p.normalization_enabled));
    t.inputs.push_back(a);
    Eigen::VectorXd z = t.w_hat[l] * a + p.layers[l].b;
    t.preacts.push_back(z);
    if (l + 1 < L) {
      a = z.unaryExpr([&](double v) { return activate(p.activation, v); });
    } else {
      a = z;  // final layer linear
    }
  }
  t.output = a;
  return t;
}

inline Eigen::VectorXd forward(const MlpParams& p, const Eigen::VectorXd& x) {
  return forward_trace(p, x).output;
}

// Exact chain-rule Jacobian of forward() at x, treating the normalized
// weights as constants at their current values.
inline Eigen::MatrixXd input_jacobian(const MlpParams& p,
                                      const Eigen::VectorXd& x) {
  const ForwardTrace t = forward_trace(p, x);
  const int L = p.depth();
  Eigen::MatrixXd J = t.w_hat[0];
  for (int l = 1; l < L; ++l) {
    const Eigen::VectorXd d = t.preacts[l - 1].unaryExpr(
        [&](double v) { return activate_deriv(p.activation, v); });
    J = t.w_hat[l] * d.asDiagonal() * J;
  }
  return J;
}

struct MlpGradients {
  std::vector<Eigen::MatrixXd> dW;
  std::vector<Eigen::VectorXd> db;
  std::vector<double> dtheta_c;

  static MlpGradients zeros_like(const MlpParams& p) {
    MlpGradients g;
    for (const auto& layer : p.layers) {
      g.dW.push_back(Eigen::MatrixXd::Zero(layer.W.rows(), layer.W.cols()));
      g.db.push_back(Eigen::VectorXd::Zero(layer.b.size()));
      g.dtheta_c.push_back(0.0);
    }
    return g;
  }

  MlpGradients& operator+=(const MlpGradients& o) {
    for (size_t l = 0; l < dW.size(); ++l) {
      dW[l] += o.dW[l];
      db[l] += o.db[l];
      dtheta_c[l] += o.dtheta_c[l];
    }
    return *this;
  }

  MlpGradients& operator*=(double s) {
    for (size_t l = 0; l < dW.size(); ++l) {
      dW[l] *= s;
      db[l] *= s;
      dtheta_c[l] *= s;
    }
    return *this;
  }

  double squared_norm() const {
    double acc = 0;
    for (size_t l = 0; l < dW.size(); ++l)
      acc += dW[l].squaredNorm() + db[l].squaredNorm() +
             dtheta_c[l] * dtheta_c[l];
    return acc;
  }

  bool all_finite() const {
    for (size_t l = 0; l < dW.size(); ++l)
      if (!dW[l].allFinite() || !db[l].allFinite() ||
          !std::isfinite(dtheta_c[l]))
        return false;
    return true;
  }
};

// Backward through the normalization of one layer: given the adjoint G on
// the normalized weights W_hat, produce adjoints on the raw W and theta_c.
// Rows with rowsum <= c take the unclipped branch (identity); this includes
// the tie rowsum == c, where the no-clip subderivative is chosen. For a
// clipped row i with s_i = c / r_i:
//   dW_ij     = s_i G_ij - (s_i / r_i) sign(W_ij) <G_i, W_i>
//   dtheta_c += s_i <G_i, W_i>        (via dc/dtheta = c)
inline void normalization_backward(const Eigen::MatrixXd& W, double theta_c,
                                   const Eigen::MatrixXd& G,
                                   Eigen::MatrixXd& dW_out,
                                   double& dtheta_out) {
  const double c = std::exp(theta_c);
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    const double rowsum = W.row(i).cwiseAbs().sum();
    if (rowsum <= c) {
      dW_out.row(i) += G.row(i);
      continue;
    }
    const double s = c / rowsum;
    const double gw = G.row(i).dot(W.row(i));
    dW_out.row(i) += s * G.row(i);
    dW_out.row(i) -=
        (s / rowsum) * gw *
        W.row(i).unaryExpr([](double v) {
          return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
        });
    dtheta_out += s * gw;
  }
}

// Reverse-mode gradients of a scalar loss with respect to every W, b and
// theta_c, given the adjoint dL/dy on the network output. Optionally also
// returns dL/dx. Deterministic for fixed inputs (fixed reduction order).
inline MlpGradients param_gradients(const MlpParams& p, const ForwardTrace& t,
                                    const Eigen::VectorXd& loss_adjoint,
                                    Eigen::VectorXd* input_adjoint = nullptr) {
  const int L = p.depth();
  MlpGradients g = MlpGradients::zeros_like(p);
  Eigen::VectorXd dz = loss_adjoint;  // final layer linear: dL/dz_L = dL/dy
  for (int l = L - 1; l >= 0; --l) {
    // adjoint on the normalized weights, then through the normalization
    const Eigen::MatrixXd G = dz * t.inputs[l].transpose();
    if (p.normalization_enabled) {
      normalization_backward(p.layers[l].W, p.layers[l].theta_c, G, g.dW[l],
                             g.dtheta_c[l]);
    } else {
      g.dW[l] += G;
    }
    g.db[l] += dz;
    if (l == 0) {
      if (input_adjoint) *input_adjoint = t.w_hat[0].transpose() * dz;
      break;
    }
    Eigen::VectorXd da = t.w_hat[l].transpose() * dz;
    dz = da.cwiseProduct(t.preacts[l - 1].unaryExpr(
        [&](double v) { return activate_deriv(p.activation, v); }));
  }
  return g;
}

// Uniform fan-in initialization. theta_c starts at the log of the layer's
// max absolute row sum so the network begins exactly unclipped.
inline MlpParams init_mlp(int input_dim, const std::vector<int>& hidden,
                          int output_dim, Activation act,
                          bool normalization_enabled, Rng& rng) {
  MlpParams p;
  p.activation = act;
  p.normalization_enabled = normalization_enabled;
  std::vector<int> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output_dim);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    MlpLayer layer;
    const int fan_in = dims[l];
    const double bound = std::sqrt(6.0 / fan_in);
    layer.W.resize(dims[l + 1], dims[l]);
    for (Eigen::Index i = 0; i < layer.W.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.W.cols(); ++j)
        layer.W(i, j) = rng.uniform(-bound, bound);
    layer.b = Eigen::VectorXd::Zero(dims[l + 1]);
    double max_rowsum = 0;
    for (Eigen::Index i = 0; i < layer.W.rows(); ++i)
      max_rowsum = std::max(max_rowsum, layer.W.row(i).cwiseAbs().sum());
    layer.theta_c = max_rowsum > 0 ? std::log(max_rowsum) : 0.0;
    p.layers.push_back(std::move(layer));
  }
  return p;
}

}  // namespace sns

#endif  // SNSMPC_NET_HPP_
