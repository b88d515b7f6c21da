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
// Column-batched forward/backward passes (one column per sample) so large
// supervised fits run as GEMMs. The elementwise softplus here uses the
// max(z,0) + log(1 + exp(-|z|)) form, which Eigen vectorizes; it can differ
// from the scalar path by ~1 ulp in the deep tail, so cross-path
// comparisons should use tolerances rather than bit equality.

#ifndef SNSMPC_TRAIN_BATCHED_HPP_
#define SNSMPC_TRAIN_BATCHED_HPP_

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "sns/net.hpp"

namespace sns {

namespace detail {

inline Eigen::ArrayXXd activate_batch(Activation a, const Eigen::ArrayXXd& z) {
  switch (a) {
    case Activation::kSoftplus:
      return z.max(0.0) + (1.0 + (-z.abs()).exp()).log();
    case Activation::kTanh:
      return z.tanh();
    case Activation::kMish: {
      const Eigen::ArrayXXd sp = z.max(0.0) + (1.0 + (-z.abs()).exp()).log();
      return z * sp.tanh();
    }
    case Activation::kRelu:
      return z.max(0.0);
    case Activation::kIdentity:
      return z;
  }
  return z;
}

inline Eigen::ArrayXXd activate_deriv_batch(Activation a,
                                            const Eigen::ArrayXXd& z) {
  switch (a) {
    case Activation::kSoftplus:
      return 1.0 / (1.0 + (-z).exp());
    case Activation::kTanh: {
      const Eigen::ArrayXXd t = z.tanh();
      return 1.0 - t.square();
    }
    case Activation::kMish: {
      const Eigen::ArrayXXd sp = z.max(0.0) + (1.0 + (-z.abs()).exp()).log();
      const Eigen::ArrayXXd t = sp.tanh();
      const Eigen::ArrayXXd sig = 1.0 / (1.0 + (-z).exp());
      return t + z * (1.0 - t.square()) * sig;
    }
    case Activation::kRelu:
      return (z > 0.0).cast<double>();
    case Activation::kIdentity:
      return Eigen::ArrayXXd::Ones(z.rows(), z.cols());
  }
  return Eigen::ArrayXXd::Ones(z.rows(), z.cols());
}

}  // namespace detail

struct BatchTrace {
  std::vector<Eigen::MatrixXd> inputs;   // a_{l-1}, [in_l x N]
  std::vector<Eigen::MatrixXd> preacts;  // z_l, [out_l x N]
  std::vector<Eigen::MatrixXd> w_hat;
  Eigen::MatrixXd output;
};

// X is [input_dim x N]; returns [output_dim x N].
inline Eigen::MatrixXd forward_batch(const MlpParams& p,
                                     const Eigen::MatrixXd& X,
                                     BatchTrace* trace = nullptr) {
  if (X.rows() != p.input_dim())
    throw std::invalid_argument("forward_batch: input dimension mismatch");
  const int L = p.depth();
  Eigen::MatrixXd a = X;
  if (trace) {
    trace->inputs.clear();
    trace->preacts.clear();
    trace->w_hat.clear();
  }
  for (int l = 0; l < L; ++l) {
    Eigen::MatrixXd w = effective_weights(p.layers[l], p.normalization_enabled);
    Eigen::MatrixXd z = w * a;
    z.colwise() += p.layers[l].b;
    if (trace) {
      trace->inputs.push_back(std::move(a));
      trace->w_hat.push_back(std::move(w));
    }
    if (l + 1 < L) {
      a = detail::activate_batch(p.activation, z.array()).matrix();
    } else {
      a = z;
    }
    if (trace) trace->preacts.push_back(std::move(z));
  }
  if (trace) trace->output = a;
  return a;
}

// Gout is dL/d(output), [output_dim x N]. Accumulates parameter gradients
// (summed over columns) and optionally dL/dX.
inline MlpGradients backward_batch(const MlpParams& p, const BatchTrace& t,
                                   const Eigen::MatrixXd& Gout,
                                   Eigen::MatrixXd* dX = nullptr) {
  const int L = p.depth();
  MlpGradients g = MlpGradients::zeros_like(p);
  Eigen::MatrixXd dz = Gout;  // final layer linear
  for (int l = L - 1; l >= 0; --l) {
    const Eigen::MatrixXd G = dz * t.inputs[l].transpose();
    if (p.normalization_enabled) {
      normalization_backward(p.layers[l].W, p.layers[l].theta_c, G, g.dW[l],
                             g.dtheta_c[l]);
    } else {
      g.dW[l] += G;
    }
    g.db[l] += dz.rowwise().sum();
    if (l == 0) {
      if (dX) *dX = t.w_hat[0].transpose() * dz;
      break;
    }
    const Eigen::MatrixXd da = t.w_hat[l].transpose() * dz;
    dz = (da.array() *
          detail::activate_deriv_batch(p.activation, t.preacts[l - 1].array()))
             .matrix();
  }
  return g;
}

}  // namespace sns

#endif  // SNSMPC_TRAIN_BATCHED_HPP_
