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

#ifndef SNSMPC_ACTIVATION_HPP_
#define SNSMPC_ACTIVATION_HPP_

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sns {

enum class Activation { kSoftplus, kTanh, kMish, kRelu, kIdentity };

inline std::string to_string(Activation a) {
  switch (a) {
    case Activation::kSoftplus: return "softplus";
    case Activation::kTanh: return "tanh";
    case Activation::kMish: return "mish";
    case Activation::kRelu: return "relu";
    case Activation::kIdentity: return "identity";
  }
  return "?";
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "softplus") return Activation::kSoftplus;
  if (s == "tanh") return Activation::kTanh;
  if (s == "mish") return Activation::kMish;
  if (s == "relu") return Activation::kRelu;
  if (s == "identity") return Activation::kIdentity;
  throw std::invalid_argument("unknown activation: " + s);
}

inline double softplus(double z) {
  if (z > 34.0) return z;          // exp(z) overflows the useful range
  if (z < -34.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

inline double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double activate(Activation a, double z) {
  switch (a) {
    case Activation::kSoftplus: return softplus(z);
    case Activation::kTanh: return std::tanh(z);
    case Activation::kMish: return z * std::tanh(softplus(z));
    case Activation::kRelu: return z > 0.0 ? z : 0.0;
    case Activation::kIdentity: return z;
  }
  return z;
}

inline double activate_deriv(Activation a, double z) {
  switch (a) {
    case Activation::kSoftplus: return sigmoid(z);
    case Activation::kTanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::kMish: {
      const double sp = softplus(z);
      const double t = std::tanh(sp);
      return t + z * (1.0 - t * t) * sigmoid(z);
    }
    case Activation::kRelu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::kIdentity: return 1.0;
  }
  return 1.0;
}

// Supremum of |act'| over the real line. Slightly above 1 for mish, exactly
// 1 for the others; relu/identity included for completeness.
inline double activation_lipschitz(Activation a) {
  return a == Activation::kMish ? 1.0880981 : 1.0;
}

// Supremum of |act''|; the layerwise 2-smoothness constant. Softplus peaks
// at 1/4 (sigmoid'(0)); tanh at 4/(3*sqrt(3)); relu has no finite bound.
inline double activation_curvature(Activation a) {
  switch (a) {
    case Activation::kSoftplus: return 0.25;
    case Activation::kTanh: return 4.0 / (3.0 * std::sqrt(3.0));
    case Activation::kMish: return 1.088;  // numerically estimated peak
    case Activation::kRelu: return std::numeric_limits<double>::infinity();
    case Activation::kIdentity: return 0.0;
  }
  return 0.0;
}

}  // namespace sns

#endif  // SNSMPC_ACTIVATION_HPP_
