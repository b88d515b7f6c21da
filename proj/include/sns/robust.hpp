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
// Heavy-tailed and Gaussian likelihood objectives plus the robust statistics
// backing them. Training losses drop additive constants and log|Sigma|
// (homoscedastic form); the per-dimension residual report keeps the full
// constants so likelihood families stay comparable.

#ifndef SNSMPC_ROBUST_HPP_
#define SNSMPC_ROBUST_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sns {

enum class LikelihoodKind { kCauchy, kGaussian };

inline std::string to_string(LikelihoodKind k) {
  return k == LikelihoodKind::kCauchy ? "cauchy" : "gaussian";
}

inline LikelihoodKind likelihood_from_string(const std::string& s) {
  if (s == "cauchy") return LikelihoodKind::kCauchy;
  if (s == "gaussian") return LikelihoodKind::kGaussian;
  throw std::invalid_argument("unknown likelihood: " + s);
}

constexpr double kScaleFloor = 1e-8;

// Per-dimension robust location/scale summary of a data matrix (rows are
// samples). Medians use the lower-of-two order statistic for even counts;
// std is the population estimate. sigma_hat is the loss scale: MAD on the
// Cauchy path, std on the Gaussian path, floored at 1e-8.
struct DispersionStats {
  LikelihoodKind kind = LikelihoodKind::kCauchy;
  Eigen::VectorXd median;
  Eigen::VectorXd mad;
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
  Eigen::VectorXd sigma_hat;

  Eigen::VectorXd location() const {
    return kind == LikelihoodKind::kCauchy ? median : mean;
  }

  int dims() const { return static_cast<int>(median.size()); }
};

namespace detail {

// Lower-of-two-middles median; exact order statistic of the empirical
// distribution and deterministic under ties.
inline double lower_median(std::vector<double>& scratch) {
  const size_t n = scratch.size();
  const size_t k = (n - 1) / 2;
  std::nth_element(scratch.begin(), scratch.begin() + k, scratch.end());
  return scratch[k];
}

}  // namespace detail

inline DispersionStats median_mad(const Eigen::MatrixXd& data,
                                  LikelihoodKind kind = LikelihoodKind::kCauchy) {
  const Eigen::Index n_samples = data.rows();
  const Eigen::Index n_dims = data.cols();
  if (n_samples < 1) throw std::invalid_argument("median_mad: empty data");
  DispersionStats s;
  s.kind = kind;
  s.median.resize(n_dims);
  s.mad.resize(n_dims);
  s.mean.resize(n_dims);
  s.std.resize(n_dims);
  s.sigma_hat.resize(n_dims);
  std::vector<double> scratch(static_cast<size_t>(n_samples));
  for (Eigen::Index d = 0; d < n_dims; ++d) {
    for (Eigen::Index i = 0; i < n_samples; ++i) scratch[i] = data(i, d);
    s.median(d) = detail::lower_median(scratch);
    for (Eigen::Index i = 0; i < n_samples; ++i)
      scratch[i] = std::abs(data(i, d) - s.median(d));
    s.mad(d) = detail::lower_median(scratch);
    s.mean(d) = data.col(d).mean();
    s.std(d) = std::sqrt((data.col(d).array() - s.mean(d)).square().sum() /
                         static_cast<double>(n_samples));
    const double scale =
        kind == LikelihoodKind::kCauchy ? s.mad(d) : s.std(d);
    s.sigma_hat(d) = std::max(scale, kScaleFloor);
  }
  return s;
}

// Cauchy negative log-likelihood up to its additive constant, with the
// log|Sigma| term dropped (homoscedastic training form):
//   (n+1)/2 * log(1 + sum_i ((x_i - mu_i)/sigma_i)^2)
inline double cauchy_nll(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                         const Eigen::VectorXd& sigma) {
  if ((sigma.array() <= 0).any())
    throw std::invalid_argument("cauchy_nll: sigma must be positive");
  const double n = static_cast<double>(x.size());
  const double q = ((x - mu).array() / sigma.array()).square().sum();
  return 0.5 * (n + 1.0) * std::log1p(q);
}

// d cauchy_nll / d mu.
inline Eigen::VectorXd cauchy_nll_grad_mu(const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& mu,
                                          const Eigen::VectorXd& sigma) {
  const double n = static_cast<double>(x.size());
  const Eigen::ArrayXd eps = (x - mu).array();
  const double q = (eps / sigma.array()).square().sum();
  return (-(n + 1.0) / (1.0 + q) * eps / sigma.array().square()).matrix();
}

// Mean Mahalanobis error: (1/n) * 1/2 * sum_i ((x_i - mu_i)/sigma_i)^2.
inline double gaussian_mme(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                           const Eigen::VectorXd& sigma) {
  if ((sigma.array() <= 0).any())
    throw std::invalid_argument("gaussian_mme: sigma must be positive");
  const double n = static_cast<double>(x.size());
  return 0.5 / n * ((x - mu).array() / sigma.array()).square().sum();
}

inline Eigen::VectorXd gaussian_mme_grad_mu(const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& mu,
                                            const Eigen::VectorXd& sigma) {
  const double n = static_cast<double>(x.size());
  return (-(x - mu).array() / sigma.array().square() / n).matrix();
}

// One robust error term under the configured likelihood, averaged across
// the state dimension: Cauchy gives (n+1)/(2n) * log(1 + q), Gaussian the
// MME. Optionally fills the gradient with respect to mu.
inline double robust_term(LikelihoodKind kind, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& mu,
                          const Eigen::VectorXd& sigma,
                          Eigen::VectorXd* grad_mu = nullptr) {
  const double n = static_cast<double>(x.size());
  if (kind == LikelihoodKind::kCauchy) {
    if (grad_mu) *grad_mu = cauchy_nll_grad_mu(x, mu, sigma) / n;
    return cauchy_nll(x, mu, sigma) / n;
  }
  if (grad_mu) *grad_mu = gaussian_mme_grad_mu(x, mu, sigma);
  return gaussian_mme(x, mu, sigma);
}

// Mean Cauchy error of a prediction batch (rows are samples), averaged
// across state and batch dimensions in a fixed sequential order.
inline double mce(const Eigen::MatrixXd& x, const Eigen::MatrixXd& mu,
                  const DispersionStats& stats) {
  if (x.rows() < 1) throw std::invalid_argument("mce: empty batch");
  if (x.rows() != mu.rows() || x.cols() != mu.cols())
    throw std::invalid_argument("mce: shape mismatch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    acc += robust_term(LikelihoodKind::kCauchy, x.row(i).transpose(),
                       mu.row(i).transpose(), stats.sigma_hat);
  return acc / static_cast<double>(x.rows());
}

// Fixed elementwise normalization layer: (x - location) / scale.
inline Eigen::VectorXd normalize_io(const Eigen::VectorXd& x,
                                    const DispersionStats& stats,
                                    LikelihoodKind kind) {
  const Eigen::VectorXd& loc =
      kind == LikelihoodKind::kCauchy ? stats.median : stats.mean;
  return ((x - loc).array() / stats.sigma_hat.array()).matrix();
}

inline Eigen::VectorXd denormalize_io(const Eigen::VectorXd& z,
                                      const DispersionStats& stats,
                                      LikelihoodKind kind) {
  const Eigen::VectorXd& loc =
      kind == LikelihoodKind::kCauchy ? stats.median : stats.mean;
  return (z.array() * stats.sigma_hat.array()).matrix() + loc;
}

// Residual-distribution diagnostic: per-dimension average NLL under
// Cauchy(median, MAD), Gaussian(mean, std) and robust Gaussian
// (median, 1.4826 * MAD), full constants retained so the three families
// are directly comparable.
struct ResidualFitRow {
  int dimension = 0;
  double cauchy_nll = 0.0;
  double gaussian_nll = 0.0;
  double robust_gaussian_nll = 0.0;
  bool degenerate = false;
};

struct ResidualFitReport {
  std::vector<ResidualFitRow> rows;

  void write_csv(std::ostream& os) const {
    os << "# residual_fit v1\n";
    os << "dimension,cauchy_nll,gaussian_nll,robust_gaussian_nll\n";
    char buf[128];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", r.dimension,
                    r.cauchy_nll, r.gaussian_nll, r.robust_gaussian_nll);
      os << buf;
    }
  }
};

inline ResidualFitReport fit_residual_report(const Eigen::MatrixXd& residuals) {
  if (residuals.rows() < 30)
    throw std::invalid_argument("fit_residual_report: need >= 30 samples");
  const DispersionStats stats = median_mad(residuals);
  const double n = static_cast<double>(residuals.rows());
  ResidualFitReport report;
  for (Eigen::Index d = 0; d < residuals.cols(); ++d) {
    ResidualFitRow row;
    row.dimension = static_cast<int>(d);
    if (stats.mad(d) <= 0.0 || stats.std(d) <= 0.0) {
      row.degenerate = true;
      row.cauchy_nll = row.gaussian_nll = row.robust_gaussian_nll =
          std::numeric_limits<double>::quiet_NaN();
      report.rows.push_back(row);
      continue;
    }
    const auto col = residuals.col(d).array();
    {
      const double s = stats.mad(d);
      row.cauchy_nll = (std::log(std::numbers::pi * s) +
                        (((col - stats.median(d)) / s).square() + 1.0).log())
                           .sum() /
                       n;
    }
    {
      const double s = stats.std(d);
      row.gaussian_nll =
          0.5 * std::log(2.0 * std::numbers::pi * s * s) +
          (col - stats.mean(d)).square().sum() / (2.0 * s * s * n);
    }
    {
      const double s = 1.4826 * stats.mad(d);
      row.robust_gaussian_nll =
          0.5 * std::log(2.0 * std::numbers::pi * s * s) +
          (col - stats.median(d)).square().sum() / (2.0 * s * s * n);
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace sns

#endif  // SNSMPC_ROBUST_HPP_
