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
// Minibatched supervised regression driver used by the function-fitting and
// one-step dynamics experiments. Work inside a minibatch is split into a
// fixed number of column chunks whose partial gradients are reduced in
// index order, so results are independent of how many threads execute the
// chunks.

#ifndef SNSMPC_TRAIN_SUPERVISED_HPP_
#define SNSMPC_TRAIN_SUPERVISED_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

#include "sns/net.hpp"
#include "sns/robust.hpp"
#include "sns/rng.hpp"
#include "sns/smooth.hpp"
#include "sns/train/batched.hpp"
#include "sns/train/optimizer.hpp"

namespace sns {

struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class FitLoss { kMse, kMce, kMme };

inline std::string to_string(FitLoss l) {
  switch (l) {
    case FitLoss::kMse: return "mse";
    case FitLoss::kMce: return "mce";
    case FitLoss::kMme: return "mme";
  }
  return "?";
}

inline FitLoss fit_loss_from_string(const std::string& s) {
  if (s == "mse") return FitLoss::kMse;
  if (s == "mce") return FitLoss::kMce;
  if (s == "mme") return FitLoss::kMme;
  throw std::invalid_argument("unknown loss: " + s);
}

struct SupervisedConfig {
  std::vector<int> hidden = {64, 64, 64, 64};
  Activation activation = Activation::kSoftplus;
  bool normalization_enabled = true;
  SmoothnessBudget budget{1, 1.0, 0.0};  // weight 0 disables the penalty
  FitLoss loss = FitLoss::kMse;
  bool io_normalization = false;
  int epochs = 1000;
  int batch_size = 0;  // 0 = full batch
  OptimConfig optim;
  int chunks = 2;
  std::uint64_t seed = 0;
  int lip_probe_pairs = 0;  // per-epoch empirical probe; 0 disables
  int log_every = 1;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;  // epoch-mean training loss (normalized space)
  double C = 0.0;
  double S = 0.0;
  double emp_lip = 0.0;  // 0 when probing is disabled
  double lr = 0.0;
};

// Trained model plus the fixed normalization layers (identity stats when
// io_normalization is off).
struct SupervisedModel {
  MlpParams net;
  bool io_normalization = false;
  LikelihoodKind stats_kind = LikelihoodKind::kGaussian;
  DispersionStats in_stats, out_stats;

  // X rows are samples in raw units; returns predictions in raw units.
  Eigen::MatrixXd predict(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd Xc = X.transpose();
    if (io_normalization) {
      const Eigen::VectorXd loc = in_stats.location();
      Xc = ((Xc.colwise() - loc).array().colwise() /
            in_stats.sigma_hat.array())
               .matrix();
    }
    Eigen::MatrixXd Yc = forward_batch(net, Xc);
    if (io_normalization) {
      Yc = (Yc.array().colwise() * out_stats.sigma_hat.array()).matrix();
      Yc.colwise() += out_stats.location();
    }
    return Yc.transpose();
  }
};

struct FitResult {
  SupervisedModel model;
  std::vector<EpochRecord> history;
};

namespace detail {

// Loss value and dL/d(prediction) for one column block, in the (possibly
// normalized) training space. Scale conventions: MSE averages over samples
// and output dims; MCE/MME average over samples with the per-dimension
// forms from the robust module (unit dispersion in normalized space).
struct ChunkLoss {
  double value = 0.0;
  Eigen::MatrixXd grad;  // same shape as predictions
};

inline ChunkLoss loss_and_grad(FitLoss kind, const Eigen::MatrixXd& pred,
                               const Eigen::MatrixXd& target,
                               double inv_batch) {
  ChunkLoss out;
  const Eigen::MatrixXd eps = pred - target;
  const double n = static_cast<double>(pred.rows());
  switch (kind) {
    case FitLoss::kMse: {
      out.value = eps.squaredNorm() / n * inv_batch;
      out.grad = (2.0 * inv_batch / n) * eps;
      break;
    }
    case FitLoss::kMce: {
      const Eigen::ArrayXd q = eps.array().square().colwise().sum();
      out.value =
          ((n + 1.0) / (2.0 * n)) * (1.0 + q).log().sum() * inv_batch;
      out.grad =
          (eps.array().rowwise() * ((n + 1.0) / n * inv_batch / (1.0 + q)).transpose())
              .matrix();
      break;
    }
    case FitLoss::kMme: {
      out.value = 0.5 / n * eps.squaredNorm() * inv_batch;
      out.grad = (inv_batch / n) * eps;
      break;
    }
  }
  return out;
}

}  // namespace detail

inline FitResult fit_supervised(const Eigen::MatrixXd& X_raw,
                                const Eigen::MatrixXd& Y_raw,
                                const SupervisedConfig& cfg) {
  if (X_raw.rows() != Y_raw.rows() || X_raw.rows() < 1)
    throw std::invalid_argument("fit_supervised: bad data shapes");
  cfg.budget.validate();
  const int N = static_cast<int>(X_raw.rows());
  const int din = static_cast<int>(X_raw.cols());
  const int dout = static_cast<int>(Y_raw.cols());

  FitResult result;
  SupervisedModel& model = result.model;
  model.io_normalization = cfg.io_normalization;
  model.stats_kind = cfg.loss == FitLoss::kMce ? LikelihoodKind::kCauchy
                                               : LikelihoodKind::kGaussian;
  model.in_stats = median_mad(X_raw, model.stats_kind);
  model.out_stats = median_mad(Y_raw, model.stats_kind);

  // column-major training copies, normalized if requested
  Eigen::MatrixXd X = X_raw.transpose();
  Eigen::MatrixXd Y = Y_raw.transpose();
  if (cfg.io_normalization) {
    const Eigen::VectorXd xloc = model.in_stats.location();
    const Eigen::VectorXd yloc = model.out_stats.location();
    X = ((X.colwise() - xloc).array().colwise() /
         model.in_stats.sigma_hat.array())
            .matrix();
    Y = ((Y.colwise() - yloc).array().colwise() /
         model.out_stats.sigma_hat.array())
            .matrix();
  }

  Rng rng(cfg.seed);
  model.net = init_mlp(din, cfg.hidden, dout, cfg.activation,
                       cfg.normalization_enabled, rng);

  const int batch = cfg.batch_size > 0 ? std::min(cfg.batch_size, N) : N;
  const int steps_per_epoch = (N + batch - 1) / batch;
  OptimConfig optim = cfg.optim;
  if (optim.schedule == OptimConfig::Schedule::kCosine)
    optim.total_steps = cfg.epochs * steps_per_epoch;
  Optimizer opt(model.net, optim);

  std::vector<int> perm(N);
  std::iota(perm.begin(), perm.end(), 0);
  Eigen::MatrixXd Xb(din, batch), Yb(dout, batch);

  const int chunks = std::max(1, cfg.chunks);
  std::vector<MlpGradients> chunk_grads;
  std::vector<double> chunk_loss(chunks, 0.0);

  const Eigen::VectorXd probe_lo = X.rowwise().minCoeff();
  const Eigen::VectorXd probe_hi = X.rowwise().maxCoeff();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < N) {  // Fisher-Yates reshuffle each epoch
      for (int i = N - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.uniform_int(0, i)]);
    }
    double epoch_loss = 0.0;
    double lr_used = 0.0;
    for (int s = 0; s < steps_per_epoch; ++s) {
      const int begin = s * batch;
      const int count = std::min(batch, N - begin);
      for (int i = 0; i < count; ++i) {
        Xb.col(i) = X.col(perm[begin + i]);
        Yb.col(i) = Y.col(perm[begin + i]);
      }
      const double inv_batch = 1.0 / count;

      chunk_grads.assign(chunks, MlpGradients::zeros_like(model.net));
      auto run_chunk = [&](int c) {
        const int c0 = c * count / chunks;
        const int c1 = (c + 1) * count / chunks;
        if (c1 <= c0) return;
        BatchTrace trace;
        const Eigen::MatrixXd pred =
            forward_batch(model.net, Xb.middleCols(c0, c1 - c0), &trace);
        const auto ls = detail::loss_and_grad(
            cfg.loss, pred, Yb.middleCols(c0, c1 - c0), inv_batch);
        chunk_loss[c] = ls.value;
        chunk_grads[c] = backward_batch(model.net, trace, ls.grad);
      };
      if (chunks == 1) {
        run_chunk(0);
      } else {
        std::vector<std::thread> pool;
        pool.reserve(chunks);
        for (int c = 0; c < chunks; ++c) pool.emplace_back(run_chunk, c);
        for (auto& th : pool) th.join();
      }
      MlpGradients grads = std::move(chunk_grads[0]);
      double step_loss = chunk_loss[0];
      for (int c = 1; c < chunks; ++c) {
        grads += chunk_grads[c];
        step_loss += chunk_loss[c];
      }
      if (cfg.budget.weight > 0 && model.net.normalization_enabled) {
        step_loss += smoothness_penalty(model.net, cfg.budget);
        smoothness_penalty_backward(model.net, cfg.budget, grads);
      }
      if (!std::isfinite(step_loss) || !grads.all_finite())
        throw NumericsError("fit_supervised: non-finite loss at epoch " +
                            std::to_string(epoch));
      lr_used = opt.step(model.net, grads);
      epoch_loss += step_loss;
    }
    if (epoch % cfg.log_every == 0 || epoch + 1 == cfg.epochs) {
      EpochRecord rec;
      rec.epoch = epoch;
      rec.loss = epoch_loss / steps_per_epoch;
      const BoundReport rep = lipschitz_bound(model.net);
      rec.C = rep.C;
      rec.S = rep.S;
      rec.lr = lr_used;
      if (cfg.lip_probe_pairs > 0) {
        Rng probe = rng.fork(1000000 + epoch);
        rec.emp_lip =
            empirical_lipschitz(model.net, probe_lo, probe_hi,
                                cfg.lip_probe_pairs, probe)
                .value();
      }
      result.history.push_back(rec);
    }
  }
  return result;
}

// Mean squared error of the model on raw-unit data (rows are samples).
inline double evaluate_mse(const SupervisedModel& model,
                           const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  const Eigen::MatrixXd pred = model.predict(X);
  return (pred - Y).squaredNorm() /
         static_cast<double>(Y.rows() * Y.cols());
}

}  // namespace sns

#endif  // SNSMPC_TRAIN_SUPERVISED_HPP_
