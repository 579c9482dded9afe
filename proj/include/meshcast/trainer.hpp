#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "meshcast/dataset.hpp"
#include "meshcast/horizon.hpp"
#include "meshcast/model.hpp"

namespace meshcast {

struct TrainConfig {
  std::vector<int> horizons = {1};  // must contain 1
  int epochs = 500;
  double lr0 = 1e-3;
  double weight_decay = 1e-4;
  bool coupled_weight_decay = false;  // default is decoupled shrinkage
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double lambda_v = 1.0;
  double lambda_h = 1.0;
  int batch_size = 8;  // pairs per gradient step, accumulated sequentially
  std::uint64_t seed = 1;
  int threads = 1;

  // Model hyperparameters.
  int hidden = 128;
  Activation act = Activation::Relu;
  bool magnitude_only_inputs = false;
};

void validate_train_config(const TrainConfig& cfg);

/// Dual-head weighted MSE in normalized space:
/// lambda_v * mean over (nodes x 2) velocity squared error
/// + lambda_h * mean over nodes of thickness squared error.
double loss(const DenseMatrix& pred_state, const DenseMatrix& target_state, double lambda_v,
            double lambda_h);

/// First/second moment buffers for Adam, one per parameter matrix.
struct AdamState {
  std::vector<DenseMatrix> m;
  std::vector<DenseMatrix> v;
  long long step = 0;
};

AdamState make_adam_state(const ModelParams& params);

/// Decoupled weight decay (params scaled by 1 - lr*wd before the moment
/// update), then the bias-corrected Adam step. coupled_weight_decay instead
/// folds wd*param into the gradient.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const TrainConfig& cfg, double lr);

/// lr0 * 0.5 * (1 + cos(pi * epoch / epochs)).
double cosine_lr(int epoch, int epochs, double lr0);

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  ModelParams best_params;
  ModelConfig model_config;
  int best_epoch = -1;
  double best_val_loss = 0.0;
  std::vector<EpochRecord> history;
};

/// Per-pair loss + gradient via the tape; exposed for the linearity and
/// gradient-check tests.
double pair_loss_and_grad(const ModelParams& params, const ModelConfig& model_cfg,
                          const Trajectory& traj, int t, int h, const NormStats& stats,
                          const HorizonSet& horizons, double lambda_v, double lambda_h,
                          ModelParams* grads_out);

/// Mean loss over all (t, h) pairs of the given trajectories; no parameter
/// updates.
double evaluate_loss(const ModelParams& params, const ModelConfig& model_cfg,
                     const std::vector<Trajectory>& trajectories, std::span<const int> indices,
                     const NormStats& stats, const HorizonSet& horizons, const TrainConfig& cfg);

/// Joint multi-horizon training: every epoch shuffles the full pair list with
/// all horizons mixed, accumulates batch gradients (deterministic ordered
/// reduction across workers), steps Adam under the cosine schedule, and tracks
/// validation loss. Returns the checkpoint with the lowest validation loss.
TrainResult train(const std::vector<Trajectory>& trajectories, std::span<const int> train_indices,
                  std::span<const int> val_indices, const NormStats& stats,
                  const TrainConfig& cfg);

}  // namespace meshcast
