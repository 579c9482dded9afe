#include "meshcast/trainer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "meshcast/error.hpp"
#include "meshcast/parallel.hpp"
#include "meshcast/rng.hpp"

namespace meshcast {

namespace {

ModelParams zero_like(const ModelParams& params) {
  ModelParams out;
  auto src = param_list(params);
  auto dst = param_list(out);
  for (std::size_t i = 0; i < src.size(); ++i) {
    *dst[i] = DenseMatrix(src[i]->rows, src[i]->cols);
  }
  return out;
}

void add_into(ModelParams& acc, const ModelParams& delta) {
  auto a = param_list(acc);
  auto d = param_list(delta);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a[i]->data.size(); ++k) a[i]->data[k] += d[i]->data[k];
  }
}

void scale_in_place(ModelParams& p, double factor) {
  for (DenseMatrix* m : param_list(p)) {
    for (double& v : m->data) v *= factor;
  }
}

}  // namespace

void validate_train_config(const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw UsageError("train config: epochs must be >= 1");
  if (cfg.lambda_v < 0.0 || cfg.lambda_h < 0.0 || (cfg.lambda_v == 0.0 && cfg.lambda_h == 0.0)) {
    throw UsageError("train config: loss weights must be nonnegative and not both zero");
  }
  if (cfg.batch_size < 1) throw UsageError("train config: batch_size must be >= 1");
  if (cfg.hidden < 1) throw UsageError("train config: hidden width must be >= 1");
  const HorizonSet horizons(cfg.horizons);
  if (!horizons.contains(1)) throw UsageError("train config: horizon set must contain 1");
}

double loss(const DenseMatrix& pred_state, const DenseMatrix& target_state, double lambda_v,
            double lambda_h) {
  if (!pred_state.same_shape(target_state) || pred_state.cols != kPrognosticChannels) {
    throw std::invalid_argument("loss: expected matching N x 3 matrices");
  }
  const int n = pred_state.rows;
  double sq_v = 0.0;
  double sq_h = 0.0;
  for (int r = 0; r < n; ++r) {
    const double* p = pred_state.row_ptr(r);
    const double* t = target_state.row_ptr(r);
    const double ex = p[0] - t[0];
    const double ey = p[1] - t[1];
    const double eh = p[2] - t[2];
    sq_v += ex * ex + ey * ey;
    sq_h += eh * eh;
  }
  return lambda_v * sq_v / static_cast<double>(n * kVelocityChannels) +
         lambda_h * sq_h / static_cast<double>(n);
}

AdamState make_adam_state(const ModelParams& params) {
  AdamState state;
  for (const DenseMatrix* m : param_list(params)) {
    state.m.emplace_back(m->rows, m->cols);
    state.v.emplace_back(m->rows, m->cols);
  }
  return state;
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const TrainConfig& cfg, double lr) {
  auto p = param_list(params);
  auto g = param_list(grads);
  if (state.m.size() != p.size()) throw std::invalid_argument("adam_step: state size mismatch");

  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));

  for (std::size_t i = 0; i < p.size(); ++i) {
    DenseMatrix& m = state.m[i];
    DenseMatrix& v = state.v[i];
    for (std::size_t k = 0; k < p[i]->data.size(); ++k) {
      double grad = g[i]->data[k];
      if (cfg.weight_decay > 0.0) {
        if (cfg.coupled_weight_decay) {
          grad += cfg.weight_decay * p[i]->data[k];
        } else {
          p[i]->data[k] *= 1.0 - lr * cfg.weight_decay;
        }
      }
      m.data[k] = cfg.beta1 * m.data[k] + (1.0 - cfg.beta1) * grad;
      v.data[k] = cfg.beta2 * v.data[k] + (1.0 - cfg.beta2) * grad * grad;
      const double m_hat = m.data[k] / bc1;
      const double v_hat = v.data[k] / bc2;
      p[i]->data[k] -= lr * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
    }
  }
}

double cosine_lr(int epoch, int epochs, double lr0) {
  if (epoch < 0 || epoch >= epochs) throw std::invalid_argument("cosine_lr: epoch out of range");
  return lr0 * 0.5 * (1.0 + std::cos(M_PI * static_cast<double>(epoch) / epochs));
}

double pair_loss_and_grad(const ModelParams& params, const ModelConfig& model_cfg,
                          const Trajectory& traj, int t, int h, const NormStats& stats,
                          const HorizonSet& horizons, double lambda_v, double lambda_h,
                          ModelParams* grads_out) {
  Tape tape;
  const TapedParams ids = register_params(tape, params);
  const ModelInput input = assemble_input(traj, t, h, stats, horizons);
  const TapedOutput out = forward_on_tape(tape, ids, input, model_cfg);

  // anchor + delta vs target, split per head.
  const int n = input.state.rows;
  DenseMatrix anchor_v(n, kVelocityChannels), anchor_h(n, 1);
  for (int r = 0; r < n; ++r) {
    anchor_v.at(r, 0) = input.state.at(r, 0);
    anchor_v.at(r, 1) = input.state.at(r, 1);
    anchor_h.at(r, 0) = input.state.at(r, 2);
  }
  const DenseMatrix target = normalized_prognostic(traj, t + h, stats);
  DenseMatrix target_v(n, kVelocityChannels), target_h(n, 1);
  for (int r = 0; r < n; ++r) {
    target_v.at(r, 0) = target.at(r, 0);
    target_v.at(r, 1) = target.at(r, 1);
    target_h.at(r, 0) = target.at(r, 2);
  }

  const auto err_v =
      tape.sub(tape.add(out.delta_velocity, tape.input(std::move(anchor_v))),
               tape.input(std::move(target_v)));
  const auto err_h =
      tape.sub(tape.add(out.delta_thickness, tape.input(std::move(anchor_h))),
               tape.input(std::move(target_h)));
  const auto total = tape.add(tape.scale(tape.square_mean(err_v), lambda_v),
                              tape.scale(tape.square_mean(err_h), lambda_h));

  const double value = tape.scalar(total);
  if (grads_out != nullptr) {
    tape.backward(total);
    auto dst = param_list(*grads_out);
    const auto id_list = ids.list();
    for (std::size_t i = 0; i < id_list.size(); ++i) *dst[i] = tape.grad(id_list[i]);
  }
  return value;
}

double evaluate_loss(const ModelParams& params, const ModelConfig& model_cfg,
                     const std::vector<Trajectory>& trajectories, std::span<const int> indices,
                     const NormStats& stats, const HorizonSet& horizons, const TrainConfig& cfg) {
  const std::vector<SamplePair> pairs = enumerate_pairs(trajectories, indices, horizons);
  if (pairs.empty()) throw std::invalid_argument("evaluate_loss: no pairs");

  std::vector<double> losses(pairs.size(), 0.0);
  ThreadPool pool(cfg.threads);
  pool.run(static_cast<int>(pairs.size()), [&](int i) {
    const SamplePair& p = pairs[i];
    losses[i] = pair_loss_and_grad(params, model_cfg, trajectories[p.trajectory], p.t, p.h, stats,
                                   horizons, cfg.lambda_v, cfg.lambda_h, nullptr);
  });
  double sum = 0.0;
  for (double l : losses) sum += l;
  return sum / static_cast<double>(losses.size());
}

TrainResult train(const std::vector<Trajectory>& trajectories, std::span<const int> train_indices,
                  std::span<const int> val_indices, const NormStats& stats,
                  const TrainConfig& cfg) {
  validate_train_config(cfg);
  if (train_indices.empty() || val_indices.empty()) {
    throw std::invalid_argument("train: train and validation sets must be non-empty");
  }

  const HorizonSet horizons(cfg.horizons);
  const std::vector<SamplePair> all_pairs = enumerate_pairs(trajectories, train_indices, horizons);
  if (all_pairs.empty()) throw std::invalid_argument("train: no training pairs");

  ModelConfig model_cfg;
  model_cfg.hidden = cfg.hidden;
  model_cfg.act = cfg.act;
  model_cfg.magnitude_only_inputs = cfg.magnitude_only_inputs;
  model_cfg.input_width = model_input_width(kContextChannels, cfg.magnitude_only_inputs);

  ModelParams params = init_params(Rng::derive(cfg.seed, 0xA11CE), model_cfg);
  AdamState adam = make_adam_state(params);
  Rng shuffle_rng(Rng::derive(cfg.seed, 0x5AFFE));
  ThreadPool pool(cfg.threads);

  TrainResult result;
  result.model_config = model_cfg;

  std::vector<SamplePair> pairs = all_pairs;
  std::vector<ModelParams> batch_grads(cfg.batch_size);
  std::vector<double> batch_losses(cfg.batch_size, 0.0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cosine_lr(epoch, cfg.epochs, cfg.lr0);
    shuffle(pairs, shuffle_rng);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < pairs.size(); start += cfg.batch_size) {
      const int batch = static_cast<int>(std::min<std::size_t>(cfg.batch_size, pairs.size() - start));
      pool.run(batch, [&](int i) {
        const SamplePair& p = pairs[start + i];
        batch_grads[i] = zero_like(params);
        batch_losses[i] =
            pair_loss_and_grad(params, model_cfg, trajectories[p.trajectory], p.t, p.h, stats,
                               horizons, cfg.lambda_v, cfg.lambda_h, &batch_grads[i]);
      });

      // Ordered reduction: deterministic for any worker count.
      ModelParams grads = zero_like(params);
      for (int i = 0; i < batch; ++i) {
        const SamplePair& p = pairs[start + i];
        if (!std::isfinite(batch_losses[i])) {
          throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                             ", batch " + std::to_string(start / cfg.batch_size) + ", pair (traj " +
                             std::to_string(p.trajectory) + ", t=" + std::to_string(p.t) +
                             ", h=" + std::to_string(p.h) + ")");
        }
        add_into(grads, batch_grads[i]);
        loss_sum += batch_losses[i];
      }
      scale_in_place(grads, 1.0 / static_cast<double>(batch));
      adam_step(params, grads, adam, cfg, lr);
    }

    const double train_loss = loss_sum / static_cast<double>(pairs.size());
    const double val_loss =
        evaluate_loss(params, model_cfg, trajectories, val_indices, stats, horizons, cfg);

    result.history.push_back(EpochRecord{epoch, lr, train_loss, val_loss});
    if (result.best_epoch < 0 || val_loss < result.best_val_loss) {
      result.best_epoch = epoch;
      result.best_val_loss = val_loss;
      result.best_params = params;
    }
  }
  return result;
}

}  // namespace meshcast
