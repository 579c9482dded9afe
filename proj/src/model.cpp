#include "meshcast/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "meshcast/rng.hpp"

namespace meshcast {

namespace {

DenseMatrix glorot_uniform(int fan_in, int fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  DenseMatrix m(fan_in, fan_out);
  for (double& v : m.data) v = rng.uniform(-bound, bound);
  return m;
}

void validate_input(const ModelInput& input, const ModelConfig& cfg) {
  if (input.graph == nullptr) throw std::invalid_argument("forward: input.graph is null");
  const int n = input.graph->node_count;
  if (input.state.rows != n || input.state.cols != kPrognosticChannels) {
    throw std::invalid_argument("forward: state must be N x 3");
  }
  if (input.context.rows != n) throw std::invalid_argument("forward: context row count mismatch");
  if (!(input.h_norm > 0.0 && input.h_norm <= 1.0)) {
    throw std::invalid_argument("forward: h_norm must lie in (0, 1]");
  }
  if (!(input.t_norm >= 0.0 && input.t_norm <= 1.0)) {
    throw std::invalid_argument("forward: t_norm must lie in [0, 1]");
  }
  const int width = model_input_width(input.context.cols, cfg.magnitude_only_inputs);
  if (width != cfg.input_width) {
    throw std::invalid_argument("forward: assembled feature width " + std::to_string(width) +
                                " does not match configured input_width " +
                                std::to_string(cfg.input_width));
  }
}

/// [prognostic block | context | t_norm | h_norm], one row per node.
DenseMatrix assemble_features(const ModelInput& input, const ModelConfig& cfg) {
  const int n = input.graph->node_count;
  DenseMatrix features(n, cfg.input_width);
  for (int r = 0; r < n; ++r) {
    double* dst = features.row_ptr(r);
    const double* state = input.state.row_ptr(r);
    int c = 0;
    if (cfg.magnitude_only_inputs) {
      dst[c++] = state[2];  // thickness only
    } else {
      for (int k = 0; k < kPrognosticChannels; ++k) dst[c++] = state[k];
    }
    const double* ctx = input.context.row_ptr(r);
    for (int k = 0; k < input.context.cols; ++k) dst[c++] = ctx[k];
    dst[c++] = input.t_norm;
    dst[c++] = input.h_norm;
  }
  return features;
}

}  // namespace

int model_input_width(int context_cols, bool magnitude_only_inputs) {
  return (magnitude_only_inputs ? 1 : kPrognosticChannels) + context_cols + 2;
}

std::vector<DenseMatrix*> param_list(ModelParams& p) {
  std::vector<DenseMatrix*> out;
  for (auto& w : p.gcn) out.push_back(&w);
  out.push_back(&p.velocity_w);
  out.push_back(&p.velocity_b);
  out.push_back(&p.thickness_w);
  out.push_back(&p.thickness_b);
  return out;
}

std::vector<const DenseMatrix*> param_list(const ModelParams& p) {
  std::vector<const DenseMatrix*> out;
  for (const auto& w : p.gcn) out.push_back(&w);
  out.push_back(&p.velocity_w);
  out.push_back(&p.velocity_b);
  out.push_back(&p.thickness_w);
  out.push_back(&p.thickness_b);
  return out;
}

void validate_params(const ModelParams& p, const ModelConfig& cfg) {
  if (p.gcn[0].rows != cfg.input_width || p.gcn[0].cols != cfg.hidden) {
    throw std::invalid_argument("params: first GCN weight must be input_width x hidden");
  }
  for (int l = 1; l < kGcnLayers; ++l) {
    if (p.gcn[l].rows != cfg.hidden || p.gcn[l].cols != cfg.hidden) {
      throw std::invalid_argument("params: GCN weight " + std::to_string(l) + " has wrong shape");
    }
  }
  if (p.velocity_w.rows != cfg.hidden || p.velocity_w.cols != kVelocityChannels ||
      p.velocity_b.rows != 1 || p.velocity_b.cols != kVelocityChannels ||
      p.thickness_w.rows != cfg.hidden || p.thickness_w.cols != 1 || p.thickness_b.rows != 1 ||
      p.thickness_b.cols != 1) {
    throw std::invalid_argument("params: head shapes do not match hidden width");
  }
  for (const DenseMatrix* m : param_list(p)) {
    if (!m->all_finite()) throw std::invalid_argument("params: non-finite entry");
  }
}

ModelParams init_params(std::uint64_t seed, const ModelConfig& cfg) {
  if (cfg.input_width <= 0 || cfg.hidden <= 0) {
    throw std::invalid_argument("init_params: input_width and hidden must be positive");
  }
  Rng rng(seed);
  ModelParams p;
  p.gcn[0] = glorot_uniform(cfg.input_width, cfg.hidden, rng);
  for (int l = 1; l < kGcnLayers; ++l) p.gcn[l] = glorot_uniform(cfg.hidden, cfg.hidden, rng);
  p.velocity_w = glorot_uniform(cfg.hidden, kVelocityChannels, rng);
  p.velocity_b = DenseMatrix(1, kVelocityChannels);
  p.thickness_w = glorot_uniform(cfg.hidden, 1, rng);
  p.thickness_b = DenseMatrix(1, 1);
  return p;
}

std::vector<Tape::NodeId> TapedParams::list() const {
  std::vector<Tape::NodeId> out(gcn.begin(), gcn.end());
  out.push_back(velocity_w);
  out.push_back(velocity_b);
  out.push_back(thickness_w);
  out.push_back(thickness_b);
  return out;
}

TapedParams register_params(Tape& tape, const ModelParams& params) {
  TapedParams ids;
  for (int l = 0; l < kGcnLayers; ++l) ids.gcn[l] = tape.param(params.gcn[l]);
  ids.velocity_w = tape.param(params.velocity_w);
  ids.velocity_b = tape.param(params.velocity_b);
  ids.thickness_w = tape.param(params.thickness_w);
  ids.thickness_b = tape.param(params.thickness_b);
  return ids;
}

TapedOutput forward_on_tape(Tape& tape, const TapedParams& params, const ModelInput& input,
                            const ModelConfig& cfg) {
  validate_input(input, cfg);
  Tape::NodeId x = tape.input(assemble_features(input, cfg));
  for (int l = 0; l < kGcnLayers; ++l) {
    x = tape.spmm(*input.graph, x);
    x = tape.matmul(x, params.gcn[l]);
    if (l + 1 < kGcnLayers) x = tape.activation(x, cfg.act);
  }
  TapedOutput out;
  out.delta_velocity = tape.add_bias(tape.matmul(x, params.velocity_w), params.velocity_b);
  out.delta_thickness = tape.add_bias(tape.matmul(x, params.thickness_w), params.thickness_b);
  return out;
}

ModelOutput forward(const ModelParams& params, const ModelInput& input, const ModelConfig& cfg) {
  // Single code path: inference replays the exact op sequence training records.
  Tape tape;
  const TapedParams ids = register_params(tape, params);
  const TapedOutput out = forward_on_tape(tape, ids, input, cfg);
  return ModelOutput{tape.value(out.delta_velocity), tape.value(out.delta_thickness)};
}

DenseMatrix reconstruct(const DenseMatrix& anchor_state, const ModelOutput& delta) {
  if (anchor_state.cols != kPrognosticChannels ||
      delta.delta_velocity.rows != anchor_state.rows ||
      delta.delta_velocity.cols != kVelocityChannels ||
      delta.delta_thickness.rows != anchor_state.rows || delta.delta_thickness.cols != 1) {
    throw std::invalid_argument("reconstruct: shape mismatch");
  }
  DenseMatrix out = anchor_state;
  for (int r = 0; r < out.rows; ++r) {
    double* row = out.row_ptr(r);
    row[0] += delta.delta_velocity.at(r, 0);
    row[1] += delta.delta_velocity.at(r, 1);
    row[2] += delta.delta_thickness.at(r, 0);
  }
  return out;
}

double min_abs_preactivation(const ModelParams& params, const ModelInput& input,
                             const ModelConfig& cfg) {
  validate_input(input, cfg);
  DenseMatrix x = assemble_features(input, cfg);
  double min_abs = INFINITY;
  for (int l = 0; l < kGcnLayers; ++l) {
    x = matmul(spmm(*input.graph, x), params.gcn[l]);
    if (l + 1 < kGcnLayers) {
      for (double v : x.data) min_abs = std::min(min_abs, std::abs(v));
      x = apply_activation(x, cfg.act);
    }
  }
  return min_abs;
}

}  // namespace meshcast
