#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "meshcast/dense_matrix.hpp"
#include "meshcast/mesh_graph.hpp"
#include "meshcast/tape.hpp"

namespace meshcast {

inline constexpr int kGcnLayers = 5;
inline constexpr int kVelocityChannels = 2;
inline constexpr int kPrognosticChannels = 3;  // V_x, V_y, thickness

struct ModelConfig {
  int input_width = 0;  // assembled per-node feature columns
  int hidden = 128;
  Activation act = Activation::Relu;
  bool magnitude_only_inputs = false;  // ablation: drop V_x,V_y from the inputs
};

/// Feature columns the forward pass assembles:
/// [prognostic block | context | t_norm | h_norm].
int model_input_width(int context_cols, bool magnitude_only_inputs);

/// One shared parameter set serves every horizon.
struct ModelParams {
  std::array<DenseMatrix, kGcnLayers> gcn;  // input_width x hidden, then hidden x hidden
  DenseMatrix velocity_w;                   // hidden x 2
  DenseMatrix velocity_b;                   // 1 x 2
  DenseMatrix thickness_w;                  // hidden x 1
  DenseMatrix thickness_b;                  // 1 x 1
};

std::vector<DenseMatrix*> param_list(ModelParams& p);
std::vector<const DenseMatrix*> param_list(const ModelParams& p);

/// Throws if dimensions do not chain or any entry is non-finite.
void validate_params(const ModelParams& p, const ModelConfig& cfg);

struct ModelInput {
  const MeshGraph* graph = nullptr;
  DenseMatrix state;    // N x 3 normalized prognostic channels at the anchor
  DenseMatrix context;  // N x K normalized static + time-varying features
  double t_norm = 0.0;  // in [0, 1]
  double h_norm = 0.0;  // psi(h) = h / H_max, in (0, 1]
};

struct ModelOutput {
  DenseMatrix delta_velocity;   // N x 2
  DenseMatrix delta_thickness;  // N x 1
};

/// Glorot-uniform GCN and head weights, zero head biases. Deterministic in
/// the seed.
ModelParams init_params(std::uint64_t seed, const ModelConfig& cfg);

/// 5x (spmm -> matmul -> activation), activation omitted after the last GCN
/// layer, then the two affine heads.
ModelOutput forward(const ModelParams& params, const ModelInput& input, const ModelConfig& cfg);

/// X_hat = anchor + delta on the prognostic channels.
DenseMatrix reconstruct(const DenseMatrix& anchor_state, const ModelOutput& delta);

/// Tape-recorded variant used by training and gradient checks. The returned
/// ids address the velocity and thickness delta outputs.
struct TapedParams {
  std::array<Tape::NodeId, kGcnLayers> gcn{};
  Tape::NodeId velocity_w = -1;
  Tape::NodeId velocity_b = -1;
  Tape::NodeId thickness_w = -1;
  Tape::NodeId thickness_b = -1;

  std::vector<Tape::NodeId> list() const;
};

struct TapedOutput {
  Tape::NodeId delta_velocity = -1;
  Tape::NodeId delta_thickness = -1;
};

TapedParams register_params(Tape& tape, const ModelParams& params);
TapedOutput forward_on_tape(Tape& tape, const TapedParams& params, const ModelInput& input,
                            const ModelConfig& cfg);

/// Smallest |pre-activation| seen across GCN layers in a forward pass; used
/// by gradient checks to stay away from relu kinks.
double min_abs_preactivation(const ModelParams& params, const ModelInput& input,
                             const ModelConfig& cfg);

}  // namespace meshcast
