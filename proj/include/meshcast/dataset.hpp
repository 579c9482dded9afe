#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "meshcast/dense_matrix.hpp"
#include "meshcast/horizon.hpp"
#include "meshcast/mesh_graph.hpp"
#include "meshcast/model.hpp"

namespace meshcast {

// State channel layout. Prognostic channels first, diagnostics after.
inline constexpr int kChVx = 0;
inline constexpr int kChVy = 1;
inline constexpr int kChThickness = 2;
inline constexpr int kChSurface = 3;
inline constexpr int kChBase = 4;
inline constexpr int kChFloatRatio = 5;
inline constexpr int kChVelMag = 6;
inline constexpr int kStateChannels = 7;

// Static per-node features.
inline constexpr int kStaticMeltRate = 0;
inline constexpr int kStaticSmb = 1;
inline constexpr int kStaticChannels = 2;

// Context assembled for the model: statics then diagnostics.
inline constexpr int kContextChannels = kStaticChannels + 4;

extern const char* const kStateChannelNames[kStateChannels];
extern const char* const kStaticChannelNames[kStaticChannels];

/// One scenario's full time series on a mesh. Time indices are 1-based
/// (months 1..T) to match the anchor/horizon arithmetic everywhere else.
/// Immutable after load.
struct Trajectory {
  std::string scenario_id;
  double melt_rate = 0.0;  // m/a
  int T = 0;
  int N = 0;
  int C = kStateChannels;
  DenseMatrix static_features;  // N x kStaticChannels, physical units
  std::vector<double> states;   // (t, n, c) order, physical units
  std::uint64_t mesh_hash = 0;
  const MeshGraph* mesh = nullptr;  // attached after load

  double state_at(int t, int node, int channel) const {
    return states[(static_cast<std::size_t>(t - 1) * N + node) * C + channel];
  }
  double& state_at(int t, int node, int channel) {
    return states[(static_cast<std::size_t>(t - 1) * N + node) * C + channel];
  }

  /// N x 3 matrix of (V_x, V_y, thickness) at month t, physical units.
  DenseMatrix prognostic(int t) const;
};

/// Checks finiteness, floating-ratio range, and that the velocity-magnitude
/// channel is consistent with the components. Throws DataError.
void validate_trajectory(const Trajectory& traj);

/// Per-channel z-score statistics, computed on the training split only.
struct NormStats {
  struct Channel {
    std::string name;
    double mean = 0.0;
    double std = 1.0;
    bool constant = false;  // channel was constant; std forced to 1
  };
  std::vector<Channel> prognostic;  // vx, vy, thickness
  std::vector<Channel> context;     // melt_rate, smb, surface, base, float_ratio, vel_mag
};

NormStats compute_norm_stats(const std::vector<Trajectory>& trajectories,
                             std::span<const int> train_indices);

struct SamplePair {
  int trajectory = 0;  // index into the caller's trajectory list
  int t = 0;           // anchor month, 1-based
  int h = 0;
};

/// All valid (t, h) anchors for one trajectory of length T: h ascending, then
/// t ascending. Horizons >= T contribute nothing.
std::vector<SamplePair> enumerate_pairs(int T, const HorizonSet& horizons);

/// Same enumeration across a list of trajectories, in list order.
std::vector<SamplePair> enumerate_pairs(const std::vector<Trajectory>& trajectories,
                                        std::span<const int> indices, const HorizonSet& horizons);

struct SplitIndices {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
};

/// Melt-rate split: validation {0,20,40,60}, test {10,30,50,70}, train the
/// rest. Rates must come from {0,2,...,70}.
SplitIndices split_by_melt_rate(const std::vector<Trajectory>& trajectories);

DenseMatrix normalized_prognostic(const Trajectory& traj, int t, const NormStats& stats);
DenseMatrix normalized_context(const Trajectory& traj, int t, const NormStats& stats);
DenseMatrix denormalize_prognostic(const DenseMatrix& normalized, const NormStats& stats);
DenseMatrix normalize_prognostic_matrix(const DenseMatrix& physical, const NormStats& stats);

/// Model input for anchor t and horizon h: normalized state and context,
/// t_norm = t/T, h_norm = psi(h).
ModelInput assemble_input(const Trajectory& traj, int t, int h, const NormStats& stats,
                          const HorizonSet& horizons);

/// Normalized-space residual (X_{t+h} - X_t) on the prognostic channels.
DenseMatrix residual_target(const Trajectory& traj, int t, int h, const NormStats& stats);

}  // namespace meshcast
