#include "meshcast/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "meshcast/error.hpp"

namespace meshcast {

const char* const kStateChannelNames[kStateChannels] = {
    "vx", "vy", "thickness", "surface", "base", "float_ratio", "vel_mag"};
const char* const kStaticChannelNames[kStaticChannels] = {"melt_rate", "smb"};

DenseMatrix Trajectory::prognostic(int t) const {
  DenseMatrix out(N, kPrognosticChannels);
  for (int n = 0; n < N; ++n) {
    out.at(n, 0) = state_at(t, n, kChVx);
    out.at(n, 1) = state_at(t, n, kChVy);
    out.at(n, 2) = state_at(t, n, kChThickness);
  }
  return out;
}

void validate_trajectory(const Trajectory& traj) {
  if (traj.T < 1 || traj.N < 1 || traj.C != kStateChannels) {
    throw DataError("trajectory " + traj.scenario_id + ": bad dimensions");
  }
  if (traj.states.size() != static_cast<std::size_t>(traj.T) * traj.N * traj.C) {
    throw DataError("trajectory " + traj.scenario_id + ": state buffer length mismatch");
  }
  if (traj.static_features.rows != traj.N || traj.static_features.cols != kStaticChannels) {
    throw DataError("trajectory " + traj.scenario_id + ": static feature shape mismatch");
  }
  for (double v : traj.states) {
    if (!std::isfinite(v)) {
      throw DataError("trajectory " + traj.scenario_id + ": non-finite state");
    }
  }
  for (int t = 1; t <= traj.T; ++t) {
    for (int n = 0; n < traj.N; ++n) {
      const double f = traj.state_at(t, n, kChFloatRatio);
      if (f < 0.0 || f > 1.0) {
        throw DataError("trajectory " + traj.scenario_id + ": floating ratio out of [0,1]");
      }
      const double vx = traj.state_at(t, n, kChVx);
      const double vy = traj.state_at(t, n, kChVy);
      const double mag = traj.state_at(t, n, kChVelMag);
      if (std::abs(mag - std::sqrt(vx * vx + vy * vy)) > 1e-9) {
        throw DataError("trajectory " + traj.scenario_id +
                        ": velocity magnitude inconsistent with components");
      }
    }
  }
}

namespace {

NormStats::Channel finalize_channel(const std::string& name, double sum, double sum_sq,
                                    std::size_t count) {
  NormStats::Channel ch;
  ch.name = name;
  const double mean = sum / static_cast<double>(count);
  const double var = sum_sq / static_cast<double>(count) - mean * mean;
  ch.mean = mean;
  const double stddev = std::sqrt(std::max(var, 0.0));
  if (stddev < 1e-12) {
    ch.std = 1.0;
    ch.constant = true;
  } else {
    ch.std = stddev;
  }
  return ch;
}

void check_pair(const Trajectory& traj, int t, int h) {
  if (h <= 0 || t < 1 || t + h > traj.T) {
    throw std::invalid_argument("pair (t=" + std::to_string(t) + ", h=" + std::to_string(h) +
                                ") invalid for T=" + std::to_string(traj.T));
  }
}

}  // namespace

NormStats compute_norm_stats(const std::vector<Trajectory>& trajectories,
                             std::span<const int> train_indices) {
  if (train_indices.empty()) throw std::invalid_argument("compute_norm_stats: no trajectories");

  // Context channel order: statics, then diagnostics.
  const int diag_channels[4] = {kChSurface, kChBase, kChFloatRatio, kChVelMag};
  double sum[kPrognosticChannels + kContextChannels] = {};
  double sum_sq[kPrognosticChannels + kContextChannels] = {};
  std::size_t count = 0;

  for (int idx : train_indices) {
    const Trajectory& traj = trajectories.at(idx);
    for (int t = 1; t <= traj.T; ++t) {
      for (int n = 0; n < traj.N; ++n) {
        double v[kPrognosticChannels + kContextChannels];
        v[0] = traj.state_at(t, n, kChVx);
        v[1] = traj.state_at(t, n, kChVy);
        v[2] = traj.state_at(t, n, kChThickness);
        v[3] = traj.static_features.at(n, kStaticMeltRate);
        v[4] = traj.static_features.at(n, kStaticSmb);
        for (int d = 0; d < 4; ++d) v[5 + d] = traj.state_at(t, n, diag_channels[d]);
        for (int c = 0; c < kPrognosticChannels + kContextChannels; ++c) {
          sum[c] += v[c];
          sum_sq[c] += v[c] * v[c];
        }
        ++count;
      }
    }
  }

  NormStats stats;
  stats.prognostic.push_back(finalize_channel("vx", sum[0], sum_sq[0], count));
  stats.prognostic.push_back(finalize_channel("vy", sum[1], sum_sq[1], count));
  stats.prognostic.push_back(finalize_channel("thickness", sum[2], sum_sq[2], count));
  const char* context_names[kContextChannels] = {"melt_rate", "smb",         "surface",
                                                 "base",      "float_ratio", "vel_mag"};
  for (int c = 0; c < kContextChannels; ++c) {
    stats.context.push_back(
        finalize_channel(context_names[c], sum[3 + c], sum_sq[3 + c], count));
  }
  return stats;
}

std::vector<SamplePair> enumerate_pairs(int T, const HorizonSet& horizons) {
  if (T < 2) throw std::invalid_argument("enumerate_pairs: T must be at least 2");
  std::vector<SamplePair> pairs;
  for (int h : horizons.members()) {
    for (int t = 1; t + h <= T; ++t) pairs.push_back(SamplePair{0, t, h});
  }
  return pairs;
}

std::vector<SamplePair> enumerate_pairs(const std::vector<Trajectory>& trajectories,
                                        std::span<const int> indices, const HorizonSet& horizons) {
  std::vector<SamplePair> pairs;
  for (int idx : indices) {
    for (SamplePair p : enumerate_pairs(trajectories.at(idx).T, horizons)) {
      p.trajectory = idx;
      pairs.push_back(p);
    }
  }
  return pairs;
}

SplitIndices split_by_melt_rate(const std::vector<Trajectory>& trajectories) {
  SplitIndices split;
  for (int i = 0; i < static_cast<int>(trajectories.size()); ++i) {
    const double rate = trajectories[i].melt_rate;
    const double rounded = std::round(rate);
    if (std::abs(rate - rounded) > 1e-9 || rounded < 0.0 || rounded > 70.0 ||
        std::fmod(rounded, 2.0) != 0.0) {
      throw DataError("split_by_melt_rate: melt rate " + std::to_string(rate) +
                      " not in {0,2,...,70}");
    }
    const int r = static_cast<int>(rounded);
    if (r == 0 || r == 20 || r == 40 || r == 60) {
      split.val.push_back(i);
    } else if (r == 10 || r == 30 || r == 50 || r == 70) {
      split.test.push_back(i);
    } else {
      split.train.push_back(i);
    }
  }
  return split;
}

DenseMatrix normalized_prognostic(const Trajectory& traj, int t, const NormStats& stats) {
  DenseMatrix out(traj.N, kPrognosticChannels);
  const int channels[kPrognosticChannels] = {kChVx, kChVy, kChThickness};
  for (int n = 0; n < traj.N; ++n) {
    for (int c = 0; c < kPrognosticChannels; ++c) {
      const auto& ch = stats.prognostic[c];
      out.at(n, c) = (traj.state_at(t, n, channels[c]) - ch.mean) / ch.std;
    }
  }
  return out;
}

DenseMatrix normalized_context(const Trajectory& traj, int t, const NormStats& stats) {
  DenseMatrix out(traj.N, kContextChannels);
  const int diag_channels[4] = {kChSurface, kChBase, kChFloatRatio, kChVelMag};
  for (int n = 0; n < traj.N; ++n) {
    double raw[kContextChannels];
    raw[0] = traj.static_features.at(n, kStaticMeltRate);
    raw[1] = traj.static_features.at(n, kStaticSmb);
    for (int d = 0; d < 4; ++d) raw[2 + d] = traj.state_at(t, n, diag_channels[d]);
    for (int c = 0; c < kContextChannels; ++c) {
      const auto& ch = stats.context[c];
      out.at(n, c) = (raw[c] - ch.mean) / ch.std;
    }
  }
  return out;
}

DenseMatrix denormalize_prognostic(const DenseMatrix& normalized, const NormStats& stats) {
  if (normalized.cols != kPrognosticChannels) {
    throw std::invalid_argument("denormalize_prognostic: expected 3 columns");
  }
  DenseMatrix out = normalized;
  for (int n = 0; n < out.rows; ++n) {
    for (int c = 0; c < kPrognosticChannels; ++c) {
      const auto& ch = stats.prognostic[c];
      out.at(n, c) = out.at(n, c) * ch.std + ch.mean;
    }
  }
  return out;
}

DenseMatrix normalize_prognostic_matrix(const DenseMatrix& physical, const NormStats& stats) {
  if (physical.cols != kPrognosticChannels) {
    throw std::invalid_argument("normalize_prognostic_matrix: expected 3 columns");
  }
  DenseMatrix out = physical;
  for (int n = 0; n < out.rows; ++n) {
    for (int c = 0; c < kPrognosticChannels; ++c) {
      const auto& ch = stats.prognostic[c];
      out.at(n, c) = (out.at(n, c) - ch.mean) / ch.std;
    }
  }
  return out;
}

ModelInput assemble_input(const Trajectory& traj, int t, int h, const NormStats& stats,
                          const HorizonSet& horizons) {
  check_pair(traj, t, h);
  if (traj.mesh == nullptr) throw std::invalid_argument("assemble_input: trajectory has no mesh");
  ModelInput input;
  input.graph = traj.mesh;
  input.state = normalized_prognostic(traj, t, stats);
  input.context = normalized_context(traj, t, stats);
  input.t_norm = static_cast<double>(t) / static_cast<double>(traj.T);
  input.h_norm = horizons.psi(h);
  return input;
}

DenseMatrix residual_target(const Trajectory& traj, int t, int h, const NormStats& stats) {
  check_pair(traj, t, h);
  return sub(normalized_prognostic(traj, t + h, stats), normalized_prognostic(traj, t, stats));
}

}  // namespace meshcast
