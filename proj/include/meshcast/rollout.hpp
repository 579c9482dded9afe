#pragma once

#include <vector>

#include "meshcast/dataset.hpp"
#include "meshcast/horizon.hpp"
#include "meshcast/model.hpp"

namespace meshcast {

struct RolloutStep {
  int t_in = 0;
  int h = 0;
  int t_out = 0;
};

/// Ordered forecast schedule. Every month in (t0, t1] is filled exactly once,
/// each step's input is observed or previously filled, and
/// depth(t_out) = depth(t_in) + 1 with observed months at depth 0.
struct RolloutPlan {
  int t0 = 0;
  int t1 = 0;
  std::vector<RolloutStep> steps;
  std::vector<int> depth;  // indexed by month, 0..t1

  int max_depth() const;
};

/// Greedy descending-horizon planner: horizons largest-first, each pass scans
/// t_in upward and fills t_in + h whenever the input is known and the target
/// is an unfilled forecast month. By default fills become usable within the
/// same scan, so one large horizon can chain through the window; frozen_scan
/// instead snapshots known() per pass and repeats passes until covered.
/// Pure function of (t0, t1, horizons).
RolloutPlan plan_rollout(int t0, int t1, const HorizonSet& horizons, bool frozen_scan = false);

struct RolloutResult {
  int t0 = 0;
  int t1 = 0;
  std::vector<DenseMatrix> predicted;  // months t0+1..t1, N x 3, physical units

  const DenseMatrix& at_month(int t) const { return predicted.at(t - t0 - 1); }
};

/// Executes a plan: anchors on the observed prefix or previously predicted
/// states (kept in normalized space while chaining), always with the true
/// context features F_{t_in}, and denormalizes at the end. psi_h_max is the
/// H_max the checkpoint was trained with.
RolloutResult execute_rollout(const ModelParams& params, const ModelConfig& cfg,
                              const Trajectory& traj, const RolloutPlan& plan,
                              const NormStats& stats, int psi_h_max);

}  // namespace meshcast
