#include "meshcast/rollout.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "meshcast/error.hpp"

namespace meshcast {

int RolloutPlan::max_depth() const {
  int best = 0;
  for (int d : depth) best = std::max(best, d);
  return best;
}

RolloutPlan plan_rollout(int t0, int t1, const HorizonSet& horizons, bool frozen_scan) {
  if (!horizons.contains(1)) {
    throw std::invalid_argument("plan_rollout: the horizon set must contain 1");
  }
  if (t0 < 1) throw std::invalid_argument("plan_rollout: t0 must be at least 1");
  if (t1 <= t0) throw std::invalid_argument("plan_rollout: t1 must exceed t0");

  RolloutPlan plan;
  plan.t0 = t0;
  plan.t1 = t1;
  plan.depth.assign(t1 + 1, 0);

  std::vector<char> known(t1 + 1, 0);
  for (int t = 1; t <= t0; ++t) known[t] = 1;
  int remaining = t1 - t0;

  std::vector<int> descending(horizons.members().rbegin(), horizons.members().rend());

  auto sweep = [&](int h, const std::vector<char>& visible) {
    for (int t_in = 1; t_in + h <= t1; ++t_in) {
      const int t_out = t_in + h;
      if (visible[t_in] && t_out > t0 && !known[t_out]) {
        plan.steps.push_back(RolloutStep{t_in, h, t_out});
        known[t_out] = 1;
        plan.depth[t_out] = plan.depth[t_in] + 1;
        --remaining;
      }
    }
  };

  if (!frozen_scan) {
    for (int h : descending) sweep(h, known);
  } else {
    // Fills are invisible within the pass that produced them, so passes repeat
    // until the window is covered (h = 1 always makes progress).
    while (remaining > 0) {
      const int before = remaining;
      for (int h : descending) {
        const std::vector<char> snapshot = known;
        sweep(h, snapshot);
      }
      if (remaining == before) {
        throw std::logic_error("plan_rollout: frozen scan made no progress");
      }
    }
  }

  if (remaining != 0) {
    throw std::logic_error("plan_rollout: window not fully covered");
  }
  return plan;
}

RolloutResult execute_rollout(const ModelParams& params, const ModelConfig& cfg,
                              const Trajectory& traj, const RolloutPlan& plan,
                              const NormStats& stats, int psi_h_max) {
  if (traj.mesh == nullptr) throw std::invalid_argument("execute_rollout: trajectory has no mesh");
  if (plan.t1 > traj.T) {
    throw DataError("execute_rollout: plan extends past the trajectory (t1=" +
                    std::to_string(plan.t1) + ", T=" + std::to_string(traj.T) + ")");
  }
  if (psi_h_max < 1) throw std::invalid_argument("execute_rollout: psi_h_max must be positive");

  // Normalized states for forecast months; observed months come from the
  // trajectory on demand. Chaining stays in normalized space so a zero delta
  // propagates the anchor exactly.
  std::vector<DenseMatrix> filled(plan.t1 - plan.t0);
  std::vector<char> has(plan.t1 - plan.t0, 0);

  auto state_at = [&](int t) -> DenseMatrix {
    if (t <= plan.t0) return normalized_prognostic(traj, t, stats);
    const int slot = t - plan.t0 - 1;
    if (!has[slot]) {
      throw std::logic_error("execute_rollout: step input at month " + std::to_string(t) +
                             " is unavailable (planner bug)");
    }
    return filled[slot];
  };

  for (const RolloutStep& step : plan.steps) {
    if (step.h > psi_h_max) {
      throw DataError("execute_rollout: horizon " + std::to_string(step.h) +
                      " exceeds the trained H_max " + std::to_string(psi_h_max));
    }
    ModelInput input;
    input.graph = traj.mesh;
    input.state = state_at(step.t_in);
    input.context = normalized_context(traj, step.t_in, stats);
    input.t_norm = static_cast<double>(step.t_in) / static_cast<double>(traj.T);
    input.h_norm = static_cast<double>(step.h) / static_cast<double>(psi_h_max);

    const ModelOutput delta = forward(params, input, cfg);
    const int slot = step.t_out - plan.t0 - 1;
    if (has[slot]) {
      throw std::logic_error("execute_rollout: month filled twice (planner bug)");
    }
    filled[slot] = reconstruct(input.state, delta);
    has[slot] = 1;
  }

  RolloutResult result;
  result.t0 = plan.t0;
  result.t1 = plan.t1;
  result.predicted.reserve(filled.size());
  for (std::size_t i = 0; i < filled.size(); ++i) {
    if (!has[i]) throw std::logic_error("execute_rollout: uncovered month (planner bug)");
    result.predicted.push_back(denormalize_prognostic(filled[i], stats));
  }
  return result;
}

}  // namespace meshcast
