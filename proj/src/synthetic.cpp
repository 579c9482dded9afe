#include "meshcast/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "meshcast/error.hpp"
#include "meshcast/rng.hpp"

namespace meshcast {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct Fields {
  std::vector<double> bed;
  std::vector<double> smb;      // m/a
  std::vector<double> initial;  // m
};

Fields static_fields(const MeshGraph& mesh, const SyntheticConfig& cfg) {
  Fields f;
  const int n = mesh.node_count;
  f.bed.resize(n);
  f.smb.resize(n);
  f.initial.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = mesh.node_positions[i][0] / cfg.extent_km;
    const double y = mesh.node_positions[i][1] / cfg.extent_km;
    f.bed[i] = cfg.bed_base + cfg.bed_slope * x +
               cfg.bed_bump * std::sin(2.0 * M_PI * y) * std::cos(2.0 * M_PI * x);
    f.smb[i] = cfg.smb_base + cfg.smb_amp * std::sin(2.0 * M_PI * y);
    f.initial[i] = std::max(0.0, cfg.h0_base + cfg.h0_slope * x);
  }
  return f;
}

}  // namespace

MeshGraph generate_mesh(const SyntheticConfig& cfg) {
  if (cfg.node_count < 1) throw std::invalid_argument("generate_mesh: node_count must be positive");
  Rng rng(cfg.mesh_seed);
  const int n = cfg.node_count;

  std::vector<std::array<double, 2>> positions(n);
  for (auto& p : positions) {
    p[0] = rng.uniform(0.0, cfg.extent_km);
    p[1] = rng.uniform(0.0, cfg.extent_km);
  }

  auto dist_sq = [&](int a, int b) {
    const double dx = positions[a][0] - positions[b][0];
    const double dy = positions[a][1] - positions[b][1];
    return dx * dx + dy * dy;
  };

  std::vector<std::pair<int, int>> edges;
  std::vector<std::pair<double, int>> nearest;
  for (int i = 0; i < n; ++i) {
    nearest.clear();
    for (int j = 0; j < n; ++j) {
      if (j != i) nearest.emplace_back(dist_sq(i, j), j);
    }
    const int k = std::min<int>(cfg.knn, static_cast<int>(nearest.size()));
    std::partial_sort(nearest.begin(), nearest.begin() + k, nearest.end());
    for (int m = 0; m < k; ++m) edges.emplace_back(i, nearest[m].second);
  }

  // Union-find over the symmetrized kNN edges; bridge components with their
  // closest node pair until the graph is connected.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  for (const auto& [a, b] : edges) unite(a, b);

  for (;;) {
    int components = 0;
    for (int i = 0; i < n; ++i) {
      if (find(i) == i) ++components;
    }
    if (components <= 1) break;
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> bridge{-1, -1};
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (find(i) != find(j) && dist_sq(i, j) < best) {
          best = dist_sq(i, j);
          bridge = {i, j};
        }
      }
    }
    edges.push_back(bridge);
    unite(bridge.first, bridge.second);
  }

  return build_mesh_graph(n, edges, positions);
}

Trajectory generate_trajectory(const MeshGraph& mesh, const SyntheticConfig& cfg) {
  if (cfg.months < 2) throw std::invalid_argument("generate_trajectory: months must be >= 2");
  if (!(cfg.kappa >= 0.0 && cfg.kappa < 1.0)) {
    // Row-stochastic smoothing keeps the explicit update stable for kappa < 1.
    throw std::invalid_argument("generate_trajectory: kappa must lie in [0, 1)");
  }
  if (!(cfg.velocity_memory >= 0.0 && cfg.velocity_memory < 1.0)) {
    throw std::invalid_argument("generate_trajectory: velocity_memory must lie in [0, 1)");
  }

  const int n = mesh.node_count;
  const Fields fields = static_fields(mesh, cfg);
  Rng rng(cfg.physics_seed);

  Trajectory traj;
  traj.scenario_id = "melt_" + std::to_string(static_cast<int>(std::llround(cfg.melt_rate)));
  traj.melt_rate = cfg.melt_rate;
  traj.T = cfg.months;
  traj.N = n;
  traj.C = kStateChannels;
  traj.states.assign(static_cast<std::size_t>(traj.T) * n * kStateChannels, 0.0);
  traj.static_features = DenseMatrix(n, kStaticChannels);
  for (int i = 0; i < n; ++i) {
    traj.static_features.at(i, kStaticMeltRate) = cfg.melt_rate;
    traj.static_features.at(i, kStaticSmb) = fields.smb[i];
  }
  traj.mesh = &mesh;

  // Raw neighbor lists (self excluded) for the velocity gradient proxy.
  std::vector<std::vector<int>> neighbors(n);
  for (const auto& [a, b] : mesh.edges) {
    neighbors[a].push_back(b);
    neighbors[b].push_back(a);
  }

  std::vector<double> thickness = fields.initial;
  std::vector<double> surface(n), floating(n), vx(n), vy(n), smoothed(n);
  const double h_ref = std::max(1.0, cfg.h0_base + 0.5 * cfg.h0_slope);

  for (int month = 1; month <= traj.T; ++month) {
    // Diagnostics for the current thickness field.
    for (int i = 0; i < n; ++i) {
      const double flot = -cfg.density_ratio * thickness[i];
      floating[i] = sigmoid((flot - fields.bed[i]) / cfg.float_scale);
      surface[i] = floating[i] * (1.0 - cfg.density_ratio) * thickness[i] +
                   (1.0 - floating[i]) * (fields.bed[i] + thickness[i]);
    }
    // Velocity: downhill surface-gradient proxy scaled by relative thickness
    // (sliding carries more ice where it is thick), relaxed toward that
    // target with a monthly memory factor so the field evolves with lag.
    for (int i = 0; i < n; ++i) {
      double gx = 0.0, gy = 0.0;
      for (int j : neighbors[i]) {
        const double dx = mesh.node_positions[j][0] - mesh.node_positions[i][0];
        const double dy = mesh.node_positions[j][1] - mesh.node_positions[i][1];
        const double d2 = dx * dx + dy * dy;
        if (d2 < 1e-12) continue;
        const double ds = surface[j] - surface[i];
        gx += ds * dx / d2;
        gy += ds * dy / d2;
      }
      if (!neighbors[i].empty()) {
        gx /= static_cast<double>(neighbors[i].size());
        gy /= static_cast<double>(neighbors[i].size());
      }
      const double thickness_factor = thickness[i] / h_ref;
      const double ux = -cfg.velocity_gain * gx * thickness_factor;
      const double uy = -cfg.velocity_gain * gy * thickness_factor;
      if (month == 1) {
        vx[i] = ux;
        vy[i] = uy;
      } else {
        vx[i] = cfg.velocity_memory * vx[i] + (1.0 - cfg.velocity_memory) * ux;
        vy[i] = cfg.velocity_memory * vy[i] + (1.0 - cfg.velocity_memory) * uy;
      }
    }

    for (int i = 0; i < n; ++i) {
      traj.state_at(month, i, kChVx) = vx[i];
      traj.state_at(month, i, kChVy) = vy[i];
      traj.state_at(month, i, kChThickness) = thickness[i];
      traj.state_at(month, i, kChSurface) = surface[i];
      traj.state_at(month, i, kChBase) = fields.bed[i];
      traj.state_at(month, i, kChFloatRatio) = floating[i];
      traj.state_at(month, i, kChVelMag) = std::sqrt(vx[i] * vx[i] + vy[i] * vy[i]);
    }

    if (month == traj.T) break;

    // Row-stochastic neighborhood smoothing (self-loop included).
    for (int i = 0; i < n; ++i) {
      double acc = thickness[i];
      for (int j : neighbors[i]) acc += thickness[j];
      smoothed[i] = acc / static_cast<double>(neighbors[i].size() + 1);
    }
    for (int i = 0; i < n; ++i) {
      double next = thickness[i] + cfg.kappa * (smoothed[i] - thickness[i]) -
                    cfg.melt_sensitivity * cfg.melt_rate * floating[i] + fields.smb[i] / 12.0 +
                    cfg.noise_amp * rng.normal();
      next = std::max(0.0, next);
      if (!std::isfinite(next)) {
        throw NumericError("generate_trajectory: non-finite thickness at month " +
                           std::to_string(month + 1) + ", node " + std::to_string(i));
      }
      thickness[i] = next;
    }
  }

  validate_trajectory(traj);
  return traj;
}

}  // namespace meshcast
