#pragma once

#include <cstdint>

#include "meshcast/dataset.hpp"
#include "meshcast/mesh_graph.hpp"

namespace meshcast {

/// Desk-scale stand-in for the full-physics transients: a smooth, seeded
/// thickness/velocity toy on a graph whose only jobs are melt-rate
/// sensitivity, spatial smoothness, and nontrivial multi-month dynamics.
/// Not a glaciology model.
struct SyntheticConfig {
  // Mesh.
  int node_count = 300;
  double extent_km = 100.0;
  int knn = 6;
  std::uint64_t mesh_seed = 1;

  // Scenario.
  double melt_rate = 0.0;  // m/a, uniform over the domain
  int months = 240;

  // Physics constants (documented in the README).
  double kappa = 0.1;           // diffusion strength; explicit update stable for kappa < 1
  double melt_sensitivity = 0.002;  // m/month thinning per (m/a of melt) on floating ice
  double velocity_gain = 1.0;   // m/a per (m/km) of surface slope
  double velocity_memory = 0.85;  // monthly persistence of the velocity field
  double noise_amp = 1e-3;      // m/month on thickness
  std::uint64_t physics_seed = 2;

  // Static fields over x,y in [0, extent].
  double bed_base = -600.0;   // m, bed elevation at x = 0 (ocean side)
  double bed_slope = 900.0;   // m rise across the domain
  double bed_bump = 40.0;     // m, sinusoidal bed relief
  double h0_base = 400.0;     // m, initial thickness at x = 0
  double h0_slope = 500.0;    // m gain across the domain
  double smb_base = 0.5;      // m/a surface mass balance
  double smb_amp = 0.3;       // m/a spatial variation
  double float_scale = 50.0;  // m, width of the grounded-to-floating transition
  double density_ratio = 0.9; // ice/ocean density ratio for flotation
};

/// Seeded pseudo-random points with symmetrized kNN connectivity; connectivity
/// is completed with shortest bridging edges when the kNN graph is disconnected.
MeshGraph generate_mesh(const SyntheticConfig& config);

/// Integrates the toy dynamics for config.months monthly states. Aborts with
/// NumericError if any state goes non-finite.
Trajectory generate_trajectory(const MeshGraph& mesh, const SyntheticConfig& config);

}  // namespace meshcast
