#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "meshcast/dataset.hpp"
#include "meshcast/mesh_graph.hpp"
#include "meshcast/model.hpp"

namespace meshcast {

/// FNV-1a over a byte range; used for mesh and stats reference hashes.
std::uint64_t fnv1a64(const void* data, std::size_t length);
std::uint64_t file_fnv1a64(const std::string& path);

// All containers are little-endian; layouts are documented in the README.

void write_mesh(const std::string& path, const MeshGraph& mesh);
MeshGraph read_mesh(const std::string& path);

/// Writes scenario header, channel names, mesh hash, static features, and
/// states in (t, n, c) order.
void write_trajectory(const std::string& path, const Trajectory& traj);

/// Reads a trajectory; the mesh pointer is left null for the caller to attach
/// after verifying the stored mesh hash.
Trajectory read_trajectory(const std::string& path);

struct Checkpoint {
  ModelParams params;
  ModelConfig model;
  std::uint64_t seed = 0;
  std::vector<int> horizons;
  std::uint64_t stats_hash = 0;
};

void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);

/// Self-describing text record, one channel per line.
void write_norm_stats(const std::string& path, const NormStats& stats);
NormStats read_norm_stats(const std::string& path);

}  // namespace meshcast
