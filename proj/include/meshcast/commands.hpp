#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "meshcast/config.hpp"
#include "meshcast/io.hpp"
#include "meshcast/metrics.hpp"

namespace meshcast {

/// A generated dataset on disk plus its in-memory form.
struct GeneratedDataset {
  std::string mesh_path;
  std::string manifest_path;
  std::vector<std::string> trajectory_paths;
};

/// Writes the mesh, one trajectory per melt rate, and a hash manifest.
/// The manifest text also goes to `manifest_out` (stdout for the CLI).
GeneratedDataset cmd_generate(const ExperimentConfig& cfg, std::ostream& log,
                              std::ostream& manifest_out);

/// Dataset loaded back from a data directory via its manifest.
struct LoadedDataset {
  MeshGraph mesh;
  std::uint64_t mesh_hash = 0;
  std::vector<Trajectory> trajectories;
  SplitIndices split;
};

LoadedDataset load_dataset(const std::string& data_dir);

struct TrainOutcome {
  std::string checkpoint_path;
  std::string stats_path;
  std::string history_path;
  int best_epoch = -1;
  double best_val_loss = 0.0;
  double wall_seconds = 0.0;
  long long train_pairs = 0;
};

/// Loads the dataset, fits stats on the training split, trains, and writes
/// checkpoint + stats + history into cfg.run_dir.
TrainOutcome cmd_train(const ExperimentConfig& cfg, std::ostream& log);

struct RolloutArgs {
  std::string checkpoint_path;
  std::string stats_path;       // empty: stats.txt next to the checkpoint
  std::string trajectory_path;
  std::string mesh_path;        // empty: mesh.bin next to the trajectory
  std::string output_path;
  std::string audit_path;       // empty: skip the plan audit file
  int t0 = 60;
  int t1 = 240;
  std::vector<int> horizons;    // empty: the checkpoint's training set
  bool frozen_scan = false;
};

/// Plans and executes a forecast; writes the predicted trajectory and a plan
/// audit (one step per line).
void cmd_rollout(const RolloutArgs& args, std::ostream& log);

struct EvalArgs {
  std::string pred_path;
  std::string truth_path;
  std::string report_path;   // empty: stdout
  std::string series_path;   // optional plot-ready per-month series
  int t0 = 60;
  int t1 = 240;
};

RmseReport cmd_eval(const EvalArgs& args, std::ostream& log, std::ostream& fallback_report);

struct AblationRow {
  std::vector<int> horizons;
  long long train_pairs = 0;   // sum over training trajectories of (T - h)
  double train_seconds = 0.0;
  ChannelRmse test_rmse;
  bool ok = false;
  std::string error;
};

/// Trains one model per horizon set (sequentially, for honest timing), rolls
/// out on the test split, and writes a machine-readable table. Sub-run
/// failures are recorded and the harness continues.
std::vector<AblationRow> cmd_ablate_horizons(const ExperimentConfig& cfg,
                                             const std::vector<std::vector<int>>& sets,
                                             std::ostream& log, const std::string& report_path);

}  // namespace meshcast
