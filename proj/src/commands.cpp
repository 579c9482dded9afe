#include "meshcast/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "meshcast/error.hpp"
#include "meshcast/rollout.hpp"
#include "meshcast/trainer.hpp"

namespace meshcast {

namespace {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir + ": " + ec.message());
}

std::string melt_file_name(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "melt_%02d.traj", static_cast<int>(std::llround(rate)));
  return buf;
}

std::string horizons_label(const std::vector<int>& horizons) {
  std::string label;
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (i) label += ',';
    label += std::to_string(horizons[i]);
  }
  return label;
}

void write_history(const std::string& path, const TrainResult& result) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << "# epoch lr train_loss val_loss\n";
  for (const EpochRecord& rec : result.history) {
    out << rec.epoch << ' ' << format_double(rec.lr) << ' ' << format_double(rec.train_loss)
        << ' ' << format_double(rec.val_loss) << '\n';
  }
  out << "# best_epoch " << result.best_epoch << " best_val_loss "
      << format_double(result.best_val_loss) << '\n';
  if (!out) throw DataError("write failed for " + path);
}

}  // namespace

GeneratedDataset cmd_generate(const ExperimentConfig& cfg, std::ostream& log,
                              std::ostream& manifest_out) {
  ensure_dir(cfg.data_dir);
  GeneratedDataset out;

  log << "generating mesh: " << cfg.synth.node_count << " nodes, extent " << cfg.synth.extent_km
      << " km\n";
  const MeshGraph mesh = generate_mesh(cfg.synth);
  out.mesh_path = join(cfg.data_dir, "mesh.bin");
  write_mesh(out.mesh_path, mesh);
  const std::uint64_t mesh_hash = file_fnv1a64(out.mesh_path);

  std::ostringstream manifest;
  manifest << "# dataset manifest\n";
  {
    char line[128];
    std::snprintf(line, sizeof(line), "mesh.bin %016llx\n",
                  static_cast<unsigned long long>(mesh_hash));
    manifest << line;
  }

  int count = 0;
  for (double rate = cfg.melt_min; rate <= cfg.melt_max + 1e-9; rate += cfg.melt_step) {
    SyntheticConfig scenario = cfg.synth;
    scenario.melt_rate = rate;
    Trajectory traj = generate_trajectory(mesh, scenario);
    traj.mesh_hash = mesh_hash;
    const std::string name = melt_file_name(rate);
    const std::string path = join(cfg.data_dir, name);
    write_trajectory(path, traj);
    char line[128];
    std::snprintf(line, sizeof(line), "%s %016llx\n", name.c_str(),
                  static_cast<unsigned long long>(file_fnv1a64(path)));
    manifest << line;
    out.trajectory_paths.push_back(path);
    ++count;
  }
  log << "wrote " << count << " trajectories (melt " << cfg.melt_min << ".." << cfg.melt_max
      << " step " << cfg.melt_step << ", T=" << cfg.synth.months << ")\n";

  out.manifest_path = join(cfg.data_dir, "manifest.txt");
  std::ofstream mf(out.manifest_path);
  if (!mf) throw DataError("cannot open " + out.manifest_path + " for writing");
  mf << manifest.str();
  if (!mf.flush()) throw DataError("write failed for " + out.manifest_path);
  manifest_out << manifest.str();
  return out;
}

LoadedDataset load_dataset(const std::string& data_dir) {
  const std::string manifest_path = join(data_dir, "manifest.txt");
  std::ifstream mf(manifest_path);
  if (!mf) throw DataError("cannot open " + manifest_path + " (run generate first?)");

  LoadedDataset ds;
  std::vector<std::string> names;
  std::string line;
  while (std::getline(mf, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string name, hash;
    if (!(ss >> name >> hash)) throw DataError(manifest_path + ": malformed line: " + line);
    names.push_back(name);
  }

  const std::string mesh_path = join(data_dir, "mesh.bin");
  ds.mesh = read_mesh(mesh_path);
  ds.mesh_hash = file_fnv1a64(mesh_path);

  for (const std::string& name : names) {
    if (name == "mesh.bin") continue;
    Trajectory traj = read_trajectory(join(data_dir, name));
    if (traj.mesh_hash != ds.mesh_hash) {
      throw DataError(name + ": mesh hash mismatch against " + mesh_path);
    }
    if (traj.N != ds.mesh.node_count) {
      throw DataError(name + ": node count does not match the mesh");
    }
    ds.trajectories.push_back(std::move(traj));
  }
  if (ds.trajectories.empty()) throw DataError(data_dir + ": no trajectories in manifest");
  for (auto& traj : ds.trajectories) traj.mesh = &ds.mesh;
  ds.split = split_by_melt_rate(ds.trajectories);
  return ds;
}

TrainOutcome cmd_train(const ExperimentConfig& cfg, std::ostream& log) {
  LoadedDataset ds = load_dataset(cfg.data_dir);
  if (ds.split.train.empty() || ds.split.val.empty()) {
    throw DataError("dataset has an empty train or validation split");
  }
  ensure_dir(cfg.run_dir);

  const NormStats stats = compute_norm_stats(ds.trajectories, ds.split.train);
  TrainOutcome out;
  out.stats_path = join(cfg.run_dir, "stats.txt");
  write_norm_stats(out.stats_path, stats);
  const std::uint64_t stats_hash = file_fnv1a64(out.stats_path);

  const HorizonSet horizons(cfg.train.horizons);
  out.train_pairs =
      static_cast<long long>(enumerate_pairs(ds.trajectories, ds.split.train, horizons).size());
  log << "training: horizons {" << horizons_label(cfg.train.horizons) << "}, "
      << out.train_pairs << " pairs/epoch, " << cfg.train.epochs << " epochs, hidden "
      << cfg.train.hidden << "\n";

  const auto start = std::chrono::steady_clock::now();
  const TrainResult result =
      train(ds.trajectories, ds.split.train, ds.split.val, stats, cfg.train);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Checkpoint ckpt;
  ckpt.params = result.best_params;
  ckpt.model = result.model_config;
  ckpt.seed = cfg.train.seed;
  ckpt.horizons = HorizonSet(cfg.train.horizons).members();
  ckpt.stats_hash = stats_hash;
  out.checkpoint_path = join(cfg.run_dir, "checkpoint.bin");
  write_checkpoint(out.checkpoint_path, ckpt);

  out.history_path = join(cfg.run_dir, "history.txt");
  write_history(out.history_path, result);
  out.best_epoch = result.best_epoch;
  out.best_val_loss = result.best_val_loss;
  log << "best epoch " << out.best_epoch << ", val loss " << format_double(out.best_val_loss)
      << ", wall " << out.wall_seconds << " s\n";
  return out;
}

void cmd_rollout(const RolloutArgs& args, std::ostream& log) {
  if (args.t1 <= args.t0 || args.t0 < 1) {
    throw UsageError("rollout: requires 1 <= t0 < t1");
  }
  const Checkpoint ckpt = read_checkpoint(args.checkpoint_path);

  std::string stats_path = args.stats_path;
  if (stats_path.empty()) {
    stats_path = (fs::path(args.checkpoint_path).parent_path() / "stats.txt").string();
  }
  const NormStats stats = read_norm_stats(stats_path);
  if (file_fnv1a64(stats_path) != ckpt.stats_hash) {
    throw DataError(stats_path + ": stats hash does not match the checkpoint");
  }

  Trajectory traj = read_trajectory(args.trajectory_path);
  std::string mesh_path = args.mesh_path;
  if (mesh_path.empty()) {
    mesh_path = (fs::path(args.trajectory_path).parent_path() / "mesh.bin").string();
  }
  const MeshGraph mesh = read_mesh(mesh_path);
  if (file_fnv1a64(mesh_path) != traj.mesh_hash) {
    throw DataError(mesh_path + ": mesh hash does not match the trajectory");
  }
  traj.mesh = &mesh;

  const HorizonSet horizons(args.horizons.empty() ? ckpt.horizons : args.horizons);
  const int h_max_train = HorizonSet(ckpt.horizons).h_max();
  if (args.t1 > traj.T) {
    throw UsageError("rollout: t1 exceeds the trajectory length " + std::to_string(traj.T));
  }

  const RolloutPlan plan = plan_rollout(args.t0, args.t1, horizons, args.frozen_scan);
  log << "rollout: " << plan.steps.size() << " steps, max depth " << plan.max_depth() << "\n";
  const RolloutResult result = execute_rollout(ckpt.params, ckpt.model, traj, plan, stats,
                                               h_max_train);

  // Forecast trajectory: observed months copied, forecast months carry the
  // predicted prognostic channels; diagnostics stay exogenous except the
  // velocity magnitude, which must match the predicted components.
  Trajectory forecast = traj;
  forecast.mesh = traj.mesh;
  for (int t = args.t0 + 1; t <= args.t1; ++t) {
    const DenseMatrix& pred = result.at_month(t);
    for (int n = 0; n < forecast.N; ++n) {
      const double vx = pred.at(n, 0);
      const double vy = pred.at(n, 1);
      forecast.state_at(t, n, kChVx) = vx;
      forecast.state_at(t, n, kChVy) = vy;
      forecast.state_at(t, n, kChThickness) = pred.at(n, 2);
      forecast.state_at(t, n, kChVelMag) = std::sqrt(vx * vx + vy * vy);
    }
  }
  write_trajectory(args.output_path, forecast);

  if (!args.audit_path.empty()) {
    std::ofstream audit(args.audit_path);
    if (!audit) throw DataError("cannot open " + args.audit_path + " for writing");
    audit << "# rollout plan t0=" << plan.t0 << " t1=" << plan.t1 << " horizons {"
          << horizons_label(horizons.members()) << "}" << (args.frozen_scan ? " frozen" : "")
          << "\n";
    audit << "# t_in h t_out depth\n";
    for (const RolloutStep& s : plan.steps) {
      audit << s.t_in << ' ' << s.h << ' ' << s.t_out << ' ' << plan.depth[s.t_out] << '\n';
    }
    if (!audit.flush()) throw DataError("write failed for " + args.audit_path);
  }
}

RmseReport cmd_eval(const EvalArgs& args, std::ostream& log, std::ostream& fallback_report) {
  if (args.t1 <= args.t0 || args.t0 < 1) throw UsageError("eval: requires 1 <= t0 < t1");
  const Trajectory pred = read_trajectory(args.pred_path);
  const Trajectory truth = read_trajectory(args.truth_path);
  if (pred.N != truth.N) throw DataError("eval: node counts differ");
  if (args.t1 > pred.T || args.t1 > truth.T) {
    throw DataError("eval: window extends past a trajectory");
  }

  std::vector<DenseMatrix> pred_states, truth_states;
  std::vector<MonthPair> months;
  for (int t = args.t0 + 1; t <= args.t1; ++t) {
    pred_states.push_back(pred.prognostic(t));
    truth_states.push_back(truth.prognostic(t));
  }
  for (std::size_t i = 0; i < pred_states.size(); ++i) {
    months.push_back(MonthPair{&pred_states[i], &truth_states[i]});
  }
  const RmseReport report = rmse_per_month(months, args.t0);

  std::ostringstream table;
  table << "# forecast evaluation window t0=" << args.t0 << " t1=" << args.t1 << "\n";
  table << "# month rmse_vx rmse_vy rmse_thickness\n";
  for (const auto& [month, rmse] : report.per_month) {
    table << month << ' ' << format_double(rmse.vx) << ' ' << format_double(rmse.vy) << ' '
          << format_double(rmse.thickness) << '\n';
  }
  table << "window_avg " << format_double(report.window_avg.vx) << ' '
        << format_double(report.window_avg.vy) << ' '
        << format_double(report.window_avg.thickness) << '\n';

  if (args.report_path.empty()) {
    fallback_report << table.str();
  } else {
    std::ofstream out(args.report_path);
    if (!out) throw DataError("cannot open " + args.report_path + " for writing");
    out << table.str();
    if (!out.flush()) throw DataError("write failed for " + args.report_path);
    log << "wrote " << args.report_path << "\n";
  }

  if (!args.series_path.empty()) {
    std::ofstream series(args.series_path);
    if (!series) throw DataError("cannot open " + args.series_path + " for writing");
    series << "month,rmse_vx,rmse_vy,rmse_thickness\n";
    for (const auto& [month, rmse] : report.per_month) {
      series << month << ',' << format_double(rmse.vx) << ',' << format_double(rmse.vy) << ','
             << format_double(rmse.thickness) << '\n';
    }
    if (!series.flush()) throw DataError("write failed for " + args.series_path);
  }
  return report;
}

std::vector<AblationRow> cmd_ablate_horizons(const ExperimentConfig& cfg,
                                             const std::vector<std::vector<int>>& sets,
                                             std::ostream& log, const std::string& report_path) {
  if (sets.empty()) throw UsageError("ablate-horizons: empty horizon set list");
  LoadedDataset ds = load_dataset(cfg.data_dir);
  if (ds.split.train.empty() || ds.split.val.empty() || ds.split.test.empty()) {
    throw DataError("ablation needs non-empty train/val/test splits");
  }
  const NormStats stats = compute_norm_stats(ds.trajectories, ds.split.train);

  std::vector<AblationRow> rows;
  for (const auto& set : sets) {
    AblationRow row;
    row.horizons = set;
    try {
      const HorizonSet horizons(set);
      if (!horizons.contains(1)) throw UsageError("horizon set must contain 1");
      row.train_pairs = static_cast<long long>(
          enumerate_pairs(ds.trajectories, ds.split.train, horizons).size());

      TrainConfig train_cfg = cfg.train;
      train_cfg.horizons = set;
      log << "ablation {" << horizons_label(set) << "}: " << row.train_pairs
          << " pairs/epoch\n";

      const auto start = std::chrono::steady_clock::now();
      const TrainResult result =
          train(ds.trajectories, ds.split.train, ds.split.val, stats, train_cfg);
      row.train_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

      const RolloutPlan plan =
          plan_rollout(cfg.eval_t0, cfg.eval_t1, horizons, cfg.frozen_scan);
      std::vector<std::vector<MonthPair>> forecast_errors;
      std::vector<std::vector<DenseMatrix>> pred_store, truth_store;
      for (int idx : ds.split.test) {
        const Trajectory& traj = ds.trajectories[idx];
        const RolloutResult rollout = execute_rollout(result.best_params, result.model_config,
                                                      traj, plan, stats, horizons.h_max());
        std::vector<DenseMatrix> preds, truths;
        for (int t = cfg.eval_t0 + 1; t <= cfg.eval_t1; ++t) {
          preds.push_back(rollout.at_month(t));
          truths.push_back(traj.prognostic(t));
        }
        pred_store.push_back(std::move(preds));
        truth_store.push_back(std::move(truths));
      }
      for (std::size_t i = 0; i < pred_store.size(); ++i) {
        std::vector<MonthPair> months;
        for (std::size_t t = 0; t < pred_store[i].size(); ++t) {
          months.push_back(MonthPair{&pred_store[i][t], &truth_store[i][t]});
        }
        forecast_errors.push_back(std::move(months));
      }
      row.test_rmse = pooled_rmse(forecast_errors);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
      log << "ablation {" << horizons_label(set) << "} failed: " << e.what() << "\n";
    }
    rows.push_back(std::move(row));
  }

  std::ofstream out(report_path);
  if (!out) throw DataError("cannot open " + report_path + " for writing");
  out << "# horizon ablation: window " << cfg.eval_t0 + 1 << ".." << cfg.eval_t1 << "\n";
  out << "# context, full-scale PIG ISSM reference RMSE (Vx Vy H): one-step AR 108.77 207.05 "
         "30.91; horizons {1,15} 43.83 70.85 13.22\n";
  out << "# horizons train_pairs train_seconds rmse_vx rmse_vy rmse_thickness status\n";
  for (const AblationRow& row : rows) {
    out << horizons_label(row.horizons) << ' ' << row.train_pairs << ' '
        << format_double(row.train_seconds) << ' ';
    if (row.ok) {
      out << format_double(row.test_rmse.vx) << ' ' << format_double(row.test_rmse.vy) << ' '
          << format_double(row.test_rmse.thickness) << " ok\n";
    } else {
      out << "nan nan nan failed\n";
    }
  }
  if (!out.flush()) throw DataError("write failed for " + report_path);
  return rows;
}

}  // namespace meshcast
