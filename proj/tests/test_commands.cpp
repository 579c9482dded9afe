#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "meshcast/commands.hpp"
#include "meshcast/error.hpp"

using namespace meshcast;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("meshcast_cmd_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string sub(const std::string& name) const { return (path / name).string(); }
};

ExperimentConfig tiny_config(const TempDir& tmp) {
  KeyValueConfig kv;
  kv.set("data_dir", tmp.sub("data"));
  kv.set("run_dir", tmp.sub("run"));
  kv.set("report_dir", tmp.sub("reports"));
  kv.set("nodes", "20");
  kv.set("months", "16");
  kv.set("melt_min", "0");
  kv.set("melt_max", "10");
  kv.set("melt_step", "2");
  kv.set("horizons", "1,3");
  kv.set("epochs", "3");
  kv.set("hidden", "4");
  kv.set("eval_t0", "8");
  kv.set("eval_t1", "16");
  kv.set("seed", "7");
  return make_experiment_config(kv);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MESHCAST_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("generate -> train -> rollout -> eval works end to end") {
  TempDir tmp;
  ExperimentConfig cfg = tiny_config(tmp);
  std::ostringstream log, manifest;

  const GeneratedDataset ds = cmd_generate(cfg, log, manifest);
  CHECK(ds.trajectory_paths.size() == 6);  // melt 0,2,4,6,8,10
  CHECK(fs::exists(ds.manifest_path));
  CHECK(manifest.str().find("mesh.bin") != std::string::npos);

  const LoadedDataset loaded = load_dataset(cfg.data_dir);
  CHECK(loaded.trajectories.size() == 6);
  CHECK(loaded.split.train.size() == 4);
  CHECK(loaded.split.val.size() == 1);
  CHECK(loaded.split.test.size() == 1);

  const TrainOutcome trained = cmd_train(cfg, log);
  CHECK(fs::exists(trained.checkpoint_path));
  CHECK(fs::exists(trained.stats_path));
  CHECK(fs::exists(trained.history_path));
  CHECK(trained.train_pairs == 4 * (15 + 13));

  RolloutArgs rollout;
  rollout.checkpoint_path = trained.checkpoint_path;
  rollout.trajectory_path = ds.trajectory_paths.back();  // melt 10: the test scenario
  rollout.output_path = tmp.sub("forecast.traj");
  rollout.audit_path = tmp.sub("plan.txt");
  rollout.t0 = cfg.eval_t0;
  rollout.t1 = cfg.eval_t1;
  cmd_rollout(rollout, log);
  CHECK(fs::exists(rollout.output_path));
  const std::string audit = slurp(rollout.audit_path);
  CHECK(audit.find("# t_in h t_out depth") != std::string::npos);

  EvalArgs eval;
  eval.pred_path = rollout.output_path;
  eval.truth_path = ds.trajectory_paths.back();
  eval.report_path = tmp.sub("report.txt");
  eval.series_path = tmp.sub("series.csv");
  eval.t0 = cfg.eval_t0;
  eval.t1 = cfg.eval_t1;
  const RmseReport report = cmd_eval(eval, log, std::cout);
  CHECK(report.per_month.size() == 8);
  CHECK(report.window_avg.vx >= 0.0);
  CHECK(fs::exists(eval.report_path));
  CHECK(slurp(eval.series_path).find("month,rmse_vx") != std::string::npos);

  // Evaluating the truth against itself is exactly zero.
  EvalArgs self_eval = eval;
  self_eval.pred_path = ds.trajectory_paths.back();
  self_eval.report_path = tmp.sub("self.txt");
  const RmseReport zero = cmd_eval(self_eval, log, std::cout);
  CHECK(zero.window_avg.vx == 0.0);
  CHECK(zero.window_avg.thickness == 0.0);
}

TEST_CASE("generate is reproducible: identical manifests and bytes") {
  TempDir tmp;
  ExperimentConfig cfg = tiny_config(tmp);
  std::ostringstream log, m1, m2;
  cmd_generate(cfg, log, m1);
  const std::string first = slurp(cfg.data_dir + "/melt_04.traj");
  cmd_generate(cfg, log, m2);
  CHECK(m1.str() == m2.str());
  CHECK(first == slurp(cfg.data_dir + "/melt_04.traj"));
}

TEST_CASE("ablation harness writes one row per horizon set and keeps going") {
  TempDir tmp;
  ExperimentConfig cfg = tiny_config(tmp);
  std::ostringstream log, manifest;
  cmd_generate(cfg, log, manifest);

  const std::vector<std::vector<int>> sets = {{1}, {1, 3}, {1, 3, 6}};
  const std::string report_path = tmp.sub("ablation.txt");
  const auto rows = cmd_ablate_horizons(cfg, sets, log, report_path);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) CHECK(row.ok);
  CHECK(rows[0].train_pairs == 4 * 15);
  CHECK(rows[1].train_pairs == 4 * (15 + 13));
  CHECK(rows[2].train_pairs == 4 * (15 + 13 + 10));
  const std::string report = slurp(report_path);
  CHECK(report.find("1,3,6") != std::string::npos);
  CHECK(report.find(" ok") != std::string::npos);

  CHECK_THROWS_AS(cmd_ablate_horizons(cfg, {}, log, report_path), UsageError);
}

TEST_CASE("config parsing rejects unknown keys and bad sets") {
  KeyValueConfig kv = KeyValueConfig::parse_text("epochs = 5\nhiden = 7\n");
  CHECK_THROWS_AS(make_experiment_config(kv), UsageError);

  KeyValueConfig bad_set;
  bad_set.set("ablation_sets", "2,4 | 1,15");
  CHECK_THROWS_AS(make_experiment_config(bad_set), UsageError);

  KeyValueConfig bad_window;
  bad_window.set("eval_t0", "10");
  bad_window.set("eval_t1", "5");
  CHECK_THROWS_AS(make_experiment_config(bad_window), UsageError);

  CHECK_THROWS_AS(KeyValueConfig::parse_text("epochs 5\n"), UsageError);
  CHECK_THROWS_AS(KeyValueConfig::parse_text("a = 1\na = 2\n"), UsageError);
}

TEST_CASE("cli exit codes: 0 success, 1 usage, 2 data") {
  TempDir tmp;
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("definitely-not-a-subcommand") == 1);
  CHECK(run_cli("rollout --checkpoint x --trajectory y --out z --t0 10 --t1 5") == 1);
  CHECK(run_cli("eval --pred " + tmp.sub("nope.traj") + " --truth " + tmp.sub("nope.traj")) == 2);
  CHECK(run_cli("train --config " + tmp.sub("missing.conf")) == 2);

  {
    std::ofstream bad_cfg(tmp.sub("bad.conf"));
    bad_cfg << "not_a_real_key = 3\n";
  }
  CHECK(run_cli("generate --config " + tmp.sub("bad.conf")) == 1);

  // A tiny full run through the CLI itself.
  {
    std::ofstream cfg(tmp.sub("ok.conf"));
    cfg << "data_dir = " << tmp.sub("data") << "\nrun_dir = " << tmp.sub("run")
        << "\nnodes = 14\nmonths = 10\nmelt_min = 0\nmelt_max = 10\nmelt_step = 2\n"
        << "epochs = 2\nhidden = 3\nhorizons = 1\n";
  }
  CHECK(run_cli("generate --config " + tmp.sub("ok.conf")) == 0);
  CHECK(run_cli("train --config " + tmp.sub("ok.conf")) == 0);
  CHECK(run_cli("rollout --checkpoint " + tmp.sub("run/checkpoint.bin") + " --trajectory " +
                tmp.sub("data/melt_10.traj") + " --out " + tmp.sub("fc.traj") +
                " --t0 4 --t1 10") == 0);
  CHECK(run_cli("eval --pred " + tmp.sub("fc.traj") + " --truth " + tmp.sub("data/melt_10.traj") +
                " --t0 4 --t1 10") == 0);
}
