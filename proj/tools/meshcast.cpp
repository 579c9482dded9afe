#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <thread>

#include "meshcast/commands.hpp"
#include "meshcast/error.hpp"

namespace {

using namespace meshcast;

ExperimentConfig build_config(const std::string& config_path, std::uint64_t seed_override,
                              bool seed_set, int threads_override, bool threads_set) {
  KeyValueConfig kv =
      config_path.empty() ? KeyValueConfig() : KeyValueConfig::parse_file(config_path);
  if (seed_set) kv.set("seed", std::to_string(seed_override));
  if (threads_set) kv.set("threads", std::to_string(threads_override));
  ExperimentConfig cfg = make_experiment_config(kv);
  if (cfg.train.threads <= 0) {
    cfg.train.threads = static_cast<int>(std::thread::hardware_concurrency());
    if (cfg.train.threads < 1) cfg.train.threads = 1;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mesh-native multi-horizon emulator: generate, train, roll out, evaluate"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("--config", config_path, "key = value config file");
  auto* seed_opt = app.add_option("--seed", seed, "global seed override");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* generate = app.add_subcommand("generate", "write the synthetic dataset + manifest");
  generate->fallthrough();

  auto* train_cmd = app.add_subcommand("train", "train a multi-horizon checkpoint");
  train_cmd->fallthrough();
  std::string train_horizons;
  int train_epochs = -1;
  std::string train_run_dir;
  train_cmd->add_option("--horizons", train_horizons, "override, e.g. 1,15");
  train_cmd->add_option("--epochs", train_epochs, "override epoch count");
  train_cmd->add_option("--run-dir", train_run_dir, "override output directory");

  auto* rollout_cmd = app.add_subcommand("rollout", "greedy descending-horizon forecast");
  rollout_cmd->fallthrough();
  RolloutArgs rollout_args;
  std::string rollout_horizons;
  rollout_cmd->add_option("--checkpoint", rollout_args.checkpoint_path)->required();
  rollout_cmd->add_option("--trajectory", rollout_args.trajectory_path)->required();
  rollout_cmd->add_option("--out", rollout_args.output_path)->required();
  rollout_cmd->add_option("--stats", rollout_args.stats_path, "default: next to checkpoint");
  rollout_cmd->add_option("--mesh", rollout_args.mesh_path, "default: next to trajectory");
  rollout_cmd->add_option("--audit", rollout_args.audit_path, "plan audit file");
  rollout_cmd->add_option("--t0", rollout_args.t0, "last observed month");
  rollout_cmd->add_option("--t1", rollout_args.t1, "final forecast month");
  rollout_cmd->add_option("--horizons", rollout_horizons, "override, default: checkpoint's set");
  rollout_cmd->add_flag("--frozen-scan", rollout_args.frozen_scan,
                        "freeze known() per horizon pass");

  auto* eval_cmd = app.add_subcommand("eval", "pooled RMSE of a forecast against truth");
  eval_cmd->fallthrough();
  EvalArgs eval_args;
  eval_cmd->add_option("--pred", eval_args.pred_path)->required();
  eval_cmd->add_option("--truth", eval_args.truth_path)->required();
  eval_cmd->add_option("--report", eval_args.report_path, "default: stdout");
  eval_cmd->add_option("--series", eval_args.series_path, "plot-ready per-month CSV");
  eval_cmd->add_option("--t0", eval_args.t0);
  eval_cmd->add_option("--t1", eval_args.t1);

  auto* ablate = app.add_subcommand("ablate-horizons", "train/evaluate a grid of horizon sets");
  ablate->fallthrough();
  std::string ablate_sets;
  std::string ablate_h2;
  std::string ablate_report;
  ablate->add_option("--sets", ablate_sets, "e.g. '1|1,15|1,15,30'");
  ablate->add_option("--h2-sweep", ablate_h2, "second horizons, expands to {1,h2} sets");
  ablate->add_option("--report", ablate_report, "default: <report_dir>/ablation.txt");

  try {
    app.parse(argc, argv);

    ExperimentConfig cfg = build_config(config_path, seed, seed_opt->count() > 0, threads,
                                        threads_opt->count() > 0);

    if (*generate) {
      cmd_generate(cfg, std::clog, std::cout);
    } else if (*train_cmd) {
      if (!train_horizons.empty()) {
        cfg.train.horizons = parse_horizon_list(train_horizons, "--horizons");
        validate_train_config(cfg.train);
      }
      if (train_epochs > 0) cfg.train.epochs = train_epochs;
      if (!train_run_dir.empty()) cfg.run_dir = train_run_dir;
      cmd_train(cfg, std::clog);
    } else if (*rollout_cmd) {
      if (!rollout_horizons.empty()) {
        rollout_args.horizons = parse_horizon_list(rollout_horizons, "--horizons");
      }
      cmd_rollout(rollout_args, std::clog);
    } else if (*eval_cmd) {
      cmd_eval(eval_args, std::clog, std::cout);
    } else if (*ablate) {
      std::vector<std::vector<int>> sets = cfg.ablation_sets;
      if (!ablate_sets.empty()) {
        KeyValueConfig kv;
        kv.set("ablation_sets", ablate_sets);
        sets = kv.get_int_list_sets("ablation_sets", sets);
      }
      if (!ablate_h2.empty()) {
        sets.clear();
        for (int h2 : parse_horizon_list(ablate_h2, "--h2-sweep")) {
          sets.push_back({1, h2});
        }
      }
      std::string report = ablate_report;
      if (report.empty()) {
        std::filesystem::create_directories(cfg.report_dir);
        report = (std::filesystem::path(cfg.report_dir) / "ablation.txt").string();
      }
      const auto rows = cmd_ablate_horizons(cfg, sets, std::clog, report);
      std::clog << "wrote " << report << "\n";
      for (const auto& row : rows) {
        if (!row.ok) throw NumericError("ablation sub-run failed: " + row.error);
      }
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
