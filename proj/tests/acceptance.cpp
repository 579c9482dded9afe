// Acceptance suite: one pass/fail line per criterion. Run with no arguments
// for the full gate, or name criteria to run a subset (see kCriteria below).

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "meshcast/commands.hpp"
#include "meshcast/grad_check.hpp"
#include "meshcast/rng.hpp"
#include "meshcast/rollout.hpp"
#include "meshcast/synthetic.hpp"
#include "meshcast/trainer.hpp"

using namespace meshcast;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("meshcast_accept_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string sub(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// ---------------------------------------------------------------------------
// Gradient correctness: finite differences on the full model + training loss
// over >= 20 random 10-node instances; < 1e-4 for relu, < 1e-6 for the purely
// linear configuration. Instances within 1e-3 of a relu kink are reseeded so
// the subgradient convention cannot poison the comparison.

bool crit_gradient_correctness() {
  const auto t_start = std::chrono::steady_clock::now();
  double worst_relu = 0.0;
  double worst_linear = 0.0;
  int relu_instances = 0;
  int linear_instances = 0;

  for (int instance = 0; instance < 25; ++instance) {
    const bool linear = instance >= 20;  // last five run the identity activation

    SyntheticConfig synth;
    synth.node_count = 10;
    synth.months = 8;
    synth.knn = 3;

    ModelConfig mc;
    mc.hidden = 6;
    mc.act = linear ? Activation::Identity : Activation::Relu;
    mc.input_width = model_input_width(kContextChannels, false);

    for (std::uint64_t attempt = 0;; ++attempt) {
      const std::uint64_t seed = Rng::derive(900 + instance, attempt);
      synth.mesh_seed = Rng::derive(seed, 1);
      synth.physics_seed = Rng::derive(seed, 2);
      synth.melt_rate = static_cast<double>((instance * 7) % 36) * 2.0;

      const MeshGraph mesh = generate_mesh(synth);
      std::vector<Trajectory> trajs;
      trajs.push_back(generate_trajectory(mesh, synth));
      trajs[0].mesh = &mesh;
      const std::vector<int> idx = {0};
      const NormStats stats = compute_norm_stats(trajs, idx);
      const HorizonSet horizons({1, 3});
      const int t = 2, h = 3;

      const ModelParams params = init_params(Rng::derive(seed, 3), mc);
      if (!linear) {
        const ModelInput probe = assemble_input(trajs[0], t, h, stats, horizons);
        if (min_abs_preactivation(params, probe, mc) < 1e-3) continue;  // reseed off the kink
      }

      ModelParams grads = params;
      pair_loss_and_grad(params, mc, trajs[0], t, h, stats, horizons, 1.0, 1.0, &grads);

      std::vector<DenseMatrix> values, grad_values;
      for (const DenseMatrix* m : param_list(params)) values.push_back(*m);
      for (const DenseMatrix* m : param_list(grads)) grad_values.push_back(*m);

      auto f = [&](const std::vector<DenseMatrix>& p) {
        ModelParams candidate;
        auto dst = param_list(candidate);
        for (std::size_t i = 0; i < p.size(); ++i) *dst[i] = p[i];
        return pair_loss_and_grad(candidate, mc, trajs[0], t, h, stats, horizons, 1.0, 1.0,
                                  nullptr);
      };
      const GradCheckReport report = finite_diff_check(f, values, grad_values, 1e-5);
      if (linear) {
        worst_linear = std::max(worst_linear, report.max_rel_error);
        ++linear_instances;
      } else {
        worst_relu = std::max(worst_relu, report.max_rel_error);
        ++relu_instances;
      }
      break;
    }
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  std::printf("    relu: %d instances, max rel err %.3e (< 1e-4); linear: %d, %.3e (< 1e-6); "
              "%.1f s (< 60)\n",
              relu_instances, worst_relu, linear_instances, worst_linear, seconds);
  return relu_instances >= 20 && worst_relu < 1e-4 && worst_linear < 1e-6 && seconds < 60.0;
}

// ---------------------------------------------------------------------------
// Propagation-operator equivalence: CSR spmm vs brute-force dense
// D^{-1/2} (A + I) D^{-1/2} * H on 100 random graphs with N <= 50.

bool crit_eq1_oracle() {
  Rng rng(777);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.index(50));
    std::set<std::pair<int, int>> edge_set;
    const int edges_wanted = static_cast<int>(rng.index(3 * n + 1));
    for (int e = 0; e < edges_wanted; ++e) {
      const int i = static_cast<int>(rng.index(n));
      const int j = static_cast<int>(rng.index(n));
      if (i != j) edge_set.insert({std::min(i, j), std::max(i, j)});
    }
    const std::vector<std::pair<int, int>> edges(edge_set.begin(), edge_set.end());
    const MeshGraph graph = build_mesh_graph(n, edges, {});

    const int d = 1 + static_cast<int>(rng.index(8));
    DenseMatrix features(n, d);
    for (double& v : features.data) v = rng.normal();

    // Dense brute force straight from the edge list.
    DenseMatrix a(n, n);
    for (const auto& [i, j] : edges) a.at(i, j) = a.at(j, i) = 1.0;
    for (int i = 0; i < n; ++i) a.at(i, i) = 1.0;
    std::vector<double> deg(n, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) deg[i] += a.at(i, j);
    }
    DenseMatrix expect(n, d);
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
          if (a.at(i, j) != 0.0) {
            acc += a.at(i, j) / std::sqrt(deg[i] * deg[j]) * features.at(j, c);
          }
        }
        expect.at(i, c) = acc;
      }
    }
    worst = std::max(worst, max_abs_diff(spmm(graph, features), expect));
  }
  std::printf("    100 graphs (N <= 50), max abs deviation %.3e (< 1e-12)\n", worst);
  return worst < 1e-12;
}

// ---------------------------------------------------------------------------
// Rollout coverage & fill-once over >= 1000 randomized (t0, t1, H) with 1 in
// H, plus the pinned (60, 240, {1,15}) plan: 180 steps, all h = 15, depth 12.

bool plan_invariants_hold(const RolloutPlan& plan) {
  std::set<int> filled;
  std::vector<int> depth(plan.t1 + 1, 0);
  for (const RolloutStep& s : plan.steps) {
    if (s.t_out != s.t_in + s.h || s.t_out <= plan.t0 || s.t_out > plan.t1) return false;
    if (s.t_in > plan.t0 && filled.count(s.t_in) == 0) return false;  // executable in order
    if (filled.count(s.t_out)) return false;                          // fill-once
    filled.insert(s.t_out);
    depth[s.t_out] = depth[s.t_in] + 1;
    if (plan.depth[s.t_out] != depth[s.t_out]) return false;  // depth recurrence
  }
  return static_cast<int>(filled.size()) == plan.t1 - plan.t0;
}

bool crit_rollout_coverage() {
  Rng rng(4242);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int t0 = 1 + static_cast<int>(rng.index(100));
    const int t1 = t0 + 1 + static_cast<int>(rng.index(200));
    std::vector<int> hs = {1};
    const int extra = static_cast<int>(rng.index(4));
    for (int i = 0; i < extra; ++i) hs.push_back(2 + static_cast<int>(rng.index(39)));
    const RolloutPlan plan = plan_rollout(t0, t1, HorizonSet(hs));
    if (!plan_invariants_hold(plan)) {
      std::printf("    FAILED at t0=%d t1=%d\n", t0, t1);
      return false;
    }
    ++checked;
  }

  const RolloutPlan pinned = plan_rollout(60, 240, HorizonSet({1, 15}));
  bool all_h15 = pinned.steps.size() == 180;
  for (const RolloutStep& s : pinned.steps) all_h15 = all_h15 && s.h == 15;
  std::printf("    %d random plans ok; (60,240,{1,15}): %zu steps, max depth %d\n", checked,
              pinned.steps.size(), pinned.max_depth());
  return all_h15 && pinned.max_depth() == 12 && plan_invariants_hold(pinned);
}

// ---------------------------------------------------------------------------
// Pair enumeration counts: sum of (T - h) over randomized (T, H); the
// full-scale instance T=240, H={1,15,30} must give 674.

bool crit_pair_enumeration() {
  Rng rng(555);
  for (int trial = 0; trial < 300; ++trial) {
    const int T = 2 + static_cast<int>(rng.index(400));
    std::vector<int> hs;
    const int count = 1 + static_cast<int>(rng.index(6));
    for (int i = 0; i < count; ++i) hs.push_back(1 + static_cast<int>(rng.index(60)));
    const HorizonSet horizons(hs);
    std::size_t expect = 0;
    for (int h : horizons.members()) {
      if (h < T) expect += static_cast<std::size_t>(T - h);
    }
    if (enumerate_pairs(T, horizons).size() != expect) {
      std::printf("    count mismatch at T=%d\n", T);
      return false;
    }
  }
  const std::size_t full_scale = enumerate_pairs(240, HorizonSet({1, 15, 30})).size();
  std::printf("    300 randomized instances ok; T=240 H={1,15,30} -> %zu pairs (= 674)\n",
              full_scale);
  return full_scale == 674;
}

// ---------------------------------------------------------------------------
// Persistence identity: zero-head parameters forecast the anchor state of
// every chain exactly (tolerance 1e-9 in physical units).

bool crit_persistence_identity() {
  SyntheticConfig synth;
  synth.node_count = 40;
  synth.months = 80;
  synth.mesh_seed = 61;
  synth.physics_seed = 62;
  synth.melt_rate = 30.0;
  const MeshGraph mesh = generate_mesh(synth);
  std::vector<Trajectory> trajs;
  trajs.push_back(generate_trajectory(mesh, synth));
  trajs[0].mesh = &mesh;
  const std::vector<int> idx = {0};
  const NormStats stats = compute_norm_stats(trajs, idx);

  ModelConfig mc;
  mc.hidden = 8;
  mc.input_width = model_input_width(kContextChannels, false);
  ModelParams params = init_params(5, mc);
  params.velocity_w = DenseMatrix(mc.hidden, 2);
  params.velocity_b = DenseMatrix(1, 2);
  params.thickness_w = DenseMatrix(mc.hidden, 1);
  params.thickness_b = DenseMatrix(1, 1);

  double worst = 0.0;
  const std::vector<std::vector<int>> sets = {{1}, {1, 15}, {1, 6, 15, 30}};
  for (const auto& set : sets) {
    for (bool frozen : {false, true}) {
      const HorizonSet horizons(set);
      const RolloutPlan plan = plan_rollout(20, 80, horizons, frozen);
      const RolloutResult result =
          execute_rollout(params, mc, trajs[0], plan, stats, horizons.h_max());
      std::vector<int> root(81);
      for (int t = 1; t <= 20; ++t) root[t] = t;
      for (const RolloutStep& s : plan.steps) root[s.t_out] = root[s.t_in];
      for (int t = 21; t <= 80; ++t) {
        worst = std::max(worst, max_abs_diff(result.at_month(t), trajs[0].prognostic(root[t])));
      }
    }
  }
  std::printf("    six plans, max |forecast - anchor| = %.3e (< 1e-9)\n", worst);
  return worst < 1e-9;
}

// ---------------------------------------------------------------------------
// Directional reproduction: on the default synthetic dataset, H={1,15} beats
// H={1} on all three channels in >= 3 of 4 test scenarios, for each of three
// seeds, with identical 500-epoch budgets.

bool crit_directional() {
  const int epochs = 500;
  const int hidden = 8;
  const std::uint64_t base_seed = 42;

  // The default dataset: generator defaults with mesh/physics seeds derived
  // exactly as the default experiment config derives them.
  SyntheticConfig synth;
  synth.mesh_seed = Rng::derive(base_seed, 101);
  synth.physics_seed = Rng::derive(base_seed, 202);

  const MeshGraph mesh = generate_mesh(synth);
  std::vector<Trajectory> trajs;
  for (double rate = 0.0; rate <= 70.0; rate += 2.0) {
    SyntheticConfig scenario = synth;
    scenario.melt_rate = rate;
    trajs.push_back(generate_trajectory(mesh, scenario));
  }
  for (auto& t : trajs) t.mesh = &mesh;
  const SplitIndices split = split_by_melt_rate(trajs);
  const NormStats stats = compute_norm_stats(trajs, split.train);
  std::printf("    dataset: %zu scenarios, N=%d, T=%d; split %zu/%zu/%zu\n", trajs.size(),
              mesh.node_count, trajs[0].T, split.train.size(), split.val.size(),
              split.test.size());
  std::fflush(stdout);

  bool all_seeds_pass = true;
  for (int seed_index = 0; seed_index < 3; ++seed_index) {
    ChannelRmse rmse[2][4];
    for (int model = 0; model < 2; ++model) {
      TrainConfig cfg;
      cfg.horizons = model == 0 ? std::vector<int>{1} : std::vector<int>{1, 15};
      cfg.epochs = epochs;
      cfg.hidden = hidden;
      cfg.seed = Rng::derive(base_seed, 1000 + seed_index);
      cfg.threads = hardware_threads();

      const auto t_start = std::chrono::steady_clock::now();
      const TrainResult result = train(trajs, split.train, split.val, stats, cfg);
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

      const HorizonSet horizons(cfg.horizons);
      const RolloutPlan plan = plan_rollout(60, 240, horizons);
      for (std::size_t k = 0; k < split.test.size(); ++k) {
        const Trajectory& traj = trajs[split.test[k]];
        const RolloutResult rollout = execute_rollout(result.best_params, result.model_config,
                                                      traj, plan, stats, horizons.h_max());
        ErrorPool pool;
        for (int t = 61; t <= 240; ++t) pool.add(rollout.at_month(t), traj.prognostic(t));
        rmse[model][k] = pool.rmse();
      }
      std::printf("    seed %d, H={%s}: %d epochs in %.0f s (best val epoch %d)\n", seed_index,
                  model == 0 ? "1" : "1,15", cfg.epochs, seconds, result.best_epoch);
      std::fflush(stdout);
    }

    int wins = 0;
    for (std::size_t k = 0; k < split.test.size(); ++k) {
      const bool win = rmse[1][k].vx < rmse[0][k].vx && rmse[1][k].vy < rmse[0][k].vy &&
                       rmse[1][k].thickness < rmse[0][k].thickness;
      wins += win ? 1 : 0;
      std::printf("    seed %d melt=%.0f: H={1} (%.4f %.4f %.4f)  H={1,15} (%.4f %.4f %.4f)  %s\n",
                  seed_index, trajs[split.test[k]].melt_rate, rmse[0][k].vx, rmse[0][k].vy,
                  rmse[0][k].thickness, rmse[1][k].vx, rmse[1][k].vy, rmse[1][k].thickness,
                  win ? "win" : "loss");
    }
    std::printf("    seed %d: H={1,15} wins %d of 4 (need >= 3)\n", seed_index, wins);
    std::fflush(stdout);
    all_seeds_pass = all_seeds_pass && wins >= 3;
  }
  return all_seeds_pass;
}

// ---------------------------------------------------------------------------
// Ablation harness shape: the five-set grid and the eleven-value h2 sweep
// come back as machine-readable tables with training time non-decreasing in
// the pair count. Time ordering is asserted where counts differ by >= 10%, so
// sub-percent work differences are not confused with timer noise.

bool time_trend_holds(const std::vector<AblationRow>& rows) {
  for (const AblationRow& more : rows) {
    for (const AblationRow& less : rows) {
      if (static_cast<double>(more.train_pairs) >= 1.1 * less.train_pairs &&
          more.train_seconds < less.train_seconds) {
        std::printf("    time trend violated: %lld pairs %.2f s vs %lld pairs %.2f s\n",
                    more.train_pairs, more.train_seconds, less.train_pairs, less.train_seconds);
        return false;
      }
    }
  }
  return true;
}

bool crit_ablation_harness() {
  TempDir tmp("ablate");
  KeyValueConfig kv;
  kv.set("data_dir", tmp.sub("data"));
  kv.set("run_dir", tmp.sub("run"));
  kv.set("report_dir", tmp.sub("reports"));
  kv.set("nodes", "64");
  kv.set("months", "60");
  kv.set("epochs", "25");
  kv.set("hidden", "8");
  kv.set("eval_t0", "20");
  kv.set("eval_t1", "60");
  kv.set("seed", "9");
  const ExperimentConfig cfg = make_experiment_config(kv);

  std::ostringstream log;
  cmd_generate(cfg, log, log);

  const std::vector<std::vector<int>> table1 = {
      {1}, {1, 15}, {1, 15, 30}, {1, 6, 15, 30}, {1, 3, 6, 15, 30}};
  const auto rows1 = cmd_ablate_horizons(cfg, table1, log, tmp.sub("table1.txt"));
  bool ok = rows1.size() == 5;
  for (const auto& row : rows1) ok = ok && row.ok;
  for (std::size_t i = 1; i < rows1.size(); ++i) {
    ok = ok && rows1[i].train_pairs > rows1[i - 1].train_pairs;
    ok = ok && rows1[i].train_seconds >= rows1[i - 1].train_seconds;
  }
  std::printf("    five-set grid: %zu rows, pairs %lld..%lld, time %.2f..%.2f s, ordered %s\n",
              rows1.size(), rows1.front().train_pairs, rows1.back().train_pairs,
              rows1.front().train_seconds, rows1.back().train_seconds, ok ? "yes" : "NO");

  std::vector<std::vector<int>> table2;
  for (int h2 : {2, 3, 4, 6, 8, 9, 12, 15, 18, 24, 36}) table2.push_back({1, h2});
  const auto rows2 = cmd_ablate_horizons(cfg, table2, log, tmp.sub("table2.txt"));
  ok = ok && rows2.size() == 11;
  for (const auto& row : rows2) ok = ok && row.ok;
  const bool trend = time_trend_holds(rows2);
  ok = ok && trend;
  std::printf("    h2 sweep: %zu rows, all ok, time trend %s\n", rows2.size(),
              trend ? "holds" : "VIOLATED");

  const std::string report = slurp(tmp.sub("table2.txt"));
  ok = ok && report.find("1,36") != std::string::npos &&
       report.find("rmse_thickness") != std::string::npos;
  return ok;
}

// ---------------------------------------------------------------------------
// Evaluation protocol: pooled_rmse against a flat-loop oracle on random
// multi-trajectory inputs with unequal node counts, within 1e-12.

bool crit_pooled_rmse_oracle() {
  Rng rng(31415);
  double worst = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::vector<DenseMatrix>> preds, truths;
    const int traj_count = 1 + static_cast<int>(rng.index(5));
    for (int k = 0; k < traj_count; ++k) {
      const int n = 1 + static_cast<int>(rng.index(40));
      const int months = 1 + static_cast<int>(rng.index(10));
      std::vector<DenseMatrix> p, t;
      for (int m = 0; m < months; ++m) {
        DenseMatrix pm(n, 3), tm(n, 3);
        for (double& v : pm.data) v = 50.0 * rng.normal();
        for (double& v : tm.data) v = 50.0 * rng.normal();
        p.push_back(std::move(pm));
        t.push_back(std::move(tm));
      }
      preds.push_back(std::move(p));
      truths.push_back(std::move(t));
    }

    std::vector<std::vector<MonthPair>> trajs;
    double sum[3] = {0, 0, 0};
    long long count = 0;
    for (std::size_t k = 0; k < preds.size(); ++k) {
      std::vector<MonthPair> months;
      for (std::size_t m = 0; m < preds[k].size(); ++m) {
        months.push_back(MonthPair{&preds[k][m], &truths[k][m]});
        for (int n = 0; n < preds[k][m].rows; ++n) {
          for (int c = 0; c < 3; ++c) {
            const double e = preds[k][m].at(n, c) - truths[k][m].at(n, c);
            sum[c] += e * e;
          }
        }
        count += preds[k][m].rows;
      }
      trajs.push_back(std::move(months));
    }
    const ChannelRmse got = pooled_rmse(trajs);
    worst = std::max({worst, std::abs(got.vx - std::sqrt(sum[0] / count)),
                      std::abs(got.vy - std::sqrt(sum[1] / count)),
                      std::abs(got.thickness - std::sqrt(sum[2] / count))});
  }
  std::printf("    60 random multi-trajectory pools, max deviation %.3e (< 1e-12)\n", worst);
  return worst < 1e-12;
}

// ---------------------------------------------------------------------------
// Determinism: generate -> train -> rollout -> eval twice with one seed gives
// bitwise-identical artifacts, including with multiple worker threads.

bool crit_determinism() {
  auto run_pipeline = [&](const std::string& tag) {
    TempDir tmp(tag);
    KeyValueConfig kv;
    kv.set("data_dir", tmp.sub("data"));
    kv.set("run_dir", tmp.sub("run"));
    kv.set("nodes", "40");
    kv.set("months", "24");
    kv.set("melt_min", "0");
    kv.set("melt_max", "10");
    kv.set("melt_step", "2");
    kv.set("horizons", "1,3");
    kv.set("epochs", "4");
    kv.set("hidden", "6");
    kv.set("eval_t0", "12");
    kv.set("eval_t1", "24");
    kv.set("seed", "2024");
    kv.set("threads", "2");
    const ExperimentConfig cfg = make_experiment_config(kv);

    std::ostringstream log, manifest;
    cmd_generate(cfg, log, manifest);
    const TrainOutcome trained = cmd_train(cfg, log);

    RolloutArgs rollout;
    rollout.checkpoint_path = trained.checkpoint_path;
    rollout.trajectory_path = cfg.data_dir + "/melt_10.traj";
    rollout.output_path = tmp.sub("forecast.traj");
    rollout.audit_path = tmp.sub("plan.txt");
    rollout.t0 = cfg.eval_t0;
    rollout.t1 = cfg.eval_t1;
    cmd_rollout(rollout, log);

    EvalArgs eval;
    eval.pred_path = rollout.output_path;
    eval.truth_path = cfg.data_dir + "/melt_10.traj";
    eval.report_path = tmp.sub("report.txt");
    eval.t0 = cfg.eval_t0;
    eval.t1 = cfg.eval_t1;
    std::ostringstream sink;
    cmd_eval(eval, log, sink);

    std::vector<std::string> artifacts;
    artifacts.push_back(manifest.str());
    artifacts.push_back(slurp(trained.checkpoint_path));
    artifacts.push_back(slurp(trained.history_path));
    artifacts.push_back(slurp(trained.stats_path));
    artifacts.push_back(slurp(rollout.output_path));
    artifacts.push_back(slurp(rollout.audit_path));
    artifacts.push_back(slurp(eval.report_path));
    return artifacts;
  };

  const auto first = run_pipeline("det1");
  const auto second = run_pipeline("det2");
  const char* names[] = {"manifest", "checkpoint", "history", "stats",
                         "forecast", "plan",       "report"};
  bool ok = true;
  for (std::size_t i = 0; i < first.size(); ++i) {
    const bool same = first[i] == second[i] && !first[i].empty();
    if (!same) std::printf("    artifact '%s' differs between runs\n", names[i]);
    ok = ok && same;
  }
  if (ok) std::printf("    7 artifacts bitwise-identical across two runs (threads=2)\n");
  return ok;
}

struct Criterion {
  const char* name;
  std::function<bool()> run;
};

const std::vector<Criterion> kCriteria = {
    {"gradient-correctness", crit_gradient_correctness},
    {"propagation-oracle-equivalence", crit_eq1_oracle},
    {"rollout-coverage-fill-once", crit_rollout_coverage},
    {"pair-enumeration", crit_pair_enumeration},
    {"persistence-identity", crit_persistence_identity},
    {"directional-reproduction", crit_directional},
    {"ablation-harness-shape", crit_ablation_harness},
    {"evaluation-protocol", crit_pooled_rmse_oracle},
    {"determinism", crit_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(argv[i]);

  int failures = 0;
  int ran = 0;
  for (const Criterion& criterion : kCriteria) {
    if (!wanted.empty() && !wanted.count(criterion.name)) continue;
    ++ran;
    std::printf("==> %s\n", criterion.name);
    std::fflush(stdout);
    bool passed = false;
    try {
      passed = criterion.run();
    } catch (const std::exception& e) {
      std::printf("    exception: %s\n", e.what());
    }
    std::printf("[%s] %s\n", passed ? "PASS" : "FAIL", criterion.name);
    std::fflush(stdout);
    failures += passed ? 0 : 1;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criteria matched the given names\n");
    return 2;
  }
  std::printf("%d of %d criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
