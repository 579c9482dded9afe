#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "meshcast/synthetic.hpp"
#include "meshcast/trainer.hpp"

namespace meshcast {

/// Flat key = value text config; '#' starts a comment. Unknown keys are
/// rejected so typos surface instead of silently using defaults.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_text(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<std::vector<int>> get_int_list_sets(
      const std::string& key, const std::vector<std::vector<int>>& fallback) const;

  /// Call after reading everything; throws UsageError on unused keys.
  void reject_unknown_keys() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
};

/// Everything one experiment needs: paths, generator constants, training
/// hyperparameters, the evaluation window, and the ablation grid.
struct ExperimentConfig {
  std::string data_dir = "data";
  std::string run_dir = "runs";
  std::string report_dir = "reports";

  SyntheticConfig synth;
  double melt_min = 0.0;
  double melt_max = 70.0;
  double melt_step = 2.0;

  TrainConfig train;

  int eval_t0 = 60;
  int eval_t1 = 240;
  bool frozen_scan = false;

  std::vector<std::vector<int>> ablation_sets = {
      {1}, {1, 15}, {1, 15, 30}, {1, 6, 15, 30}, {1, 3, 6, 15, 30}};

  std::uint64_t seed = 42;
};

/// Applies a parsed config over the defaults; validates invariants.
ExperimentConfig make_experiment_config(const KeyValueConfig& kv);

Activation parse_activation(const std::string& name);
const char* activation_name(Activation act);

/// "1,6,15" -> {1, 6, 15}; throws UsageError naming `what` on bad input.
std::vector<int> parse_horizon_list(const std::string& text, const std::string& what);

}  // namespace meshcast
