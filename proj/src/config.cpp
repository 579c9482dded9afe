#include "meshcast/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "meshcast/error.hpp"
#include "meshcast/rng.hpp"

namespace meshcast {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<int> parse_int_list(const std::string& text, const std::string& key) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      const int v = std::stoi(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("config key '" + key + "': bad integer '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("config key '" + key + "': empty list");
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str());
}

KeyValueConfig KeyValueConfig::parse_text(const std::string& text) {
  KeyValueConfig kv;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    }
    if (kv.values_.count(key)) {
      throw UsageError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    kv.values_[key] = value;
  }
  return kv;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_[key] = true;
  return it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_[key] = true;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': bad number '" + it->second + "'");
  }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_[key] = true;
  try {
    std::size_t pos = 0;
    const int v = std::stoi(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': bad integer '" + it->second + "'");
  }
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_[key] = true;
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': bad integer '" + it->second + "'");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_[key] = true;
  if (it->second == "1" || it->second == "true" || it->second == "yes") return true;
  if (it->second == "0" || it->second == "false" || it->second == "no") return false;
  throw UsageError("config key '" + key + "': expected a boolean, got '" + it->second + "'");
}

std::vector<int> KeyValueConfig::get_int_list(const std::string& key,
                                              const std::vector<int>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_[key] = true;
  return parse_int_list(it->second, key);
}

std::vector<std::vector<int>> KeyValueConfig::get_int_list_sets(
    const std::string& key, const std::vector<std::vector<int>>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_[key] = true;
  std::vector<std::vector<int>> out;
  std::stringstream ss(it->second);
  std::string group;
  while (std::getline(ss, group, '|')) {
    group = trim(group);
    if (group.empty()) continue;
    out.push_back(parse_int_list(group, key));
  }
  if (out.empty()) throw UsageError("config key '" + key + "': empty set list");
  return out;
}

void KeyValueConfig::reject_unknown_keys() const {
  for (const auto& [key, value] : values_) {
    if (!used_.count(key)) {
      throw UsageError("config: unknown key '" + key + "'");
    }
  }
}

std::vector<int> parse_horizon_list(const std::string& text, const std::string& what) {
  return parse_int_list(text, what);
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  throw UsageError("unknown activation '" + name + "' (expected relu, tanh, or identity)");
}

const char* activation_name(Activation act) {
  switch (act) {
    case Activation::Relu:
      return "relu";
    case Activation::Tanh:
      return "tanh";
    case Activation::Identity:
      return "identity";
  }
  return "?";
}

ExperimentConfig make_experiment_config(const KeyValueConfig& kv) {
  ExperimentConfig cfg;
  cfg.data_dir = kv.get_string("data_dir", cfg.data_dir);
  cfg.run_dir = kv.get_string("run_dir", cfg.run_dir);
  cfg.report_dir = kv.get_string("report_dir", cfg.report_dir);
  cfg.seed = kv.get_u64("seed", cfg.seed);

  SyntheticConfig& s = cfg.synth;
  s.node_count = kv.get_int("nodes", s.node_count);
  s.extent_km = kv.get_double("extent_km", s.extent_km);
  s.knn = kv.get_int("knn", s.knn);
  s.months = kv.get_int("months", s.months);
  s.kappa = kv.get_double("kappa", s.kappa);
  s.melt_sensitivity = kv.get_double("melt_sensitivity", s.melt_sensitivity);
  s.velocity_gain = kv.get_double("velocity_gain", s.velocity_gain);
  s.velocity_memory = kv.get_double("velocity_memory", s.velocity_memory);
  s.noise_amp = kv.get_double("noise_amp", s.noise_amp);
  s.bed_base = kv.get_double("bed_base", s.bed_base);
  s.bed_slope = kv.get_double("bed_slope", s.bed_slope);
  s.bed_bump = kv.get_double("bed_bump", s.bed_bump);
  s.h0_base = kv.get_double("h0_base", s.h0_base);
  s.h0_slope = kv.get_double("h0_slope", s.h0_slope);
  s.smb_base = kv.get_double("smb_base", s.smb_base);
  s.smb_amp = kv.get_double("smb_amp", s.smb_amp);
  s.float_scale = kv.get_double("float_scale", s.float_scale);
  s.density_ratio = kv.get_double("density_ratio", s.density_ratio);
  s.mesh_seed = kv.get_u64("mesh_seed", 0);
  s.physics_seed = kv.get_u64("physics_seed", 0);
  cfg.melt_min = kv.get_double("melt_min", cfg.melt_min);
  cfg.melt_max = kv.get_double("melt_max", cfg.melt_max);
  cfg.melt_step = kv.get_double("melt_step", cfg.melt_step);

  TrainConfig& t = cfg.train;
  t.horizons = kv.get_int_list("horizons", t.horizons);
  t.epochs = kv.get_int("epochs", t.epochs);
  t.lr0 = kv.get_double("lr0", t.lr0);
  t.weight_decay = kv.get_double("weight_decay", t.weight_decay);
  t.coupled_weight_decay = kv.get_bool("coupled_weight_decay", t.coupled_weight_decay);
  t.beta1 = kv.get_double("beta1", t.beta1);
  t.beta2 = kv.get_double("beta2", t.beta2);
  t.adam_eps = kv.get_double("adam_eps", t.adam_eps);
  t.lambda_v = kv.get_double("lambda_v", t.lambda_v);
  t.lambda_h = kv.get_double("lambda_h", t.lambda_h);
  t.batch_size = kv.get_int("batch_size", t.batch_size);
  t.hidden = kv.get_int("hidden", t.hidden);
  t.act = parse_activation(kv.get_string("activation", activation_name(t.act)));
  t.magnitude_only_inputs = kv.get_bool("magnitude_only_inputs", t.magnitude_only_inputs);
  t.threads = kv.get_int("threads", t.threads);

  cfg.eval_t0 = kv.get_int("eval_t0", cfg.eval_t0);
  cfg.eval_t1 = kv.get_int("eval_t1", cfg.eval_t1);
  cfg.frozen_scan = kv.get_bool("frozen_scan", cfg.frozen_scan);
  cfg.ablation_sets = kv.get_int_list_sets("ablation_sets", cfg.ablation_sets);

  // Derive generator seeds from the global seed unless pinned explicitly.
  if (s.mesh_seed == 0) s.mesh_seed = Rng::derive(cfg.seed, 101);
  if (s.physics_seed == 0) s.physics_seed = Rng::derive(cfg.seed, 202);
  cfg.train.seed = kv.get_u64("train_seed", Rng::derive(cfg.seed, 303));

  kv.reject_unknown_keys();

  if (cfg.eval_t1 <= cfg.eval_t0 || cfg.eval_t0 < 1) {
    throw UsageError("config: eval window requires 1 <= eval_t0 < eval_t1");
  }
  for (const auto& set : cfg.ablation_sets) {
    if (std::find(set.begin(), set.end(), 1) == set.end()) {
      throw UsageError("config: every ablation horizon set must contain 1");
    }
  }
  validate_train_config(cfg.train);
  return cfg;
}

}  // namespace meshcast
