#include "run_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "ldg/errors.hpp"

namespace ldg::cli {

const std::set<std::string>& RunConfig::known_keys() {
  static const std::set<std::string> keys = {
      // inputs and outputs
      "events", "nodes", "assoc", "label_graph", "checkpoint", "out",
      // model
      "attention", "prior", "interaction", "edge_types", "d", "temperature",
      "hard_sample", "aggregator", "sigma", "z_init_scale",
      // training
      "epochs", "lr", "batch", "seed", "val_fraction", "early_stopping",
      // data handling
      "min_prob", "split_tau", "train_frac",
      // evaluation
      "blend_freq", "dump_scores", "snap_at",
      // baselines
      "variant",
      // synthesis
      "synth_nodes", "synth_events", "rho", "density", "horizon",
      "assoc_init_frac", "assoc_event_frac",
  };
  return keys;
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    line.erase(line.begin(), std::find_if(line.begin(), line.end(), not_space));
    line.erase(std::find_if(line.rbegin(), line.rend(), not_space).base(), line.end());
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ": expected key=value at line " + std::to_string(line_no));
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    key.erase(std::find_if(key.rbegin(), key.rend(), not_space).base(), key.end());
    value.erase(value.begin(), std::find_if(value.begin(), value.end(), not_space));
    set(key, value);
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!known_keys().count(key)) throw ConfigError("unknown config key: " + key);
  kv_[key] = value;
}

std::string RunConfig::get_str(const std::string& key,
                               const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": bad number '" + it->second + "'");
  }
}

int RunConfig::get_int(const std::string& key, int fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": bad integer '" + it->second + "'");
  }
}

uint64_t RunConfig::get_u64(const std::string& key, uint64_t fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": bad integer '" + it->second + "'");
  }
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("config key " + key + ": expected true/false, got '" +
                    it->second + "'");
}

std::string RunConfig::echo() const {
  std::ostringstream out;
  for (const auto& [k, v] : kv_) out << k << "=" << v << "\n";
  return out.str();
}

}  // namespace ldg::cli
