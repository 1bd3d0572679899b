#pragma once

#include <map>
#include <set>
#include <string>

namespace ldg::cli {

/// Flat key=value run configuration: optional config file merged with
/// command-line overrides. Unknown keys are rejected; the effective
/// configuration is echoed into the run directory.
class RunConfig {
 public:
  static const std::set<std::string>& known_keys();

  /// Parses `key=value` lines; '#' starts a comment.
  void load_file(const std::string& path);

  /// Sets (or overrides) one key; throws ConfigError for unknown keys.
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get_str(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  uint64_t get_u64(const std::string& key, uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Deterministic sorted key=value dump.
  std::string echo() const;

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace ldg::cli
