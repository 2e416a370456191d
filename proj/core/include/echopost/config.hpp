// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOPOST_CONFIG_HPP
#define ECHOPOST_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "echopost/bench.hpp"
#include "echopost/pipeline.hpp"

namespace echopost {

/// Flat key=value configuration with dotted section prefixes
/// (e.g. scenario.echo_air.t60=0.3). '#' starts a comment. Typed getters
/// mark keys as consumed so unknown keys can be rejected after parsing.
class KeyValueConfig {
 public:
  static KeyValueConfig load_file(const std::filesystem::path& path);
  static KeyValueConfig from_string(const std::string& text);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::optional<std::string> get_string(const std::string& key);
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key, double fallback);
  std::optional<double> get_double_opt(const std::string& key);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);

  /// Keys never consumed by any getter; non-empty means a typo somewhere.
  std::vector<std::string> unconsumed_keys() const;

 private:
  struct Entry {
    std::string value;
    mutable bool consumed = false;
  };
  std::map<std::string, Entry> entries_;
};

PipelineConfig parse_pipeline_config(KeyValueConfig& kv);
BenchSuiteConfig parse_bench_config(KeyValueConfig& kv);

/// Throws ConfigError listing any unconsumed key.
void reject_unknown_keys(const KeyValueConfig& kv);

}  // namespace echopost

#endif  // ECHOPOST_CONFIG_HPP
