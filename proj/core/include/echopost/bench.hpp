// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOPOST_BENCH_HPP
#define ECHOPOST_BENCH_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "echopost/adaptive_filter.hpp"
#include "echopost/pipeline.hpp"

namespace echopost {

/// Comparative-study runner: every (variant, environment, seed) cell runs
/// the echo canceller on a fixed synthetic scene and reports convergence
/// and suppression figures.
struct BenchSuiteConfig {
  std::vector<FilterVariant> variants;
  std::vector<std::string> environments;
  int seeds = 5;
  std::uint64_t base_seed = 1;
  double duration_s = 20.0;
  std::size_t taps = 1024;
  double mu = 0.5;
  int threads = 0;  // 0 = hardware concurrency
  std::filesystem::path csv_path;

  void validate() const;  // throws ConfigError on unknown names
};

/// Known environment names, in canonical order.
const std::vector<std::string>& bench_environment_names();

struct BenchRow {
  std::string variant;
  std::string environment;
  std::string seed;  // a number, or "median" for summary rows
  double mean_erle_db = 0.0;
  double t20_s = 0.0;
  double ss_misalign_db = 0.0;
  double seg_snr_db = 0.0;
  double seg_sir_db = 0.0;
  double lsd_db = 0.0;
};

/// Builds the scenario for one environment name. Exposed for tests.
PipelineConfig bench_cell_config(const BenchSuiteConfig& suite, FilterVariant variant,
                                 const std::string& environment, std::uint64_t seed);

/// Runs all cells (possibly in parallel), appends per-(variant, environment)
/// median summary rows, and writes the CSV when a path is configured. Row
/// order is canonical regardless of execution order.
std::vector<BenchRow> run_benchmark(const BenchSuiteConfig& config);

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows);

}  // namespace echopost

#endif  // ECHOPOST_BENCH_HPP
