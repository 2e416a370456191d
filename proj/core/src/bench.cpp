// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echopost/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "echopost/csv.hpp"

namespace echopost {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double median_of(std::vector<double> xs, bool nan_is_worst) {
  if (nan_is_worst) {
    for (auto& v : xs) {
      if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
    }
  } else {
    std::erase_if(xs, [](double v) { return std::isnan(v); });
  }
  if (xs.empty()) return kNan;
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  double med = xs.size() % 2 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
  if (std::isinf(med)) return kNan;
  return med;
}

}  // namespace

const std::vector<std::string>& bench_environment_names() {
  static const std::vector<std::string> names = {
      "linear",     "sparse",     "nonlinear",  "noisy_snr30",
      "noisy_snr20", "noisy_snr10", "tail_change", "double_talk"};
  return names;
}

void BenchSuiteConfig::validate() const {
  if (variants.empty()) throw ConfigError("benchmark needs at least one variant");
  if (environments.empty()) throw ConfigError("benchmark needs at least one environment");
  if (seeds < 1) throw ConfigError("benchmark needs at least one seed");
  const auto& known = bench_environment_names();
  for (const auto& env : environments) {
    if (std::find(known.begin(), known.end(), env) == known.end()) {
      throw ConfigError("unknown benchmark environment: " + env);
    }
  }
}

PipelineConfig bench_cell_config(const BenchSuiteConfig& suite, FilterVariant variant,
                                 const std::string& environment, std::uint64_t seed) {
  PipelineConfig c;
  c.scenario.seed = seed;
  c.scenario.duration_s = suite.duration_s;
  c.scenario.near_end = SourceKind::silence;
  c.scenario.echo_air = {0.3, 32, suite.taps};
  c.scenario.snr_db = 30.0;
  c.aec.variant = variant;
  c.aec.taps = suite.taps;
  c.aec.mu = suite.mu;
  c.postfilter_enabled = false;  // the suite compares cancellers
  c.stages = {false, false, false, false};

  if (environment == "linear") {
    c.scenario.far_end = SourceKind::speech;
  } else if (environment == "sparse") {
    c.scenario.far_end = SourceKind::white_noise;
    c.scenario.echo_air_sparse = true;
  } else if (environment == "nonlinear") {
    c.scenario.far_end = SourceKind::speech;
    c.scenario.nonlinearity = NonlinearityModel::hard_clip;
    c.scenario.sner_db = 20.0;
  } else if (environment == "noisy_snr30" || environment == "noisy_snr20" ||
             environment == "noisy_snr10") {
    c.scenario.far_end = SourceKind::speech;
    c.scenario.snr_db = environment == "noisy_snr30" ? 30.0
                        : environment == "noisy_snr20" ? 20.0
                                                        : 10.0;
  } else if (environment == "tail_change") {
    c.scenario.far_end = SourceKind::white_noise;
    c.scenario.tail_change = TailChange{suite.duration_s * 0.5, 0.5, 0.25};
  } else if (environment == "double_talk") {
    c.scenario.far_end = SourceKind::speech;
    c.scenario.near_end = SourceKind::speech;
    c.scenario.snr_db = 10.0;
  } else {
    throw ConfigError("unknown benchmark environment: " + environment);
  }
  return c;
}

std::vector<BenchRow> run_benchmark(const BenchSuiteConfig& config) {
  config.validate();

  struct Cell {
    FilterVariant variant;
    std::string environment;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& env : config.environments) {
    for (FilterVariant v : config.variants) {
      for (int s = 0; s < config.seeds; ++s) {
        cells.push_back({v, env, config.base_seed + static_cast<std::uint64_t>(s)});
      }
    }
  }

  std::vector<BenchRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  const unsigned hw = std::thread::hardware_concurrency();
  const unsigned n_threads =
      config.threads > 0 ? static_cast<unsigned>(config.threads) : std::max(1u, hw);

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& cell = cells[i];
      const PipelineConfig cfg =
          bench_cell_config(config, cell.variant, cell.environment, cell.seed);
      const PipelineResult res = run_pipeline(cfg);
      BenchRow& row = rows[i];
      row.variant = to_string(cell.variant);
      row.environment = cell.environment;
      row.seed = std::to_string(cell.seed);
      row.mean_erle_db = res.metrics.aec_mean_erle_db;
      row.t20_s = res.metrics.t20_s;
      row.ss_misalign_db = res.metrics.ss_misalignment_db;
      row.seg_snr_db = res.metrics.seg_snr_db;
      row.seg_sir_db = res.metrics.seg_sir_db;
      row.lsd_db = res.metrics.lsd_db;
    }
  };

  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Median summary per (environment, variant); non-convergence counts as
  // worst for the time-to-threshold statistic.
  std::vector<BenchRow> summaries;
  for (const auto& env : config.environments) {
    for (FilterVariant v : config.variants) {
      std::vector<double> erles, t20s, misaligns, snrs, sirs, lsds;
      for (const auto& row : rows) {
        if (row.environment != env || row.variant != to_string(v)) continue;
        erles.push_back(row.mean_erle_db);
        t20s.push_back(row.t20_s);
        misaligns.push_back(row.ss_misalign_db);
        snrs.push_back(row.seg_snr_db);
        sirs.push_back(row.seg_sir_db);
        lsds.push_back(row.lsd_db);
      }
      BenchRow s;
      s.variant = to_string(v);
      s.environment = env;
      s.seed = "median";
      s.mean_erle_db = median_of(erles, false);
      s.t20_s = median_of(t20s, true);
      s.ss_misalign_db = median_of(misaligns, false);
      s.seg_snr_db = median_of(snrs, false);
      s.seg_sir_db = median_of(sirs, false);
      s.lsd_db = median_of(lsds, false);
      summaries.push_back(std::move(s));
    }
  }
  rows.insert(rows.end(), summaries.begin(), summaries.end());

  if (!config.csv_path.empty()) write_bench_csv(config.csv_path, rows);
  return rows;
}

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows) {
  const std::vector<std::string> header = {"variant",       "environment", "seed",
                                           "mean_erle_db",  "t20_s",       "ss_misalign_db",
                                           "seg_snr_db",    "seg_sir_db",  "lsd_db"};
  std::vector<std::vector<std::string>> cells;
  cells.reserve(rows.size());
  for (const auto& row : rows) {
    cells.push_back({row.variant, row.environment, row.seed, format_number(row.mean_erle_db),
                     format_number(row.t20_s), format_number(row.ss_misalign_db),
                     format_number(row.seg_snr_db), format_number(row.seg_sir_db),
                     format_number(row.lsd_db)});
  }
  write_csv(path, header, cells);
}

}  // namespace echopost
