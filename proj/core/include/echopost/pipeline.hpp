// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOPOST_PIPELINE_HPP
#define ECHOPOST_PIPELINE_HPP

#include <filesystem>
#include <string>

#include "echopost/adaptive_filter.hpp"
#include "echopost/double_talk.hpp"
#include "echopost/interference.hpp"
#include "echopost/metrics.hpp"
#include "echopost/omlsa.hpp"
#include "echopost/scenario.hpp"
#include "echopost/stft.hpp"
#include "echopost/wav.hpp"

namespace echopost {

/// Which interference variances feed the postfilter. dpc only modifies the
/// late-reverb estimate.
struct StageMask {
  bool ns = true;
  bool rs = true;
  bool revs = true;
  bool dpc = false;
};

StageMask stage_mask_from_string(const std::string& csv_list);
std::string to_string(const StageMask& mask);

struct OutputConfig {
  std::filesystem::path processed_wav;  // empty = not written
  std::filesystem::path residual_wav;
  std::filesystem::path metrics_csv;
  std::filesystem::path trace_csv;
  WavEncoding wav_encoding = WavEncoding::float32;
};

struct PipelineConfig {
  ScenarioConfig scenario;
  FrameParams stft;
  bool aec_enabled = true;
  AdaptiveFilterConfig aec;
  bool dtd_enabled = true;
  DtdConfig dtd;
  PostfilterParams postfilter;
  bool postfilter_enabled = true;
  StageMask stages;

  // Reverberation model sourcing: when estimation from the identified path
  // fails, t60_fallback_s (if > 0) supplies the model; t60_override_s skips
  // estimation entirely.
  double t60_fallback_s = 0.0;
  double t60_override_s = 0.0;

  // Late residual echo estimator options.
  double rs_overestimate = 2.0;  // safety margin on the tail power
  bool w0_per_bin = false;

  // Late reverb estimator options.
  int early_late_frames = 3;
  double reverb_smoothing = 0.7;
  double dpc_factor = 1.0;

  NoiseTrackerConfig noise;
  SegmentalParams segmental;
  double erle_window_s = 0.5;

  OutputConfig outputs;

  void validate() const;  // throws ConfigError
};

enum class T60Source { estimated, override_config, fallback, none };
const char* to_string(T60Source s);

struct PipelineResult {
  MetricsReport metrics;
  FilterStatus aec_status = FilterStatus::ok;
  double t60_used_s = 0.0;
  T60Source t60_source = T60Source::none;
  double achieved_sner_db = 0.0;

  AudioSignal output;            // postfilter output (or AEC error if disabled)
  AudioSignal aec_error;
  AudioSignal echo_estimate;
  // Exact decomposition of the output via the recorded per-frame gains.
  AudioSignal output_reference_part;   // early near-end speech component
  AudioSignal output_echo_residual;    // residual echo component
  AudioSignal output_interference;     // everything except the reference part
};

/// Runs synthesis, echo cancellation with double-talk gating, interference
/// estimation, and the postfilter; computes metrics against the synthetic
/// ground truth and writes any configured outputs. Deterministic per seed.
PipelineResult run_pipeline(const PipelineConfig& config);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace echopost

#endif  // ECHOPOST_PIPELINE_HPP
