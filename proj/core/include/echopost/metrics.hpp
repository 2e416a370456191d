// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOPOST_METRICS_HPP
#define ECHOPOST_METRICS_HPP

#include <cstddef>
#include <vector>

#include "echopost/audio.hpp"
#include "echopost/stft.hpp"

namespace echopost {

struct ErleResult {
  std::vector<double> trace_db;  // one value per window
  double mean_db = 0.0;          // mean over the converged (final 25%) span
  double window_s = 0.5;
};

/// Echo return loss enhancement from the isolated echo component and its
/// residual. Windows whose echo power falls below -60 dBFS are skipped.
ErleResult erle(const AudioSignal& echo, const AudioSignal& residual, double window_s = 0.5);

struct SegmentalParams {
  double frame_s = 0.032;
  double clamp_min_db = -10.0;
  double clamp_max_db = 35.0;
  double activity_threshold_db = 40.0;  // frames within this of the max count
};

/// Frame-wise SNR against the clean reference, clamped and averaged over
/// reference-active frames. Throws when no frame is active.
double segmental_snr(const AudioSignal& reference, const AudioSignal& processed,
                     const SegmentalParams& params = {});

/// As segmental_snr but the per-frame error is the isolated interference
/// component of the processed signal.
double segmental_sir(const AudioSignal& reference, const AudioSignal& processed,
                     const AudioSignal& interference_component,
                     const SegmentalParams& params = {});

/// Mean over active frames of the per-frame RMS log-spectral ratio in dB.
/// Symmetric in its two signals.
double lsd(const AudioSignal& reference, const AudioSignal& processed,
           const FrameParams& params = {});

struct MetricsReport {
  std::vector<double> erle_trace_db;
  double mean_erle_db = 0.0;       // final processing stage
  double aec_mean_erle_db = 0.0;   // echo canceller output, before postfilter
  double seg_snr_db = 0.0;
  double seg_sir_db = 0.0;
  double lsd_db = 0.0;
  std::vector<double> misalignment_trace_db;
  double ss_misalignment_db = 0.0;   // mean over the final 25%
  double t20_s = 0.0;                // first time misalignment <= -20 dB, NaN if never
  double erle_window_s = 0.5;
  double misalignment_probe_s = 0.016;
};

}  // namespace echopost

#endif  // ECHOPOST_METRICS_HPP
