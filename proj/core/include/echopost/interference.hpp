// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOPOST_INTERFERENCE_HPP
#define ECHOPOST_INTERFERENCE_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "echopost/reverb.hpp"

namespace echopost {

/// Per-bin spectral variances of the interferences for one frame. The
/// components are assumed uncorrelated so the total is their plain sum.
struct InterferenceEstimates {
  std::vector<double> lambda_noise;
  std::vector<double> lambda_echo_late;
  std::vector<double> lambda_rev_late;
  std::vector<double> lambda_total;

  void resize(std::size_t bins);
  void accumulate_total();
};

struct NoiseTrackerConfig {
  double alpha = 0.95;
  int init_frames = 10;
  double presence_freeze = 0.1;  // bins with p >= this are frozen
};

/// Recursive per-bin noise variance tracker. The first init_frames use an
/// arithmetic running mean; afterwards bins update only where the supplied
/// speech presence is below the freeze threshold.
class NoiseTracker {
 public:
  NoiseTracker(const NoiseTrackerConfig& config, std::size_t bins);

  /// presence may be empty, which counts as absence everywhere.
  void update(std::span<const double> power, std::span<const double> presence);

  std::span<const double> lambda() const { return lambda_; }
  int frames_seen() const { return frames_seen_; }

 private:
  NoiseTrackerConfig config_;
  std::vector<double> lambda_;
  int frames_seen_ = 0;
};

/// Late residual echo variance: a per-bin recursion that decays at the room
/// rate and is re-excited by the estimated-echo spectrum scaled by the
/// residual tail power.
class LateEchoEstimator {
 public:
  LateEchoEstimator(const ReverbModel& model, std::size_t bins);

  void update(std::span<const double> echo_power, std::span<const double> tail_power_w0);
  void update(std::span<const double> echo_power, double tail_power_w0);

  std::span<const double> lambda() const { return lambda_; }

 private:
  ReverbModel model_;
  std::vector<double> lambda_;
  std::vector<double> w0_scratch_;
};

/// Late reverberant variance of the echo-cancelled near-end signal: the
/// recursively smoothed error spectrum delayed by the early/late split and
/// attenuated by the room decay over that interval.
class LateReverbEstimator {
 public:
  LateReverbEstimator(const ReverbModel& model, std::size_t bins, int early_late_frames,
                      double smoothing = 0.7, double dpc_factor = 1.0);

  void update(std::span<const double> error_power);

  bool warm() const { return frames_seen_ > static_cast<std::size_t>(early_late_frames_); }
  std::span<const double> lambda() const { return lambda_; }

 private:
  ReverbModel model_;
  int early_late_frames_;
  double smoothing_;
  double dpc_factor_;
  double delay_gain_ = 0.0;  // frame_decay^early_late_frames
  std::vector<double> smoothed_;
  std::vector<double> history_;  // ring of early_late_frames+1 smoothed frames
  std::vector<double> lambda_;
  std::size_t ring_pos_ = 0;
  std::size_t frames_seen_ = 0;
};

}  // namespace echopost

#endif  // ECHOPOST_INTERFERENCE_HPP
