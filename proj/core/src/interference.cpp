// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echopost/interference.hpp"

#include <cmath>
#include <stdexcept>

namespace echopost {

void InterferenceEstimates::resize(std::size_t bins) {
  lambda_noise.assign(bins, 0.0);
  lambda_echo_late.assign(bins, 0.0);
  lambda_rev_late.assign(bins, 0.0);
  lambda_total.assign(bins, 0.0);
}

void InterferenceEstimates::accumulate_total() {
  for (std::size_t k = 0; k < lambda_total.size(); ++k) {
    lambda_total[k] = lambda_noise[k] + lambda_echo_late[k] + lambda_rev_late[k];
  }
}

NoiseTracker::NoiseTracker(const NoiseTrackerConfig& config, std::size_t bins)
    : config_(config), lambda_(bins, 0.0) {
  if (config.alpha <= 0.0 || config.alpha >= 1.0) {
    throw std::invalid_argument("noise smoothing alpha must be in (0, 1)");
  }
}

void NoiseTracker::update(std::span<const double> power, std::span<const double> presence) {
  if (power.size() != lambda_.size()) throw std::invalid_argument("bin count mismatch");
  if (!presence.empty() && presence.size() != lambda_.size()) {
    throw std::invalid_argument("presence bin count mismatch");
  }

  if (frames_seen_ < config_.init_frames) {
    // Arithmetic running mean during initialization.
    const double n = static_cast<double>(frames_seen_);
    for (std::size_t k = 0; k < lambda_.size(); ++k) {
      lambda_[k] = (n * lambda_[k] + power[k]) / (n + 1.0);
    }
  } else {
    for (std::size_t k = 0; k < lambda_.size(); ++k) {
      const double p = presence.empty() ? 0.0 : presence[k];
      if (p < config_.presence_freeze) {
        lambda_[k] = config_.alpha * lambda_[k] + (1.0 - config_.alpha) * power[k];
      }
    }
  }
  ++frames_seen_;
}

LateEchoEstimator::LateEchoEstimator(const ReverbModel& model, std::size_t bins)
    : model_(model), lambda_(bins, 0.0), w0_scratch_(bins, 0.0) {}

void LateEchoEstimator::update(std::span<const double> echo_power,
                               std::span<const double> tail_power_w0) {
  if (echo_power.size() != lambda_.size() || tail_power_w0.size() != lambda_.size()) {
    throw std::invalid_argument("bin count mismatch");
  }
  const double fd = model_.frame_decay;
  for (std::size_t k = 0; k < lambda_.size(); ++k) {
    lambda_[k] = fd * lambda_[k] + fd * tail_power_w0[k] * echo_power[k];
  }
}

void LateEchoEstimator::update(std::span<const double> echo_power, double tail_power_w0) {
  std::fill(w0_scratch_.begin(), w0_scratch_.end(), tail_power_w0);
  update(echo_power, w0_scratch_);
}

LateReverbEstimator::LateReverbEstimator(const ReverbModel& model, std::size_t bins,
                                         int early_late_frames, double smoothing,
                                         double dpc_factor)
    : model_(model),
      early_late_frames_(early_late_frames),
      smoothing_(smoothing),
      dpc_factor_(dpc_factor),
      smoothed_(bins, 0.0),
      history_(bins * static_cast<std::size_t>(early_late_frames + 1), 0.0),
      lambda_(bins, 0.0) {
  if (early_late_frames < 0) throw std::invalid_argument("early/late split must be >= 0");
  if (smoothing < 0.0 || smoothing >= 1.0) throw std::invalid_argument("bad smoothing");
  delay_gain_ = std::pow(model.frame_decay, early_late_frames);
}

void LateReverbEstimator::update(std::span<const double> error_power) {
  const std::size_t bins = smoothed_.size();
  if (error_power.size() != bins) throw std::invalid_argument("bin count mismatch");

  for (std::size_t k = 0; k < bins; ++k) {
    smoothed_[k] = smoothing_ * smoothed_[k] + (1.0 - smoothing_) * error_power[k];
  }
  const std::size_t depth = static_cast<std::size_t>(early_late_frames_) + 1;
  double* slot = history_.data() + ring_pos_ * bins;
  std::copy(smoothed_.begin(), smoothed_.end(), slot);

  ++frames_seen_;
  if (warm()) {
    // The oldest ring entry is exactly early_late_frames back.
    const std::size_t oldest = (ring_pos_ + 1) % depth;
    const double* src = history_.data() + oldest * bins;
    for (std::size_t k = 0; k < bins; ++k) {
      lambda_[k] = delay_gain_ * dpc_factor_ * src[k];
    }
  }
  ring_pos_ = (ring_pos_ + 1) % depth;
}

}  // namespace echopost
