// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echopost/double_talk.hpp"

#include <cmath>
#include <stdexcept>

namespace echopost {

GeigelDetector::GeigelDetector(const DtdConfig& config) : config_(config) {
  if (config.threshold <= 0.0 || config.threshold > 1.0) {
    throw std::invalid_argument("dtd threshold must be in (0, 1]");
  }
  if (config.window == 0) throw std::invalid_argument("dtd window must be positive");
  if (config.hangover < 0) throw std::invalid_argument("dtd hangover must be >= 0");
  abs_window_.assign(config.window, 0.0);
}

void GeigelDetector::reset() {
  std::fill(abs_window_.begin(), abs_window_.end(), 0.0);
  max_deque_.clear();
  tick_ = 0;
  hangover_left_ = 0;
}

bool GeigelDetector::update(double far_end, double mic) {
  const double mag = std::abs(far_end);
  abs_window_[tick_ % config_.window] = mag;

  // Sliding-window max via a monotonically decreasing index deque. Every
  // retained index lies within the window, so its slot is still live.
  while (!max_deque_.empty() && abs_window_[max_deque_.back() % config_.window] <= mag) {
    max_deque_.pop_back();
  }
  max_deque_.push_back(tick_);
  while (max_deque_.front() + config_.window <= tick_) max_deque_.pop_front();
  const double far_max = abs_window_[max_deque_.front() % config_.window];
  ++tick_;

  const bool hit = std::abs(mic) > config_.threshold * far_max;
  bool active;
  if (hit) {
    active = true;
    hangover_left_ = std::max(config_.hangover - 1, 0);  // this call counts
  } else {
    active = hangover_left_ > 0;
    if (active) --hangover_left_;
  }
  return active;
}

}  // namespace echopost
