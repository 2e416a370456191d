// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOPOST_DOUBLE_TALK_HPP
#define ECHOPOST_DOUBLE_TALK_HPP

#include <cstddef>
#include <deque>
#include <vector>

namespace echopost {

struct DtdConfig {
  double threshold = 0.5;      // Geigel amplitude ratio, in (0, 1]
  std::size_t window = 1024;   // far-end samples compared
  int hangover = 240;          // samples held after a trigger
};

/// Geigel detector: double-talk is declared while |mic| exceeds
/// threshold * max|far_end| over the recent window, and held for the
/// hangover. Adaptation must stay frozen while active.
class GeigelDetector {
 public:
  explicit GeigelDetector(const DtdConfig& config);

  /// Pushes the current far-end sample into the window and returns the
  /// double-talk state for this sample.
  bool update(double far_end, double mic);

  void reset();

 private:
  DtdConfig config_;
  std::vector<double> abs_window_;
  // Monotonic index deque for O(1) sliding-window max.
  std::deque<std::size_t> max_deque_;
  std::size_t tick_ = 0;
  int hangover_left_ = 0;
};

}  // namespace echopost

#endif  // ECHOPOST_DOUBLE_TALK_HPP
