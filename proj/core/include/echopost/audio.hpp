// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOPOST_AUDIO_HPP
#define ECHOPOST_AUDIO_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace echopost {

/// Mono sample sequence at a fixed rate. Samples are nominally in [-1, 1]
/// full scale but are not clamped outside of file I/O.
struct AudioSignal {
  std::vector<double> samples;
  int sample_rate = 16000;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// Linear loudspeaker-to-microphone response. direct_delay is the tap index
/// of the direct-path peak; taps before it are zero for synthetic responses.
struct ImpulseResponse {
  std::vector<double> taps;
  int sample_rate = 16000;
  std::size_t direct_delay = 0;
};

bool all_finite(std::span<const double> x);

/// Mean squared sample value.
double signal_power(std::span<const double> x);

double db_to_linear_power(double db);
double linear_power_to_db(double p);

}  // namespace echopost

#endif  // ECHOPOST_AUDIO_HPP
