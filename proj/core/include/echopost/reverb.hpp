// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOPOST_REVERB_HPP
#define ECHOPOST_REVERB_HPP

#include <cstddef>
#include <optional>

#include "echopost/audio.hpp"

namespace echopost {

/// Exponential room-decay model derived from the reverberation time.
struct ReverbModel {
  double t60_s = 0.3;
  double decay_rate = 0.0;   // nepers/s, 3 ln(10) / t60
  double frame_decay = 0.0;  // energy decay per STFT frame, in (0, 1)
};

ReverbModel make_reverb_model(double t60_s, std::size_t hop, int sample_rate);

struct T60Estimate {
  ReverbModel model;
  double fit_rms_db = 0.0;  // residual of the log-decay line fit
};

/// Reverberation time from backward integration of the squared tail after
/// the direct-path peak, line-fitted between -5 and -25 dB. Fails when the
/// tail is too short, never reaches -25 dB, or the decay curve is not close
/// to linear in dB.
std::optional<T60Estimate> estimate_t60(const ImpulseResponse& air, std::size_t hop,
                                        int sample_rate);

/// Initial power of the residual tail beyond the identified path: energy of
/// the final quarter of the estimated path, decayed one frame step.
double estimate_tail_power(const ImpulseResponse& estimated_path, const ReverbModel& model);

}  // namespace echopost

#endif  // ECHOPOST_REVERB_HPP
