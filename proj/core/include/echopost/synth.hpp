// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOPOST_SYNTH_HPP
#define ECHOPOST_SYNTH_HPP

#include <cstdint>
#include <random>

#include "echopost/audio.hpp"

namespace echopost {

/// Deterministic standard-normal source: mt19937_64 plus Box-Muller, so the
/// sample stream depends only on the seed.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}
  double next();
  double uniform();  // [0, 1)

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Zero-mean Gaussian noise, standard deviation 0.1 nominal full scale.
AudioSignal generate_white_noise(double duration_s, int sample_rate, std::uint64_t seed);

/// Speech-shaped surrogate: band-limited noise gated by syllabic bursts with
/// raised-cosine ramps. Starts with a short silent lead-in. Active-region
/// RMS is normalized to 0.1.
AudioSignal generate_speech_like(double duration_s, int sample_rate, std::uint64_t seed);

/// Unit direct-path impulse at direct_delay followed by Gaussian noise under
/// an exponential envelope whose energy decays 60 dB over t60_s.
ImpulseResponse generate_synthetic_air(double t60_s, std::size_t direct_delay,
                                       std::size_t length, int sample_rate,
                                       std::uint64_t seed);

/// Response with n_active nonzero taps at seeded random positions; the rest
/// are zero. direct_delay is the first active tap.
ImpulseResponse generate_sparse_air(std::size_t length, std::size_t n_active,
                                    int sample_rate, std::uint64_t seed);

/// Linear convolution truncated to the input length.
AudioSignal convolve(const AudioSignal& signal, const ImpulseResponse& air);

enum class NonlinearityModel { none, hard_clip, soft_saturation };

/// Memoryless sample-wise distortion: clamp(x, -level, level) or
/// level * tanh(x / level).
AudioSignal apply_nonlinearity(const AudioSignal& signal, NonlinearityModel model,
                               double level);

/// target + g * interferer with g chosen so the full-signal power ratio
/// matches snr_db. The interferer is tiled or truncated to the target length.
AudioSignal mix_at_snr(const AudioSignal& target, const AudioSignal& interferer,
                       double snr_db);

/// Replaces taps beyond start_fraction * length with a blend
/// (1 - amount) * old + amount * fresh, where the fresh draw follows the
/// exponential decay envelope fitted to the existing tail.
ImpulseResponse perturb_tail(const ImpulseResponse& air, double start_fraction,
                             double amount, std::uint64_t seed);

/// Least-squares exponential-decay fit of windowed log-energy along taps in
/// [begin, end). Returns {level_db at begin, slope_db_per_sample}.
struct DecayFit {
  double level_db = 0.0;
  double slope_db_per_sample = 0.0;
  bool valid = false;
};
DecayFit fit_tail_decay(std::span<const double> taps, std::size_t begin, std::size_t end);

}  // namespace echopost

#endif  // ECHOPOST_SYNTH_HPP
