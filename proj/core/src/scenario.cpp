// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echopost/scenario.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace echopost {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ (tag * 0xD1B54A32D192ED03ULL));
}

AudioSignal silence(double duration_s, int sample_rate) {
  AudioSignal s;
  s.sample_rate = sample_rate;
  s.samples.assign(static_cast<std::size_t>(std::llround(duration_s * sample_rate)), 0.0);
  return s;
}

AudioSignal make_source(SourceKind kind, double duration_s, int sample_rate,
                        std::uint64_t seed) {
  switch (kind) {
    case SourceKind::speech: return generate_speech_like(duration_s, sample_rate, seed);
    case SourceKind::white_noise: return generate_white_noise(duration_s, sample_rate, seed);
    case SourceKind::silence: return silence(duration_s, sample_rate);
  }
  return silence(duration_s, sample_rate);
}

}  // namespace

SourceKind source_kind_from_string(const std::string& name) {
  if (name == "speech") return SourceKind::speech;
  if (name == "white_noise" || name == "noise") return SourceKind::white_noise;
  if (name == "silence" || name == "none") return SourceKind::silence;
  throw std::invalid_argument("unknown source kind: " + name);
}

const char* to_string(SourceKind k) {
  switch (k) {
    case SourceKind::speech: return "speech";
    case SourceKind::white_noise: return "white_noise";
    case SourceKind::silence: return "silence";
  }
  return "silence";
}

double measure_sner_db(const AudioSignal& far_src, const ImpulseResponse& air,
                       NonlinearityModel model, double level) {
  const AudioSignal linear_echo = convolve(far_src, air);
  AudioSignal distorted = apply_nonlinearity(far_src, model, level);
  for (std::size_t i = 0; i < distorted.samples.size(); ++i) {
    distorted.samples[i] -= far_src.samples[i];
  }
  const AudioSignal nonlinear_part = convolve(distorted, air);
  const double p_lin = signal_power(linear_echo.samples);
  const double p_nl = signal_power(nonlinear_part.samples);
  if (p_nl <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(p_lin / p_nl);
}

double calibrate_nonlinearity_level(const AudioSignal& far_src, const ImpulseResponse& air,
                                    NonlinearityModel model, double target_sner_db) {
  if (model == NonlinearityModel::none) {
    throw std::invalid_argument("cannot calibrate without a nonlinearity");
  }
  double peak = 0.0;
  for (double v : far_src.samples) peak = std::max(peak, std::abs(v));
  if (peak <= 0.0) throw std::invalid_argument("silent far end cannot be calibrated");

  // SNER grows monotonically with the level; bisect in log space.
  double lo = peak * 1e-4, hi = peak * 4.0;
  if (measure_sner_db(far_src, air, model, hi) < target_sner_db) return hi;
  if (measure_sner_db(far_src, air, model, lo) > target_sner_db) return lo;
  for (int it = 0; it < 48; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (measure_sner_db(far_src, air, model, mid) < target_sner_db) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi);
}

ScenarioSignals synthesize_scenario(const ScenarioConfig& config,
                                    std::size_t early_split_taps) {
  if (config.duration_s <= 0.0) throw std::invalid_argument("duration must be positive");
  const int fs = config.sample_rate;
  const double dur = config.duration_s;

  ScenarioSignals out;
  out.far_src = make_source(config.far_end, dur, fs, sub_seed(config.seed, 1));
  out.near_src = make_source(config.near_end, dur, fs, sub_seed(config.seed, 2));
  const std::size_t n = out.far_src.samples.size();

  out.echo_air = config.echo_air_sparse
                     ? generate_sparse_air(config.echo_air.length, config.sparse_active_taps,
                                           fs, sub_seed(config.seed, 3))
                     : generate_synthetic_air(config.echo_air.t60_s,
                                              config.echo_air.direct_delay,
                                              config.echo_air.length, fs,
                                              sub_seed(config.seed, 3));
  for (auto& tap : out.echo_air.taps) tap *= config.echo_path_gain;
  out.echo_air_after = out.echo_air;

  // Loudspeaker distortion applies to the electrical far-end signal; the
  // canceller still adapts against the undistorted reference.
  out.achieved_sner_db = std::numeric_limits<double>::quiet_NaN();
  if (config.nonlinearity == NonlinearityModel::none) {
    out.loudspeaker = out.far_src;
  } else {
    double level = config.nonlinearity_level;
    if (config.sner_db.has_value()) {
      level = calibrate_nonlinearity_level(out.far_src, out.echo_air, config.nonlinearity,
                                           *config.sner_db);
    }
    out.loudspeaker = apply_nonlinearity(out.far_src, config.nonlinearity, level);
    out.achieved_sner_db = measure_sner_db(out.far_src, out.echo_air, config.nonlinearity, level);
  }

  out.echo = convolve(out.loudspeaker, out.echo_air);
  if (config.tail_change.has_value()) {
    const auto& tc = *config.tail_change;
    out.echo_air_after =
        perturb_tail(out.echo_air, tc.start_fraction, tc.amount, sub_seed(config.seed, 4));
    const AudioSignal echo_after = convolve(out.loudspeaker, out.echo_air_after);
    auto change_at = static_cast<std::size_t>(std::llround(tc.time_s * fs));
    change_at = std::min(change_at, n);
    for (std::size_t i = change_at; i < n; ++i) out.echo.samples[i] = echo_after.samples[i];
    out.tail_change_sample = change_at;
  }

  if (config.near_air.has_value()) {
    const ImpulseResponse near_air =
        generate_synthetic_air(config.near_air->t60_s, config.near_air->direct_delay,
                               config.near_air->length, fs, sub_seed(config.seed, 5));
    ImpulseResponse early = near_air, late = near_air;
    const std::size_t split =
        std::min(near_air.taps.size(), near_air.direct_delay + early_split_taps);
    std::fill(early.taps.begin() + static_cast<std::ptrdiff_t>(split), early.taps.end(), 0.0);
    std::fill(late.taps.begin(), late.taps.begin() + static_cast<std::ptrdiff_t>(split), 0.0);
    out.near_early = convolve(out.near_src, early);
    out.near_late = convolve(out.near_src, late);
  } else {
    out.near_early = out.near_src;
    out.near_late = silence(dur, fs);
  }

  if (config.snr_db.has_value()) {
    AudioSignal raw = generate_white_noise(dur, fs, sub_seed(config.seed, 6));
    const double p_near = signal_power(out.near_early.samples);
    const double p_echo = signal_power(out.echo.samples);
    const double p_ref = p_near > 0.0 ? p_near : p_echo;
    if (p_ref <= 0.0) {
      throw std::invalid_argument("snr requested but both near end and echo are silent");
    }
    const double p_noise = signal_power(raw.samples);
    const double gain = std::sqrt(p_ref / (p_noise * db_to_linear_power(*config.snr_db)));
    out.noise = std::move(raw);
    for (auto& v : out.noise.samples) v *= gain;
  } else {
    out.noise = silence(dur, fs);
  }

  out.mic = silence(dur, fs);
  for (std::size_t i = 0; i < n; ++i) {
    out.mic.samples[i] = out.near_early.samples[i] + out.near_late.samples[i] +
                         out.echo.samples[i] + out.noise.samples[i];
  }
  return out;
}

}  // namespace echopost
