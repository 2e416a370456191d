// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echopost/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "echopost/fft.hpp"

namespace echopost {

double GaussianRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianRng::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; 1-u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

AudioSignal generate_white_noise(double duration_s, int sample_rate, std::uint64_t seed) {
  if (duration_s <= 0.0) throw std::invalid_argument("duration must be positive");
  GaussianRng rng(seed);
  AudioSignal out;
  out.sample_rate = sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  out.samples.resize(n);
  for (auto& v : out.samples) v = 0.1 * rng.next();
  return out;
}

AudioSignal generate_speech_like(double duration_s, int sample_rate, std::uint64_t seed) {
  if (duration_s <= 0.0) throw std::invalid_argument("duration must be positive");
  GaussianRng rng(seed);
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  const double fs = sample_rate;

  // Band-limited excitation: one-pole highpass at 150 Hz into a double
  // one-pole lowpass at 3 kHz.
  const double hp_a = std::exp(-2.0 * std::numbers::pi * 150.0 / fs);
  const double lp_b = 1.0 - std::exp(-2.0 * std::numbers::pi * 3000.0 / fs);
  std::vector<double> shaped(n);
  double hp_y = 0.0, hp_x = 0.0, lp1 = 0.0, lp2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.next();
    hp_y = hp_a * (hp_y + x - hp_x);
    hp_x = x;
    lp1 += lp_b * (hp_y - lp1);
    lp2 += lp_b * (lp1 - lp2);
    shaped[i] = lp2;
  }

  // Syllabic gating: bursts with raised-cosine ramps separated by pauses.
  // The lead-in silence lets noise trackers initialize on noise alone.
  std::vector<double> envelope(n, 0.0);
  const auto ramp = static_cast<std::size_t>(0.020 * fs);
  std::size_t pos = static_cast<std::size_t>(0.35 * fs);
  while (pos < n) {
    const auto burst = static_cast<std::size_t>((0.25 + 0.5 * rng.uniform()) * fs);
    const auto pause = static_cast<std::size_t>((0.15 + 0.3 * rng.uniform()) * fs);
    const double level = 0.7 + 0.6 * rng.uniform();
    const std::size_t end = std::min(n, pos + burst);
    for (std::size_t i = pos; i < end; ++i) {
      double g = 1.0;
      if (i - pos < ramp) {
        g = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i - pos) / ramp);
      } else if (end - i < ramp) {
        g = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(end - i) / ramp);
      }
      envelope[i] = level * g;
    }
    pos = end + pause;
  }

  AudioSignal out;
  out.sample_rate = sample_rate;
  out.samples.resize(n);
  double active_energy = 0.0;
  std::size_t active_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out.samples[i] = shaped[i] * envelope[i];
    if (envelope[i] > 0.1) {
      active_energy += out.samples[i] * out.samples[i];
      ++active_count;
    }
  }
  if (active_count > 0 && active_energy > 0.0) {
    const double gain = 0.1 / std::sqrt(active_energy / static_cast<double>(active_count));
    for (auto& v : out.samples) v *= gain;
  }
  return out;
}

ImpulseResponse generate_synthetic_air(double t60_s, std::size_t direct_delay,
                                       std::size_t length, int sample_rate,
                                       std::uint64_t seed) {
  if (t60_s <= 0.0) throw std::invalid_argument("t60 must be positive");
  if (length <= direct_delay) throw std::invalid_argument("length must exceed direct_delay");
  GaussianRng rng(seed);
  ImpulseResponse air;
  air.sample_rate = sample_rate;
  air.direct_delay = direct_delay;
  air.taps.assign(length, 0.0);
  air.taps[direct_delay] = 1.0;

  const double decay_rate = 3.0 * std::numbers::ln10 / t60_s;  // nepers/s on amplitude
  const double sigma_tail = 0.1;
  for (std::size_t i = direct_delay + 1; i < length; ++i) {
    const double t = static_cast<double>(i - direct_delay) / sample_rate;
    air.taps[i] = sigma_tail * rng.next() * std::exp(-decay_rate * t);
  }
  return air;
}

ImpulseResponse generate_sparse_air(std::size_t length, std::size_t n_active,
                                    int sample_rate, std::uint64_t seed) {
  if (n_active == 0 || n_active > length) throw std::invalid_argument("bad active tap count");
  GaussianRng rng(seed);
  std::set<std::size_t> positions;
  while (positions.size() < n_active) {
    positions.insert(static_cast<std::size_t>(rng.uniform() * static_cast<double>(length)) %
                     length);
  }
  ImpulseResponse air;
  air.sample_rate = sample_rate;
  air.taps.assign(length, 0.0);
  air.direct_delay = *positions.begin();
  for (std::size_t p : positions) {
    double a = rng.next();
    if (std::abs(a) < 0.1) a = a < 0 ? -0.1 : 0.1;  // keep every active tap significant
    air.taps[p] = a;
  }
  air.taps[air.direct_delay] = 1.0;
  return air;
}

AudioSignal convolve(const AudioSignal& signal, const ImpulseResponse& air) {
  if (signal.sample_rate != air.sample_rate) {
    throw std::invalid_argument("sample rate mismatch in convolve");
  }
  const std::size_t n = signal.samples.size();
  const std::size_t l = air.taps.size();
  AudioSignal out;
  out.sample_rate = signal.sample_rate;
  out.samples.assign(n, 0.0);
  if (n == 0 || l == 0) return out;

  if (n * l <= (std::size_t{1} << 22)) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t mmax = std::min(l - 1, i);
      double acc = 0.0;
      for (std::size_t m = 0; m <= mmax; ++m) acc += air.taps[m] * signal.samples[i - m];
      out.samples[i] = acc;
    }
    return out;
  }

  // Overlap-add fast convolution.
  const std::size_t fft_n = fft::next_pow2(std::max<std::size_t>(2 * l, 8192));
  const std::size_t block = fft_n - l + 1;
  auto kernel = fft::rfft(air.taps, fft_n);
  std::vector<double> chunk(block);
  for (std::size_t start = 0; start < n; start += block) {
    const std::size_t m = std::min(block, n - start);
    chunk.assign(block, 0.0);
    std::copy(signal.samples.begin() + static_cast<std::ptrdiff_t>(start),
              signal.samples.begin() + static_cast<std::ptrdiff_t>(start + m), chunk.begin());
    auto spec = fft::rfft(chunk, fft_n);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= kernel[k];
    auto seg = fft::irfft(spec, fft_n);
    const std::size_t copy_n = std::min(fft_n, n - start);
    for (std::size_t i = 0; i < copy_n; ++i) out.samples[start + i] += seg[i];
  }
  return out;
}

AudioSignal apply_nonlinearity(const AudioSignal& signal, NonlinearityModel model,
                               double level) {
  if (model == NonlinearityModel::none) return signal;
  if (level <= 0.0) throw std::invalid_argument("nonlinearity level must be positive");
  AudioSignal out = signal;
  if (model == NonlinearityModel::hard_clip) {
    for (auto& v : out.samples) v = std::clamp(v, -level, level);
  } else {
    for (auto& v : out.samples) v = level * std::tanh(v / level);
  }
  return out;
}

AudioSignal mix_at_snr(const AudioSignal& target, const AudioSignal& interferer,
                       double snr_db) {
  if (target.sample_rate != interferer.sample_rate) {
    throw std::invalid_argument("sample rate mismatch in mix_at_snr");
  }
  if (interferer.samples.empty()) throw std::invalid_argument("empty interferer");
  const std::size_t n = target.samples.size();

  std::vector<double> tiled(n);
  for (std::size_t i = 0; i < n; ++i) tiled[i] = interferer.samples[i % interferer.samples.size()];

  const double p_target = signal_power(target.samples);
  const double p_interf = signal_power(tiled);
  if (p_target <= 0.0) throw std::invalid_argument("target has zero power");
  if (p_interf <= 0.0) throw std::invalid_argument("interferer has zero power");

  const double gain = std::sqrt(p_target / (p_interf * db_to_linear_power(snr_db)));
  AudioSignal out = target;
  for (std::size_t i = 0; i < n; ++i) out.samples[i] += gain * tiled[i];
  return out;
}

DecayFit fit_tail_decay(std::span<const double> taps, std::size_t begin, std::size_t end) {
  DecayFit fit;
  if (end > taps.size()) end = taps.size();
  if (begin >= end) return fit;

  const std::size_t span = end - begin;
  const std::size_t window = std::clamp<std::size_t>(span / 16, 8, 64);
  std::vector<double> xs, ys;
  for (std::size_t w = begin; w + window <= end; w += window) {
    double energy = 0.0;
    for (std::size_t i = w; i < w + window; ++i) energy += taps[i] * taps[i];
    energy /= static_cast<double>(window);
    if (energy <= 0.0) continue;
    xs.push_back(static_cast<double>(w - begin) + 0.5 * static_cast<double>(window));
    ys.push_back(10.0 * std::log10(energy));
  }
  if (xs.size() < 3) return fit;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = m * sxx - sx * sx;
  if (denom <= 0.0) return fit;
  fit.slope_db_per_sample = (m * sxy - sx * sy) / denom;
  fit.level_db = (sy - fit.slope_db_per_sample * sx) / m;
  fit.valid = true;
  return fit;
}

ImpulseResponse perturb_tail(const ImpulseResponse& air, double start_fraction,
                             double amount, std::uint64_t seed) {
  if (start_fraction <= 0.0 || start_fraction >= 1.0) {
    throw std::invalid_argument("start_fraction must be in (0, 1)");
  }
  if (amount < 0.0) throw std::invalid_argument("amount must be non-negative");

  ImpulseResponse out = air;
  if (amount == 0.0) return out;

  const std::size_t len = air.taps.size();
  std::size_t split = static_cast<std::size_t>(start_fraction * static_cast<double>(len));
  split = std::max(split, air.direct_delay + 1);
  if (split >= len) return out;

  // Redraw under the decay envelope fitted to the existing tail; fall back
  // to a flat envelope at the local RMS when the fit is degenerate.
  const std::size_t fit_begin = air.direct_delay + 1;
  DecayFit fit = fit_tail_decay(air.taps, fit_begin, len);
  GaussianRng rng(seed);
  for (std::size_t i = split; i < len; ++i) {
    double sigma;
    if (fit.valid) {
      const double energy_db =
          fit.level_db + fit.slope_db_per_sample * static_cast<double>(i - fit_begin);
      sigma = std::pow(10.0, energy_db / 20.0);
    } else {
      sigma = std::sqrt(std::max(signal_power({air.taps.data() + split, len - split}), 0.0));
    }
    const double fresh = sigma * rng.next();
    out.taps[i] = (1.0 - amount) * air.taps[i] + amount * fresh;
  }
  return out;
}

}  // namespace echopost
