// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echopost/stft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "echopost/fft.hpp"

namespace echopost {

std::vector<double> sqrt_hann_window(std::size_t length) {
  // Periodic form: the analysis*synthesis product overlap-adds to one at
  // 50% hop.
  std::vector<double> w(length);
  for (std::size_t i = 0; i < length; ++i) {
    const double hann =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / length);
    w[i] = std::sqrt(hann);
  }
  return w;
}

std::size_t frame_count(std::size_t signal_len, const FrameParams& params) {
  if (signal_len < params.frame_len) return 0;
  return (signal_len - params.frame_len) / params.hop + 1;
}

namespace {

void validate_params(const FrameParams& p) {
  if (p.frame_len == 0 || p.hop == 0) throw std::invalid_argument("empty frame params");
  if (p.fft_len < p.frame_len) throw std::invalid_argument("fft_len must be >= frame_len");
  if ((p.fft_len & (p.fft_len - 1)) != 0) throw std::invalid_argument("fft_len must be a power of two");
}

}  // namespace

Spectrogram stft(const AudioSignal& signal, const FrameParams& params) {
  validate_params(params);
  if (signal.samples.size() < params.frame_len) {
    throw std::invalid_argument("signal shorter than one frame");
  }

  Spectrogram spec;
  spec.params = params;
  spec.origin_length = signal.samples.size();
  spec.sample_rate = signal.sample_rate;
  spec.n_frames = frame_count(signal.samples.size(), params);
  spec.n_bins = params.bins();
  spec.data.resize(spec.n_frames * spec.n_bins);

  const auto window = sqrt_hann_window(params.frame_len);
  std::vector<double> frame(params.frame_len);
  for (std::size_t l = 0; l < spec.n_frames; ++l) {
    const std::size_t start = l * params.hop;
    for (std::size_t i = 0; i < params.frame_len; ++i) {
      frame[i] = signal.samples[start + i] * window[i];
    }
    auto bins = fft::rfft(frame, params.fft_len);
    std::copy(bins.begin(), bins.end(), spec.frame(l));
  }
  return spec;
}

AudioSignal istft(const Spectrogram& spec) {
  validate_params(spec.params);
  if (spec.data.size() != spec.n_frames * spec.n_bins || spec.n_bins != spec.params.bins()) {
    throw std::invalid_argument("inconsistent spectrogram dimensions");
  }

  const FrameParams& p = spec.params;
  const auto window = sqrt_hann_window(p.frame_len);
  const std::size_t total = spec.n_frames == 0
                                ? spec.origin_length
                                : (spec.n_frames - 1) * p.hop + p.frame_len;

  AudioSignal out;
  out.sample_rate = spec.sample_rate;
  out.samples.assign(std::max(total, spec.origin_length), 0.0);
  std::vector<double> ola_norm(out.samples.size(), 0.0);

  for (std::size_t l = 0; l < spec.n_frames; ++l) {
    auto frame = fft::irfft(spec.frame_span(l), p.fft_len);
    const std::size_t start = l * p.hop;
    for (std::size_t i = 0; i < p.frame_len; ++i) {
      out.samples[start + i] += frame[i] * window[i];
      ola_norm[start + i] += window[i] * window[i];
    }
  }
  // The window pair overlap-adds to one in the interior; normalizing also
  // fixes up the tapered edges as far as they can be.
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    if (ola_norm[i] > 1e-8) out.samples[i] /= ola_norm[i];
  }
  out.samples.resize(spec.origin_length);
  return out;
}

void frame_power(const Spectrogram& spec, std::size_t l, std::span<double> out) {
  const auto* row = spec.frame(l);
  for (std::size_t k = 0; k < spec.n_bins; ++k) out[k] = std::norm(row[k]);
}

}  // namespace echopost
