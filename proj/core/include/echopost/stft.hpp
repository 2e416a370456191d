// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOPOST_STFT_HPP
#define ECHOPOST_STFT_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "echopost/audio.hpp"

namespace echopost {

/// Analysis/synthesis framing. Square-root Hann on both sides with 50%
/// overlap gives constant overlap-add and perfect interior reconstruction.
struct FrameParams {
  std::size_t frame_len = 512;
  std::size_t hop = 256;
  std::size_t fft_len = 512;

  std::size_t bins() const { return fft_len / 2 + 1; }
};

struct Spectrogram {
  std::vector<std::complex<double>> data;  // row-major, n_frames x bins
  std::size_t n_frames = 0;
  std::size_t n_bins = 0;
  FrameParams params;
  std::size_t origin_length = 0;
  int sample_rate = 16000;

  std::complex<double>* frame(std::size_t l) { return data.data() + l * n_bins; }
  const std::complex<double>* frame(std::size_t l) const { return data.data() + l * n_bins; }
  std::span<const std::complex<double>> frame_span(std::size_t l) const {
    return {frame(l), n_bins};
  }
};

std::vector<double> sqrt_hann_window(std::size_t length);

std::size_t frame_count(std::size_t signal_len, const FrameParams& params);

/// Windowed one-sided transform; frame l covers samples
/// [l*hop, l*hop + frame_len).
Spectrogram stft(const AudioSignal& signal, const FrameParams& params);

/// Synthesis-windowed overlap-add, truncated to origin_length.
AudioSignal istft(const Spectrogram& spec);

/// Per-frame squared magnitudes of one spectrogram row.
void frame_power(const Spectrogram& spec, std::size_t l, std::span<double> out);

}  // namespace echopost

#endif  // ECHOPOST_STFT_HPP
