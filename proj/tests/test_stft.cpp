// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "echopost/stft.hpp"
#include "echopost/synth.hpp"

using namespace echopost;

namespace {

// O(N^2) reference transform of one windowed frame.
std::vector<std::complex<double>> naive_dft(const std::vector<double>& frame, std::size_t n) {
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < frame.size(); ++i) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * i) / n;
      acc += frame[i] * std::complex<double>{std::cos(angle), std::sin(angle)};
    }
    out[k] = acc;
  }
  return out;
}

double interior_relative_error(const AudioSignal& a, const AudioSignal& b,
                               std::size_t edge) {
  double err = 0.0, norm = 0.0;
  for (std::size_t i = edge; i + edge < a.samples.size(); ++i) {
    const double d = a.samples[i] - b.samples[i];
    err += d * d;
    norm += a.samples[i] * a.samples[i];
  }
  return std::sqrt(err / norm);
}

}  // namespace

TEST_CASE("sqrt-hann analysis*synthesis product overlap-adds to one") {
  const FrameParams p;
  const auto w = sqrt_hann_window(p.frame_len);
  for (std::size_t i = 0; i < p.hop; ++i) {
    const double cola = w[i] * w[i] + w[i + p.hop] * w[i + p.hop];
    CHECK(std::abs(cola - 1.0) < 1e-12);
  }
}

TEST_CASE("zero signal transforms to a zero spectrogram") {
  AudioSignal sig;
  sig.samples.assign(4096, 0.0);
  const auto spec = stft(sig, {});
  for (const auto& v : spec.data) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("frame count formula is exact") {
  const FrameParams p;
  for (std::size_t len : {512u, 513u, 767u, 768u, 4096u, 16000u}) {
    AudioSignal sig;
    sig.samples.assign(len, 0.0);
    const auto spec = stft(sig, p);
    CHECK(spec.n_frames == (len - p.frame_len) / p.hop + 1);
  }
}

TEST_CASE("signal shorter than one frame is rejected") {
  AudioSignal sig;
  sig.samples.assign(100, 0.0);
  CHECK_THROWS_AS(stft(sig, {}), std::invalid_argument);
}

TEST_CASE("bin-center sinusoid concentrates its energy") {
  const FrameParams p;
  AudioSignal sig;
  sig.sample_rate = 16000;
  sig.samples.resize(4096);
  const std::size_t bin = 32;
  for (std::size_t i = 0; i < sig.samples.size(); ++i) {
    sig.samples[i] =
        std::sin(2.0 * std::numbers::pi * static_cast<double>(bin * i) / p.fft_len);
  }
  const auto spec = stft(sig, p);
  for (std::size_t l = 0; l < spec.n_frames; ++l) {
    double total = 0.0, local = 0.0;
    for (std::size_t k = 0; k < spec.n_bins; ++k) {
      const double e = std::norm(spec.frame(l)[k]);
      total += e;
      if (k + 1 >= bin && k <= bin + 1) local += e;
    }
    CHECK(local / total >= 0.99);
  }
}

TEST_CASE("one frame matches the naive dft oracle") {
  const FrameParams p;
  auto sig = generate_white_noise(0.1, 16000, 31);
  const auto spec = stft(sig, p);

  const auto window = sqrt_hann_window(p.frame_len);
  const std::size_t l = 2;
  std::vector<double> frame(p.frame_len);
  for (std::size_t i = 0; i < p.frame_len; ++i) {
    frame[i] = sig.samples[l * p.hop + i] * window[i];
  }
  const auto ref = naive_dft(frame, p.fft_len);
  for (std::size_t k = 0; k < spec.n_bins; ++k) {
    CHECK(std::abs(spec.frame(l)[k] - ref[k]) < 1e-9);
  }
}

TEST_CASE("windowed frame energy obeys parseval") {
  const FrameParams p;
  auto sig = generate_white_noise(0.25, 16000, 57);
  const auto spec = stft(sig, p);
  const auto window = sqrt_hann_window(p.frame_len);

  for (std::size_t l = 0; l < spec.n_frames; l += 7) {
    double time_energy = 0.0;
    for (std::size_t i = 0; i < p.frame_len; ++i) {
      const double v = sig.samples[l * p.hop + i] * window[i];
      time_energy += v * v;
    }
    double spec_energy = std::norm(spec.frame(l)[0]) + std::norm(spec.frame(l)[spec.n_bins - 1]);
    for (std::size_t k = 1; k + 1 < spec.n_bins; ++k) spec_energy += 2.0 * std::norm(spec.frame(l)[k]);
    spec_energy /= static_cast<double>(p.fft_len);
    CHECK(time_energy == doctest::Approx(spec_energy).epsilon(1e-9));
  }
}

TEST_CASE("istft reconstructs the interior to 1e-10") {
  const FrameParams p;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto sig = generate_white_noise(1.0, 16000, seed);
    const auto back = istft(stft(sig, p));
    REQUIRE(back.samples.size() == sig.samples.size());
    CHECK(interior_relative_error(sig, back, p.frame_len) <= 1e-10);
  }
}

TEST_CASE("zero spectrogram synthesizes to silence") {
  AudioSignal sig;
  sig.samples.assign(4096, 0.0);
  auto spec = stft(sig, {});
  const auto out = istft(spec);
  for (double v : out.samples) CHECK(v == 0.0);
}

TEST_CASE("real gain on all frames scales the interior signal") {
  const FrameParams p;
  auto sig = generate_white_noise(0.5, 16000, 3);
  auto spec = stft(sig, p);
  for (auto& v : spec.data) v *= 0.5;
  const auto out = istft(spec);
  double err = 0.0, norm = 0.0;
  for (std::size_t i = p.frame_len; i + p.frame_len < out.samples.size(); ++i) {
    const double d = out.samples[i] - 0.5 * sig.samples[i];
    err += d * d;
    norm += sig.samples[i] * sig.samples[i];
  }
  CHECK(std::sqrt(err / norm) < 1e-10);
}

TEST_CASE("stft is linear") {
  const FrameParams p;
  auto x = generate_white_noise(0.3, 16000, 5);
  auto y = generate_white_noise(0.3, 16000, 6);
  const double a = 1.7, b = -0.4;
  AudioSignal mix;
  mix.samples.resize(x.samples.size());
  for (std::size_t i = 0; i < mix.samples.size(); ++i) {
    mix.samples[i] = a * x.samples[i] + b * y.samples[i];
  }
  const auto sx = stft(x, p);
  const auto sy = stft(y, p);
  const auto sm = stft(mix, p);
  double max_err = 0.0;
  for (std::size_t i = 0; i < sm.data.size(); ++i) {
    max_err = std::max(max_err, std::abs(sm.data[i] - (a * sx.data[i] + b * sy.data[i])));
  }
  CHECK(max_err < 1e-10);
}

TEST_CASE("inconsistent spectrogram dimensions are rejected") {
  AudioSignal sig;
  sig.samples.assign(2048, 0.0);
  auto spec = stft(sig, {});
  spec.data.resize(spec.data.size() - 1);
  CHECK_THROWS_AS(istft(spec), std::invalid_argument);
}
