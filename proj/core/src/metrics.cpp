// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echopost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace echopost {

namespace {

constexpr double kErleEchoFloor = 1e-6;  // -60 dBFS window power

double window_power(std::span<const double> x, std::size_t begin, std::size_t len) {
  double acc = 0.0;
  for (std::size_t i = begin; i < begin + len; ++i) acc += x[i] * x[i];
  return acc / static_cast<double>(len);
}

}  // namespace

ErleResult erle(const AudioSignal& echo, const AudioSignal& residual, double window_s) {
  if (echo.samples.size() != residual.samples.size()) {
    throw std::invalid_argument("erle length mismatch");
  }
  if (window_s <= 0.0) throw std::invalid_argument("erle window must be positive");

  ErleResult result;
  result.window_s = window_s;
  const auto win = static_cast<std::size_t>(std::llround(window_s * echo.sample_rate));
  if (win == 0 || echo.samples.size() < win) return result;

  const std::size_t n_windows = echo.samples.size() / win;
  result.trace_db.reserve(n_windows);
  for (std::size_t w = 0; w < n_windows; ++w) {
    const double p_echo = window_power(echo.samples, w * win, win);
    if (p_echo < kErleEchoFloor) {
      result.trace_db.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const double p_res = window_power(residual.samples, w * win, win);
    result.trace_db.push_back(10.0 * std::log10(p_echo / std::max(p_res, 1e-30)));
  }

  const std::size_t converged_from = (n_windows * 3) / 4;
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t w = converged_from; w < n_windows; ++w) {
    if (std::isnan(result.trace_db[w])) continue;
    acc += result.trace_db[w];
    ++count;
  }
  result.mean_db =
      count > 0 ? acc / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
  return result;
}

namespace {

double segmental_metric(const AudioSignal& reference, std::span<const double> error,
                        const SegmentalParams& params) {
  const auto frame = static_cast<std::size_t>(std::llround(params.frame_s * reference.sample_rate));
  if (frame == 0 || reference.samples.size() < frame) {
    throw std::invalid_argument("segmental frame longer than signal");
  }
  const std::size_t n_frames = reference.samples.size() / frame;

  double max_energy = 0.0;
  std::vector<double> ref_energy(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) {
    ref_energy[f] = window_power(reference.samples, f * frame, frame);
    max_energy = std::max(max_energy, ref_energy[f]);
  }
  const double gate = max_energy * db_to_linear_power(-params.activity_threshold_db);

  double acc = 0.0;
  std::size_t active = 0;
  for (std::size_t f = 0; f < n_frames; ++f) {
    if (max_energy <= 0.0 || ref_energy[f] < gate || ref_energy[f] <= 0.0) continue;
    const double p_err = window_power(error, f * frame, frame);
    double snr = p_err > 0.0 ? 10.0 * std::log10(ref_energy[f] / p_err) : params.clamp_max_db;
    snr = std::clamp(snr, params.clamp_min_db, params.clamp_max_db);
    acc += snr;
    ++active;
  }
  if (active == 0) throw std::runtime_error("no active frames in segmental metric");
  return acc / static_cast<double>(active);
}

}  // namespace

double segmental_snr(const AudioSignal& reference, const AudioSignal& processed,
                     const SegmentalParams& params) {
  if (reference.samples.size() != processed.samples.size()) {
    throw std::invalid_argument("segmental_snr length mismatch");
  }
  std::vector<double> error(reference.samples.size());
  for (std::size_t i = 0; i < error.size(); ++i) {
    error[i] = processed.samples[i] - reference.samples[i];
  }
  return segmental_metric(reference, error, params);
}

double segmental_sir(const AudioSignal& reference, const AudioSignal& processed,
                     const AudioSignal& interference_component, const SegmentalParams& params) {
  if (reference.samples.size() != processed.samples.size() ||
      reference.samples.size() != interference_component.samples.size()) {
    throw std::invalid_argument("segmental_sir length mismatch");
  }
  return segmental_metric(reference, interference_component.samples, params);
}

double lsd(const AudioSignal& reference, const AudioSignal& processed,
           const FrameParams& params) {
  if (reference.samples.size() != processed.samples.size()) {
    throw std::invalid_argument("lsd length mismatch");
  }
  const Spectrogram s_ref = stft(reference, params);
  const Spectrogram s_proc = stft(processed, params);

  const std::size_t bins = s_ref.n_bins;
  std::vector<double> p_ref(bins), p_proc(bins);

  // Frame activity and the per-frame spectral floor are symmetric in the
  // two signals, which keeps lsd(a,b) == lsd(b,a) exact.
  std::vector<double> frame_energy(s_ref.n_frames);
  double max_energy = 0.0;
  for (std::size_t l = 0; l < s_ref.n_frames; ++l) {
    double e_ref = 0.0, e_proc = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      e_ref += std::norm(s_ref.frame(l)[k]);
      e_proc += std::norm(s_proc.frame(l)[k]);
    }
    frame_energy[l] = std::max(e_ref, e_proc);
    max_energy = std::max(max_energy, frame_energy[l]);
  }
  const double gate = max_energy * 1e-4;  // 40 dB activity window

  double acc = 0.0;
  std::size_t active = 0;
  for (std::size_t l = 0; l < s_ref.n_frames; ++l) {
    if (max_energy <= 0.0 || frame_energy[l] < gate) continue;
    frame_power(s_ref, l, p_ref);
    frame_power(s_proc, l, p_proc);
    double max_bin = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      max_bin = std::max({max_bin, p_ref[k], p_proc[k]});
    }
    const double floor = max_bin * 1e-5;  // -50 dB relative per frame
    double sq = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double r =
          10.0 * std::log10(std::max(p_ref[k], floor) / std::max(p_proc[k], floor));
      sq += r * r;
    }
    acc += std::sqrt(sq / static_cast<double>(bins));
    ++active;
  }
  return active > 0 ? acc / static_cast<double>(active) : 0.0;
}

}  // namespace echopost
