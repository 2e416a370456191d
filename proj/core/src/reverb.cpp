// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echopost/reverb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace echopost {

namespace {

constexpr double kFitHighDb = -5.0;
constexpr double kFitLowDb = -25.0;
constexpr std::size_t kMinFitTaps = 32;
constexpr double kMaxFitResidualDb = 1.0;

}  // namespace

ReverbModel make_reverb_model(double t60_s, std::size_t hop, int sample_rate) {
  ReverbModel m;
  m.t60_s = t60_s;
  m.decay_rate = 3.0 * std::numbers::ln10 / t60_s;
  m.frame_decay =
      std::exp(-2.0 * m.decay_rate * static_cast<double>(hop) / static_cast<double>(sample_rate));
  return m;
}

std::optional<T60Estimate> estimate_t60(const ImpulseResponse& air, std::size_t hop,
                                        int sample_rate) {
  const std::size_t len = air.taps.size();
  const std::size_t tail_begin = air.direct_delay + 1;
  if (tail_begin + kMinFitTaps >= len) return std::nullopt;

  // Backward integration of the squared tail, direct path excluded: a
  // strong direct component would bias the decay estimate.
  std::vector<double> schroeder(len - tail_begin);
  double acc = 0.0;
  for (std::size_t i = len; i > tail_begin; --i) {
    acc += air.taps[i - 1] * air.taps[i - 1];
    schroeder[i - 1 - tail_begin] = acc;
  }
  if (acc <= 0.0) return std::nullopt;

  const double ref = schroeder[0];
  std::size_t i_high = schroeder.size(), i_low = schroeder.size();
  for (std::size_t i = 0; i < schroeder.size(); ++i) {
    const double level = 10.0 * std::log10(schroeder[i] / ref);
    if (i_high == schroeder.size() && level <= kFitHighDb) i_high = i;
    if (level <= kFitLowDb) {
      i_low = i;
      break;
    }
  }
  if (i_high >= i_low || i_low == schroeder.size()) return std::nullopt;
  if (i_low - i_high < kMinFitTaps) return std::nullopt;

  // Least-squares line through the decay curve between the fit bounds.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(i_low - i_high);
  for (std::size_t i = i_high; i < i_low; ++i) {
    const double x = static_cast<double>(i);
    const double y = 10.0 * std::log10(schroeder[i] / ref);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  if (denom <= 0.0) return std::nullopt;
  const double slope = (m * sxy - sx * sy) / denom;  // dB per tap
  const double intercept = (sy - slope * sx) / m;
  if (slope >= 0.0) return std::nullopt;

  double residual_sq = 0.0;
  for (std::size_t i = i_high; i < i_low; ++i) {
    const double y = 10.0 * std::log10(schroeder[i] / ref);
    const double fitval = intercept + slope * static_cast<double>(i);
    residual_sq += (y - fitval) * (y - fitval);
  }
  const double rms = std::sqrt(residual_sq / m);
  if (rms > kMaxFitResidualDb) return std::nullopt;  // curve is not exponential

  const double slope_db_per_s = slope * static_cast<double>(air.sample_rate);
  T60Estimate est;
  est.model = make_reverb_model(-60.0 / slope_db_per_s, hop, sample_rate);
  est.fit_rms_db = rms;
  return est;
}

double estimate_tail_power(const ImpulseResponse& estimated_path, const ReverbModel& model) {
  const std::size_t len = estimated_path.taps.size();
  if (len < 128) return 0.0;
  const std::size_t quarter = len / 4;
  double energy = 0.0;
  for (std::size_t i = len - quarter; i < len; ++i) {
    energy += estimated_path.taps[i] * estimated_path.taps[i];
  }
  return energy * model.frame_decay;
}

}  // namespace echopost
