// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echopost/adaptive_filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "echopost/fft.hpp"

namespace echopost {

namespace {

constexpr double kDivergenceLimit = 1e6;

// Gaussian elimination with partial pivoting on a small dense system.
void solve_small(std::vector<double>& a, std::vector<double>& b, int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    const double diag = a[col * n + col];
    if (diag == 0.0) continue;  // regularized system, should not happen
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / diag;
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= a[r * n + c] * b[c];
    const double diag = a[r * n + r];
    b[r] = diag != 0.0 ? acc / diag : 0.0;
  }
}

}  // namespace

const char* to_string(FilterVariant v) {
  switch (v) {
    case FilterVariant::lms: return "lms";
    case FilterVariant::nlms: return "nlms";
    case FilterVariant::fblms: return "fblms";
    case FilterVariant::pnlms: return "pnlms";
    case FilterVariant::mpnlms: return "mpnlms";
    case FilterVariant::ipnlms: return "ipnlms";
    case FilterVariant::apa: return "apa";
  }
  return "unknown";
}

FilterVariant filter_variant_from_string(const std::string& name) {
  if (name == "lms") return FilterVariant::lms;
  if (name == "nlms") return FilterVariant::nlms;
  if (name == "fblms") return FilterVariant::fblms;
  if (name == "pnlms") return FilterVariant::pnlms;
  if (name == "mpnlms") return FilterVariant::mpnlms;
  if (name == "ipnlms") return FilterVariant::ipnlms;
  if (name == "apa") return FilterVariant::apa;
  throw std::invalid_argument("unknown filter variant: " + name);
}

AdaptiveFilter::AdaptiveFilter(const AdaptiveFilterConfig& config) : config_(config) {
  if (config.taps == 0) throw std::invalid_argument("filter length must be positive");
  if (config.mu <= 0.0 || config.mu >= 2.0) throw std::invalid_argument("mu must be in (0, 2)");
  if (config.effective_delta() <= 0.0) throw std::invalid_argument("delta must be positive");
  if (config.apa_order < 1) throw std::invalid_argument("apa order must be >= 1");
  if (config.variant == FilterVariant::apa && config.apa_order > 8) {
    throw std::invalid_argument("apa order is limited to 8");
  }

  const std::size_t L = config.taps;
  weights_.assign(L, 0.0);

  if (config.variant == FilterVariant::apa) {
    const std::size_t r = L + static_cast<std::size_t>(config.apa_order);
    apa_hist_.assign(2 * r, 0.0);
    apa_mic_.assign(config.apa_order, 0.0);
    apa_gram_.assign(static_cast<std::size_t>(config.apa_order) * config.apa_order, 0.0);
  } else if (config.variant == FilterVariant::fblms) {
    fblms_weights_f_.assign(L + 1, {0.0, 0.0});
    fblms_power_.assign(L + 1, 0.0);
    fblms_prev_block_.assign(L, 0.0);
  } else {
    hist_.assign(2 * L, 0.0);
  }
}

std::size_t AdaptiveFilter::block_size() const { return config_.taps; }

std::vector<double> AdaptiveFilter::weights() const {
  if (config_.variant != FilterVariant::fblms) return weights_;
  // fblms holds weights over 2L points; the first L are the filter.
  std::vector<std::complex<double>> full(fblms_weights_f_.begin(), fblms_weights_f_.end());
  auto w = fft::irfft(full, 2 * config_.taps);
  w.resize(config_.taps);
  return w;
}

void AdaptiveFilter::set_weights(std::span<const double> w) {
  if (w.size() != config_.taps) throw std::invalid_argument("weight size mismatch");
  if (config_.variant == FilterVariant::fblms) {
    std::vector<double> padded(2 * config_.taps, 0.0);
    std::copy(w.begin(), w.end(), padded.begin());
    fblms_weights_f_ = fft::rfft(padded, 2 * config_.taps);
  } else {
    weights_.assign(w.begin(), w.end());
  }
}

void AdaptiveFilter::check_divergence(double max_abs_w) {
  if (!(max_abs_w <= kDivergenceLimit)) status_ = FilterStatus::diverged;
}

AdaptiveFilter::SampleResult AdaptiveFilter::process_sample(double far_end, double mic) {
  if (!std::isfinite(far_end) || !std::isfinite(mic)) {
    throw std::invalid_argument("non-finite sample");
  }
  if (config_.variant == FilterVariant::fblms) {
    throw std::invalid_argument("fblms is block-based; use process_block");
  }

  const std::size_t L = config_.taps;
  ++samples_seen_;

  if (config_.variant == FilterVariant::apa) {
    const std::size_t r = L + static_cast<std::size_t>(config_.apa_order);
    const int P = config_.apa_order;
    // Doubled-write ring: the window ending at apa_hist_[head+r] is
    // contiguous, newest last.
    const std::size_t head = samples_seen_ % r;
    const double* win = apa_hist_.data() + ((samples_seen_ - 1) % r) + r;  // previous window

    // Shift the Gram diagonally (lag structure moves by one sample), then
    // rebuild the first row incrementally: add the new lag products, drop
    // the ones that slid past the filter length.
    for (int p = P - 1; p >= 1; --p) {
      for (int q = P - 1; q >= 1; --q) {
        apa_gram_[p * P + q] = apa_gram_[(p - 1) * P + (q - 1)];
      }
    }
    std::vector<double> new_row(P);
    for (int q = 0; q < P; ++q) {
      const double add = far_end * (q == 0 ? far_end : win[-(q - 1)]);
      const double drop =
          win[-(static_cast<int>(L) - 1)] * win[-(static_cast<int>(L) - 1 + q)];
      new_row[q] = apa_gram_[q] + add - drop;
    }
    apa_hist_[head] = far_end;
    apa_hist_[head + r] = far_end;
    const double* w_end = apa_hist_.data() + head + r;

    if (samples_seen_ % 65536 == 0) {
      refresh_apa_gram();  // periodic exact rebuild against drift
    } else {
      for (int q = 0; q < P; ++q) {
        apa_gram_[q] = new_row[q];
        apa_gram_[q * P] = new_row[q];
      }
    }

    for (int p = P - 1; p >= 1; --p) apa_mic_[p] = apa_mic_[p - 1];
    apa_mic_[0] = mic;

    // Errors for the last P desired samples under the current weights.
    std::vector<double> errs(P);
    double y0 = 0.0;
    for (int p = 0; p < P; ++p) {
      double acc = 0.0;
      const double* xp = w_end - p;
      for (std::size_t m = 0; m < L; ++m) acc += weights_[m] * xp[-static_cast<int>(m)];
      errs[p] = apa_mic_[p] - acc;
      if (p == 0) y0 = acc;
    }
    SampleResult result{y0, errs[0]};

    if (adaptation_enabled_ && status_ == FilterStatus::ok) {
      std::vector<double> a(apa_gram_);
      for (int p = 0; p < P; ++p) a[p * P + p] += config_.apa_delta;
      std::vector<double> s(errs);
      solve_small(a, s, P);
      double max_w = 0.0;
      for (int p = 0; p < P; ++p) {
        const double step = config_.mu * s[p];
        if (step == 0.0) continue;
        const double* xp = w_end - p;
        for (std::size_t m = 0; m < L; ++m) weights_[m] += step * xp[-static_cast<int>(m)];
      }
      for (std::size_t m = 0; m < L; ++m) max_w = std::max(max_w, std::abs(weights_[m]));
      check_divergence(max_w);
    }
    return result;
  }

  // lms / nlms / pnlms / mpnlms / ipnlms
  std::size_t head = samples_seen_ % L;
  const double* prev_end = hist_.data() + ((samples_seen_ - 1) % L) + L;
  const double dropped = prev_end[-(static_cast<int>(L) - 1)];
  hist_[head] = far_end;
  hist_[head + L] = far_end;
  const double* w_end = hist_.data() + head + L;

  xdotx_ += far_end * far_end - dropped * dropped;
  if (refresh_countdown_ == 0) {
    double acc = 0.0;
    for (std::size_t m = 0; m < L; ++m) acc += w_end[-static_cast<int>(m)] * w_end[-static_cast<int>(m)];
    xdotx_ = acc;
    refresh_countdown_ = 4096;
  }
  --refresh_countdown_;

  double y = 0.0;
  for (std::size_t m = 0; m < L; ++m) y += weights_[m] * w_end[-static_cast<int>(m)];
  const double e = mic - y;

  if (adaptation_enabled_ && status_ == FilterStatus::ok) {
    const double* x = w_end;
    const double delta = config_.effective_delta();
    double max_w = 0.0;
    switch (config_.variant) {
      case FilterVariant::lms: {
        const double step =
            config_.mu / (static_cast<double>(L) * config_.lms_power_norm) * e;
        for (std::size_t m = 0; m < L; ++m) {
          weights_[m] += step * x[-static_cast<int>(m)];
          max_w = std::max(max_w, std::abs(weights_[m]));
        }
        break;
      }
      case FilterVariant::nlms: {
        const double step = config_.mu * e / (std::max(xdotx_, 0.0) + delta);
        for (std::size_t m = 0; m < L; ++m) {
          weights_[m] += step * x[-static_cast<int>(m)];
          max_w = std::max(max_w, std::abs(weights_[m]));
        }
        break;
      }
      case FilterVariant::pnlms:
      case FilterVariant::mpnlms: {
        const bool mu_law = config_.variant == FilterVariant::mpnlms;
        const double log_denom = std::log(1.0 + config_.mu_law);
        double f_max = 0.0;
        for (std::size_t m = 0; m < L; ++m) f_max = std::max(f_max, std::abs(weights_[m]));
        if (mu_law) f_max = std::log(1.0 + config_.mu_law * f_max) / log_denom;
        const double floor = config_.rho * std::max(config_.delta_p, f_max);

        last_gains_.resize(L);
        double gain_sum = 0.0;
        for (std::size_t m = 0; m < L; ++m) {
          double f = std::abs(weights_[m]);
          if (mu_law) f = std::log(1.0 + config_.mu_law * f) / log_denom;
          last_gains_[m] = std::max(floor, f);
          gain_sum += last_gains_[m];
        }
        const double mean_gain = gain_sum / static_cast<double>(L);
        double weighted_norm = 0.0;
        for (std::size_t m = 0; m < L; ++m) {
          last_gains_[m] /= mean_gain;
          const double xm = x[-static_cast<int>(m)];
          weighted_norm += last_gains_[m] * xm * xm;
        }
        const double step = config_.mu * e / (weighted_norm + delta);
        for (std::size_t m = 0; m < L; ++m) {
          weights_[m] += step * last_gains_[m] * x[-static_cast<int>(m)];
          max_w = std::max(max_w, std::abs(weights_[m]));
        }
        break;
      }
      case FilterVariant::ipnlms: {
        double l1 = 0.0;
        for (std::size_t m = 0; m < L; ++m) l1 += std::abs(weights_[m]);
        const double uniform = (1.0 - config_.alpha) / (2.0 * static_cast<double>(L));
        const double prop_scale = (1.0 + config_.alpha) / (2.0 * l1 + 1e-12);
        last_gains_.resize(L);
        double weighted_norm = 0.0;
        for (std::size_t m = 0; m < L; ++m) {
          last_gains_[m] = uniform + prop_scale * std::abs(weights_[m]);
          const double xm = x[-static_cast<int>(m)];
          weighted_norm += last_gains_[m] * xm * xm;
        }
        const double delta_ip = delta * (1.0 - config_.alpha) / (2.0 * static_cast<double>(L));
        const double step = config_.mu * e / (weighted_norm + delta_ip);
        for (std::size_t m = 0; m < L; ++m) {
          weights_[m] += step * last_gains_[m] * x[-static_cast<int>(m)];
          max_w = std::max(max_w, std::abs(weights_[m]));
        }
        break;
      }
      default:
        break;
    }
    check_divergence(max_w);
  }
  return {y, e};
}

void AdaptiveFilter::refresh_apa_gram() {
  const std::size_t L = config_.taps;
  const int P = config_.apa_order;
  const std::size_t r = L + static_cast<std::size_t>(P);
  const double* w_end = apa_hist_.data() + (samples_seen_ % r) + r;
  for (int p = 0; p < P; ++p) {
    for (int q = p; q < P; ++q) {
      double acc = 0.0;
      for (std::size_t m = 0; m < L; ++m) {
        acc += w_end[-(p + static_cast<int>(m))] * w_end[-(q + static_cast<int>(m))];
      }
      apa_gram_[p * P + q] = acc;
      apa_gram_[q * P + p] = acc;
    }
  }
}

void AdaptiveFilter::process_block(std::span<const double> far_end,
                                   std::span<const double> mic,
                                   std::span<double> echo_estimate, std::span<double> error) {
  if (config_.variant != FilterVariant::fblms) {
    throw std::invalid_argument("process_block requires the fblms variant");
  }
  const std::size_t L = config_.taps;
  if (far_end.size() != L || mic.size() != L || echo_estimate.size() != L ||
      error.size() != L) {
    throw std::invalid_argument("fblms block length must equal the filter length");
  }
  for (std::size_t i = 0; i < L; ++i) {
    if (!std::isfinite(far_end[i]) || !std::isfinite(mic[i])) {
      throw std::invalid_argument("non-finite sample");
    }
  }

  const std::size_t n = 2 * L;
  std::vector<double> segment(n);
  std::copy(fblms_prev_block_.begin(), fblms_prev_block_.end(), segment.begin());
  std::copy(far_end.begin(), far_end.end(), segment.begin() + static_cast<std::ptrdiff_t>(L));
  auto x_f = fft::rfft(segment, n);

  std::vector<std::complex<double>> y_f(x_f.size());
  for (std::size_t k = 0; k < x_f.size(); ++k) y_f[k] = x_f[k] * fblms_weights_f_[k];
  auto y_full = fft::irfft(y_f, n);
  for (std::size_t i = 0; i < L; ++i) {
    echo_estimate[i] = y_full[L + i];  // overlap-save: second half is valid
    error[i] = mic[i] - echo_estimate[i];
  }

  if (adaptation_enabled_ && status_ == FilterStatus::ok) {
    const double lambda = config_.fblms_power_smooth;
    const double delta_f = config_.fblms_delta * static_cast<double>(n);
    for (std::size_t k = 0; k < x_f.size(); ++k) {
      const double px = std::norm(x_f[k]);
      fblms_power_[k] = samples_seen_ == 0 ? px : lambda * fblms_power_[k] + (1.0 - lambda) * px;
    }

    std::vector<double> padded_err(n, 0.0);
    std::copy(error.begin(), error.end(), padded_err.begin() + static_cast<std::ptrdiff_t>(L));
    auto e_f = fft::rfft(padded_err, n);

    std::vector<std::complex<double>> grad_f(x_f.size());
    for (std::size_t k = 0; k < x_f.size(); ++k) {
      grad_f[k] = config_.mu * std::conj(x_f[k]) * e_f[k] / (fblms_power_[k] + delta_f);
    }
    // Gradient constraint: project onto causal length-L filters.
    auto grad_t = fft::irfft(grad_f, n);
    std::fill(grad_t.begin() + static_cast<std::ptrdiff_t>(L), grad_t.end(), 0.0);
    auto constrained = fft::rfft(grad_t, n);
    for (std::size_t k = 0; k < x_f.size(); ++k) fblms_weights_f_[k] += constrained[k];

    auto w = weights();
    double max_w = 0.0;
    for (double v : w) max_w = std::max(max_w, std::abs(v));
    check_divergence(max_w);
  }

  std::copy(far_end.begin(), far_end.end(), fblms_prev_block_.begin());
  samples_seen_ += L;
}

void AdaptiveFilter::process_signal(std::span<const double> far_end,
                                    std::span<const double> mic,
                                    std::span<double> echo_estimate, std::span<double> error) {
  if (far_end.size() != mic.size() || echo_estimate.size() != far_end.size() ||
      error.size() != far_end.size()) {
    throw std::invalid_argument("signal length mismatch");
  }
  const std::size_t n = far_end.size();

  if (config_.variant != FilterVariant::fblms) {
    for (std::size_t i = 0; i < n; ++i) {
      auto r = process_sample(far_end[i], mic[i]);
      echo_estimate[i] = r.echo_estimate;
      error[i] = r.error;
    }
    return;
  }

  const std::size_t L = config_.taps;
  std::size_t pos = 0;
  while (pos + L <= n) {
    process_block(far_end.subspan(pos, L), mic.subspan(pos, L),
                  echo_estimate.subspan(pos, L), error.subspan(pos, L));
    pos += L;
  }
  if (pos < n) {
    // Trailing partial block: frozen-weight direct filtering against the
    // retained history.
    const auto w = weights();
    for (std::size_t i = pos; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t m = 0; m < L; ++m) {
        const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(m);
        double x;
        if (idx >= static_cast<std::ptrdiff_t>(pos)) {
          x = far_end[static_cast<std::size_t>(idx)];
        } else {
          const std::ptrdiff_t back = static_cast<std::ptrdiff_t>(pos) - idx;  // 1..L
          if (back > static_cast<std::ptrdiff_t>(L)) { x = 0.0; }
          else { x = fblms_prev_block_[L - static_cast<std::size_t>(back)]; }
        }
        acc += w[m] * x;
      }
      echo_estimate[i] = acc;
      error[i] = mic[i] - acc;
    }
  }
}

double misalignment_db(std::span<const double> estimated, std::span<const double> reference) {
  const std::size_t n = std::min(estimated.size(), reference.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = estimated[i] - reference[i];
    num += d * d;
    den += reference[i] * reference[i];
  }
  if (den <= 0.0) throw std::invalid_argument("reference path has zero norm");
  if (num <= 0.0) return -300.0;
  return std::max(10.0 * std::log10(num / den), -300.0);
}

double misalignment_db(const AdaptiveFilter& filter, const ImpulseResponse& true_air) {
  const auto w = filter.weights();
  std::span<const double> ref(true_air.taps);
  if (ref.size() > w.size()) ref = ref.subspan(0, w.size());
  return misalignment_db(w, ref);
}

}  // namespace echopost
