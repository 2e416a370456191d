// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOPOST_ADAPTIVE_FILTER_HPP
#define ECHOPOST_ADAPTIVE_FILTER_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "echopost/audio.hpp"

namespace echopost {

enum class FilterVariant { lms, nlms, fblms, pnlms, mpnlms, ipnlms, apa };

const char* to_string(FilterVariant v);
FilterVariant filter_variant_from_string(const std::string& name);

struct AdaptiveFilterConfig {
  FilterVariant variant = FilterVariant::nlms;
  std::size_t taps = 1024;
  double mu = 0.5;
  double delta = -1.0;  // < 0 selects 1e-6 * taps
  // Proportionate family.
  double rho = 0.01;
  double delta_p = 0.01;
  double mu_law = 1000.0;
  double alpha = -0.75;
  // APA.
  int apa_order = 4;
  double apa_delta = 1e-3;
  // LMS step is mu / (taps * lms_power_norm); the nominal excitation power
  // keeps the step fixed rather than data-normalized.
  double lms_power_norm = 0.01;
  // FBLMS per-bin power smoothing and regularization.
  double fblms_power_smooth = 0.9;
  double fblms_delta = 1e-6;

  double effective_delta() const { return delta < 0.0 ? 1e-6 * static_cast<double>(taps) : delta; }
};

enum class FilterStatus { ok, diverged };

/// Time-domain adaptive echo canceller. One instance is single-owner and
/// must see samples in order; prediction is y = w . x_history and the
/// update rule depends on the variant.
class AdaptiveFilter {
 public:
  explicit AdaptiveFilter(const AdaptiveFilterConfig& config);

  struct SampleResult {
    double echo_estimate = 0.0;
    double error = 0.0;
  };

  /// Per-sample path for every variant except fblms.
  SampleResult process_sample(double far_end, double mic);

  /// fblms path; block length must equal the filter length. Outputs may
  /// alias neither input.
  void process_block(std::span<const double> far_end, std::span<const double> mic,
                     std::span<double> echo_estimate, std::span<double> error);

  /// Runs whole signals through the variant-appropriate path. For fblms a
  /// trailing partial block is filtered with frozen weights.
  void process_signal(std::span<const double> far_end, std::span<const double> mic,
                      std::span<double> echo_estimate, std::span<double> error);

  void set_adaptation(bool enabled) { adaptation_enabled_ = enabled; }
  bool adaptation_enabled() const { return adaptation_enabled_; }

  FilterStatus status() const { return status_; }
  std::size_t length() const { return config_.taps; }
  std::size_t block_size() const;
  const AdaptiveFilterConfig& config() const { return config_; }

  /// Time-domain coefficients (fblms weights are transformed back on demand).
  std::vector<double> weights() const;
  void set_weights(std::span<const double> w);

  /// Per-coefficient step gains of the most recent proportionate update;
  /// empty for other variants.
  std::span<const double> last_gains() const { return last_gains_; }

 private:
  void update_lms_family(double error);
  void update_apa(double mic);
  void fblms_update_block(std::span<const double> error_block);
  void refresh_apa_gram();
  void check_divergence(double max_abs_w);

  AdaptiveFilterConfig config_;
  bool adaptation_enabled_ = true;
  FilterStatus status_ = FilterStatus::ok;

  // Far-end history, most recent first: hist_[0] is x(n).
  std::vector<double> hist_;
  std::vector<double> weights_;

  // NLMS running normalization with periodic exact refresh.
  double xdotx_ = 0.0;
  std::size_t refresh_countdown_ = 0;

  // Proportionate gains scratch.
  std::vector<double> last_gains_;

  // APA: extended history plus incrementally maintained Gram matrix.
  std::vector<double> apa_hist_;   // doubled ring over taps + order samples
  std::vector<double> apa_mic_;    // last order desired samples
  std::vector<double> apa_gram_;   // order x order
  std::size_t samples_seen_ = 0;

  // FBLMS buffers (frequency-domain weights over 2 * taps points).
  std::vector<std::complex<double>> fblms_weights_f_;
  std::vector<double> fblms_power_;
  std::vector<double> fblms_prev_block_;
};

/// 20 log10(||estimated - reference|| / ||reference||) over the first
/// min(lengths) taps, floored at -300 dB.
double misalignment_db(std::span<const double> estimated, std::span<const double> reference);
double misalignment_db(const AdaptiveFilter& filter, const ImpulseResponse& true_air);

}  // namespace echopost

#endif  // ECHOPOST_ADAPTIVE_FILTER_HPP
