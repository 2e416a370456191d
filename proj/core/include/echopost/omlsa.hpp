// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOPOST_OMLSA_HPP
#define ECHOPOST_OMLSA_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace echopost {

struct PostfilterParams {
  double beta = 0.98;            // decision-directed weighting
  double xi_min = 0.03162277660168379;  // 10^(-15/10) a priori SIR floor
  double g_min = 0.015848931924611134;  // 10^(-18/10) spectral gain floor
  double q_absent = 0.5;         // prior speech-absence probability
};

/// First exponential integral E1(v), series for v < 1 and continued
/// fraction otherwise.
double expint_e1(double v);

/// gamma = |Y|^2 / max(lambda, 1e-12).
double a_posteriori_sir(double power, double lambda_total);

/// Decision-directed a priori SIR. warm=false selects the first-frame rule
/// xi = max(gamma - 1, xi_min).
double a_priori_sir_dd(double gamma, double prev_gain, double prev_gamma, bool warm,
                       const PostfilterParams& params);

/// Gaussian-model speech presence posterior with fixed prior q_absent.
double speech_presence_prob(double xi, double gamma, const PostfilterParams& params);

/// Log-spectral-amplitude gain xi/(1+xi) * exp(E1(v)/2), v = xi*gamma/(1+xi).
double lsa_gain(double xi, double gamma);

/// Presence-weighted geometric mean with the gain floor, clamped to
/// [g_min, 1].
double omlsa_gain(double g_lsa, double p, const PostfilterParams& params);

/// Streaming per-frame postfilter: gamma -> xi -> p -> G, applied in place.
class Postfilter {
 public:
  Postfilter(const PostfilterParams& params, std::size_t bins);

  /// frame is modified in place (S = G * Y). gains/presence, when non-empty,
  /// receive the per-bin G and p of this frame.
  void process_frame(std::span<std::complex<double>> frame,
                     std::span<const double> lambda_total,
                     std::span<double> gains_out = {},
                     std::span<double> presence_out = {});

  std::span<const double> last_presence() const { return presence_; }
  bool warm() const { return warm_; }

 private:
  PostfilterParams params_;
  std::vector<double> prev_gain_;
  std::vector<double> prev_gamma_;
  std::vector<double> presence_;
  bool warm_ = false;
};

}  // namespace echopost

#endif  // ECHOPOST_OMLSA_HPP
