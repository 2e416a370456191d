// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echopost/omlsa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace echopost {

namespace {

constexpr double kEulerGamma = 0.5772156649015328606;
constexpr double kLambdaFloor = 1e-12;
constexpr double kVFloor = 1e-10;

double expint_e1_series(double v) {
  // E1(v) = -gamma - ln v + sum (-1)^{k+1} v^k / (k k!)
  double sum = 0.0;
  double power_term = 1.0;  // v^k / k!
  double sign = 1.0;
  for (int k = 1; k <= 64; ++k) {
    power_term *= v / k;
    const double term = sign * power_term / k;
    sum += term;
    if (std::abs(term) < 1e-16 * std::max(1.0, std::abs(sum))) break;
    sign = -sign;
  }
  return -kEulerGamma - std::log(v) + sum;
}

double expint_e1_contfrac(double v) {
  // Modified Lentz evaluation of the standard continued fraction.
  constexpr double tiny = 1e-300;
  double b = v + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 200; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-14) break;
  }
  return h * std::exp(-v);
}

}  // namespace

double expint_e1(double v) {
  if (v <= 0.0) throw std::invalid_argument("expint_e1 requires v > 0");
  if (v > 700.0) return 0.0;  // below double underflow of exp(-v)
  return v < 1.0 ? expint_e1_series(v) : expint_e1_contfrac(v);
}

double a_posteriori_sir(double power, double lambda_total) {
  return power / std::max(lambda_total, kLambdaFloor);
}

double a_priori_sir_dd(double gamma, double prev_gain, double prev_gamma, bool warm,
                       const PostfilterParams& params) {
  if (!warm) return std::max(gamma - 1.0, params.xi_min);
  const double xi = params.beta * prev_gain * prev_gain * prev_gamma +
                    (1.0 - params.beta) * std::max(gamma - 1.0, 0.0);
  return std::max(xi, params.xi_min);
}

double speech_presence_prob(double xi, double gamma, const PostfilterParams& params) {
  if (params.q_absent <= 0.0) return 1.0;
  const double v = std::min(xi * gamma / (1.0 + xi), 50.0);
  const double likelihood = std::exp(v) / (1.0 + xi);
  const double prior_ratio = params.q_absent / (1.0 - params.q_absent);
  const double p = likelihood / (likelihood + prior_ratio);
  return std::clamp(p, 0.0, 1.0);
}

double lsa_gain(double xi, double gamma) {
  const double v = std::max(xi * gamma / (1.0 + xi), kVFloor);
  const double g = xi / (1.0 + xi) * std::exp(0.5 * expint_e1(v));
  return std::min(g, 1e3);
}

double omlsa_gain(double g_lsa, double p, const PostfilterParams& params) {
  const double g = std::pow(g_lsa, p) * std::pow(params.g_min, 1.0 - p);
  return std::clamp(g, params.g_min, 1.0);
}

Postfilter::Postfilter(const PostfilterParams& params, std::size_t bins)
    : params_(params),
      prev_gain_(bins, 1.0),
      prev_gamma_(bins, 1.0),
      presence_(bins, 0.0) {
  if (params.beta < 0.0 || params.beta > 1.0) throw std::invalid_argument("beta out of range");
  if (params.xi_min <= 0.0) throw std::invalid_argument("xi_min must be positive");
  if (params.g_min <= 0.0 || params.g_min > 1.0) throw std::invalid_argument("g_min out of range");
  if (params.q_absent < 0.0 || params.q_absent >= 1.0) {
    throw std::invalid_argument("q_absent out of range");
  }
}

void Postfilter::process_frame(std::span<std::complex<double>> frame,
                               std::span<const double> lambda_total,
                               std::span<double> gains_out, std::span<double> presence_out) {
  const std::size_t bins = prev_gain_.size();
  if (frame.size() != bins || lambda_total.size() != bins) {
    throw std::invalid_argument("bin count mismatch");
  }
  if (!gains_out.empty() && gains_out.size() != bins) {
    throw std::invalid_argument("gains_out size mismatch");
  }
  if (!presence_out.empty() && presence_out.size() != bins) {
    throw std::invalid_argument("presence_out size mismatch");
  }

  for (std::size_t k = 0; k < bins; ++k) {
    const double power = std::norm(frame[k]);
    const double gamma = a_posteriori_sir(power, lambda_total[k]);
    const double xi = a_priori_sir_dd(gamma, prev_gain_[k], prev_gamma_[k], warm_, params_);
    const double p = speech_presence_prob(xi, gamma, params_);
    const double g = omlsa_gain(lsa_gain(xi, gamma), p, params_);

    frame[k] *= g;
    prev_gain_[k] = g;
    prev_gamma_[k] = gamma;
    presence_[k] = p;
    if (!gains_out.empty()) gains_out[k] = g;
    if (!presence_out.empty()) presence_out[k] = p;
  }
  warm_ = true;
}

}  // namespace echopost
