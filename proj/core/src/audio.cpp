// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echopost/audio.hpp"

#include <cmath>

namespace echopost {

bool all_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double signal_power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

double db_to_linear_power(double db) { return std::pow(10.0, db / 10.0); }

double linear_power_to_db(double p) { return 10.0 * std::log10(p); }

}  // namespace echopost
