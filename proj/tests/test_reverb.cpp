// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "echopost/reverb.hpp"
#include "echopost/synth.hpp"

using namespace echopost;

TEST_CASE("reverb model fields follow the decay definitions") {
  const auto m = make_reverb_model(0.3, 256, 16000);
  CHECK(m.decay_rate == doctest::Approx(3.0 * std::numbers::ln10 / 0.3).epsilon(1e-12));
  CHECK(m.frame_decay ==
        doctest::Approx(std::exp(-2.0 * m.decay_rate * 256.0 / 16000.0)).epsilon(1e-12));
  CHECK(m.frame_decay == doctest::Approx(0.47863009232).epsilon(1e-9));
}

TEST_CASE("frame decay grows with t60") {
  const double fd02 = make_reverb_model(0.2, 256, 16000).frame_decay;
  const double fd04 = make_reverb_model(0.4, 256, 16000).frame_decay;
  const double fd08 = make_reverb_model(0.8, 256, 16000).frame_decay;
  CHECK(fd02 < fd04);
  CHECK(fd04 < fd08);
}

TEST_CASE("t60 estimation recovers the construction value") {
  for (double t60 : {0.2, 0.3, 0.6}) {
    const auto len = static_cast<std::size_t>(0.8 * t60 * 16000);  // ~48 dB of decay
    const auto air = generate_synthetic_air(t60, 24, len, 16000, 17);
    const auto est = estimate_t60(air, 256, 16000);
    REQUIRE(est.has_value());
    CHECK(est->model.t60_s == doctest::Approx(t60).epsilon(0.10));
  }
}

TEST_CASE("t60 estimation ignores overall amplitude") {
  const auto air = generate_synthetic_air(0.35, 8, 4480, 16000, 21);
  ImpulseResponse scaled = air;
  for (auto& t : scaled.taps) t *= 12.5;
  const auto a = estimate_t60(air, 256, 16000);
  const auto b = estimate_t60(scaled, 256, 16000);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->model.t60_s == doctest::Approx(b->model.t60_s).epsilon(1e-9));
}

TEST_CASE("flat noise fails t60 estimation") {
  GaussianRng rng(9);
  ImpulseResponse flat;
  flat.taps.resize(8192);
  for (auto& t : flat.taps) t = rng.next();
  flat.direct_delay = 0;
  CHECK_FALSE(estimate_t60(flat, 256, 16000).has_value());
}

TEST_CASE("too little decay range fails t60 estimation") {
  // 1024 taps at t60 = 0.3 span only ~13 dB, short of the -25 dB bound.
  const auto air = generate_synthetic_air(0.3, 16, 1024, 16000, 33);
  CHECK_FALSE(estimate_t60(air, 256, 16000).has_value());

  ImpulseResponse tiny;
  tiny.taps.assign(16, 0.1);
  CHECK_FALSE(estimate_t60(tiny, 256, 16000).has_value());
}

TEST_CASE("tail power estimate") {
  const auto model = make_reverb_model(0.3, 256, 16000);

  SUBCASE("zero path gives zero") {
    ImpulseResponse zero;
    zero.taps.assign(512, 0.0);
    CHECK(estimate_tail_power(zero, model) == 0.0);
  }
  SUBCASE("short paths give zero") {
    ImpulseResponse shorty;
    shorty.taps.assign(64, 0.5);
    CHECK(estimate_tail_power(shorty, model) == 0.0);
  }
  SUBCASE("energy scales quadratically") {
    const auto air = generate_synthetic_air(0.3, 0, 1024, 16000, 3);
    ImpulseResponse twice = air;
    for (auto& t : twice.taps) t *= 2.0;
    const double w0 = estimate_tail_power(air, model);
    const double w0_2 = estimate_tail_power(twice, model);
    CHECK(w0 > 0.0);
    CHECK(w0_2 == doctest::Approx(4.0 * w0).epsilon(1e-12));
  }
  SUBCASE("approximates the true beyond-length tail energy") {
    // Build a long response, truncate the identified part to L taps, and
    // compare w0 against the energy that actually lies beyond L.
    const std::size_t L = 1024;
    const auto fast_model = make_reverb_model(0.2, 256, 16000);
    const auto full = generate_synthetic_air(0.2, 0, 4 * L, 16000, 29);
    ImpulseResponse trunc;
    trunc.sample_rate = full.sample_rate;
    trunc.taps.assign(full.taps.begin(), full.taps.begin() + L);
    double true_tail = 0.0;
    for (std::size_t i = L; i < full.taps.size(); ++i) {
      true_tail += full.taps[i] * full.taps[i];
    }
    const double w0 = estimate_tail_power(trunc, fast_model);
    CHECK(w0 > 0.5 * true_tail);
    CHECK(w0 < 2.0 * true_tail);
  }
}
