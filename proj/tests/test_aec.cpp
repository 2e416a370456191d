// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "echopost/adaptive_filter.hpp"
#include "echopost/synth.hpp"

using namespace echopost;

namespace {

AdaptiveFilterConfig base_config(FilterVariant v, std::size_t taps) {
  AdaptiveFilterConfig c;
  c.variant = v;
  c.taps = taps;
  return c;
}

// Identification run: white far end through a known path plus measurement
// noise; returns the trajectory of misalignment probes.
struct IdentRun {
  std::vector<double> misalign_db;
  std::vector<double> times_s;
};

IdentRun identify(AdaptiveFilter& filter, const ImpulseResponse& path, double duration_s,
                  double snr_db, std::uint64_t seed, std::size_t probe_step = 256) {
  const int fs = 16000;
  auto far = generate_white_noise(duration_s, fs, seed);
  auto echo = convolve(far, path);
  auto noise = generate_white_noise(duration_s, fs, seed + 9000);
  const double gain =
      std::sqrt(signal_power(echo.samples) /
                (signal_power(noise.samples) * db_to_linear_power(snr_db)));

  IdentRun run;
  const std::size_t n = far.samples.size();
  if (filter.config().variant == FilterVariant::fblms) {
    const std::size_t L = filter.length();
    std::vector<double> mic(n), eo(L), er(L);
    for (std::size_t i = 0; i < n; ++i) mic[i] = echo.samples[i] + gain * noise.samples[i];
    for (std::size_t pos = 0; pos + L <= n; pos += L) {
      filter.process_block({far.samples.data() + pos, L}, {mic.data() + pos, L}, eo, er);
      run.misalign_db.push_back(misalignment_db(filter, path));
      run.times_s.push_back(static_cast<double>(pos + L) / fs);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double mic = echo.samples[i] + gain * noise.samples[i];
      filter.process_sample(far.samples[i], mic);
      if (i % probe_step == 0) {
        run.misalign_db.push_back(misalignment_db(filter, path));
        run.times_s.push_back(static_cast<double>(i) / fs);
      }
    }
  }
  return run;
}

double time_to_db(const IdentRun& run, double threshold_db) {
  for (std::size_t i = 0; i < run.misalign_db.size(); ++i) {
    if (run.misalign_db[i] <= threshold_db) return run.times_s[i];
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

TEST_CASE("zero far-end history stalls every variant") {
  for (auto v : {FilterVariant::lms, FilterVariant::nlms, FilterVariant::pnlms,
                 FilterVariant::mpnlms, FilterVariant::ipnlms, FilterVariant::apa}) {
    AdaptiveFilter f(base_config(v, 16));
    const auto r = f.process_sample(0.0, 0.7);
    CHECK(r.echo_estimate == 0.0);
    CHECK(r.error == 0.7);
    for (double w : f.weights()) CHECK(w == 0.0);
  }
}

TEST_CASE("converged one-tap system is a fixed point") {
  for (auto v : {FilterVariant::lms, FilterVariant::nlms, FilterVariant::pnlms,
                 FilterVariant::mpnlms, FilterVariant::ipnlms, FilterVariant::apa}) {
    AdaptiveFilter f(base_config(v, 4));
    std::vector<double> w = {0.5, 0.0, 0.0, 0.0};
    f.set_weights(w);
    const auto r = f.process_sample(1.0, 0.5);
    CHECK(r.echo_estimate == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(r.error) < 1e-15);
    const auto after = f.weights();
    for (std::size_t i = 0; i < 4; ++i) CHECK(after[i] == doctest::Approx(w[i]).epsilon(1e-12));
  }
}

TEST_CASE("nlms single step matches the closed-form recursion") {
  // w+ = w + mu * e * x / (x.x + delta); from w=0, x=1, mic=0.5, mu=1 the
  // weight lands on 0.5 as delta -> 0.
  auto cfg = base_config(FilterVariant::nlms, 8);
  cfg.mu = 1.0;
  cfg.delta = 1e-15;
  AdaptiveFilter f(cfg);
  f.process_sample(1.0, 0.5);
  CHECK(std::abs(f.weights()[0] - 0.5) < 1e-12);

  // generic step against independently computed arithmetic
  auto cfg2 = base_config(FilterVariant::nlms, 3);
  cfg2.mu = 0.7;
  cfg2.delta = 0.25;
  AdaptiveFilter g(cfg2);
  g.set_weights(std::vector<double>{0.1, -0.2, 0.3});
  g.process_sample(0.5, 0.0);   // history [0.5 0 0]
  g.process_sample(-1.0, 0.4);  // history [-1 0.5 0]

  std::vector<double> w = {0.1, -0.2, 0.3};
  std::vector<double> x1 = {0.5, 0.0, 0.0};
  double e1 = 0.0 - (w[0] * x1[0] + w[1] * x1[1] + w[2] * x1[2]);
  double denom1 = x1[0] * x1[0] + 0.25;
  for (int i = 0; i < 3; ++i) w[i] += 0.7 * e1 * x1[i] / denom1;
  std::vector<double> x2 = {-1.0, 0.5, 0.0};
  double e2 = 0.4 - (w[0] * x2[0] + w[1] * x2[1] + w[2] * x2[2]);
  double denom2 = x2[0] * x2[0] + x2[1] * x2[1] + 0.25;
  for (int i = 0; i < 3; ++i) w[i] += 0.7 * e2 * x2[i] / denom2;

  const auto got = g.weights();
  for (int i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(w[i]).epsilon(1e-12));
}

TEST_CASE("lms single step matches the closed-form recursion") {
  auto cfg = base_config(FilterVariant::lms, 4);
  cfg.mu = 0.5;
  cfg.lms_power_norm = 0.01;
  AdaptiveFilter f(cfg);
  const double x = 0.3, d = 0.2;
  f.process_sample(x, d);
  // w+ = mu/(L * power_norm) * e * x with e = d
  const double expected = 0.5 / (4 * 0.01) * d * x;
  CHECK(f.weights()[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("apa of order one reduces to nlms") {
  auto nlms_cfg = base_config(FilterVariant::nlms, 32);
  nlms_cfg.delta = 1e-4;
  auto apa_cfg = base_config(FilterVariant::apa, 32);
  apa_cfg.apa_order = 1;
  apa_cfg.apa_delta = 1e-4;

  AdaptiveFilter nlms(nlms_cfg), apa(apa_cfg);
  GaussianRng rng(17);
  for (int i = 0; i < 400; ++i) {
    const double far = rng.next();
    const double mic = 0.3 * far + 0.01 * rng.next();
    const auto a = nlms.process_sample(far, mic);
    const auto b = apa.process_sample(far, mic);
    CHECK(a.error == doctest::Approx(b.error).epsilon(1e-9));
  }
  const auto wn = nlms.weights();
  const auto wa = apa.weights();
  for (std::size_t i = 0; i < wn.size(); ++i) {
    CHECK(wa[i] == doctest::Approx(wn[i]).epsilon(1e-9));
  }
}

TEST_CASE("ipnlms with alpha = -1 follows nlms exactly") {
  auto nlms_cfg = base_config(FilterVariant::nlms, 64);
  auto ip_cfg = base_config(FilterVariant::ipnlms, 64);
  ip_cfg.alpha = -1.0;

  AdaptiveFilter nlms(nlms_cfg), ip(ip_cfg);
  GaussianRng rng(23);
  const auto path = generate_sparse_air(64, 4, 16000, 5);
  std::vector<double> hist(64, 0.0);
  for (int i = 0; i < 500; ++i) {
    const double far = rng.next();
    for (std::size_t m = 63; m > 0; --m) hist[m] = hist[m - 1];
    hist[0] = far;
    double echo = 0.0;
    for (std::size_t m = 0; m < 64; ++m) echo += 0.1 * path.taps[m] * hist[m];
    nlms.process_sample(far, echo);
    ip.process_sample(far, echo);
    const auto wn = nlms.weights();
    const auto wi = ip.weights();
    for (std::size_t m = 0; m < 64; ++m) CHECK(std::abs(wn[m] - wi[m]) < 1e-12);
  }
}

TEST_CASE("proportionate gains respect the stall floors") {
  GaussianRng rng(29);
  const auto path = generate_sparse_air(128, 4, 16000, 7);

  for (auto v : {FilterVariant::pnlms, FilterVariant::mpnlms}) {
    auto cfg = base_config(v, 128);
    AdaptiveFilter f(cfg);
    std::vector<double> hist(128, 0.0);
    for (int i = 0; i < 600; ++i) {
      const double far = rng.next();
      for (std::size_t m = 127; m > 0; --m) hist[m] = hist[m - 1];
      hist[0] = far;
      double echo = 0.0;
      for (std::size_t m = 0; m < 128; ++m) echo += 0.1 * path.taps[m] * hist[m];
      f.process_sample(far, echo);
      const auto gains = f.last_gains();
      REQUIRE(gains.size() == 128);
      double g_max = 0.0;
      for (double g : gains) g_max = std::max(g_max, g);
      for (double g : gains) CHECK(g >= 0.01 * g_max - 1e-12);  // rho = 0.01
    }
  }

  auto ip_cfg = base_config(FilterVariant::ipnlms, 128);
  AdaptiveFilter ip(ip_cfg);
  const double floor = (1.0 - ip_cfg.alpha) / (2.0 * 128.0);
  std::vector<double> hist(128, 0.0);
  for (int i = 0; i < 600; ++i) {
    const double far = rng.next();
    for (std::size_t m = 127; m > 0; --m) hist[m] = hist[m - 1];
    hist[0] = far;
    double echo = 0.0;
    for (std::size_t m = 0; m < 128; ++m) echo += 0.1 * path.taps[m] * hist[m];
    ip.process_sample(far, echo);
    for (double g : ip.last_gains()) CHECK(g >= floor - 1e-15);
  }
}

TEST_CASE("fblms frozen weights match direct convolution") {
  const std::size_t L = 64;
  auto cfg = base_config(FilterVariant::fblms, L);
  AdaptiveFilter f(cfg);
  GaussianRng rng(31);
  std::vector<double> w(L);
  for (auto& v : w) v = rng.next() * 0.1;
  f.set_weights(w);
  f.set_adaptation(false);

  const std::size_t n = 6 * L;
  std::vector<double> far(n), mic(n, 0.0), echo(n), err(n);
  for (auto& v : far) v = rng.next();
  f.process_signal(far, mic, echo, err);

  for (std::size_t i = 0; i < n; ++i) {
    double ref = 0.0;
    for (std::size_t m = 0; m < L && m <= i; ++m) ref += w[m] * far[i - m];
    CHECK(std::abs(echo[i] - ref) < 1e-9);
  }
}

TEST_CASE("fblms zero input leaves weights untouched") {
  const std::size_t L = 64;
  AdaptiveFilter f(base_config(FilterVariant::fblms, L));
  std::vector<double> far(L, 0.0), mic(L, 0.0), echo(L), err(L);
  f.process_block(far, mic, echo, err);
  for (double v : echo) CHECK(v == 0.0);
  for (double v : err) CHECK(v == 0.0);
  for (double v : f.weights()) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("fblms identifies a 64-tap path and agrees with the sample-domain oracle") {
  const std::size_t L = 64;
  const auto path = generate_sparse_air(L, 8, 16000, 41);
  ImpulseResponse scaled = path;
  for (auto& t : scaled.taps) t *= 0.1;

  AdaptiveFilter fblms(base_config(FilterVariant::fblms, L));
  auto run_f = identify(fblms, scaled, 4.0, 30.0, 91);
  CHECK(time_to_db(run_f, -20.0) <= 4.0);

  AdaptiveFilter nlms(base_config(FilterVariant::nlms, L));
  auto run_n = identify(nlms, scaled, 4.0, 30.0, 91);

  // Same steady state within 3 dB.
  auto tail_mean = [](const IdentRun& r) {
    double acc = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = r.misalign_db.size() * 3 / 4; i < r.misalign_db.size(); ++i) {
      acc += r.misalign_db[i];
      ++cnt;
    }
    return acc / static_cast<double>(cnt);
  };
  CHECK(std::abs(tail_mean(run_f) - tail_mean(run_n)) < 3.0);
}

TEST_CASE("fblms rejects wrong block sizes and per-sample use") {
  AdaptiveFilter f(base_config(FilterVariant::fblms, 64));
  std::vector<double> a(32, 0.0), b(32, 0.0), c(32), d(32);
  CHECK_THROWS_AS(f.process_block(a, b, c, d), std::invalid_argument);
  CHECK_THROWS_AS(f.process_sample(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("misalignment definition") {
  std::vector<double> h = {0.5, -0.3, 0.2};
  CHECK(misalignment_db(h, h) <= -300.0);
  std::vector<double> zero(3, 0.0);
  CHECK(misalignment_db(zero, h) == doctest::Approx(0.0).epsilon(1e-12));
  std::vector<double> scaled = h;
  for (auto& v : scaled) v *= 1.01;
  CHECK(misalignment_db(scaled, h) == doctest::Approx(-40.0).epsilon(1e-6));
  CHECK_THROWS_AS(misalignment_db(h, zero), std::invalid_argument);
}

TEST_CASE("sparse convergence ordering mpnlms < pnlms < nlms") {
  const std::size_t L = 1024;
  auto path = generate_sparse_air(L, 8, 16000, 3);
  for (auto& t : path.taps) t *= 0.1;

  auto run_variant = [&](FilterVariant v) {
    AdaptiveFilter f(base_config(v, L));
    const auto run = identify(f, path, 6.0, 30.0, 13);
    return time_to_db(run, -20.0);
  };
  const double t_mp = run_variant(FilterVariant::mpnlms);
  const double t_p = run_variant(FilterVariant::pnlms);
  const double t_n = run_variant(FilterVariant::nlms);
  CHECK(t_mp < t_p);
  CHECK(t_p < t_n);
}

TEST_CASE("nlms update is invariant to joint input scaling") {
  auto cfg = base_config(FilterVariant::nlms, 32);
  cfg.delta = 1e-12;
  AdaptiveFilter a(cfg), b(cfg);
  GaussianRng rng(53);
  const double c = 3.7;
  for (int i = 0; i < 300; ++i) {
    const double far = rng.next();
    const double mic = 0.2 * far + 0.05 * rng.next();
    a.process_sample(far, mic);
    b.process_sample(c * far, c * mic);
  }
  const auto wa = a.weights();
  const auto wb = b.weights();
  for (std::size_t i = 0; i < wa.size(); ++i) CHECK(std::abs(wa[i] - wb[i]) < 1e-9);
}

TEST_CASE("frozen prediction is variant independent") {
  GaussianRng rng(59);
  std::vector<double> w(64);
  for (auto& v : w) v = 0.05 * rng.next();
  std::vector<double> far(512), mic(512, 0.0);
  for (auto& v : far) v = rng.next();

  std::vector<std::vector<double>> outputs;
  for (auto v : {FilterVariant::lms, FilterVariant::nlms, FilterVariant::pnlms,
                 FilterVariant::mpnlms, FilterVariant::ipnlms, FilterVariant::apa,
                 FilterVariant::fblms}) {
    AdaptiveFilter f(base_config(v, 64));
    f.set_weights(w);
    f.set_adaptation(false);
    std::vector<double> echo(512), err(512);
    f.process_signal(far, mic, echo, err);
    outputs.push_back(echo);
  }
  for (std::size_t k = 1; k < outputs.size(); ++k) {
    for (std::size_t i = 0; i < 512; ++i) {
      CHECK(std::abs(outputs[k][i] - outputs[0][i]) < 1e-9);
    }
  }
}

TEST_CASE("divergence is detected and adaptation halts") {
  auto cfg = base_config(FilterVariant::lms, 8);
  cfg.mu = 1.9;
  cfg.lms_power_norm = 1e-9;  // absurd step
  AdaptiveFilter f(cfg);
  GaussianRng rng(61);
  for (int i = 0; i < 2000 && f.status() == FilterStatus::ok; ++i) {
    f.process_sample(rng.next(), rng.next());
  }
  CHECK(f.status() == FilterStatus::diverged);
  const auto frozen = f.weights();
  f.process_sample(1.0, 1.0);
  CHECK(f.weights() == frozen);
}

TEST_CASE("non-finite input is rejected") {
  AdaptiveFilter f(base_config(FilterVariant::nlms, 8));
  CHECK_THROWS_AS(f.process_sample(std::nan(""), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(f.process_sample(0.0, std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
}

TEST_CASE("config invariants are enforced") {
  auto cfg = base_config(FilterVariant::nlms, 8);
  cfg.mu = 2.5;
  CHECK_THROWS_AS(AdaptiveFilter{cfg}, std::invalid_argument);
  cfg = base_config(FilterVariant::apa, 8);
  cfg.apa_order = 9;
  CHECK_THROWS_AS(AdaptiveFilter{cfg}, std::invalid_argument);
  cfg = base_config(FilterVariant::nlms, 8);
  cfg.delta = 0.0;
  CHECK_THROWS_AS(AdaptiveFilter{cfg}, std::invalid_argument);
}
