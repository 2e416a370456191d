// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echopost/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace echopost::fft {

namespace {

struct Tables {
  std::vector<std::size_t> bit_reverse;
  std::vector<std::complex<double>> twiddle;  // exp(-i 2 pi k / n), k < n/2
};

const Tables& tables_for(std::size_t n) {
  thread_local std::unordered_map<std::size_t, Tables> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Tables t;
  t.bit_reverse.resize(n);
  std::size_t log2n = 0;
  while ((std::size_t{1} << log2n) < n) ++log2n;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < log2n; ++b) {
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
    }
    t.bit_reverse[i] = r;
  }
  t.twiddle.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    t.twiddle[k] = {std::cos(angle), std::sin(angle)};
  }
  return cache.emplace(n, std::move(t)).first->second;
}

void transform(std::span<std::complex<double>> x, bool inverse_dir) {
  const std::size_t n = x.size();
  if (n == 0) return;
  if ((n & (n - 1)) != 0) throw std::invalid_argument("fft size must be a power of two");
  if (n == 1) return;

  const Tables& t = tables_for(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = t.bit_reverse[i];
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        std::complex<double> w = t.twiddle[k * stride];
        if (inverse_dir) w = std::conj(w);
        std::complex<double> u = x[start + k];
        std::complex<double> v = x[start + k + half] * w;
        x[start + k] = u + v;
        x[start + k + half] = u - v;
      }
    }
  }
  if (inverse_dir) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : x) v *= scale;
  }
}

}  // namespace

void forward(std::span<std::complex<double>> x) { transform(x, false); }

void inverse(std::span<std::complex<double>> x) { transform(x, true); }

std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n) {
  std::vector<std::complex<double>> buf(n);
  const std::size_t m = std::min(n, x.size());
  for (std::size_t i = 0; i < m; ++i) buf[i] = {x[i], 0.0};
  forward(buf);
  buf.resize(n / 2 + 1);
  return buf;
}

std::vector<double> irfft(std::span<const std::complex<double>> spectrum, std::size_t n) {
  if (spectrum.size() != n / 2 + 1) {
    throw std::invalid_argument("irfft spectrum size does not match n/2+1");
  }
  std::vector<std::complex<double>> buf(n);
  for (std::size_t k = 0; k <= n / 2; ++k) buf[k] = spectrum[k];
  for (std::size_t k = n / 2 + 1; k < n; ++k) buf[k] = std::conj(spectrum[n - k]);
  inverse(buf);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[i].real();
  return out;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace echopost::fft
