// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOPOST_FFT_HPP
#define ECHOPOST_FFT_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace echopost::fft {

/// In-place radix-2 transform; size must be a power of two.
void forward(std::span<std::complex<double>> x);
void inverse(std::span<std::complex<double>> x);

/// Real input, one-sided output of n/2+1 bins. x is zero-padded (or
/// truncated) to n, which must be a power of two.
std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n);

/// One-sided spectrum back to n real samples.
std::vector<double> irfft(std::span<const std::complex<double>> spectrum, std::size_t n);

std::size_t next_pow2(std::size_t n);

}  // namespace echopost::fft

#endif  // ECHOPOST_FFT_HPP
