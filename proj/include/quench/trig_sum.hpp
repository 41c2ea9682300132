#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace quench {

/// s_m = sum_n w_n exp(-i f_n t) at arbitrary times t; O(#times * #terms).
std::vector<std::complex<double>> trig_sum_direct(std::span<const double> frequencies,
                                                  std::span<const double> weights,
                                                  std::span<const double> times);

/// s_m = sum_n w_n exp(-i f_n m dt) for m = 0 .. count-1.
///
/// Uses Gaussian gridding onto an oversampled periodic grid followed by an FFT
/// (non-uniform FFT, oversampling 2, 12-point half-width), which keeps the
/// absolute error near 1e-12 * sum|w_n| at O(count log count + #terms) cost.
/// Small problems fall through to the direct sum.
std::vector<std::complex<double>> trig_sum_uniform(std::span<const double> frequencies,
                                                   std::span<const double> weights, double dt,
                                                   std::size_t count);

/// Same as trig_sum_uniform but always takes the gridded FFT route; exposed
/// so tests can compare both routes on small inputs.
std::vector<std::complex<double>> trig_sum_uniform_fft(std::span<const double> frequencies,
                                                       std::span<const double> weights,
                                                       double dt, std::size_t count);

}  // namespace quench
