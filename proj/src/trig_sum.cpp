#include "quench/trig_sum.hpp"

#include "fftw_lock.hpp"
#include "quench/lagrange_mesh.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <numbers>

namespace quench {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kSpreadHalfWidth = 12;
constexpr std::size_t kOversampling = 2;
constexpr std::size_t kDirectLimit = 4'000'000;

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

void check_sizes(std::span<const double> frequencies, std::span<const double> weights) {
  if (frequencies.size() != weights.size()) {
    throw InvalidArgument("trig sum: frequency and weight counts differ");
  }
}

}  // namespace

std::vector<std::complex<double>> trig_sum_direct(std::span<const double> frequencies,
                                                  std::span<const double> weights,
                                                  std::span<const double> times) {
  check_sizes(frequencies, weights);
  std::vector<std::complex<double>> out(times.size());
  for (std::size_t m = 0; m < times.size(); ++m) {
    double re = 0.0, im = 0.0;
    for (std::size_t n = 0; n < frequencies.size(); ++n) {
      const double phase = frequencies[n] * times[m];
      re += weights[n] * std::cos(phase);
      im -= weights[n] * std::sin(phase);
    }
    out[m] = {re, im};
  }
  return out;
}

std::vector<std::complex<double>> trig_sum_uniform_fft(std::span<const double> frequencies,
                                                       std::span<const double> weights,
                                                       double dt, std::size_t count) {
  check_sizes(frequencies, weights);
  if (count == 0) return {};
  // modes k = m - half, m = 0 .. modes-1, with an even number of modes
  const std::size_t modes = count + (count % 2);
  const std::size_t half = modes / 2;
  const std::size_t fine = kOversampling * std::max<std::size_t>(modes, 4 * kSpreadHalfWidth);
  const double ratio = static_cast<double>(fine) / static_cast<double>(modes);
  const double tau = std::numbers::pi * kSpreadHalfWidth /
                     (static_cast<double>(modes) * static_cast<double>(modes) * ratio * (ratio - 0.5));
  const double cell = kTwoPi / static_cast<double>(fine);
  const long double fine_cell = 2.0L * std::numbers::pi_v<long double> / static_cast<long double>(fine);

  std::unique_ptr<fftw_complex[], FftwFree> grid(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * fine)));
  for (std::size_t i = 0; i < fine; ++i) grid[i][0] = grid[i][1] = 0.0;

  for (std::size_t n = 0; n < frequencies.size(); ++n) {
    double theta = std::fmod(frequencies[n] * dt, kTwoPi);
    if (theta < 0.0) theta += kTwoPi;
    // shift modes to be centred: exp(-i m theta) = exp(-i k theta) exp(-i half theta).
    // half * theta reaches ~1e7, so the product is reduced in extended precision.
    const double shift = -static_cast<double>(
        std::fmod(static_cast<long double>(half) * theta, 2.0L * std::numbers::pi_v<long double>));
    const double cr = weights[n] * std::cos(shift);
    const double ci = weights[n] * std::sin(shift);
    const auto base = static_cast<long>(std::floor(theta / cell));
    for (long l = base - kSpreadHalfWidth + 1; l <= base + kSpreadHalfWidth; ++l) {
      // the kernel is ~1/modes wide, so node offsets need more than double precision
      const auto d = static_cast<double>(static_cast<long double>(l) * fine_cell - theta);
      const double g = std::exp(-d * d / (4.0 * tau));
      long idx = l % static_cast<long>(fine);
      if (idx < 0) idx += static_cast<long>(fine);
      grid[idx][0] += cr * g;
      grid[idx][1] += ci * g;
    }
  }

  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(fine), grid.get(), grid.get(), FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  std::vector<std::complex<double>> out(count);
  const double norm = std::sqrt(std::numbers::pi / tau) / static_cast<double>(fine);
  for (std::size_t m = 0; m < count; ++m) {
    const long k = static_cast<long>(m) - static_cast<long>(half);
    const std::size_t idx = k >= 0 ? static_cast<std::size_t>(k)
                                   : fine - static_cast<std::size_t>(-k);
    const double scale = norm * std::exp(static_cast<double>(k) * static_cast<double>(k) * tau);
    out[m] = {grid[idx][0] * scale, grid[idx][1] * scale};
  }
  return out;
}

std::vector<std::complex<double>> trig_sum_uniform(std::span<const double> frequencies,
                                                   std::span<const double> weights, double dt,
                                                   std::size_t count) {
  if (count * frequencies.size() <= kDirectLimit) {
    std::vector<double> times(count);
    for (std::size_t m = 0; m < count; ++m) times[m] = static_cast<double>(m) * dt;
    return trig_sum_direct(frequencies, weights, times);
  }
  return trig_sum_uniform_fft(frequencies, weights, dt, count);
}

}  // namespace quench
