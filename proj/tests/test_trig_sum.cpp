#include "quench/trig_sum.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace quench;

namespace {

double max_error(const std::vector<std::complex<double>>& a,
                 const std::vector<std::complex<double>>& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

}  // namespace

TEST(TrigSum, DirectMatchesClosedForm) {
  const std::vector<double> f{0.0, 1.5}, w{0.25, 0.75}, t{0.0, 1.0, 2.0};
  const auto s = trig_sum_direct(f, w, t);
  for (std::size_t m = 0; m < t.size(); ++m) {
    const std::complex<double> expected = 0.25 + 0.75 * std::exp(std::complex<double>(0.0, -1.5 * t[m]));
    EXPECT_NEAR(std::abs(s[m] - expected), 0.0, 1e-15);
  }
}

TEST(TrigSum, GriddedRouteMatchesDirectSum) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> freq(-20.0, 400.0), weight(0.0, 1.0);
  std::vector<double> f(500), w(500);
  double total = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) {
    f[n] = freq(rng);
    w[n] = std::pow(weight(rng), 6);
    total += w[n];
  }
  for (double dt : {0.001, 0.013, 0.05}) {
    const std::size_t count = 3000;
    std::vector<double> t(count);
    for (std::size_t m = 0; m < count; ++m) t[m] = dt * static_cast<double>(m);
    const auto direct = trig_sum_direct(f, w, t);
    EXPECT_LT(max_error(trig_sum_uniform_fft(f, w, dt, count), direct), 1e-10 * total) << dt;
    EXPECT_LT(max_error(trig_sum_uniform(f, w, dt, count), direct), 1e-10 * total) << dt;
  }
}

TEST(TrigSum, AliasedFrequenciesStayAccurate) {
  // frequencies far above the Nyquist limit of the grid
  const std::vector<double> f{3.0, 250.0, 1000.0}, w{0.5, 0.3, 0.2};
  const double dt = 0.1;
  std::vector<double> t(2048);
  for (std::size_t m = 0; m < t.size(); ++m) t[m] = dt * static_cast<double>(m);
  EXPECT_LT(max_error(trig_sum_uniform_fft(f, w, dt, t.size()), trig_sum_direct(f, w, t)), 1e-10);
}

TEST(TrigSum, EmptyInputs) {
  EXPECT_TRUE(trig_sum_uniform({}, {}, 0.1, 0).empty());
  const auto zero = trig_sum_uniform({}, {}, 0.1, 4);
  ASSERT_EQ(zero.size(), 4u);
  EXPECT_EQ(zero[3], std::complex<double>(0.0, 0.0));
}

TEST(TrigSum, LongGridKeepsEndpointsExact) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> freq(-30.0, 600.0), weight(0.0, 1.0);
  std::vector<double> f(2000), w(2000);
  double total = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) {
    f[n] = freq(rng);
    w[n] = std::exp(-0.005 * static_cast<double>(n)) * weight(rng);
    total += w[n];
  }
  for (double& x : w) x /= total;
  const std::size_t count = std::size_t{1} << 21;
  const double dt = 0.0048;
  const auto s = trig_sum_uniform_fft(f, w, dt, count);
  EXPECT_LT(std::abs(s[0] - 1.0), 1e-11);
  for (std::size_t m : {std::size_t{1}, count / 3, count - 1}) {
    const auto d = trig_sum_direct(f, w, std::vector<double>{dt * static_cast<double>(m)});
    EXPECT_LT(std::abs(s[m] - d[0]), 1e-10) << m;
  }
}
