#include "quench/observables.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <numbers>
#include <random>

using namespace quench;

namespace {

constexpr double kPi = std::numbers::pi;

QuenchResult synthetic(std::vector<double> energies, std::vector<double> weights) {
  QuenchResult r{{Mesh(3, 1.0), 0.0, 0.0}, {}, 0.0, Eigen::VectorXd(energies.size()), 0.0, 0};
  for (std::size_t n = 0; n < energies.size(); ++n) {
    r.final_energies(static_cast<Eigen::Index>(n)) = energies[n];
    r.overlaps.emplace_back(std::sqrt(weights[n]), 0.0);
    r.sum_rule += weights[n];
  }
  r.available_states = energies.size();
  return r;
}

// L(t) = (1 + cos t) / 2 sampled at an irrational step
EchoSeries two_level_series(std::size_t count) {
  return echo_amplitude(synthetic({0.0, 1.0}, {0.5, 0.5}),
                        make_time_grid(0.1 * std::numbers::sqrt2 * static_cast<double>(count - 1),
                                       0.1 * std::numbers::sqrt2));
}

EchoHistogram histogram_from_density(const std::function<double(double)>& density,
                                     std::size_t bins = 100) {
  EchoHistogram h;
  h.bin_edges.resize(bins + 1);
  h.probabilities.resize(bins);
  double total = 0.0;
  for (std::size_t b = 0; b <= bins; ++b) h.bin_edges[b] = static_cast<double>(b) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    h.probabilities[b] = density(h.bin_center(b));
    total += h.probabilities[b];
  }
  for (double& p : h.probabilities) p /= total;
  h.sample_count = 100000;
  h.horizon = kDefaultHorizon;
  return h;
}

}  // namespace

TEST(Histogram, TwoLevelEchoFollowsArcsineLaw) {
  const EchoSeries s = two_level_series(400000);
  const EchoHistogram h = le_histogram(s, 50, 0.0);
  ASSERT_EQ(h.bins(), 50u);
  EXPECT_FALSE(h.horizon_too_short);
  double total = 0.0;
  for (std::size_t b = 0; b < h.bins(); ++b) {
    const double lo = h.bin_edges[b] / h.bin_edges.back(), hi = h.bin_edges[b + 1] / h.bin_edges.back();
    const double exact = 2.0 / kPi * (std::asin(std::sqrt(hi)) - std::asin(std::sqrt(lo)));
    EXPECT_NEAR(h.probabilities[b], exact, 2e-3) << b;
    total += h.probabilities[b];
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(h.bin_edges.back(), 1.0, 1e-9);
}

TEST(Histogram, InvariantUnderSampleReordering) {
  EchoSeries s = two_level_series(5000);
  const EchoHistogram a = le_histogram(s, 40, 0.0);
  std::mt19937_64 rng(9);
  std::shuffle(s.echo.begin(), s.echo.end(), rng);
  const EchoHistogram b = le_histogram(s, 40, 0.0);
  EXPECT_EQ(a.probabilities, b.probabilities);
  EXPECT_EQ(a.bin_edges, b.bin_edges);
}

TEST(Histogram, FlagsShortHorizonAndHandlesConstantSeries) {
  const EchoSeries s = echo_amplitude(synthetic({0.0}, {1.0}), make_time_grid(10.0, 0.1));
  const EchoHistogram h = le_histogram(s, 10);
  EXPECT_TRUE(h.horizon_too_short);
  EXPECT_EQ(h.probabilities.back(), 1.0);
  const EchoHistogram span = le_histogram(s, 10, 0.0, HistogramRange::sample_span);
  EXPECT_FALSE(span.horizon_too_short);
  EXPECT_NEAR(std::accumulate(span.probabilities.begin(), span.probabilities.end(), 0.0), 1.0, 1e-12);
  EXPECT_THROW(le_histogram(s, 1), InvalidArgument);
  EXPECT_THROW(le_histogram(EchoSeries{}, 10), InvalidArgument);
}

TEST(Histogram, SampleSpanCoversOccupiedRange) {
  const EchoSeries s = echo_amplitude(synthetic({0.0, 1.0}, {0.9, 0.1}), make_time_grid(500.0, 0.05));
  const EchoHistogram h = le_histogram(s, 20, 0.0, HistogramRange::sample_span);
  EXPECT_NEAR(h.bin_edges.front(), 0.64, 1e-3);
  EXPECT_NEAR(h.bin_edges.back(), 1.0, 1e-6);
}

TEST(MeanEcho, InfiniteTimeAverageIsSumOfSquaredWeights) {
  const QuenchResult r = synthetic({0.0, 1.0, std::numbers::sqrt2, 3.7}, {0.4, 0.3, 0.2, 0.1});
  EXPECT_NEAR(mean_le(r), 0.16 + 0.09 + 0.04 + 0.01, 1e-15);
  const EchoSeries s = echo_amplitude(r, make_time_grid(2.0 * kPi * 1600.0, 0.05));
  EXPECT_NEAR(sampled_mean(s), mean_le(r), 2e-3);
}

TEST(MeanEcho, DegenerateRemixLeavesEchoUnchanged) {
  // splitting a line into degenerate partners changes sum |a|^4 but not nu(t)
  const QuenchResult a = synthetic({0.0, 1.3}, {0.6, 0.4});
  const QuenchResult b = synthetic({0.0, 1.3, 1.3}, {0.6, 0.25, 0.15});
  const TimeGrid grid = make_time_grid(50.0, 0.01);
  const EchoSeries ea = echo_amplitude(a, grid), eb = echo_amplitude(b, grid);
  for (std::size_t m = 0; m < ea.size(); ++m) EXPECT_NEAR(ea.echo[m], eb.echo[m], 1e-12);
}

TEST(Spectral, DiscreteLinesCarryTwoPiWeights) {
  QuenchResult r = synthetic({2.0, 2.5, 4.0}, {0.5, 0.3, 0.2});
  r.initial_energy = 1.5;
  const SpectralFunction d = spectral_function_discrete(r);
  ASSERT_EQ(d.peaks.size(), 3u);
  EXPECT_DOUBLE_EQ(d.peaks[0].frequency, 0.5);
  EXPECT_DOUBLE_EQ(d.peaks[2].frequency, 2.5);
  EXPECT_NEAR(d.peaks[1].weight, 2.0 * kPi * 0.3, 1e-15);
  EXPECT_EQ(d.reference_frequency, 1.5);
  EXPECT_NEAR(minimum_significant_gap(d, 1e-4), 0.5, 1e-15);
}

TEST(Spectral, FftCurveIntegratesToSumRuleAndPeaksAtLines) {
  QuenchResult r = synthetic({1.0, 2.2, 3.1, 7.0}, {0.4, 0.3, 0.2, 0.1});
  r.initial_energy = 1.0;
  const EchoSeries s = echo_amplitude(r, make_time_grid(400.0, 0.05));
  const SpectralFunction c = spectral_function_fft(s, r.initial_energy);
  double integral = 0.0;
  for (double v : c.curve_values) integral += v * c.bin_width;
  EXPECT_NEAR(integral, 2.0 * kPi * r.sum_rule, 1e-6);
  EXPECT_NEAR(c.resolution, 2.0 * kPi / 400.0, 1e-12);
  EXPECT_TRUE(std::is_sorted(c.curve_frequency.begin(), c.curve_frequency.end()));

  const SpectralFunction d = spectral_function_discrete(r);
  const std::vector<SpectralPeak> maxima = curve_maxima(c);
  for (const SpectralPeak& line : d.peaks) {
    double nearest = 1e9;
    for (const SpectralPeak& m : maxima) nearest = std::min(nearest, std::abs(m.frequency - line.frequency));
    EXPECT_LE(nearest, c.resolution) << line.frequency;
  }
}

TEST(Spectral, FlagsUnresolvedLines) {
  const QuenchResult r = synthetic({0.0, 0.01}, {0.5, 0.5});
  const EchoSeries s = echo_amplitude(r, make_time_grid(100.0, 0.1));
  FftOptions o;
  o.min_level_gap = 0.01;
  EXPECT_TRUE(spectral_function_fft(s, 0.0, o).resolution_insufficient);
  o.min_level_gap = 1.0;
  EXPECT_FALSE(spectral_function_fft(s, 0.0, o).resolution_insufficient);
}

TEST(TailFit, RecognisesPowerLawAndExponentialTails) {
  SpectralFunction power, exponential;
  for (int k = 0; k < 60; ++k) {
    const double w = 5.0 + 1.5 * k;
    power.peaks.push_back({w, 0.3 * std::pow(w, -1.5)});
    exponential.peaks.push_back({w, 0.3 * std::exp(-0.2 * w)});
  }
  const TailFit p = fit_spectral_tail(power, {5.0, 100.0, 0.0});
  EXPECT_TRUE(p.power_law_preferred);
  EXPECT_NEAR(p.power_exponent(), -1.5, 1e-10);
  EXPECT_NEAR(p.power_law.r_squared, 1.0, 1e-12);

  const TailFit e = fit_spectral_tail(exponential, {5.0, 100.0, 0.0});
  EXPECT_FALSE(e.power_law_preferred);
  EXPECT_NEAR(e.exponential_rate(), 0.2, 1e-10);

  const TailFit grouped = fit_spectral_tail(power, {5.0, 100.0, 4.0});
  EXPECT_TRUE(grouped.power_law_preferred);
  EXPECT_LT(grouped.points, p.points);
  EXPECT_NEAR(grouped.power_exponent(), -1.5, 0.1);
}

TEST(TailFit, RejectsThinWindows) {
  SpectralFunction s;
  for (int k = 0; k < 4; ++k) s.peaks.push_back({6.0 + k, 0.1});
  EXPECT_THROW(fit_spectral_tail(s, {5.0, 100.0, 0.0}), InvalidArgument);
  EXPECT_THROW(fit_spectral_tail(s, {0.0, 100.0, 0.0}), InvalidArgument);
}

TEST(Classifier, TwoLevelBeatingIsDoublePeaked) {
  const EchoHistogram h = le_histogram(two_level_series(200000), 100, 0.0, HistogramRange::sample_span);
  const Classification c = classify_distribution(h);
  EXPECT_EQ(c.kind, DistributionKind::double_peaked) << to_string(c.kind);
  ASSERT_EQ(c.maxima.size(), 2u);
  EXPECT_LT(c.maxima[0], 0.2);
  EXPECT_GT(c.maxima[1], 0.8);
}

TEST(Classifier, SyntheticShapes) {
  const auto gauss = [](double y) { return std::exp(-0.5 * std::pow((y - 0.5) / 0.1, 2)); };
  EXPECT_EQ(classify_distribution(histogram_from_density(gauss)).kind, DistributionKind::gaussian);

  const auto expo = [](double y) { return std::exp(-y / 0.08); };
  EXPECT_EQ(classify_distribution(histogram_from_density(expo)).kind, DistributionKind::exponential);

  const auto winged = [&](double y) {
    return gauss(y) + 0.5 * std::exp(-0.5 * std::pow((y - 0.15) / 0.04, 2)) +
           0.5 * std::exp(-0.5 * std::pow((y - 0.85) / 0.04, 2));
  };
  EXPECT_EQ(classify_distribution(histogram_from_density(winged)).kind, DistributionKind::winged);

  const auto skewed = [](double y) { return y < 0.6 ? y * y * y : 0.0; };
  const Classification s = classify_distribution(histogram_from_density(skewed));
  EXPECT_NE(s.kind, DistributionKind::gaussian);
  EXPECT_GE(s.confidence, 0.0);
  EXPECT_LE(s.confidence, 1.0);
}

TEST(Classifier, LabelsHaveStableNames) {
  EXPECT_EQ(to_string(DistributionKind::double_peaked), "double_peaked");
  EXPECT_EQ(to_string(DistributionKind::gaussian), "gaussian");
  EXPECT_EQ(to_string(DistributionKind::exponential), "exponential");
  EXPECT_EQ(to_string(DistributionKind::winged), "winged");
  EXPECT_EQ(to_string(DistributionKind::mixed), "mixed");
}
