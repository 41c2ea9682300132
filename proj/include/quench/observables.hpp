#pragma once

#include "quench/quench_dynamics.hpp"

#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace quench {

/// Default long-time window, 1600 trap periods.
inline constexpr double kDefaultHorizon = 2.0 * std::numbers::pi * 1600.0;

/// Normalised histogram of echo samples over [0, max L].
struct EchoHistogram {
  std::vector<double> bin_edges;      // bins + 1 ascending edges
  std::vector<double> probabilities;  // sums to 1
  std::size_t sample_count = 0;
  double horizon = 0.0;
  bool horizon_too_short = false;  // statistics may not have converged

  std::size_t bins() const { return probabilities.size(); }
  double bin_center(std::size_t b) const { return 0.5 * (bin_edges[b] + bin_edges[b + 1]); }
};

enum class HistogramRange {
  from_zero,    // [0, max L]
  sample_span,  // [min L, max L], resolves distributions squeezed near one value
};

EchoHistogram le_histogram(const EchoSeries& series, std::size_t bins = 100,
                           double min_horizon = kDefaultHorizon,
                           HistogramRange range = HistogramRange::from_zero);

/// Infinite-time average of the echo, sum |a_n|^4.
double mean_le(const QuenchResult& result);

/// Plain average of the sampled echo values.
double sampled_mean(const EchoSeries& series);

struct SpectralPeak {
  double frequency;  // omega = E'_n - E_0
  double weight;     // 2 pi |a_n|^2
};

/// A(omega) as a line list and/or a sampled curve.
///
/// Sign convention: A(omega) = 2 pi sum_n |a_n|^2 delta(omega - (E'_n - E_0)),
/// i.e. omega is the energy deposited by the quench. Repulsive impurities put
/// every line at omega > 0; a bound state shows up at omega < 0. The absolute
/// axis used for plotting is omega + omega_0 = E'_n.
struct SpectralFunction {
  std::vector<SpectralPeak> peaks;
  std::vector<double> curve_frequency;
  std::vector<double> curve_values;
  double reference_frequency = 0.0;  // omega_0 = E_0
  double resolution = 0.0;           // 2 pi / T for the curve
  double bin_width = 0.0;            // spacing of curve_frequency
  bool resolution_insufficient = false;
};

SpectralFunction spectral_function_discrete(const QuenchResult& result);

enum class FftWindow { none, hann };

struct FftOptions {
  FftWindow window = FftWindow::none;
  std::size_t padding = 2;    // transform length = padding * samples
  double min_level_gap = 0.0; // if > 0, flag when 2 pi / T cannot resolve it
};

/// Re of the two-sided Fourier integral of nu(t), using nu(-t) = conj nu(t).
/// Normalised so that the integral over omega equals 2 pi nu(0), matching
/// the line weights of spectral_function_discrete.
SpectralFunction spectral_function_fft(const EchoSeries& series, double reference_frequency,
                                       const FftOptions& options = {});

/// Smallest spacing between lines whose weight exceeds `relative` * max.
double minimum_significant_gap(const SpectralFunction& discrete, double relative);

/// Local maxima of the sampled curve.
std::vector<SpectralPeak> curve_maxima(const SpectralFunction& curve);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct TailFit {
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::size_t points = 0;
  LinearFit power_law;    // log w = slope * log omega + intercept
  LinearFit exponential;  // log w = slope * omega + intercept
  bool power_law_preferred = false;

  double power_exponent() const { return power_law.slope; }
  double exponential_rate() const { return -exponential.slope; }
};

struct TailFitOptions {
  double window_lo = 0.0;
  double window_hi = 0.0;
  /// Width of the frequency cells (starting at window_lo) whose summed
  /// weight is fitted; 0 fits individual lines. Individual line weights
  /// scatter over decades, the coarse-grained density follows the envelope.
  double group_width = 0.0;
};

/// Least-squares fits of the tail weights in [window_lo, window_hi]
/// (omega > 0). Throws InvalidArgument with fewer than 5 positive points.
TailFit fit_spectral_tail(const SpectralFunction& spec, const TailFitOptions& options);

enum class DistributionKind { double_peaked, gaussian, exponential, winged, mixed };

std::string to_string(DistributionKind kind);

/// Heuristic thresholds for classify_distribution.
/// Heuristic shape classifier. Applied to a histogram over the occupied
/// span of L (HistogramRange::sample_span) so that weak quenches, whose echo
/// stays close to 1, are resolved. Rules in order of precedence:
///  exponential   mode at L near 0 and the smoothed mass decays from there;
///  double_peaked exactly two significant maxima, one in each half of the span;
///  winged        a central maximum with a lobe on each side, where a lobe is
///                a further maximum or a shoulder (the rising flank flattens
///                and steepens again);
///  gaussian      one interior maximum and |skewness| below the limit;
///  mixed         anything else.
struct ClassifierThresholds {
  std::size_t smoothing_bins = 5;     // moving-average width
  double min_prominence = 0.1;        // of the global maximum, for a local max to count
  double exponential_mode = 0.1;      // mode must lie below this fraction of max L
  double monotone_tolerance = 0.15;   // summed rises after the mode, relative to the mode height
  double shoulder_ratio = 0.5;        // flank slope dip relative to the slopes around it
  double gaussian_max_skew = 0.5;
};

struct Classification {
  DistributionKind kind = DistributionKind::mixed;
  double confidence = 0.0;      // in [0, 1], margin by which the winning rule held
  std::vector<double> maxima;   // y positions of significant local maxima
  double skewness = 0.0;
  ClassifierThresholds thresholds;
};

Classification classify_distribution(const EchoHistogram& hist,
                                     const ClassifierThresholds& thresholds = {});

}  // namespace quench
