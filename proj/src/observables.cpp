#include "quench/observables.hpp"

#include "fftw_lock.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>

namespace quench {

EchoHistogram le_histogram(const EchoSeries& series, std::size_t bins, double min_horizon,
                           HistogramRange range) {
  if (bins < 2) {
    throw InvalidArgument("le_histogram: need at least 2 bins");
  }
  if (series.echo.empty()) {
    throw InvalidArgument("le_histogram: empty echo series");
  }
  const auto [low, high] = std::minmax_element(series.echo.begin(), series.echo.end());
  const double upper = *high;
  double lower = range == HistogramRange::sample_span ? *low : 0.0;
  double width = upper - lower;
  if (!(width > 0.0)) {
    // a constant series: put it in the top bin of a unit-width range
    width = upper > 0.0 ? upper : 1.0;
    lower = upper - width;
  }

  EchoHistogram hist;
  hist.bin_edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    hist.bin_edges[b] = lower + width * static_cast<double>(b) / static_cast<double>(bins);
  }
  hist.bin_edges[bins] = lower + width;
  std::vector<std::size_t> counts(bins, 0);
  for (double y : series.echo) {
    const double u = (y - lower) / width * static_cast<double>(bins);
    const auto b = static_cast<std::size_t>(std::max(0.0, std::floor(u)));
    counts[std::min(b, bins - 1)] += 1;
  }
  hist.probabilities.resize(bins);
  const double total = static_cast<double>(series.echo.size());
  for (std::size_t b = 0; b < bins; ++b) {
    hist.probabilities[b] = static_cast<double>(counts[b]) / total;
  }
  hist.sample_count = series.echo.size();
  hist.horizon = series.horizon();
  hist.horizon_too_short = hist.horizon < min_horizon * (1.0 - 1e-12);
  return hist;
}

double mean_le(const QuenchResult& result) {
  double s = 0.0;
  for (const auto& a : result.overlaps) {
    const double w = std::norm(a);
    s += w * w;
  }
  return s;
}

double sampled_mean(const EchoSeries& series) {
  if (series.echo.empty()) return 0.0;
  return std::accumulate(series.echo.begin(), series.echo.end(), 0.0) /
         static_cast<double>(series.echo.size());
}

SpectralFunction spectral_function_discrete(const QuenchResult& result) {
  SpectralFunction spec;
  spec.reference_frequency = result.initial_energy;
  spec.peaks.reserve(result.size());
  for (std::size_t n = 0; n < result.size(); ++n) {
    spec.peaks.push_back({result.final_energies(static_cast<Eigen::Index>(n)) -
                              result.initial_energy,
                          2.0 * std::numbers::pi * result.weight(n)});
  }
  return spec;
}

namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

}  // namespace

SpectralFunction spectral_function_fft(const EchoSeries& series, double reference_frequency,
                                       const FftOptions& options) {
  if (!(series.dt > 0.0) || series.amplitude.size() < 2) {
    throw InvalidArgument("spectral_function_fft: needs a uniform series with >= 2 samples");
  }
  if (options.padding == 0) {
    throw InvalidArgument("spectral_function_fft: padding must be >= 1");
  }
  const std::size_t m_count = series.amplitude.size();
  const std::size_t length = options.padding * m_count;
  const double dt = series.dt;
  const double horizon = dt * static_cast<double>(m_count - 1);

  std::unique_ptr<fftw_complex[], FftwFree> buf(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * length)));
  for (std::size_t i = 0; i < length; ++i) buf[i][0] = buf[i][1] = 0.0;
  for (std::size_t m = 0; m < m_count; ++m) {
    double w = 1.0;
    if (options.window == FftWindow::hann) {
      w = 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(m) /
                                static_cast<double>(m_count - 1)));
    }
    buf[m][0] = series.amplitude[m].real() * w;
    buf[m][1] = series.amplitude[m].imag() * w;
  }
  const double nu0 = buf[0][0];
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(length), buf.get(), buf.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  SpectralFunction spec;
  spec.reference_frequency = reference_frequency;
  spec.resolution = 2.0 * std::numbers::pi / horizon;
  spec.bin_width = 2.0 * std::numbers::pi / (static_cast<double>(length) * dt);
  spec.curve_frequency.resize(length);
  spec.curve_values.resize(length);
  // reorder to ascending frequency: k = -L/2 .. L/2-1
  const std::size_t half = length / 2;
  for (std::size_t j = 0; j < length; ++j) {
    const std::size_t k = (j + length - half) % length;
    const long signed_k = static_cast<long>(j) - static_cast<long>(half);
    spec.curve_frequency[j] = spec.bin_width * static_cast<double>(signed_k);
    spec.curve_values[j] = dt * (2.0 * buf[k][0] - nu0);
  }
  if (options.min_level_gap > 0.0) {
    const double main_lobe = options.window == FftWindow::hann ? 2.0 * spec.resolution
                                                                : spec.resolution;
    spec.resolution_insufficient = main_lobe > options.min_level_gap;
  }
  return spec;
}

double minimum_significant_gap(const SpectralFunction& discrete, double relative) {
  double top = 0.0;
  for (const auto& p : discrete.peaks) top = std::max(top, p.weight);
  std::vector<double> f;
  for (const auto& p : discrete.peaks) {
    if (p.weight > relative * top) f.push_back(p.frequency);
  }
  std::sort(f.begin(), f.end());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < f.size(); ++i) gap = std::min(gap, f[i] - f[i - 1]);
  return gap;
}

std::vector<SpectralPeak> curve_maxima(const SpectralFunction& curve) {
  std::vector<SpectralPeak> out;
  const auto& v = curve.curve_values;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] > v[i - 1] && v[i] >= v[i + 1]) {
      out.push_back({curve.curve_frequency[i], v[i]});
    }
  }
  return out;
}

namespace {

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

}  // namespace

TailFit fit_spectral_tail(const SpectralFunction& spec, const TailFitOptions& options) {
  if (!(options.window_lo > 0.0) || !(options.window_hi > options.window_lo)) {
    throw InvalidArgument("fit_spectral_tail: window must satisfy 0 < lo < hi");
  }
  std::vector<SpectralPeak> lines;
  for (const auto& p : spec.peaks) {
    if (p.frequency >= options.window_lo && p.frequency <= options.window_hi && p.weight > 0.0) {
      lines.push_back(p);
    }
  }
  std::sort(lines.begin(), lines.end(),
            [](const SpectralPeak& a, const SpectralPeak& b) { return a.frequency < b.frequency; });
  std::vector<SpectralPeak> points;
  if (options.group_width > 0.0) {
    // coarse-grain onto fixed frequency cells starting at the window edge;
    // each occupied cell is represented by its weight-averaged frequency
    std::map<long, std::pair<double, double>> cells;
    for (const auto& p : lines) {
      const auto c = static_cast<long>(std::floor((p.frequency - options.window_lo) /
                                                  options.group_width));
      cells[c].first += p.weight;
      cells[c].second += p.weight * p.frequency;
    }
    for (const auto& [c, acc] : cells) points.push_back({acc.second / acc.first, acc.first});
  } else {
    points = std::move(lines);
  }
  if (points.size() < 5) {
    throw InvalidArgument("fit_spectral_tail: fewer than 5 positive points in the window");
  }
  std::vector<double> log_f, f, log_w;
  for (const auto& p : points) {
    f.push_back(p.frequency);
    log_f.push_back(std::log(p.frequency));
    log_w.push_back(std::log(p.weight));
  }
  TailFit fit;
  fit.window_lo = options.window_lo;
  fit.window_hi = options.window_hi;
  fit.points = points.size();
  fit.power_law = least_squares(log_f, log_w);
  fit.exponential = least_squares(f, log_w);
  fit.power_law_preferred = fit.power_law.r_squared > fit.exponential.r_squared;
  return fit;
}

std::string to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::double_peaked: return "double_peaked";
    case DistributionKind::gaussian: return "gaussian";
    case DistributionKind::exponential: return "exponential";
    case DistributionKind::winged: return "winged";
    case DistributionKind::mixed: return "mixed";
  }
  return "mixed";
}

namespace {

struct LocalMax {
  std::size_t bin;
  double height;
  double prominence;
};

std::vector<LocalMax> significant_maxima(const std::vector<double>& s, std::size_t lo,
                                         std::size_t hi, double min_prominence) {
  std::vector<LocalMax> found;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double left = i > lo ? s[i - 1] : -1.0;
    const double right = i < hi ? s[i + 1] : -1.0;
    // plateaus count once, at their left end
    if (s[i] > left && s[i] >= right && s[i] > 0.0) {
      std::size_t j = i;
      while (j < hi && s[j + 1] == s[i]) ++j;
      if (j < hi && s[j + 1] > s[i]) continue;
      // prominence: drop to the lowest point before reaching higher ground
      double left_min = s[i];
      for (std::size_t k = i; k-- > lo;) {
        if (s[k] > s[i]) break;
        left_min = std::min(left_min, s[k]);
        if (k == lo) left_min = std::min(left_min, 0.0);
      }
      if (i == lo) left_min = 0.0;
      double right_min = s[i];
      for (std::size_t k = j + 1; k <= hi; ++k) {
        if (s[k] > s[i]) break;
        right_min = std::min(right_min, s[k]);
        if (k == hi) right_min = std::min(right_min, 0.0);
      }
      if (j == hi) right_min = 0.0;
      found.push_back({i, s[i], s[i] - std::max(left_min, right_min)});
    }
  }
  double top = 0.0;
  for (const auto& m : found) top = std::max(top, m.height);
  std::vector<LocalMax> out;
  for (const auto& m : found) {
    if (m.prominence >= min_prominence * top) out.push_back(m);
  }
  return out;
}

}  // namespace

namespace {

// Depth of the deepest flattening on a rising flank: slopes are taken
// over `span` bins walking from `from` towards the peak `to`. Returns the
// ratio slope_min / min(steepest before, steepest after), or +inf if the
// flank has no interior dip.
double shoulder_depth(const std::vector<double>& s, std::size_t from, std::size_t to,
                      std::size_t span) {
  const long dir = to > from ? 1 : -1;
  const long len = std::abs(static_cast<long>(to) - static_cast<long>(from));
  const long w = static_cast<long>(std::max<std::size_t>(span, 1));
  if (len < 3 * w) return std::numeric_limits<double>::infinity();
  std::vector<double> d;
  for (long k = 0; k + w <= len; ++k) {
    const auto a = static_cast<std::size_t>(static_cast<long>(from) + dir * k);
    const auto b = static_cast<std::size_t>(static_cast<long>(from) + dir * (k + w));
    d.push_back(s[b] - s[a]);
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < d.size(); ++k) {
    const double before = *std::max_element(d.begin(), d.begin() + static_cast<long>(k));
    const double after = *std::max_element(d.begin() + static_cast<long>(k) + 1, d.end());
    const double around = std::min(before, after);
    if (around > 0.0) best = std::min(best, std::max(d[k], 0.0) / around);
  }
  return best;
}

}  // namespace

Classification classify_distribution(const EchoHistogram& hist,
                                     const ClassifierThresholds& thresholds) {
  Classification out;
  out.thresholds = thresholds;
  const std::vector<double>& p = hist.probabilities;
  const std::size_t bins = p.size();
  if (bins < 2) return out;

  std::size_t lo = 0, hi = bins - 1;
  while (lo < bins && p[lo] == 0.0) ++lo;
  while (hi > lo && p[hi] == 0.0) --hi;
  if (lo >= bins) return out;

  // centred moving average, renormalised at the range ends
  std::vector<double> s(bins, 0.0);
  const long half = static_cast<long>(thresholds.smoothing_bins / 2);
  for (std::size_t i = lo; i <= hi; ++i) {
    double acc = 0.0;
    int cnt = 0;
    for (long d = -half; d <= half; ++d) {
      const long k = static_cast<long>(i) + d;
      if (k >= static_cast<long>(lo) && k <= static_cast<long>(hi)) {
        acc += p[static_cast<std::size_t>(k)];
        ++cnt;
      }
    }
    s[i] = acc / cnt;
  }

  double mean = 0.0;
  for (std::size_t b = 0; b < bins; ++b) mean += p[b] * hist.bin_center(b);
  double m2 = 0.0, m3 = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double d = hist.bin_center(b) - mean;
    m2 += p[b] * d * d;
    m3 += p[b] * d * d * d;
  }
  out.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;

  const std::vector<LocalMax> maxima = significant_maxima(s, lo, hi, thresholds.min_prominence);
  for (const auto& m : maxima) out.maxima.push_back(hist.bin_center(m.bin));

  std::size_t mode = lo;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (s[i] > s[mode]) mode = i;
  }
  const double top = s[mode];

  if (hist.bin_center(mode) <= thresholds.exponential_mode * hist.bin_edges.back()) {
    double rises = 0.0;
    for (std::size_t i = mode; i < hi; ++i) rises += std::max(0.0, s[i + 1] - s[i]);
    const double budget = thresholds.monotone_tolerance * top;
    if (rises <= budget) {
      out.kind = DistributionKind::exponential;
      out.confidence = 1.0 - rises / budget;
      return out;
    }
  }

  const double span = static_cast<double>(hi - lo + 1);
  auto relative = [&](std::size_t bin) { return (static_cast<double>(bin - lo) + 0.5) / span; };

  if (maxima.size() == 2 && relative(maxima[0].bin) < 0.5 && relative(maxima[1].bin) > 0.5) {
    out.kind = DistributionKind::double_peaked;
    out.confidence = std::min(maxima[0].prominence, maxima[1].prominence) / top;
    return out;
  }

  std::size_t centre = 0;
  for (std::size_t k = 1; k < maxima.size(); ++k) {
    if (maxima[k].height > maxima[centre].height) centre = k;
  }
  if (maxima.size() >= 3 && centre > 0 && centre + 1 < maxima.size()) {
    double left = 0.0, right = 0.0;
    for (std::size_t k = 0; k < centre; ++k) left = std::max(left, maxima[k].prominence);
    for (std::size_t k = centre + 1; k < maxima.size(); ++k) {
      right = std::max(right, maxima[k].prominence);
    }
    out.kind = DistributionKind::winged;
    out.confidence = std::min(left, right) / top;
    return out;
  }

  if (maxima.size() == 1) {
    const std::size_t peak = maxima[0].bin;
    const double depth = std::max(shoulder_depth(s, lo, peak, thresholds.smoothing_bins),
                                  shoulder_depth(s, hi, peak, thresholds.smoothing_bins));
    if (depth <= thresholds.shoulder_ratio) {
      out.kind = DistributionKind::winged;
      out.confidence = 1.0 - depth / thresholds.shoulder_ratio;
      return out;
    }
    const double r = relative(peak);
    if (r > 0.1 && r < 0.9 && std::abs(out.skewness) < thresholds.gaussian_max_skew) {
      out.kind = DistributionKind::gaussian;
      out.confidence = 1.0 - std::abs(out.skewness) / thresholds.gaussian_max_skew;
      return out;
    }
  }

  out.kind = DistributionKind::mixed;
  out.confidence = 0.0;
  return out;
}

}  // namespace quench
