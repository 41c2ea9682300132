#include "quench/pipeline.hpp"

#include "quench/bundle.hpp"
#include "quench/convergence.hpp"
#include "quench/tg_limit.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

namespace quench {

using nlohmann::json;

namespace {

// weights below this fraction of the largest line are ignored when judging
// whether the FFT horizon resolves the spectrum
constexpr double kSignificantLine = 1e-4;

QuenchOptions quench_options(const RunConfig& c) {
  return {c.dynamics.sum_rule_threshold, c.dynamics.max_states};
}

Mesh config_mesh(const RunConfig& c) { return Mesh(c.mesh.points, c.mesh.scaling); }

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

json histogram_json(const EchoHistogram& h) {
  return {{"bins", h.bins()},
          {"range", {h.bin_edges.front(), h.bin_edges.back()}},
          {"samples", h.sample_count},
          {"horizon", h.horizon},
          {"horizon_too_short", h.horizon_too_short}};
}

json classification_json(const Classification& c) {
  const auto& th = c.thresholds;
  return {{"label", to_string(c.kind)},
          {"confidence", c.confidence},
          {"skewness", c.skewness},
          {"maxima", c.maxima},
          {"thresholds",
           {{"smoothing_bins", th.smoothing_bins},
            {"min_prominence", th.min_prominence},
            {"exponential_mode", th.exponential_mode},
            {"monotone_tolerance", th.monotone_tolerance},
            {"shoulder_ratio", th.shoulder_ratio},
            {"gaussian_max_skew", th.gaussian_max_skew}}}};
}

std::string histogram_csv(const EchoHistogram& h) {
  CsvTable t({"y", "p"});
  for (std::size_t b = 0; b < h.bins(); ++b) t.add_row({h.bin_center(b), h.probabilities[b]});
  return t.text();
}

std::string point_name(double g, double kappa) {
  return "g_" + format_double(g) + "_kappa_" + format_double(kappa);
}

}  // namespace

PointAnalysis analyse_point(const RunConfig& config, const SpectrumCache* cache) {
  const Mesh mesh = config_mesh(config);
  const double g = config.physics.g;
  const double kappa = config.physics.kappa;
  GroundState initial = cache ? cache->ground_state(mesh, g) : initial_ground_state(mesh, g);
  QuenchResult result = cache ? cache->quench_result(initial, kappa, quench_options(config))
                              : quench(initial, kappa, quench_options(config));

  ChosenTimeGrid grid;
  if (config.dynamics.dt > 0.0) {
    grid.grid = make_time_grid(config.dynamics.horizon, config.dynamics.dt);
  } else {
    TimeGridOptions opts;
    opts.samples_per_period = config.dynamics.samples_per_period;
    opts.max_samples = config.dynamics.max_samples;
    grid = choose_time_grid(result, config.dynamics.horizon, opts);
  }
  EchoSeries series = echo_amplitude(result, grid.grid);

  const auto& o = config.observables;
  EchoHistogram histogram = le_histogram(series, o.bins, config.dynamics.min_horizon);
  EchoHistogram span = le_histogram(series, o.bins, config.dynamics.min_horizon,
                                    HistogramRange::sample_span);
  Classification classification = classify_distribution(span, o.classifier);

  SpectralFunction discrete = spectral_function_discrete(result);
  FftOptions fft;
  fft.window = o.fft_window;
  fft.padding = o.fft_padding;
  const double gap = minimum_significant_gap(discrete, kSignificantLine);
  fft.min_level_gap = std::isfinite(gap) ? gap : 0.0;
  SpectralFunction curve = spectral_function_fft(series, result.initial_energy, fft);

  std::optional<TailFit> tail;
  std::string tail_note;
  try {
    tail = fit_spectral_tail(discrete, {o.tail_lo, o.tail_hi, o.tail_group_width});
  } catch (const InvalidArgument& e) {
    tail_note = e.what();
  }

  const double mean = mean_le(result);
  const double sampled = sampled_mean(series);
  return PointAnalysis{std::move(initial), std::move(result), grid,
                       std::move(series), std::move(histogram), std::move(span),
                       std::move(classification), std::move(discrete), std::move(curve),
                       std::move(tail), std::move(tail_note), mean, sampled};
}

PointRecord run_single(const RunConfig& config, const std::filesystem::path& directory) {
  Stopwatch clock;
  json timings;
  std::optional<SpectrumCache> cache;
  if (!config.output.cache_directory.empty()) cache.emplace(config.output.cache_directory);
  const PointAnalysis a = analyse_point(config, cache ? &*cache : nullptr);
  timings["analysis"] = clock.lap();

  Bundle bundle(directory);
  const auto& o = config.observables;
  const QuenchResult& r = a.result;

  {
    CsvTable t({"time", "re_nu", "im_nu", "echo"});
    for (std::size_t m = 0; m < a.series.size() && a.series.times[m] <= o.echo_window; ++m) {
      t.add_row({a.series.times[m], a.series.amplitude[m].real(), a.series.amplitude[m].imag(),
                 a.series.echo[m]});
    }
    bundle.write("echo.csv", t.text());
  }
  bundle.write("histogram.csv", histogram_csv(a.histogram));
  bundle.write("histogram_span.csv", histogram_csv(a.span_histogram));
  {
    CsvTable t({"omega", "weight"});
    for (const auto& p : a.discrete.peaks) t.add_row({p.frequency, p.weight});
    bundle.write("spectral_discrete.csv", t.text());
  }
  {
    CsvTable t({"omega", "value"});
    for (std::size_t j = 0; j < a.curve.curve_frequency.size(); ++j) {
      const double w = a.curve.curve_frequency[j];
      if (w >= o.spectrum_lo && w <= o.spectrum_hi) t.add_row({w, a.curve.curve_values[j]});
    }
    bundle.write("spectral_fft.csv", t.text());
  }
  {
    CsvTable t({"n", "energy", "re_a", "im_a", "weight"});
    for (std::size_t n = 0; n < r.size(); ++n) {
      t.add_row({static_cast<double>(n), r.final_energies(static_cast<Eigen::Index>(n)),
                 r.overlaps[n].real(), r.overlaps[n].imag(), r.weight(n)});
    }
    bundle.write("overlaps.csv", t.text());
  }
  timings["tables"] = clock.lap();

  if (o.density) {
    const Spectrum spectrum = solve_two_body(r.config, r.size(), PairSector::even);
    // same sum rule as the fast path, checked against the explicit eigenvectors
    compute_overlaps(a.initial, spectrum, config.dynamics.sum_rule_threshold * (1.0 - 1e-9));
    std::vector<double> times(o.density_frames);
    for (std::size_t f = 0; f < times.size(); ++f) {
      times[f] = times.size() == 1 ? 0.0
                                   : o.density_duration * static_cast<double>(f) /
                                         static_cast<double>(times.size() - 1);
    }
    const DensityField field = density_field(a.initial, spectrum, times, o.refine);
    CsvTable t({"time", "x", "rho"});
    for (std::size_t f = 0; f < field.times.size(); ++f) {
      for (std::size_t p = 0; p < field.positions.size(); ++p) {
        t.add_row({field.times[f], field.positions[p], field.values[f][p]});
      }
    }
    bundle.write("density.csv", t.text());
    timings["density"] = clock.lap();
  }

  json results{
      {"initial_energy", r.initial_energy},
      {"quenched_ground_energy", r.final_energies(0)},
      {"sum_rule", r.sum_rule},
      {"states_retained", r.size()},
      {"states_available", r.available_states},
      {"mean_le", a.mean},
      {"sampled_mean_le", a.sampled},
      {"time_grid",
       {{"dt", a.grid.grid.dt},
        {"samples", a.grid.grid.count},
        {"horizon", a.grid.grid.horizon()},
        {"fastest_frequency", a.grid.fastest_frequency},
        {"undersampled", a.grid.undersampled}}},
      {"histogram", histogram_json(a.histogram)},
      {"classification", classification_json(a.classification)},
      {"spectrum",
       {{"reference_frequency", a.curve.reference_frequency},
        {"resolution", a.curve.resolution},
        {"bin_width", a.curve.bin_width},
        {"resolution_insufficient", a.curve.resolution_insufficient},
        {"convention", "peaks at omega = E'_n - E_0"}}}};
  if (a.tail) {
    results["tail_fit"] = {{"window", {a.tail->window_lo, a.tail->window_hi}},
                           {"points", a.tail->points},
                           {"power_exponent", a.tail->power_exponent()},
                           {"power_r_squared", a.tail->power_law.r_squared},
                           {"exponential_rate", a.tail->exponential_rate()},
                           {"exponential_r_squared", a.tail->exponential.r_squared},
                           {"verdict", a.tail->power_law_preferred ? "power_law" : "exponential"}};
  } else {
    results["tail_fit"] = {{"unavailable", a.tail_note}};
  }
  json manifest{{"verb", "run"}, {"config", to_json(config)}, {"results", results}};
  if (config.output.record_timings) manifest["timings_seconds"] = timings;
  bundle.write_manifest(manifest);

  PointRecord rec;
  rec.g = config.physics.g;
  rec.kappa = config.physics.kappa;
  rec.ok = true;
  rec.mean_le = a.mean;
  rec.sampled_mean = a.sampled;
  rec.sum_rule = r.sum_rule;
  rec.states = r.size();
  rec.label = to_string(a.classification.kind);
  rec.confidence = a.classification.confidence;
  return rec;
}

int run_sweep(const RunConfig& config, const std::filesystem::path& directory,
              std::vector<PointRecord>* records_out) {
  std::vector<std::pair<double, double>> points;
  for (double g : config.sweep.g) {
    for (double kappa : config.sweep.kappa) points.emplace_back(g, kappa);
  }
  std::vector<PointRecord> records(points.size());
  std::size_t workers = config.parallelism;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, points.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      RunConfig point = config;
      point.physics.g = points[i].first;
      point.physics.kappa = points[i].second;
      const std::string name = point_name(point.physics.g, point.physics.kappa);
      PointRecord rec;
      try {
        rec = run_single(point, directory / name);
      } catch (const InvalidArgument& e) {
        rec.exit_code = kExitConfig;
        rec.error = e.what();
      } catch (const std::exception& e) {
        rec.exit_code = kExitNumeric;
        rec.error = e.what();
      }
      if (!rec.ok) write_error_record(directory / name, "point", rec.error, rec.exit_code);
      rec.g = point.physics.g;
      rec.kappa = point.physics.kappa;
      rec.directory = name;
      records[i] = std::move(rec);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  Bundle bundle(directory);
  CsvTable table({"g", "kappa", "status", "mean_le", "sampled_mean_le", "sum_rule", "states",
                  "label", "confidence", "error"});
  std::size_t failed = 0;
  for (const auto& rec : records) {
    if (rec.ok) {
      table.add_row({format_double(rec.g), format_double(rec.kappa), std::string("ok"),
                     format_double(rec.mean_le), format_double(rec.sampled_mean),
                     format_double(rec.sum_rule), std::to_string(rec.states), rec.label,
                     format_double(rec.confidence), std::string()});
      for (const auto& entry : std::filesystem::directory_iterator(directory / rec.directory)) {
        bundle.track(rec.directory + "/" + entry.path().filename().string());
      }
    } else {
      ++failed;
      std::string message = rec.error;
      std::replace(message.begin(), message.end(), ',', ';');
      std::replace(message.begin(), message.end(), '\n', ' ');
      table.add_row({format_double(rec.g), format_double(rec.kappa), std::string("failed"),
                     std::string(), std::string(), std::string(), std::string(), std::string(),
                     std::string(), message});
      bundle.track(rec.directory + "/error.json");
    }
  }
  bundle.write("sweep.csv", table.text());
  json summary{{"points", records.size()}, {"failed", failed}};
  bundle.write_manifest({{"verb", "sweep"}, {"config", to_json(config)}, {"results", summary}});
  if (records_out) *records_out = records;
  return failed == 0 ? kExitOk : kExitPartial;
}

void run_convergence(const RunConfig& config, const std::filesystem::path& directory) {
  ConvergenceOptions options;
  options.tolerance = config.convergence.tolerance;
  options.quench = quench_options(config);
  const auto rows = convergence_report(config.physics.g, config.physics.kappa,
                                       config.convergence.points, config.convergence.scalings,
                                       options);
  Bundle bundle(directory);
  CsvTable t({"points", "scaling", "initial_energy", "quenched_energy", "mean_le", "d_initial",
              "d_quenched", "d_mean_le", "converged"});
  for (const auto& row : rows) {
    auto diff = [](double d) { return std::isnan(d) ? std::string() : format_double(d); };
    t.add_row({std::to_string(row.n_points), format_double(row.scaling),
               format_double(row.initial_energy), format_double(row.quenched_energy),
               format_double(row.mean_le), diff(row.d_initial), diff(row.d_quenched),
               diff(row.d_mean_le), std::string(row.converged ? "yes" : "no")});
  }
  bundle.write("convergence.csv", t.text());
  std::size_t flagged = 0;
  for (const auto& row : rows) {
    if (!std::isnan(row.d_initial) && !row.converged) ++flagged;
  }
  bundle.write_manifest({{"verb", "converge"},
                         {"config", to_json(config)},
                         {"results", {{"rows", rows.size()}, {"not_converged", flagged}}}});
}

TgCheckSummary run_tg_check(const RunConfig& config, const std::filesystem::path& directory) {
  const Mesh mesh = config_mesh(config);
  std::vector<double> times;
  const auto steps =
      static_cast<std::size_t>(std::floor(config.tg_check.duration / config.tg_check.step + 1e-9));
  for (std::size_t m = 0; m <= steps; ++m) times.push_back(config.tg_check.step * static_cast<double>(m));

  const GroundState initial = initial_ground_state(mesh, config.physics.g);
  const QuenchResult result = quench(initial, config.physics.kappa, quench_options(config));
  const EchoSeries two_body = echo_amplitude(result, times);
  const TGQuench tg = tg_quench(mesh, config.physics.kappa);
  const EchoSeries sum_form = tg_echo(tg, times);
  const EchoSeries det_form = tg_determinant_echo(tg, times);

  TgCheckSummary summary;
  CsvTable t({"time", "echo_two_body", "echo_tg", "echo_tg_determinant"});
  for (std::size_t m = 0; m < times.size(); ++m) {
    summary.sup_two_body_vs_tg =
        std::max(summary.sup_two_body_vs_tg, std::abs(two_body.echo[m] - sum_form.echo[m]));
    summary.sup_tg_vs_determinant =
        std::max(summary.sup_tg_vs_determinant, std::abs(sum_form.echo[m] - det_form.echo[m]));
    t.add_row({times[m], two_body.echo[m], sum_form.echo[m], det_form.echo[m]});
  }
  Bundle bundle(directory);
  bundle.write("tg_check.csv", t.text());
  bundle.write_manifest({{"verb", "tg-check"},
                         {"config", to_json(config)},
                         {"results",
                          {{"sup_two_body_vs_tg", summary.sup_two_body_vs_tg},
                           {"sup_tg_vs_determinant", summary.sup_tg_vs_determinant},
                           {"initial_energy", result.initial_energy},
                           {"sum_rule", result.sum_rule}}}});
  return summary;
}

void write_error_record(const std::filesystem::path& directory, const std::string& kind,
                        const std::string& message, int exit_code) {
  try {
    std::filesystem::create_directories(directory);
    std::ofstream out(directory / "error.json", std::ios::trunc);
    out << json_text({{"error", {{"kind", kind}, {"message", message}, {"exit_code", exit_code}}}});
  } catch (...) {
    // the record is advisory; the exit code still reports the failure
  }
}

}  // namespace quench
