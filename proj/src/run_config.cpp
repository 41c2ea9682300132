#include "quench/run_config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

namespace quench {

using nlohmann::json;

namespace {

// Reads the members of one JSON object, rejecting keys nobody asked for.
class Section {
 public:
  Section(const json& node, std::string name) : node_(node), name_(std::move(name)) {
    if (!node_.is_object()) throw ConfigError(name_ + ": expected an object");
  }

  void done() const {
    for (const auto& item : node_.items()) {
      if (!seen_.contains(item.key())) {
        throw ConfigError(name_ + ": unknown key '" + item.key() + "'");
      }
    }
  }

  template <typename T>
  void get(const char* key, T& target) {
    seen_.insert(key);
    if (!node_.contains(key)) return;
    const json& v = node_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_unsigned()) throw ConfigError("");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("");
      } else {
        if (!v.is_array()) throw ConfigError("");
        for (const auto& e : v) {
          if constexpr (std::is_integral_v<typename T::value_type>) {
            if (!e.is_number_unsigned()) throw ConfigError("");
          } else {
            if (!e.is_number()) throw ConfigError("");
          }
        }
      }
      target = v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError(name_ + "." + key + ": wrong type (" + v.dump() + ")");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return node_.contains(key) ? &node_.at(key) : nullptr;
  }

 private:
  const json& node_;
  std::string name_;
  std::set<std::string> seen_;
};

FftWindow window_from(const std::string& name) {
  if (name == "none") return FftWindow::none;
  if (name == "hann") return FftWindow::hann;
  throw ConfigError("observables.fft_window: expected 'none' or 'hann', got '" + name + "'");
}

std::string window_name(FftWindow w) { return w == FftWindow::hann ? "hann" : "none"; }

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

RunConfig parse_config(const json& document) {
  RunConfig c;
  Section root(document, "config");
  if (const json* node = root.child("mesh")) {
    Section s(*node, "mesh");
    s.get("points", c.mesh.points);
    s.get("scaling", c.mesh.scaling);
    s.done();
  }
  if (const json* node = root.child("physics")) {
    Section s(*node, "physics");
    s.get("g", c.physics.g);
    s.get("kappa", c.physics.kappa);
    s.done();
  }
  if (const json* node = root.child("dynamics")) {
    Section s(*node, "dynamics");
    s.get("horizon", c.dynamics.horizon);
    s.get("dt", c.dynamics.dt);
    s.get("samples_per_period", c.dynamics.samples_per_period);
    s.get("max_samples", c.dynamics.max_samples);
    s.get("min_horizon", c.dynamics.min_horizon);
    s.get("sum_rule_threshold", c.dynamics.sum_rule_threshold);
    s.get("max_states", c.dynamics.max_states);
    s.done();
  }
  if (const json* node = root.child("observables")) {
    Section s(*node, "observables");
    auto& o = c.observables;
    s.get("bins", o.bins);
    std::vector<double> window;
    s.get("tail_window", window);
    if (node->contains("tail_window")) {
      require(window.size() == 2, "observables.tail_window: expected [lo, hi]");
      o.tail_lo = window[0];
      o.tail_hi = window[1];
    }
    s.get("tail_group_width", o.tail_group_width);
    std::string fft_window = window_name(o.fft_window);
    s.get("fft_window", fft_window);
    o.fft_window = window_from(fft_window);
    s.get("fft_padding", o.fft_padding);
    std::vector<double> range;
    s.get("spectrum_range", range);
    if (node->contains("spectrum_range")) {
      require(range.size() == 2, "observables.spectrum_range: expected [lo, hi]");
      o.spectrum_lo = range[0];
      o.spectrum_hi = range[1];
    }
    s.get("echo_window", o.echo_window);
    s.get("density", o.density);
    s.get("refine", o.refine);
    s.get("density_duration", o.density_duration);
    s.get("density_frames", o.density_frames);
    if (const json* cls = s.child("classifier")) {
      Section t(*cls, "observables.classifier");
      auto& th = o.classifier;
      t.get("smoothing_bins", th.smoothing_bins);
      t.get("min_prominence", th.min_prominence);
      t.get("exponential_mode", th.exponential_mode);
      t.get("monotone_tolerance", th.monotone_tolerance);
      t.get("shoulder_ratio", th.shoulder_ratio);
      t.get("gaussian_max_skew", th.gaussian_max_skew);
      t.done();
    }
    s.done();
  }
  if (const json* node = root.child("sweep")) {
    Section s(*node, "sweep");
    s.get("g", c.sweep.g);
    s.get("kappa", c.sweep.kappa);
    s.done();
  }
  if (const json* node = root.child("convergence")) {
    Section s(*node, "convergence");
    s.get("points", c.convergence.points);
    s.get("scalings", c.convergence.scalings);
    s.get("tolerance", c.convergence.tolerance);
    s.done();
  }
  if (const json* node = root.child("tg_check")) {
    Section s(*node, "tg_check");
    s.get("duration", c.tg_check.duration);
    s.get("step", c.tg_check.step);
    s.done();
  }
  if (const json* node = root.child("output")) {
    Section s(*node, "output");
    s.get("directory", c.output.directory);
    s.get("cache_directory", c.output.cache_directory);
    s.get("record_timings", c.output.record_timings);
    s.done();
  }
  root.get("parallelism", c.parallelism);
  root.done();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json document;
  try {
    document = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(document);
}

json to_json(const RunConfig& c) {
  const auto& o = c.observables;
  const auto& th = o.classifier;
  return json{
      {"mesh", {{"points", c.mesh.points}, {"scaling", c.mesh.scaling}}},
      {"physics", {{"g", c.physics.g}, {"kappa", c.physics.kappa}}},
      {"dynamics",
       {{"horizon", c.dynamics.horizon},
        {"dt", c.dynamics.dt},
        {"samples_per_period", c.dynamics.samples_per_period},
        {"max_samples", c.dynamics.max_samples},
        {"min_horizon", c.dynamics.min_horizon},
        {"sum_rule_threshold", c.dynamics.sum_rule_threshold},
        {"max_states", c.dynamics.max_states}}},
      {"observables",
       {{"bins", o.bins},
        {"tail_window", {o.tail_lo, o.tail_hi}},
        {"tail_group_width", o.tail_group_width},
        {"fft_window", window_name(o.fft_window)},
        {"fft_padding", o.fft_padding},
        {"spectrum_range", {o.spectrum_lo, o.spectrum_hi}},
        {"echo_window", o.echo_window},
        {"density", o.density},
        {"refine", o.refine},
        {"density_duration", o.density_duration},
        {"density_frames", o.density_frames},
        {"classifier",
         {{"smoothing_bins", th.smoothing_bins},
          {"min_prominence", th.min_prominence},
          {"exponential_mode", th.exponential_mode},
          {"monotone_tolerance", th.monotone_tolerance},
          {"shoulder_ratio", th.shoulder_ratio},
          {"gaussian_max_skew", th.gaussian_max_skew}}}}},
      {"sweep", {{"g", c.sweep.g}, {"kappa", c.sweep.kappa}}},
      {"convergence",
       {{"points", c.convergence.points},
        {"scalings", c.convergence.scalings},
        {"tolerance", c.convergence.tolerance}}},
      {"tg_check", {{"duration", c.tg_check.duration}, {"step", c.tg_check.step}}},
      {"output",
       {{"directory", c.output.directory},
        {"cache_directory", c.output.cache_directory},
        {"record_timings", c.output.record_timings}}},
      {"parallelism", c.parallelism}};
}

void validate(const RunConfig& c, const std::string& verb) {
  require(verb == "run" || verb == "sweep" || verb == "converge" || verb == "tg-check",
          "unknown verb '" + verb + "'");
  require(c.mesh.points >= 3 && c.mesh.points % 2 == 1,
          "mesh.points must be odd and >= 3 so that a node sits on the impurity");
  require(c.mesh.scaling > 0.0 && finite(c.mesh.scaling), "mesh.scaling must be positive");
  require(finite(c.physics.g) && c.physics.g >= 0.0, "physics.g must be finite and >= 0");
  require(finite(c.physics.kappa), "physics.kappa must be finite");

  const auto& d = c.dynamics;
  require(d.horizon > 0.0 && finite(d.horizon), "dynamics.horizon must be positive");
  require(d.dt >= 0.0 && finite(d.dt), "dynamics.dt must be >= 0 (0 selects automatically)");
  require(d.samples_per_period > 0.0 && finite(d.samples_per_period),
          "dynamics.samples_per_period must be positive");
  require(d.max_samples >= 4096, "dynamics.max_samples must be >= 4096");
  require(d.min_horizon >= 0.0 && finite(d.min_horizon), "dynamics.min_horizon must be >= 0");
  require(d.sum_rule_threshold > 0.0 && d.sum_rule_threshold <= 1.0,
          "dynamics.sum_rule_threshold must lie in (0, 1]");
  if (d.dt > 0.0) {
    require(d.horizon / d.dt <= static_cast<double>(d.max_samples),
            "dynamics.dt gives more samples than dynamics.max_samples");
  }

  const auto& o = c.observables;
  require(o.bins >= 2, "observables.bins must be >= 2");
  require(o.tail_lo > 0.0 && o.tail_hi > o.tail_lo && finite(o.tail_hi),
          "observables.tail_window must satisfy 0 < lo < hi");
  require(o.tail_group_width >= 0.0 && finite(o.tail_group_width),
          "observables.tail_group_width must be >= 0");
  require(o.fft_padding >= 1, "observables.fft_padding must be >= 1");
  require(finite(o.spectrum_lo) && finite(o.spectrum_hi) && o.spectrum_hi > o.spectrum_lo,
          "observables.spectrum_range must satisfy lo < hi");
  require(o.echo_window >= 0.0 && finite(o.echo_window), "observables.echo_window must be >= 0");
  require(o.refine >= 1, "observables.refine must be >= 1");
  require(o.density_duration >= 0.0 && finite(o.density_duration),
          "observables.density_duration must be >= 0");
  require(o.density_frames >= 1, "observables.density_frames must be >= 1");
  const auto& th = o.classifier;
  require(th.smoothing_bins >= 1, "classifier.smoothing_bins must be >= 1");
  require(th.min_prominence >= 0.0 && th.min_prominence < 1.0,
          "classifier.min_prominence must lie in [0, 1)");
  require(th.exponential_mode > 0.0 && th.exponential_mode <= 1.0,
          "classifier.exponential_mode must lie in (0, 1]");
  require(th.monotone_tolerance > 0.0, "classifier.monotone_tolerance must be positive");
  require(th.shoulder_ratio > 0.0 && th.shoulder_ratio < 1.0,
          "classifier.shoulder_ratio must lie in (0, 1)");
  require(th.gaussian_max_skew > 0.0, "classifier.gaussian_max_skew must be positive");

  require(!c.output.directory.empty(), "output.directory must not be empty");

  if (verb == "sweep") {
    require(!c.sweep.g.empty() && !c.sweep.kappa.empty(),
            "sweep.g and sweep.kappa must be non-empty lists");
    for (double g : c.sweep.g) require(finite(g) && g >= 0.0, "sweep.g entries must be >= 0");
    for (double k : c.sweep.kappa) require(finite(k), "sweep.kappa entries must be finite");
  }
  if (verb == "converge") {
    require(!c.convergence.points.empty() && !c.convergence.scalings.empty(),
            "convergence.points and convergence.scalings must be non-empty lists");
    for (std::size_t n : c.convergence.points) {
      require(n >= 3 && n % 2 == 1, "convergence.points entries must be odd and >= 3");
    }
    for (double h : c.convergence.scalings) {
      require(h > 0.0 && finite(h), "convergence.scalings entries must be positive");
    }
    require(c.convergence.tolerance > 0.0, "convergence.tolerance must be positive");
  }
  if (verb == "tg-check") {
    require(c.tg_check.duration > 0.0 && finite(c.tg_check.duration),
            "tg_check.duration must be positive");
    require(c.tg_check.step > 0.0 && c.tg_check.step <= c.tg_check.duration,
            "tg_check.step must lie in (0, duration]");
  }
}

void apply_environment(RunConfig& config) {
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
    config.output.directory = dir;
  }
}

}  // namespace quench
