#pragma once

#include "quench/observables.hpp"

#include "json.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace quench {

/// Raised for malformed or out-of-range configuration.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct MeshSettings {
  std::size_t points = 121;
  double scaling = 0.15;
};

struct PhysicsSettings {
  double g = 0.0;
  double kappa = 0.0;
};

struct DynamicsSettings {
  double horizon = kDefaultHorizon;
  double dt = 0.0;  // 0: chosen from the fastest significant frequency
  double samples_per_period = 20.0;
  std::size_t max_samples = std::size_t{1} << 21;
  double min_horizon = kDefaultHorizon;
  double sum_rule_threshold = kDefaultSumRuleThreshold;
  std::size_t max_states = 0;
};

struct ObservableSettings {
  std::size_t bins = 100;
  double tail_lo = 5.0;
  double tail_hi = 100.0;
  double tail_group_width = 4.0;
  FftWindow fft_window = FftWindow::none;
  std::size_t fft_padding = 2;
  double spectrum_lo = -10.0;  // written range of the FFT curve in omega
  double spectrum_hi = 30.0;
  double echo_window = 2.0 * std::numbers::pi * 10.0;  // leading span written to echo.csv
  bool density = true;
  std::size_t refine = 1;
  double density_duration = 2.0 * std::numbers::pi;
  std::size_t density_frames = 41;
  ClassifierThresholds classifier;
};

struct SweepSettings {
  std::vector<double> g;
  std::vector<double> kappa;
};

struct ConvergenceSettings {
  std::vector<std::size_t> points;
  std::vector<double> scalings;
  double tolerance = 1e-4;
};

struct TgCheckSettings {
  double duration = 20.0;
  double step = 0.01;
};

struct OutputSettings {
  std::string directory = "quench-out";
  std::string cache_directory;  // empty: no cache
  bool record_timings = false;  // timings make the manifest run-dependent
};

struct RunConfig {
  MeshSettings mesh;
  PhysicsSettings physics;
  DynamicsSettings dynamics;
  ObservableSettings observables;
  SweepSettings sweep;
  ConvergenceSettings convergence;
  TgCheckSettings tg_check;
  OutputSettings output;
  std::size_t parallelism = 0;  // 0: hardware concurrency
};

/// Environment variable that, when set, replaces output.directory.
inline constexpr const char* kOutputDirEnv = "QUENCH_OUTPUT_DIR";

/// Reads a config from JSON. Unknown keys and wrong types are errors; absent
/// keys keep their defaults.
RunConfig parse_config(const nlohmann::json& document);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form holding every field.
nlohmann::json to_json(const RunConfig& config);

/// Checks every field against module preconditions. `verb` selects the
/// extra requirements of sweep/converge ("run", "sweep", "converge", "tg-check").
void validate(const RunConfig& config, const std::string& verb = "run");

/// Applies the output-directory environment override, if present.
void apply_environment(RunConfig& config);

}  // namespace quench
