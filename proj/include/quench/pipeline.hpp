#pragma once

#include "quench/run_config.hpp"
#include "quench/spectrum_cache.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace quench {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNumeric = 2,
  kExitPartial = 3,
};

/// Everything computed for one (g, kappa) point.
struct PointAnalysis {
  GroundState initial;
  QuenchResult result;
  ChosenTimeGrid grid;
  EchoSeries series;
  EchoHistogram histogram;       // over [0, max L]
  EchoHistogram span_histogram;  // over [min L, max L], input of the classifier
  Classification classification;
  SpectralFunction discrete;
  SpectralFunction curve;
  std::optional<TailFit> tail;
  std::string tail_note;  // why no tail fit was possible
  double mean = 0.0;
  double sampled = 0.0;
};

/// Runs the per-point pipeline without touching the disk (except the cache).
PointAnalysis analyse_point(const RunConfig& config, const SpectrumCache* cache = nullptr);

struct PointRecord {
  double g = 0.0;
  double kappa = 0.0;
  bool ok = false;
  int exit_code = kExitOk;
  std::string error;
  std::string directory;  // relative to the sweep directory
  double mean_le = 0.0;
  double sampled_mean = 0.0;
  double sum_rule = 0.0;
  std::size_t states = 0;
  std::string label;
  double confidence = 0.0;
};

/// Writes the full artifact bundle of one point into `directory`.
PointRecord run_single(const RunConfig& config, const std::filesystem::path& directory);

/// Grid of points (g outer, kappa inner), each in its own sub-bundle, plus an
/// aggregate sweep.csv. Returns kExitPartial if some points failed.
int run_sweep(const RunConfig& config, const std::filesystem::path& directory,
              std::vector<PointRecord>* records = nullptr);

/// Convergence table over the configured point and scaling lists.
void run_convergence(const RunConfig& config, const std::filesystem::path& directory);

struct TgCheckSummary {
  double sup_two_body_vs_tg = 0.0;
  double sup_tg_vs_determinant = 0.0;
};

/// Two-body echo at the configured g against the fermionized pair.
TgCheckSummary run_tg_check(const RunConfig& config, const std::filesystem::path& directory);

/// Machine-readable error record written as error.json (best effort).
void write_error_record(const std::filesystem::path& directory, const std::string& kind,
                        const std::string& message, int exit_code);

}  // namespace quench
