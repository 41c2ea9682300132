#include "quench/blas_guard.hpp"
#include "quench/bundle.hpp"
#include "quench/pipeline.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>

using namespace quench;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::size_t> points;
  std::optional<double> scaling;
  std::optional<double> g;
  std::optional<double> kappa;
  std::optional<double> horizon;
  std::optional<double> dt;
  std::optional<double> sum_rule;
  std::optional<std::size_t> max_states;
  std::optional<std::size_t> bins;
  std::vector<double> tail_window;
  std::optional<std::size_t> refine;
  std::optional<std::string> fft_window;
  bool no_density = false;
  std::optional<std::string> output;
  std::optional<std::string> cache;
  std::optional<std::size_t> jobs;
  std::vector<double> g_list;
  std::vector<double> kappa_list;
  std::vector<std::size_t> points_list;
  std::vector<double> scaling_list;
  std::optional<double> duration;
  std::optional<double> step;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON configuration file");
  cmd->add_option("--points", o.points, "mesh size N (odd)");
  cmd->add_option("--scaling", o.scaling, "mesh spacing h");
  cmd->add_option("--g", o.g, "contact interaction strength");
  cmd->add_option("--kappa", o.kappa, "impurity strength after the quench");
  cmd->add_option("--horizon", o.horizon, "length of the sampled time window");
  cmd->add_option("--dt", o.dt, "time step (0: automatic)");
  cmd->add_option("--sum-rule", o.sum_rule, "required sum of retained |a_n|^2");
  cmd->add_option("--max-states", o.max_states, "cap on retained states (0: none)");
  cmd->add_option("--bins", o.bins, "histogram bins");
  cmd->add_option("--tail-window", o.tail_window, "frequency window of the tail fit")
      ->expected(2);
  cmd->add_option("--refine", o.refine, "density grid refinement factor");
  cmd->add_option("--fft-window", o.fft_window, "none or hann");
  cmd->add_flag("--no-density", o.no_density, "skip the density field");
  cmd->add_option("-o,--output", o.output, "output directory");
  cmd->add_option("--cache", o.cache, "spectrum cache directory");
  cmd->add_option("-j,--jobs", o.jobs, "parallel sweep points (0: all cores)");
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  apply_environment(c);
  if (o.points) c.mesh.points = *o.points;
  if (o.scaling) c.mesh.scaling = *o.scaling;
  if (o.g) c.physics.g = *o.g;
  if (o.kappa) c.physics.kappa = *o.kappa;
  if (o.horizon) c.dynamics.horizon = *o.horizon;
  if (o.dt) c.dynamics.dt = *o.dt;
  if (o.sum_rule) c.dynamics.sum_rule_threshold = *o.sum_rule;
  if (o.max_states) c.dynamics.max_states = *o.max_states;
  if (o.bins) c.observables.bins = *o.bins;
  if (!o.tail_window.empty()) {
    c.observables.tail_lo = o.tail_window[0];
    c.observables.tail_hi = o.tail_window[1];
  }
  if (o.refine) c.observables.refine = *o.refine;
  if (o.fft_window) {
    if (*o.fft_window == "none") c.observables.fft_window = FftWindow::none;
    else if (*o.fft_window == "hann") c.observables.fft_window = FftWindow::hann;
    else throw ConfigError("--fft-window must be 'none' or 'hann'");
  }
  if (o.no_density) c.observables.density = false;
  if (o.output) c.output.directory = *o.output;
  if (o.cache) c.output.cache_directory = *o.cache;
  if (o.jobs) c.parallelism = *o.jobs;
  if (!o.g_list.empty()) c.sweep.g = o.g_list;
  if (!o.kappa_list.empty()) c.sweep.kappa = o.kappa_list;
  if (!o.points_list.empty()) c.convergence.points = o.points_list;
  if (!o.scaling_list.empty()) c.convergence.scalings = o.scaling_list;
  if (o.duration) c.tg_check.duration = *o.duration;
  if (o.step) c.tg_check.step = *o.step;
  return c;
}

int report(const std::string& directory, const std::string& kind, const std::string& message,
           int code) {
  write_error_record(directory, kind, message, code);
  std::cerr << nlohmann::json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}
                   .dump()
            << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loschmidt echo of two trapped atoms after an impurity quench"};
  app.require_subcommand(1);
  Overrides o;
  CLI::App* run = app.add_subcommand("run", "single (g, kappa) point");
  CLI::App* sweep = app.add_subcommand("sweep", "grid of (g, kappa) points");
  CLI::App* converge = app.add_subcommand("converge", "convergence table over meshes");
  CLI::App* tg = app.add_subcommand("tg-check", "compare with the fermionized pair");
  for (CLI::App* cmd : {run, sweep, converge, tg}) add_common(cmd, o);
  sweep->add_option("--g-list", o.g_list, "interaction strengths");
  sweep->add_option("--kappa-list", o.kappa_list, "impurity strengths");
  converge->add_option("--points-list", o.points_list, "mesh sizes");
  converge->add_option("--scaling-list", o.scaling_list, "mesh spacings");
  tg->add_option("--duration", o.duration, "compared time window");
  tg->add_option("--step", o.step, "time step of the comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  std::string verb = app.get_subcommands().front()->get_name();
  RunConfig config;
  try {
    config = resolve(o);
    validate(config, verb);
  } catch (const std::exception& e) {
    const std::string dir = o.output.value_or(config.output.directory);
    return report(dir, "config", e.what(), kExitConfig);
  }

  try {
    ensure_sane_blas(argc, argv);
    const std::filesystem::path dir = config.output.directory;
    if (verb == "run") {
      run_single(config, dir);
    } else if (verb == "sweep") {
      const int code = run_sweep(config, dir);
      if (code != kExitOk) {
        std::cerr << "some sweep points failed; see sweep.csv\n";
        return code;
      }
    } else if (verb == "converge") {
      run_convergence(config, dir);
    } else {
      const TgCheckSummary s = run_tg_check(config, dir);
      std::cout << "max |L_two_body - L_tg| = " << format_double(s.sup_two_body_vs_tg)
                << "\nmax |L_tg - L_tg_determinant| = " << format_double(s.sup_tg_vs_determinant)
                << '\n';
    }
  } catch (const InvalidArgument& e) {
    return report(config.output.directory, "config", e.what(), kExitConfig);
  } catch (const std::exception& e) {
    return report(config.output.directory, "numeric", e.what(), kExitNumeric);
  }
  return kExitOk;
}
