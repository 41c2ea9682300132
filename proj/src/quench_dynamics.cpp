#include "quench/quench_dynamics.hpp"

#include "quench/trig_sum.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace quench {

std::vector<double> QuenchResult::weights() const {
  std::vector<double> w(overlaps.size());
  for (std::size_t n = 0; n < overlaps.size(); ++n) w[n] = std::norm(overlaps[n]);
  return w;
}

std::vector<double> QuenchResult::excitation_energies() const {
  std::vector<double> f(static_cast<std::size_t>(final_energies.size()));
  for (std::size_t n = 0; n < f.size(); ++n) {
    f[n] = final_energies(static_cast<Eigen::Index>(n)) - initial_energy;
  }
  return f;
}

namespace {

double sum_of_weights(const std::vector<std::complex<double>>& overlaps) {
  double s = 0.0;
  for (const auto& a : overlaps) s += std::norm(a);
  return s;
}

void require_sum_rule(double sum_rule, double threshold, std::size_t kept, std::size_t available) {
  if (sum_rule < threshold) {
    throw NumericalError("overlap sum rule " + std::to_string(sum_rule) + " below threshold " +
                         std::to_string(threshold) + " with " + std::to_string(kept) + " of " +
                         std::to_string(available) +
                         " states; retain more states or enlarge the mesh");
  }
}

}  // namespace

QuenchResult compute_overlaps(const GroundState& initial, const Spectrum& quenched,
                              double threshold) {
  if (!(initial.config.mesh == quenched.config().mesh)) {
    throw InvalidArgument("initial and quenched states live on different meshes");
  }
  const PairBasis& qb = quenched.basis();
  Eigen::VectorXd probe;
  if (qb.sector() == initial.basis->sector()) {
    probe = initial.state;
  } else {
    probe = qb.from_grid(initial.basis->to_grid(initial.state));
  }
  const Eigen::VectorXd a = quenched.states().transpose() * probe;

  QuenchResult out{quenched.config(), {}, initial.energy, quenched.energies(), 0.0, qb.dimension()};
  out.overlaps.resize(static_cast<std::size_t>(a.size()));
  for (Eigen::Index n = 0; n < a.size(); ++n) out.overlaps[static_cast<std::size_t>(n)] = a(n);
  out.sum_rule = sum_of_weights(out.overlaps);
  require_sum_rule(out.sum_rule, threshold, out.size(), out.available_states);
  return out;
}

std::size_t states_for_sum_rule(std::span<const double> weights, double threshold) {
  double cumulative = 0.0;
  for (std::size_t n = 0; n < weights.size(); ++n) {
    cumulative += weights[n];
    if (cumulative >= threshold) return n + 1;
  }
  return weights.size();
}

QuenchResult quench(const GroundState& initial, double kappa, const QuenchOptions& options) {
  TwoBodyConfig config{initial.config.mesh, initial.config.g, kappa};
  const SymmetricOperator op = assemble_two_body(config, *initial.basis);
  const ProjectedSpectrum projected = project_onto_eigenbasis(op, initial.state);

  const auto total = static_cast<std::size_t>(projected.values.size());
  std::vector<double> w(total);
  for (std::size_t n = 0; n < total; ++n) {
    const double p = projected.projections(static_cast<Eigen::Index>(n));
    w[n] = p * p;
  }
  std::size_t keep = states_for_sum_rule(w, options.sum_rule_threshold);
  if (options.max_states > 0) keep = std::min(keep, options.max_states);

  QuenchResult out{config, {}, initial.energy,
                   projected.values.head(static_cast<Eigen::Index>(keep)), 0.0, total};
  out.overlaps.resize(keep);
  for (std::size_t n = 0; n < keep; ++n) {
    out.overlaps[n] = projected.projections(static_cast<Eigen::Index>(n));
  }
  out.sum_rule = sum_of_weights(out.overlaps);
  require_sum_rule(out.sum_rule, options.sum_rule_threshold, keep, total);
  return out;
}

TimeGrid make_time_grid(double horizon, double dt) {
  if (!(dt > 0.0) || !(horizon >= 0.0)) {
    throw InvalidArgument("time grid needs dt > 0 and a non-negative horizon");
  }
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  const double spacing = steps == 0 ? dt : horizon / static_cast<double>(steps);
  return TimeGrid{spacing, steps + 1};
}

ChosenTimeGrid choose_time_grid(const QuenchResult& result, double horizon,
                                const TimeGridOptions& options) {
  if (!(horizon > 0.0) || !(options.samples_per_period > 0.0) || options.min_samples < 2 ||
      options.max_samples < options.min_samples) {
    throw InvalidArgument("choose_time_grid: invalid horizon or sampling options");
  }
  double top = 0.0;
  for (std::size_t n = 0; n < result.size(); ++n) top = std::max(top, result.weight(n));
  ChosenTimeGrid chosen;
  for (std::size_t n = 0; n < result.size(); ++n) {
    if (result.weight(n) >= options.significance * top) {
      const double f = std::abs(result.final_energies(static_cast<Eigen::Index>(n)) -
                                result.initial_energy);
      chosen.fastest_frequency = std::max(chosen.fastest_frequency, f);
    }
  }
  const double coarsest = horizon / static_cast<double>(options.min_samples - 1);
  const double finest = horizon / static_cast<double>(options.max_samples - 1);
  double dt = coarsest;
  if (chosen.fastest_frequency > 0.0) {
    dt = std::min(dt, 2.0 * std::numbers::pi /
                          (options.samples_per_period * chosen.fastest_frequency));
  }
  if (dt < finest) {
    dt = finest;
    chosen.undersampled = true;
  }
  chosen.grid = make_time_grid(horizon, dt);
  return chosen;
}

EchoSeries echo_from_amplitude(std::vector<std::complex<double>> amplitude, double dt) {
  EchoSeries series;
  series.dt = dt;
  series.times.resize(amplitude.size());
  series.echo.resize(amplitude.size());
  for (std::size_t m = 0; m < amplitude.size(); ++m) {
    series.times[m] = dt * static_cast<double>(m);
    series.echo[m] = std::norm(amplitude[m]);
  }
  series.amplitude = std::move(amplitude);
  return series;
}

EchoSeries echo_amplitude(const QuenchResult& result, const TimeGrid& grid) {
  if (grid.count == 0) {
    throw InvalidArgument("echo_amplitude: empty time grid");
  }
  const std::vector<double> f = result.excitation_energies();
  const std::vector<double> w = result.weights();
  return echo_from_amplitude(trig_sum_uniform(f, w, grid.dt, grid.count), grid.dt);
}

EchoSeries echo_amplitude(const QuenchResult& result, std::span<const double> times) {
  if (times.empty()) {
    throw InvalidArgument("echo_amplitude: empty time grid");
  }
  EchoSeries series;
  series.times.assign(times.begin(), times.end());
  series.amplitude = trig_sum_direct(result.excitation_energies(), result.weights(), times);
  series.echo.resize(times.size());
  for (std::size_t m = 0; m < times.size(); ++m) series.echo[m] = std::norm(series.amplitude[m]);
  return series;
}

namespace {

Eigen::MatrixXcd evolve_expanded(const QuenchResult& expanded, const Spectrum& quenched, double t) {
  const auto dim = static_cast<Eigen::Index>(quenched.basis().dimension());
  Eigen::VectorXd re = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd im = Eigen::VectorXd::Zero(dim);
  for (std::size_t n = 0; n < expanded.size(); ++n) {
    const double e = expanded.final_energies(static_cast<Eigen::Index>(n));
    const std::complex<double> c = expanded.overlaps[n] * std::polar(1.0, -e * t);
    const auto col = quenched.states().col(static_cast<Eigen::Index>(n));
    re += c.real() * col;
    im += c.imag() * col;
  }
  const PairBasis& basis = quenched.basis();
  Eigen::MatrixXcd grid(basis.to_grid(re).cast<std::complex<double>>());
  grid += std::complex<double>(0.0, 1.0) * basis.to_grid(im).cast<std::complex<double>>();
  return grid;
}

}  // namespace

Eigen::MatrixXcd evolve_state(const GroundState& initial, const Spectrum& quenched, double t) {
  return evolve_expanded(compute_overlaps(initial, quenched, 0.0), quenched, t);
}

DensityProfile single_particle_density(const Mesh& mesh, const Eigen::MatrixXcd& state,
                                       std::size_t refine) {
  const std::size_t n = mesh.size();
  if (static_cast<std::size_t>(state.rows()) != n || static_cast<std::size_t>(state.cols()) != n) {
    throw InvalidArgument("density: state grid does not match the mesh");
  }
  if (refine == 0) {
    throw InvalidArgument("density: refine factor must be >= 1");
  }
  DensityProfile out;
  const double h = mesh.scaling();
  if (refine == 1) {
    out.positions.assign(mesh.nodes().begin(), mesh.nodes().end());
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.values[i] = state.row(static_cast<Eigen::Index>(i)).squaredNorm() / h;
    }
    return out;
  }
  const std::size_t count = (n - 1) * refine + 1;
  out.positions.resize(count);
  out.values.resize(count);
  Eigen::VectorXd basis_values(static_cast<Eigen::Index>(n));
  for (std::size_t m = 0; m < count; ++m) {
    const double x = mesh.node(0) + h * static_cast<double>(m) / static_cast<double>(refine);
    out.positions[m] = x;
    for (std::size_t i = 0; i < n; ++i) {
      basis_values(static_cast<Eigen::Index>(i)) = basis_function(mesh, i, x);
    }
    // u_j = sum_i Psi_ij f_i(x); the x2 integral is exact by orthonormality
    const Eigen::RowVectorXcd u = basis_values.transpose().cast<std::complex<double>>() * state;
    out.values[m] = u.squaredNorm();
  }
  return out;
}

DensityField density_field(const GroundState& initial, const Spectrum& quenched,
                           std::span<const double> times, std::size_t refine) {
  const QuenchResult expanded = compute_overlaps(initial, quenched, 0.0);
  DensityField field;
  field.times.assign(times.begin(), times.end());
  for (double t : times) {
    DensityProfile p = single_particle_density(expanded.config.mesh,
                                               evolve_expanded(expanded, quenched, t), refine);
    if (field.positions.empty()) field.positions = std::move(p.positions);
    field.values.push_back(std::move(p.values));
  }
  return field;
}

}  // namespace quench
