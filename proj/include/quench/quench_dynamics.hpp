#pragma once

#include "quench/two_body.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace quench {

/// Overlaps a_n = <phi_n | psi_0> of the quenched eigenstates with the
/// initial ground state, together with the energies that drive the dynamics.
/// Everything downstream (echo, spectral function, statistics) factors
/// through this record.
struct QuenchResult {
  TwoBodyConfig config;                       // the quenched system
  std::vector<std::complex<double>> overlaps; // a_n, energy-ordered
  double initial_energy = 0.0;                // E_0
  Eigen::VectorXd final_energies;             // E'_n
  double sum_rule = 0.0;                      // sum |a_n|^2
  std::size_t available_states = 0;          // size of the sector that was solved

  std::size_t size() const { return overlaps.size(); }
  double weight(std::size_t n) const { return std::norm(overlaps[n]); }
  std::vector<double> weights() const;
  /// E'_n - E_0, the frequencies at which the echo amplitude rotates.
  std::vector<double> excitation_energies() const;
};

inline constexpr double kDefaultSumRuleThreshold = 1.0 - 1e-6;

/// a_n from an explicit spectrum. States of different sectors are compared
/// through their grids. Throws InvalidArgument for mismatched meshes and
/// NumericalError when the sum rule is below `threshold`.
QuenchResult compute_overlaps(const GroundState& initial, const Spectrum& quenched,
                              double threshold = kDefaultSumRuleThreshold);

struct QuenchOptions {
  double sum_rule_threshold = kDefaultSumRuleThreshold;
  std::size_t max_states = 0;  // 0: no cap
};

/// Smallest k whose energy-ordered prefix of weights reaches `threshold`.
std::size_t states_for_sum_rule(std::span<const double> weights, double threshold);

/// Quenches `initial` by switching on kappa. Resolves psi_0 on the complete
/// even-sector spectrum without forming eigenvectors, then keeps the
/// smallest energy-ordered prefix that satisfies the sum-rule threshold.
/// Overlap phases are fixed so that every a_n >= 0.
QuenchResult quench(const GroundState& initial, double kappa, const QuenchOptions& options = {});

/// Uniform time grid t_m = m * dt, m = 0 .. count-1.
struct TimeGrid {
  double dt = 0.0;
  std::size_t count = 0;
  double horizon() const { return count == 0 ? 0.0 : dt * static_cast<double>(count - 1); }
  double time(std::size_t m) const { return dt * static_cast<double>(m); }
};

/// Grid covering [0, horizon] with spacing at most dt.
TimeGrid make_time_grid(double horizon, double dt);

struct TimeGridOptions {
  double samples_per_period = 20.0;  // per period of the fastest significant frequency
  double significance = 1e-6;        // weights below this fraction of the largest are ignored
  std::size_t min_samples = 4096;
  std::size_t max_samples = std::size_t{1} << 21;
};

struct ChosenTimeGrid {
  TimeGrid grid;
  double fastest_frequency = 0.0;
  bool undersampled = false;  // max_samples forced a coarser step than requested
};

/// Picks dt from the fastest significant |E'_n - E_0| of `result`.
ChosenTimeGrid choose_time_grid(const QuenchResult& result, double horizon,
                                const TimeGridOptions& options = {});

struct EchoSeries {
  std::vector<double> times;
  std::vector<std::complex<double>> amplitude;  // nu(t)
  std::vector<double> echo;                     // L(t) = |nu(t)|^2
  double dt = 0.0;                              // > 0 only for uniform grids

  std::size_t size() const { return times.size(); }
  double horizon() const { return times.empty() ? 0.0 : times.back(); }
};

/// nu(t) = sum_n |a_n|^2 exp(i (E_0 - E'_n) t) and L = |nu|^2.
EchoSeries echo_amplitude(const QuenchResult& result, const TimeGrid& grid);
EchoSeries echo_amplitude(const QuenchResult& result, std::span<const double> times);

/// Builds an EchoSeries from precomputed amplitudes on a uniform grid.
EchoSeries echo_from_amplitude(std::vector<std::complex<double>> amplitude, double dt);

/// Psi(t) = sum_n a_n phi_n exp(-i E'_n t) over the states of `quenched`, as
/// an N x N grid of mesh coefficients. The overlaps are taken against the
/// spectrum's own eigenvectors, so a truncated spectrum gives a truncated
/// state (norm = its sum rule).
Eigen::MatrixXcd evolve_state(const GroundState& initial, const Spectrum& quenched, double t);

struct DensityProfile {
  std::vector<double> positions;
  std::vector<double> values;
};

/// rho(x) = integral |Psi(x, x2)|^2 dx2. At nodes this is sum_j |Psi_ij|^2 / h.
/// With refine > 1 the profile is evaluated on a grid refine times finer
/// than the mesh through the Fourier basis functions.
DensityProfile single_particle_density(const Mesh& mesh, const Eigen::MatrixXcd& state,
                                       std::size_t refine = 1);

struct DensityField {
  std::vector<double> positions;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // values[time][position]
};

DensityField density_field(const GroundState& initial, const Spectrum& quenched,
                           std::span<const double> times, std::size_t refine = 1);

}  // namespace quench
