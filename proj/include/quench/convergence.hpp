#pragma once

#include "quench/quench_dynamics.hpp"

#include <cstddef>
#include <vector>

namespace quench {

/// Ground energy at contact strength g from two meshes sharing the same
/// coverage N h. The contact term converges linearly in h, so the two raw
/// energies are combined as E(0) = (E_coarse h_fine - E_fine h_coarse) / (h_fine - h_coarse).
struct ExtrapolatedEnergy {
  Mesh coarse;
  Mesh fine;
  double coarse_energy = 0.0;
  double fine_energy = 0.0;
  double extrapolated = 0.0;
};

/// Odd mesh size closest to coverage / scaling.
std::size_t points_for_coverage(double coverage, double scaling);

ExtrapolatedEnergy extrapolated_ground_energy(double g, const Mesh& coarse, double fine_scaling);

struct ConvergenceRow {
  std::size_t n_points = 0;
  double scaling = 0.0;
  double initial_energy = 0.0;   // E_0
  double quenched_energy = 0.0;  // E'_0
  double mean_le = 0.0;
  // differences to the previous row with the same scaling (NaN for the first)
  double d_initial = 0.0;
  double d_quenched = 0.0;
  double d_mean_le = 0.0;
  bool converged = false;  // all differences within tolerance
};

struct ConvergenceOptions {
  double tolerance = 1e-4;
  QuenchOptions quench;
};

/// Rows for every (N, h) with h from `scalings` and N from `points`, ordered
/// by h then N. Successive differences run along N at fixed h.
std::vector<ConvergenceRow> convergence_report(double g, double kappa,
                                               const std::vector<std::size_t>& points,
                                               const std::vector<double>& scalings,
                                               const ConvergenceOptions& options = {});

}  // namespace quench
