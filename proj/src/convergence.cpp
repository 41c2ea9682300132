#include "quench/convergence.hpp"

#include "quench/observables.hpp"

#include <cmath>
#include <limits>

namespace quench {

std::size_t points_for_coverage(double coverage, double scaling) {
  if (!(coverage > 0.0) || !(scaling > 0.0)) {
    throw InvalidArgument("points_for_coverage: coverage and scaling must be positive");
  }
  const double raw = coverage / scaling;
  auto n = static_cast<long>(std::llround(raw));
  if (n % 2 == 0) n += raw >= static_cast<double>(n) ? 1 : -1;
  return static_cast<std::size_t>(std::max(n, 3L));
}

ExtrapolatedEnergy extrapolated_ground_energy(double g, const Mesh& coarse, double fine_scaling) {
  if (!(fine_scaling > 0.0) || !(fine_scaling < coarse.scaling())) {
    throw InvalidArgument("extrapolated_ground_energy: fine scaling must lie in (0, coarse)");
  }
  const double coverage = coarse.scaling() * static_cast<double>(coarse.size());
  Mesh fine(points_for_coverage(coverage, fine_scaling), fine_scaling);
  ExtrapolatedEnergy out{coarse, fine, 0.0, 0.0, 0.0};
  out.coarse_energy = initial_ground_state(coarse, g).energy;
  out.fine_energy = initial_ground_state(fine, g).energy;
  const double hc = coarse.scaling();
  const double hf = fine.scaling();
  out.extrapolated = (out.coarse_energy * hf - out.fine_energy * hc) / (hf - hc);
  return out;
}

std::vector<ConvergenceRow> convergence_report(double g, double kappa,
                                               const std::vector<std::size_t>& points,
                                               const std::vector<double>& scalings,
                                               const ConvergenceOptions& options) {
  if (points.empty() || scalings.empty()) {
    throw InvalidArgument("convergence_report: point and scaling lists must be non-empty");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<ConvergenceRow> rows;
  for (double h : scalings) {
    const std::size_t first = rows.size();
    for (std::size_t n : points) {
      const Mesh mesh(n, h);
      const GroundState initial = initial_ground_state(mesh, g);
      const QuenchResult result = quench(initial, kappa, options.quench);
      ConvergenceRow row;
      row.n_points = n;
      row.scaling = h;
      row.initial_energy = initial.energy;
      row.quenched_energy = result.final_energies(0);
      row.mean_le = mean_le(result);
      row.d_initial = row.d_quenched = row.d_mean_le = nan;
      if (rows.size() > first) {
        const ConvergenceRow* previous = &rows.back();
        row.d_initial = row.initial_energy - previous->initial_energy;
        row.d_quenched = row.quenched_energy - previous->quenched_energy;
        row.d_mean_le = row.mean_le - previous->mean_le;
        row.converged = std::abs(row.d_initial) <= options.tolerance &&
                        std::abs(row.d_quenched) <= options.tolerance &&
                        std::abs(row.d_mean_le) <= options.tolerance;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace quench
