#include "quench/tg_limit.hpp"

#include "quench/eigensolver.hpp"

namespace quench {

TGQuench tg_quench(const Mesh& mesh, double kappa) {
  if (!std::isfinite(kappa)) {
    throw InvalidArgument("tg_quench: kappa must be finite");
  }
  const EigenDecomposition trap = eigensolve(single_particle_hamiltonian(mesh, 0.0), 2);
  const EigenDecomposition split =
      eigensolve(single_particle_hamiltonian(mesh, kappa), mesh.size());
  TGQuench tg{mesh, kappa, trap.values.head<2>(), trap.vectors.leftCols<2>(), split.values,
              split.vectors.transpose() * trap.vectors.leftCols<2>()};
  return tg;
}

Eigen::Matrix2cd TGQuench::overlap_matrix(double t) const {
  Eigen::Matrix2cd a;
  const auto n_states = single_energies.size();
  for (int m = 0; m < 2; ++m) {
    for (int n = 0; n < 2; ++n) {
      std::complex<double> s = 0.0;
      for (Eigen::Index k = 0; k < n_states; ++k) {
        s += projections(k, m) * projections(k, n) * std::polar(1.0, -single_energies(k) * t);
      }
      a(m, n) = std::polar(1.0, orbital_energies(m) * t) * s;
    }
  }
  return a;
}

namespace {

EchoSeries series_from(std::span<const double> times, std::vector<std::complex<double>> amp) {
  EchoSeries series;
  series.times.assign(times.begin(), times.end());
  series.echo.resize(amp.size());
  for (std::size_t m = 0; m < amp.size(); ++m) series.echo[m] = std::norm(amp[m]);
  series.amplitude = std::move(amp);
  return series;
}

}  // namespace

EchoSeries tg_echo(const TGQuench& tg, std::span<const double> times) {
  std::vector<std::complex<double>> amp(times.size(), 0.0);
  const Eigen::VectorXd a = tg.single_overlaps();
  for (std::size_t m = 0; m < times.size(); ++m) {
    std::complex<double> s = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      s += a(k) * a(k) *
           std::polar(1.0, (tg.orbital_energies(0) - tg.single_energies(k)) * times[m]);
    }
    amp[m] = s;
  }
  return series_from(times, std::move(amp));
}

EchoSeries tg_echo(const Mesh& mesh, double kappa, std::span<const double> times) {
  return tg_echo(tg_quench(mesh, kappa), times);
}

EchoSeries tg_determinant_echo(const TGQuench& tg, std::span<const double> times) {
  std::vector<std::complex<double>> amp(times.size());
  for (std::size_t m = 0; m < times.size(); ++m) {
    amp[m] = tg.overlap_matrix(times[m]).determinant();
  }
  return series_from(times, std::move(amp));
}

EchoSeries tg_determinant_echo(const Mesh& mesh, double kappa, std::span<const double> times) {
  return tg_determinant_echo(tg_quench(mesh, kappa), times);
}

}  // namespace quench
