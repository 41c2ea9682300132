#pragma once

#include "quench/lagrange_mesh.hpp"
#include "quench/quench_dynamics.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>

namespace quench {

/// Two hard-core bosons mapped onto two free fermions occupying the lowest
/// harmonic-oscillator orbitals phi_0, phi_1. The impurity acts on each
/// orbital separately, so everything follows from single-particle spectra
/// on the mesh.
struct TGQuench {
  Mesh mesh;
  double kappa = 0.0;
  Eigen::Vector2d orbital_energies;  // eps_0, eps_1 of the unperturbed trap
  Eigen::MatrixXd orbitals;          // N x 2 coefficients of phi_0, phi_1
  Eigen::VectorXd single_energies;   // eps'_n, ascending
  Eigen::MatrixXd projections;       // N x 2, <phi'_n | phi_m>

  /// a~_n = <phi'_n | phi_0>.
  Eigen::VectorXd single_overlaps() const { return projections.col(0); }

  /// A_mn(t) = <phi_m| exp(i H_0 t) exp(-i H' t) |phi_n>, m, n in {0, 1}.
  Eigen::Matrix2cd overlap_matrix(double t) const;
};

TGQuench tg_quench(const Mesh& mesh, double kappa);

/// L(t) = |sum_n |a~_n|^2 exp(i (eps_0 - eps'_n) t)|^2.
EchoSeries tg_echo(const TGQuench& tg, std::span<const double> times);
EchoSeries tg_echo(const Mesh& mesh, double kappa, std::span<const double> times);

/// L(t) = |A_00 A_11 - A_01 A_10|^2; the amplitude column holds the determinant.
EchoSeries tg_determinant_echo(const TGQuench& tg, std::span<const double> times);
EchoSeries tg_determinant_echo(const Mesh& mesh, double kappa, std::span<const double> times);

}  // namespace quench
