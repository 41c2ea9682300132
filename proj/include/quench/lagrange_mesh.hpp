#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace quench {

/// Raised when an argument violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine fails (non-convergence, LAPACK error,
/// sum rule not reached).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform Lagrange-Fourier mesh centred on the origin.
///
/// Nodes sit at h*j for j = -(N-1)/2 ... (N-1)/2. N is odd so that one node
/// is exactly at the origin, where the impurity lives. All quadrature weights
/// are equal (lambda_i = 1 on the unscaled grid).
class Mesh {
 public:
  Mesh(std::size_t n_points, double scaling);

  std::size_t size() const { return n_points_; }
  double scaling() const { return scaling_; }
  std::size_t origin_index() const { return (n_points_ - 1) / 2; }
  double node(std::size_t i) const { return nodes_[i]; }
  std::span<const double> nodes() const { return nodes_; }
  double half_width() const { return scaling_ * static_cast<double>(origin_index()); }

  friend bool operator==(const Mesh& a, const Mesh& b) {
    return a.n_points_ == b.n_points_ && a.scaling_ == b.scaling_;
  }

 private:
  std::size_t n_points_;
  double scaling_;
  std::vector<double> nodes_;
};

/// Builds a Mesh; throws InvalidArgument for even or too small N, or h <= 0.
Mesh build_mesh(std::size_t n_points, double scaling);

/// Dense real symmetric matrix. Symmetry is enforced on construction by
/// mirroring the lower triangle, so entries(i, j) == entries(j, i) exactly.
class SymmetricOperator {
 public:
  SymmetricOperator() = default;
  explicit SymmetricOperator(Eigen::MatrixXd entries);

  std::size_t dimension() const { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  Eigen::MatrixXd entries_;
};

/// Unscaled Fourier-mesh kinetic matrix (includes the 1/2 of -1/2 d^2/dx^2).
/// Divide by h^2 for a mesh of spacing h.
SymmetricOperator kinetic_matrix(std::size_t n_points);

/// Kinetic entry for index offset d = i - j.
double kinetic_entry(std::size_t n_points, long offset);

/// Harmonic potential 1/2 x^2 at every node plus kappa/h on the origin node.
Eigen::VectorXd potential_diagonal(const Mesh& mesh, double kappa);

/// (1/h^2) T + diag(V).
SymmetricOperator single_particle_hamiltonian(const Mesh& mesh, double kappa);

/// Value of one Lagrange-Fourier basis function centred on node i, evaluated
/// at the physical coordinate x. Equals delta_ij / sqrt(h) at node j.
double basis_function(const Mesh& mesh, std::size_t i, double x);

/// Psi(x) = sum_i c_i f_i(x) with unit-norm coefficient convention, so nodal
/// values are c_i / sqrt(h).
double interpolate(const Mesh& mesh, std::span<const double> coefficients, double x);

/// Inputs to the quasi-1D coupling constant. Units are the caller's; hbar is
/// taken as 1 unless set.
struct PhysicalCouplings {
  double a3d = 0.0;
  double d_perp = 1.0;
  double mass = 1.0;
  double hbar = 1.0;
  double constant_c = 1.4603;
};

/// g_1D = 4 hbar^2 a3d / (m d_perp^2) / (1 - C a3d / d_perp).
/// Throws NumericalError at the confinement-induced resonance.
double g1d_from_scattering(const PhysicalCouplings& p);

}  // namespace quench
