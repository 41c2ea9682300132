#include "quench/lagrange_mesh.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace quench {

namespace {

constexpr double kPi = std::numbers::pi;

// sin(pi * d) computed from the distance to the nearest integer so that
// integer arguments give an exact zero.
double sin_pi(double d, long& nearest) {
  const double k = std::nearbyint(d);
  double r = d - k;
  if (std::abs(r) < 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(d))) {
    r = 0.0;
  }
  nearest = static_cast<long>(k);
  const double s = std::sin(kPi * r);
  return (nearest % 2 == 0) ? s : -s;
}

}  // namespace

Mesh::Mesh(std::size_t n_points, double scaling) : n_points_(n_points), scaling_(scaling) {
  if (n_points < 3 || n_points % 2 == 0) {
    throw InvalidArgument("mesh size must be odd and >= 3 (got " + std::to_string(n_points) +
                          "); an odd size puts a node on the impurity");
  }
  if (!(scaling > 0.0) || !std::isfinite(scaling)) {
    throw InvalidArgument("mesh scaling must be positive and finite");
  }
  nodes_.resize(n_points);
  const long half = static_cast<long>(origin_index());
  for (std::size_t i = 0; i < n_points; ++i) {
    nodes_[i] = scaling * static_cast<double>(static_cast<long>(i) - half);
  }
}

Mesh build_mesh(std::size_t n_points, double scaling) { return Mesh(n_points, scaling); }

SymmetricOperator::SymmetricOperator(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw InvalidArgument("symmetric operator must be square");
  }
  entries_.triangularView<Eigen::StrictlyUpper>() = entries_.transpose();
}

double kinetic_entry(std::size_t n_points, long offset) {
  const double n = static_cast<double>(n_points);
  if (offset == 0) {
    return kPi * kPi / 6.0 * (1.0 - 1.0 / (n * n));
  }
  const double arg = kPi * static_cast<double>(offset) / n;
  const double s = std::sin(arg);
  const double sign = (offset % 2 == 0) ? 1.0 : -1.0;
  return sign * kPi * kPi / (n * n) * std::cos(arg) / (s * s);
}

SymmetricOperator kinetic_matrix(std::size_t n_points) {
  if (n_points < 3) {
    throw InvalidArgument("kinetic matrix needs at least 3 points");
  }
  const auto n = static_cast<Eigen::Index>(n_points);
  Eigen::MatrixXd t(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      t(i, j) = kinetic_entry(n_points, static_cast<long>(i - j));
    }
  }
  return SymmetricOperator(std::move(t));
}

Eigen::VectorXd potential_diagonal(const Mesh& mesh, double kappa) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(mesh.size()));
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double x = mesh.node(i);
    v(static_cast<Eigen::Index>(i)) = 0.5 * x * x;
  }
  // delta(x) on the quadrature: unit weight in one cell of width h
  v(static_cast<Eigen::Index>(mesh.origin_index())) += kappa / mesh.scaling();
  return v;
}

SymmetricOperator single_particle_hamiltonian(const Mesh& mesh, double kappa) {
  const double inv_h2 = 1.0 / (mesh.scaling() * mesh.scaling());
  Eigen::MatrixXd h = kinetic_matrix(mesh.size()).entries() * inv_h2;
  h.diagonal() += potential_diagonal(mesh, kappa);
  return SymmetricOperator(std::move(h));
}

double basis_function(const Mesh& mesh, std::size_t i, double x) {
  const double n = static_cast<double>(mesh.size());
  const double d = x / mesh.scaling() -
                   (static_cast<double>(i) - static_cast<double>(mesh.origin_index()));
  long k = 0;
  const double num = sin_pi(d, k);
  const double den = std::sin(kPi * d / n);
  double value = 0.0;
  if (num == 0.0) {
    if (k % static_cast<long>(mesh.size()) == 0) {
      // removable singularity: limit is cos(pi k) / cos(pi k / N)
      value = ((k % 2 == 0) ? 1.0 : -1.0) / std::cos(kPi * static_cast<double>(k) / n);
    }
  } else {
    value = num / (n * den);
  }
  return value / std::sqrt(mesh.scaling());
}

double interpolate(const Mesh& mesh, std::span<const double> coefficients, double x) {
  if (coefficients.size() != mesh.size()) {
    throw InvalidArgument("coefficient vector length must match the mesh size");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    if (coefficients[i] != 0.0) {
      sum += coefficients[i] * basis_function(mesh, i, x);
    }
  }
  return sum;
}

double g1d_from_scattering(const PhysicalCouplings& p) {
  if (!(p.d_perp > 0.0)) {
    throw InvalidArgument("transverse confinement length must be positive");
  }
  if (!(p.mass > 0.0)) {
    throw InvalidArgument("mass must be positive");
  }
  const double denominator = 1.0 - p.constant_c * p.a3d / p.d_perp;
  if (std::abs(denominator) < 1e-12) {
    throw NumericalError("confinement-induced resonance: 1 - C a3d / d_perp vanishes");
  }
  const double prefactor = 4.0 * p.hbar * p.hbar * p.a3d / (p.mass * p.d_perp * p.d_perp);
  return prefactor / denominator;
}

}  // namespace quench
