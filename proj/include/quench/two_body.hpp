#pragma once

#include "quench/eigensolver.hpp"
#include "quench/lagrange_mesh.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <vector>

namespace quench {

/// Two bosons on a shared mesh with contact coupling g and a central
/// impurity of strength kappa (scaled units: lengths in oscillator lengths,
/// energies in hbar*omega).
struct TwoBodyConfig {
  Mesh mesh;
  double g = 0.0;
  double kappa = 0.0;
};

void validate(const TwoBodyConfig& config);

/// Which part of the two-particle grid a basis spans.
///   symmetric: all exchange-symmetric grids, dimension N(N+1)/2
///   even/odd:  symmetric grids that are even/odd under (x1,x2) -> (-x1,-x2)
/// The Hamiltonian never couples different parity sectors, and a
/// parity-even initial state only overlaps the even sector.
enum class PairSector { symmetric, even, odd };

/// Orthonormal basis of a sector, expressed as sparse combinations of grid
/// cells (i, j). Every grid cell belongs to at most one basis vector.
class PairBasis {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double weight;
  };

  PairBasis(std::size_t n_points, PairSector sector);

  std::size_t n_points() const { return n_points_; }
  PairSector sector() const { return sector_; }
  std::size_t dimension() const { return offsets_.size() - 1; }

  /// Grid cells making up basis vector b.
  std::span<const Entry> entries(std::size_t b) const {
    return {entries_.data() + offsets_[b], offsets_[b + 1] - offsets_[b]};
  }

  /// Basis vector containing grid cell (i, j), or npos if none.
  std::size_t owner(std::size_t i, std::size_t j) const { return owner_[i * n_points_ + j]; }
  /// Weight of grid cell (i, j) within its owning basis vector.
  double weight(std::size_t i, std::size_t j) const { return owner_weight_[i * n_points_ + j]; }

  /// Expands sector coefficients to an N x N grid Psi_ij (exactly symmetric).
  Eigen::MatrixXd to_grid(const Eigen::Ref<const Eigen::VectorXd>& coefficients) const;
  /// Orthogonal projection of a grid onto the sector.
  Eigen::VectorXd from_grid(const Eigen::Ref<const Eigen::MatrixXd>& grid) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t n_points_;
  PairSector sector_;
  std::vector<Entry> entries_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> owner_;
  std::vector<double> owner_weight_;
};

/// Two-particle mesh Hamiltonian restricted to one sector:
///   (1/h^2 T + V) x 1 + 1 x (1/h^2 T + V) + (g/h) delta_{x1,x2}
/// with V = x^2/2 + (kappa/h) on the origin node.
SymmetricOperator assemble_two_body(const TwoBodyConfig& config, const PairBasis& basis);

/// Lowest eigenpairs of the two-body problem in one sector. States are unit
/// vectors in the sector basis; grids come from state_grid().
class Spectrum {
 public:
  Spectrum(TwoBodyConfig config, std::shared_ptr<const PairBasis> basis,
           Eigen::VectorXd energies, Eigen::MatrixXd states);

  const TwoBodyConfig& config() const { return config_; }
  const PairBasis& basis() const { return *basis_; }
  std::shared_ptr<const PairBasis> shared_basis() const { return basis_; }
  std::size_t size() const { return static_cast<std::size_t>(energies_.size()); }
  const Eigen::VectorXd& energies() const { return energies_; }
  const Eigen::MatrixXd& states() const { return states_; }
  Eigen::MatrixXd state_grid(std::size_t n) const;

 private:
  TwoBodyConfig config_;
  std::shared_ptr<const PairBasis> basis_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXd states_;
};

/// k lowest eigenpairs of the sector Hamiltonian (dense solve).
Spectrum solve_two_body(const TwoBodyConfig& config, std::size_t k,
                        PairSector sector = PairSector::even);

/// Ground state of the unquenched (kappa = 0) problem, always parity even.
struct GroundState {
  TwoBodyConfig config;
  std::shared_ptr<const PairBasis> basis;
  double energy = 0.0;
  Eigen::VectorXd state;
};

/// Iterative (Lanczos) ground state of the kappa = 0 Hamiltonian.
GroundState initial_ground_state(const Mesh& mesh, double g);

/// The lowest `count` levels of the whole exchange-symmetric spectrum,
/// merging both parity sectors.
Eigen::VectorXd lowest_symmetric_levels(const TwoBodyConfig& config, std::size_t count);

}  // namespace quench
