#include "quench/two_body.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace quench {

void validate(const TwoBodyConfig& config) {
  if (!std::isfinite(config.g) || !std::isfinite(config.kappa)) {
    throw InvalidArgument("interaction g and impurity kappa must be finite");
  }
}

PairBasis::PairBasis(std::size_t n_points, PairSector sector)
    : n_points_(n_points), sector_(sector) {
  if (n_points < 3 || n_points % 2 == 0) {
    throw InvalidArgument("pair basis needs an odd mesh size >= 3");
  }
  const std::size_t n = n_points;
  owner_.assign(n * n, npos);
  owner_weight_.assign(n * n, 0.0);
  offsets_.push_back(0);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

  // exchange-symmetric unit vector u_{ij}, i <= j, scaled by `scale`
  auto push_pair = [&](std::size_t i, std::size_t j, double scale) {
    if (i == j) {
      entries_.push_back({i, i, scale});
    } else {
      entries_.push_back({i, j, scale * inv_sqrt2});
      entries_.push_back({j, i, scale * inv_sqrt2});
    }
  };
  auto close_vector = [&]() {
    const std::size_t b = offsets_.size() - 1;
    for (std::size_t e = offsets_.back(); e < entries_.size(); ++e) {
      owner_[entries_[e].row * n + entries_[e].col] = b;
      owner_weight_[entries_[e].row * n + entries_[e].col] = entries_[e].weight;
    }
    offsets_.push_back(entries_.size());
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (sector == PairSector::symmetric) {
        push_pair(i, j, 1.0);
        close_vector();
        continue;
      }
      // image under total reflection, re-sorted so that qi <= qj
      const std::size_t qi = n - 1 - j;
      const std::size_t qj = n - 1 - i;
      const bool self_image = (qi == i && qj == j);
      if (self_image) {
        if (sector == PairSector::even) {
          push_pair(i, j, 1.0);
          close_vector();
        }
        continue;
      }
      if (std::make_pair(qi, qj) < std::make_pair(i, j)) continue;
      const double sign = (sector == PairSector::even) ? 1.0 : -1.0;
      push_pair(i, j, inv_sqrt2);
      push_pair(qi, qj, sign * inv_sqrt2);
      close_vector();
    }
  }
}

Eigen::MatrixXd PairBasis::to_grid(const Eigen::Ref<const Eigen::VectorXd>& coefficients) const {
  if (static_cast<std::size_t>(coefficients.size()) != dimension()) {
    throw InvalidArgument("coefficient vector does not match the pair basis");
  }
  const auto n = static_cast<Eigen::Index>(n_points_);
  Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t b = 0; b < dimension(); ++b) {
    const double c = coefficients(static_cast<Eigen::Index>(b));
    for (const Entry& e : entries(b)) {
      grid(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = c * e.weight;
    }
  }
  return grid;
}

Eigen::VectorXd PairBasis::from_grid(const Eigen::Ref<const Eigen::MatrixXd>& grid) const {
  if (static_cast<std::size_t>(grid.rows()) != n_points_ ||
      static_cast<std::size_t>(grid.cols()) != n_points_) {
    throw InvalidArgument("grid does not match the pair basis");
  }
  Eigen::VectorXd c(static_cast<Eigen::Index>(dimension()));
  for (std::size_t b = 0; b < dimension(); ++b) {
    double s = 0.0;
    for (const Entry& e : entries(b)) {
      s += e.weight * grid(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col));
    }
    c(static_cast<Eigen::Index>(b)) = s;
  }
  return c;
}

SymmetricOperator assemble_two_body(const TwoBodyConfig& config, const PairBasis& basis) {
  validate(config);
  const Mesh& mesh = config.mesh;
  if (basis.n_points() != mesh.size()) {
    throw InvalidArgument("pair basis and mesh sizes differ");
  }
  const std::size_t n = mesh.size();
  const double h = mesh.scaling();
  const Eigen::MatrixXd kin = kinetic_matrix(n).entries() / (h * h);
  const Eigen::VectorXd v = potential_diagonal(mesh, config.kappa);
  const double contact = config.g / h;

  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(dim, dim);

  // Column b of the operator: apply H to the grid of basis vector b, then
  // project every touched cell back onto the sector basis.
  for (std::size_t b = 0; b < basis.dimension(); ++b) {
    auto column = op.col(static_cast<Eigen::Index>(b));
    auto deposit = [&](std::size_t r, std::size_t c, double value) {
      const std::size_t owner = basis.owner(r, c);
      if (owner != PairBasis::npos) {
        column(static_cast<Eigen::Index>(owner)) += basis.weight(r, c) * value;
      }
    };
    for (const PairBasis::Entry& e : basis.entries(b)) {
      const auto i = static_cast<Eigen::Index>(e.row);
      const auto j = static_cast<Eigen::Index>(e.col);
      for (std::size_t k = 0; k < n; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        deposit(k, e.col, kin(kk, i) * e.weight);
        deposit(e.row, k, kin(kk, j) * e.weight);
      }
      double diagonal = v(i) + v(j);
      if (e.row == e.col) diagonal += contact;
      deposit(e.row, e.col, diagonal * e.weight);
    }
  }
  return SymmetricOperator(std::move(op));
}

Spectrum::Spectrum(TwoBodyConfig config, std::shared_ptr<const PairBasis> basis,
                   Eigen::VectorXd energies, Eigen::MatrixXd states)
    : config_(std::move(config)),
      basis_(std::move(basis)),
      energies_(std::move(energies)),
      states_(std::move(states)) {
  if (!basis_ || states_.rows() != static_cast<Eigen::Index>(basis_->dimension()) ||
      states_.cols() != energies_.size()) {
    throw InvalidArgument("spectrum: states, energies and basis are inconsistent");
  }
}

Eigen::MatrixXd Spectrum::state_grid(std::size_t n) const {
  if (n >= size()) {
    throw InvalidArgument("spectrum: state index out of range");
  }
  return basis_->to_grid(states_.col(static_cast<Eigen::Index>(n)));
}

Spectrum solve_two_body(const TwoBodyConfig& config, std::size_t k, PairSector sector) {
  auto basis = std::make_shared<const PairBasis>(config.mesh.size(), sector);
  const SymmetricOperator op = assemble_two_body(config, *basis);
  EigenDecomposition eig = eigensolve(op, k);
  return Spectrum(config, std::move(basis), std::move(eig.values), std::move(eig.vectors));
}

GroundState initial_ground_state(const Mesh& mesh, double g) {
  GroundState out{TwoBodyConfig{mesh, g, 0.0},
                  std::make_shared<const PairBasis>(mesh.size(), PairSector::even), 0.0, {}};
  const SymmetricOperator op = assemble_two_body(out.config, *out.basis);
  Eigenpair pair = lowest_eigenpair(op);
  out.energy = pair.value;
  out.state = std::move(pair.vector);
  return out;
}

Eigen::VectorXd lowest_symmetric_levels(const TwoBodyConfig& config, std::size_t count) {
  std::vector<double> levels;
  for (PairSector sector : {PairSector::even, PairSector::odd}) {
    const PairBasis basis(config.mesh.size(), sector);
    const Eigen::VectorXd w = eigenvalues(assemble_two_body(config, basis));
    const auto take = std::min<Eigen::Index>(w.size(), static_cast<Eigen::Index>(count));
    levels.insert(levels.end(), w.data(), w.data() + take);
  }
  std::sort(levels.begin(), levels.end());
  if (levels.size() < count) {
    throw InvalidArgument("requested more levels than the symmetric space holds");
  }
  return Eigen::Map<const Eigen::VectorXd>(levels.data(), static_cast<Eigen::Index>(count));
}

}  // namespace quench
