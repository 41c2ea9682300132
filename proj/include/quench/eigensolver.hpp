#pragma once

#include "quench/lagrange_mesh.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace quench {

/// Lowest eigenpairs of a symmetric operator, ascending. Each vector is
/// unit-norm with its largest-magnitude coefficient positive (ties resolved
/// in favour of the first such index).
struct EigenDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // one column per eigenvalue
};

/// k lowest eigenpairs via LAPACK dsyevr (MRRR). Deterministic for a given
/// operator and k. Throws NumericalError on LAPACK failure.
EigenDecomposition eigensolve(const SymmetricOperator& op, std::size_t k);

/// All eigenvalues, ascending (no vectors).
Eigen::VectorXd eigenvalues(const SymmetricOperator& op);

/// Complete spectral resolution of a single probe vector: every eigenvalue of
/// the operator together with the projection of the probe on the matching
/// eigenvector. Eigenvectors are never formed; the phase of each is chosen so
/// that the projection is non-negative.
struct ProjectedSpectrum {
  Eigen::VectorXd values;
  Eigen::VectorXd projections;
};

/// Householder tridiagonalisation plus divide-and-conquer on the tridiagonal
/// matrix; about twice as fast as a full eigendecomposition at our sizes.
ProjectedSpectrum project_onto_eigenbasis(const SymmetricOperator& op,
                                          const Eigen::VectorXd& probe);

struct Eigenpair {
  double value = 0.0;
  Eigen::VectorXd vector;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Ground eigenpair by Lanczos with full reorthogonalisation, restarted from
/// the current Ritz vector when the Krylov basis reaches max_basis. The start
/// vector is fixed, so repeated calls are bitwise identical.
Eigenpair lowest_eigenpair(const SymmetricOperator& op, double residual_tolerance = 1e-11,
                           std::size_t max_basis = 400, std::size_t max_restarts = 50);

/// Flips v in place so its largest-magnitude entry is positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v);

}  // namespace quench
