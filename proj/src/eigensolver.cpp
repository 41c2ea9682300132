#include "quench/eigensolver.hpp"

#include <lapacke.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace quench {

namespace {

lapack_int as_lapack(std::size_t n) { return static_cast<lapack_int>(n); }

void check_info(lapack_int info, const char* routine) {
  if (info != 0) {
    throw NumericalError(std::string(routine) + " failed with info = " + std::to_string(info));
  }
}

// splitmix64; used only to perturb the Lanczos start vector reproducibly
double unit_noise(std::uint64_t i) {
  std::uint64_t z = i * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
}

}  // namespace

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > best_abs) {
      best_abs = std::abs(v(i));
      best = i;
    }
  }
  if (v.size() > 0 && v(best) < 0.0) {
    v = -v;
  }
}

EigenDecomposition eigensolve(const SymmetricOperator& op, std::size_t k) {
  const std::size_t n = op.dimension();
  if (k == 0 || k > n) {
    throw InvalidArgument("eigensolve: requested " + std::to_string(k) +
                          " eigenpairs from an operator of dimension " + std::to_string(n));
  }
  Eigen::MatrixXd a = op.entries();
  EigenDecomposition out;
  out.values.resize(static_cast<Eigen::Index>(n));
  out.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  std::vector<lapack_int> support(2 * n);
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', k == n ? 'A' : 'I', 'L', as_lapack(n), a.data(), as_lapack(n), 0.0,
      0.0, 1, as_lapack(k), 0.0, &found, out.values.data(), out.vectors.data(), as_lapack(n),
      support.data());
  check_info(info, "dsyevr");
  if (static_cast<std::size_t>(found) != k) {
    throw NumericalError("dsyevr returned " + std::to_string(found) + " of " + std::to_string(k) +
                         " requested eigenpairs");
  }
  out.values.conservativeResize(static_cast<Eigen::Index>(k));
  for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
    fix_sign(out.vectors.col(c));
  }
  return out;
}

Eigen::VectorXd eigenvalues(const SymmetricOperator& op) {
  const std::size_t n = op.dimension();
  Eigen::MatrixXd a = op.entries();
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', as_lapack(n), a.data(), as_lapack(n),
                            w.data()),
             "dsyevd");
  return w;
}

ProjectedSpectrum project_onto_eigenbasis(const SymmetricOperator& op,
                                          const Eigen::VectorXd& probe) {
  const std::size_t n = op.dimension();
  if (static_cast<std::size_t>(probe.size()) != n) {
    throw InvalidArgument("probe length does not match operator dimension");
  }
  const lapack_int ln = as_lapack(n);
  Eigen::MatrixXd a = op.entries();
  Eigen::VectorXd diag(ln), off(std::max<lapack_int>(ln - 1, 1)), tau(std::max<lapack_int>(ln - 1, 1));
  check_info(LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', ln, a.data(), ln, diag.data(), off.data(),
                            tau.data()),
             "dsytrd");
  Eigen::VectorXd b = probe;
  check_info(LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'L', 'T', ln, 1, a.data(), ln, tau.data(),
                            b.data(), ln),
             "dormtr");
  a.resize(0, 0);
  Eigen::MatrixXd z(ln, ln);
  check_info(LAPACKE_dstedc(LAPACK_COL_MAJOR, 'I', ln, diag.data(), off.data(), z.data(), ln),
             "dstedc");
  ProjectedSpectrum out;
  out.values = diag;
  out.projections = (z.transpose() * b).cwiseAbs();
  return out;
}

Eigenpair lowest_eigenpair(const SymmetricOperator& op, double residual_tolerance,
                           std::size_t max_basis, std::size_t max_restarts) {
  const auto n = static_cast<Eigen::Index>(op.dimension());
  if (n == 0) {
    throw InvalidArgument("lowest_eigenpair: empty operator");
  }
  const Eigen::MatrixXd& a = op.entries();
  const Eigen::Index m_max = std::min<Eigen::Index>(static_cast<Eigen::Index>(max_basis), n);

  Eigen::VectorXd start(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    start(i) = 1.0 + 1e-2 * unit_noise(static_cast<std::uint64_t>(i));
  }
  start.normalize();

  Eigenpair best;
  std::size_t total_iterations = 0;
  for (std::size_t restart = 0; restart <= max_restarts; ++restart) {
    Eigen::MatrixXd basis(n, m_max);
    std::vector<double> alpha, beta;
    basis.col(0) = start;
    Eigen::VectorXd w(n);
    Eigen::Index m = 0;
    bool exhausted = false;
    double ritz_value = 0.0;
    Eigen::VectorXd ritz_coeffs;
    double residual_estimate = 0.0;
    for (m = 1; m <= m_max; ++m) {
      const Eigen::Index j = m - 1;
      w.noalias() = a * basis.col(j);
      ++total_iterations;
      alpha.push_back(basis.col(j).dot(w));
      // two passes of classical Gram-Schmidt against the whole basis
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd proj = basis.leftCols(m).transpose() * w;
        w.noalias() -= basis.leftCols(m) * proj;
      }
      const double b = w.norm();
      beta.push_back(b);
      exhausted = b < 1e-14 * std::max(1.0, std::abs(alpha.back()));
      const bool check = exhausted || m == m_max || m % 10 == 0;
      if (check) {
        Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
        Eigen::VectorXd e(std::max<Eigen::Index>(m - 1, 1));
        for (Eigen::Index i = 0; i + 1 < m; ++i) e(i) = beta[static_cast<std::size_t>(i)];
        Eigen::MatrixXd zt(m, m);
        check_info(LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', static_cast<lapack_int>(m), d.data(),
                                 e.data(), zt.data(), static_cast<lapack_int>(m)),
                   "dstev");
        ritz_value = d(0);
        ritz_coeffs = zt.col(0);
        residual_estimate = std::abs(b * ritz_coeffs(m - 1));
        if (exhausted || residual_estimate < residual_tolerance) break;
      }
      if (m < m_max) basis.col(m) = w / b;
    }
    m = std::min(m, m_max);
    Eigen::VectorXd x = basis.leftCols(m) * ritz_coeffs;
    x.normalize();
    const Eigen::VectorXd ax = a * x;
    const double rq = x.dot(ax);
    const double residual = (ax - rq * x).norm();
    best.value = rq;
    best.vector = x;
    best.residual = residual;
    best.iterations = total_iterations;
    (void)ritz_value;
    if (exhausted || residual < residual_tolerance * 10.0) {
      fix_sign(best.vector);
      return best;
    }
    start = x;
  }
  throw NumericalError("Lanczos did not converge: residual " + std::to_string(best.residual) +
                       " after " + std::to_string(total_iterations) + " iterations");
}

}  // namespace quench
