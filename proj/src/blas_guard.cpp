#include "quench/blas_guard.hpp"

#include "quench/lagrange_mesh.hpp"

#include <cblas.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

namespace quench {

namespace {

// Largest deviation of C = op(A) op(B) from a naive product on a sample of entries.
double gemm_deviation(bool transpose_a, int n, int k) {
  std::vector<double> a(static_cast<std::size_t>(n) * n), b(a.size()), c(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = std::sin(0.37 * static_cast<double>(i));
    b[i] = std::cos(0.11 * static_cast<double>(i));
  }
  cblas_dgemm(CblasColMajor, transpose_a ? CblasTrans : CblasNoTrans, CblasNoTrans, n, n, k, 1.0,
              a.data(), n, b.data(), n, 0.0, c.data(), n);
  double worst = 0.0;
  for (int j = 0; j < n; j += 7) {
    for (int i = 0; i < n; i += 5) {
      double s = 0.0;
      for (int q = 0; q < k; ++q) {
        s += (transpose_a ? a[q + i * n] : a[i + q * n]) * b[q + j * n];
      }
      worst = std::max(worst, std::abs(s - c[i + j * n]));
    }
  }
  return worst;
}

}  // namespace

bool blas_self_test() {
  // sizes above the blocking thresholds of the optimized kernels
  return gemm_deviation(false, 320, 320) < 1e-9 && gemm_deviation(true, 400, 138) < 1e-9;
}

void ensure_sane_blas(int argc, char** argv) {
  (void)argc;
  if (blas_self_test()) return;
  if (std::getenv("OPENBLAS_CORETYPE") != nullptr) {
    throw NumericalError(
        "BLAS self-test failed even with OPENBLAS_CORETYPE set; choose another core type");
  }
  std::string core = "Haswell";
  std::ifstream cpuinfo("/proc/cpuinfo");
  for (std::string line; std::getline(cpuinfo, line);) {
    if (line.rfind("flags", 0) == 0) {
      if (line.find(" avx512f") != std::string::npos) core = "SkylakeX";
      break;
    }
  }
  setenv("OPENBLAS_CORETYPE", core.c_str(), 1);
  execv("/proc/self/exe", argv);
  throw NumericalError("BLAS self-test failed and re-exec with OPENBLAS_CORETYPE=" + core +
                       " was not possible");
}

}  // namespace quench
