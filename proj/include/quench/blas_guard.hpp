#pragma once

namespace quench {

/// Runs plain and transposed matrix products through BLAS at sizes that reach
/// the blocked kernels and compares against naive loops. Some OpenBLAS builds
/// pick a kernel the virtualised CPU does not support and return garbage.
bool blas_self_test();

/// If the BLAS self-test fails and OPENBLAS_CORETYPE is unset, re-executes
/// the current program with a conservative core type. Returns normally when
/// BLAS is sane; otherwise throws NumericalError. Linux only (/proc/self/exe).
void ensure_sane_blas(int argc, char** argv);

}  // namespace quench
