#pragma once

#include <mutex>

namespace quench::detail {

// FFTW's planner keeps global state; only fftw_execute is thread safe.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace quench::detail
