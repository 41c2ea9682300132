#pragma once

#include "quench/quench_dynamics.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace quench {

/// On-disk store of ground states and quench results. Entries are text files
/// of hexadecimal floats, so a reload reproduces every bit. File names are
/// SHA-256 digests of the key (mesh, g, kappa, state selection, version);
/// the key is repeated inside the file and checked on load.
class SpectrumCache {
 public:
  explicit SpectrumCache(std::filesystem::path directory);

  std::optional<GroundState> load_ground_state(const Mesh& mesh, double g) const;
  void store_ground_state(const GroundState& state) const;

  std::optional<QuenchResult> load_quench(const GroundState& initial, double kappa,
                                          const QuenchOptions& options) const;
  void store_quench(const GroundState& initial, const QuenchResult& result,
                    const QuenchOptions& options) const;

  /// Cached entries or fresh computation (stored on the way out).
  GroundState ground_state(const Mesh& mesh, double g) const;
  QuenchResult quench_result(const GroundState& initial, double kappa,
                             const QuenchOptions& options) const;

 private:
  std::filesystem::path directory_;
};

}  // namespace quench
