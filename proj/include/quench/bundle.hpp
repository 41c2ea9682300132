#pragma once

#include "json.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace quench {

/// Version recorded in manifests and cache keys.
std::string_view library_version();

std::string sha256_hex(std::string_view bytes);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

/// Comma-separated table with a header row; cells are preformatted.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& cells);
  const std::string& text() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

/// Output directory whose files are tracked with content digests.
class Bundle {
 public:
  explicit Bundle(std::filesystem::path directory);

  const std::filesystem::path& directory() const { return directory_; }

  /// Writes `bytes` to directory/relative and records its digest.
  void write(const std::string& relative, std::string_view bytes);

  /// Records a file written elsewhere (e.g. by a nested bundle).
  void track(const std::string& relative);

  /// Writes manifest.json holding `fields` plus the tracked file list.
  void write_manifest(nlohmann::json fields) const;

 private:
  std::filesystem::path directory_;
  std::map<std::string, std::pair<std::string, std::uintmax_t>> files_;  // digest, size
};

/// Pretty JSON text with a trailing newline.
std::string json_text(const nlohmann::json& value);

}  // namespace quench
