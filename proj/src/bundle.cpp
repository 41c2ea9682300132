#include "quench/bundle.hpp"

#include "quench/lagrange_mesh.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#ifndef QUENCH_VERSION
#define QUENCH_VERSION "0.0.0"
#endif

namespace quench {

std::string_view library_version() { return QUENCH_VERSION; }

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw NumericalError("cannot format number");
  return std::string(buf.data(), end);
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
  add_row(header);
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  add_row(cells);
}

void CsvTable::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw InvalidArgument("csv row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) text_.push_back(',');
    text_ += cells[i];
  }
  text_.push_back('\n');
}

Bundle::Bundle(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::filesystem::create_directories(directory_);
}

void Bundle::write(const std::string& relative, std::string_view bytes) {
  const auto path = directory_ / relative;
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw NumericalError("failed to write " + path.string());
  files_[relative] = {sha256_hex(bytes), bytes.size()};
}

void Bundle::track(const std::string& relative) {
  const auto path = directory_ / relative;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NumericalError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  files_[relative] = {sha256_hex(bytes), bytes.size()};
}

void Bundle::write_manifest(nlohmann::json fields) const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& [name, info] : files_) {
    list.push_back({{"path", name}, {"sha256", info.first}, {"bytes", info.second}});
  }
  fields["files"] = std::move(list);
  fields["version"] = std::string(library_version());
  const std::string text = json_text(fields);
  std::ofstream out(directory_ / "manifest.json", std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw NumericalError("failed to write manifest");
}

std::string json_text(const nlohmann::json& value) { return value.dump(2) + "\n"; }

}  // namespace quench
