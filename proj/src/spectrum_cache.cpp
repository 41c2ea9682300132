#include "quench/spectrum_cache.hpp"

#include "quench/bundle.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace quench {

namespace {

std::string hex(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double unhex(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw NumericalError("corrupt cache entry");
  return v;
}

std::string ground_key(const Mesh& mesh, double g) {
  return "ground N=" + std::to_string(mesh.size()) + " h=" + hex(mesh.scaling()) +
         " g=" + hex(g) + " kappa=" + hex(0.0) + " k=1 v" + std::string(library_version());
}

std::string quench_key(const GroundState& initial, double kappa, const QuenchOptions& o) {
  const Mesh& mesh = initial.config.mesh;
  return "quench N=" + std::to_string(mesh.size()) + " h=" + hex(mesh.scaling()) +
         " g=" + hex(initial.config.g) + " kappa=" + hex(kappa) +
         " k=" + hex(o.sum_rule_threshold) + "/" + std::to_string(o.max_states) + " v" +
         std::string(library_version());
}

std::optional<std::istringstream> open_entry(const std::filesystem::path& dir,
                                             const std::string& key) {
  std::ifstream in(dir / (sha256_hex(key) + ".txt"));
  if (!in) return std::nullopt;
  std::string first;
  std::getline(in, first);
  if (first != key) return std::nullopt;
  std::ostringstream rest;
  rest << in.rdbuf();
  return std::istringstream(rest.str());
}

void write_entry(const std::filesystem::path& dir, const std::string& key,
                 const std::string& body) {
  std::filesystem::create_directories(dir);
  const auto final_path = dir / (sha256_hex(key) + ".txt");
  // write-then-rename so concurrent readers never see a partial entry
  auto tmp = final_path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << key << '\n' << body;
    if (!out) throw NumericalError("failed to write cache entry " + tmp.string());
  }
  std::filesystem::rename(tmp, final_path);
}

std::string next(std::istringstream& in) {
  std::string token;
  if (!(in >> token)) throw NumericalError("truncated cache entry");
  return token;
}

}  // namespace

SpectrumCache::SpectrumCache(std::filesystem::path directory) : directory_(std::move(directory)) {}

std::optional<GroundState> SpectrumCache::load_ground_state(const Mesh& mesh, double g) const {
  auto in = open_entry(directory_, ground_key(mesh, g));
  if (!in) return std::nullopt;
  auto basis = std::make_shared<const PairBasis>(mesh.size(), PairSector::even);
  GroundState out{TwoBodyConfig{mesh, g, 0.0}, basis, unhex(next(*in)), {}};
  const auto dim = static_cast<Eigen::Index>(basis->dimension());
  if (std::stoul(next(*in)) != basis->dimension()) throw NumericalError("corrupt cache entry");
  out.state.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) out.state(i) = unhex(next(*in));
  return out;
}

void SpectrumCache::store_ground_state(const GroundState& state) const {
  std::string body = hex(state.energy) + "\n" + std::to_string(state.state.size()) + "\n";
  for (Eigen::Index i = 0; i < state.state.size(); ++i) body += hex(state.state(i)) + "\n";
  write_entry(directory_, ground_key(state.config.mesh, state.config.g), body);
}

std::optional<QuenchResult> SpectrumCache::load_quench(const GroundState& initial, double kappa,
                                                       const QuenchOptions& options) const {
  auto in = open_entry(directory_, quench_key(initial, kappa, options));
  if (!in) return std::nullopt;
  QuenchResult r{TwoBodyConfig{initial.config.mesh, initial.config.g, kappa}, {}, 0.0, {}, 0.0, 0};
  r.initial_energy = unhex(next(*in));
  r.sum_rule = unhex(next(*in));
  r.available_states = std::stoul(next(*in));
  const std::size_t k = std::stoul(next(*in));
  r.final_energies.resize(static_cast<Eigen::Index>(k));
  r.overlaps.resize(k);
  for (std::size_t n = 0; n < k; ++n) {
    r.final_energies(static_cast<Eigen::Index>(n)) = unhex(next(*in));
    const double re = unhex(next(*in));
    const double im = unhex(next(*in));
    r.overlaps[n] = {re, im};
  }
  return r;
}

void SpectrumCache::store_quench(const GroundState& initial, const QuenchResult& result,
                                 const QuenchOptions& options) const {
  std::string body = hex(result.initial_energy) + "\n" + hex(result.sum_rule) + "\n" +
                     std::to_string(result.available_states) + "\n" +
                     std::to_string(result.size()) + "\n";
  for (std::size_t n = 0; n < result.size(); ++n) {
    body += hex(result.final_energies(static_cast<Eigen::Index>(n))) + " " +
            hex(result.overlaps[n].real()) + " " + hex(result.overlaps[n].imag()) + "\n";
  }
  write_entry(directory_, quench_key(initial, result.config.kappa, options), body);
}

GroundState SpectrumCache::ground_state(const Mesh& mesh, double g) const {
  if (auto cached = load_ground_state(mesh, g)) return *std::move(cached);
  GroundState fresh = initial_ground_state(mesh, g);
  store_ground_state(fresh);
  return fresh;
}

QuenchResult SpectrumCache::quench_result(const GroundState& initial, double kappa,
                                          const QuenchOptions& options) const {
  if (auto cached = load_quench(initial, kappa, options)) return *std::move(cached);
  QuenchResult fresh = quench(initial, kappa, options);
  store_quench(initial, fresh, options);
  return fresh;
}

}  // namespace quench
