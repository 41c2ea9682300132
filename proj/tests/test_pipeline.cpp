#include "quench/bundle.hpp"
#include "quench/convergence.hpp"
#include "quench/pipeline.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

using namespace quench;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("quench-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// relative path -> content digest
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      files[fs::relative(e.path(), root).string()] = sha256_hex(slurp(e.path()));
    }
  }
  return files;
}

RunConfig small_config() {
  RunConfig c;
  c.mesh = {41, 0.3};
  c.physics = {2.5, 0.7};
  c.dynamics.horizon = 300.0;
  c.dynamics.min_horizon = 300.0;
  c.observables.density_frames = 3;
  c.observables.tail_lo = 2.0;
  c.observables.tail_hi = 40.0;
  c.observables.tail_group_width = 1.0;
  c.parallelism = 1;
  return c;
}

}  // namespace

TEST(Config, DefaultsRoundTripThroughJson) {
  const RunConfig c = parse_config(json::object());
  EXPECT_EQ(c.mesh.points, 121u);
  EXPECT_EQ(c.mesh.scaling, 0.15);
  EXPECT_EQ(to_json(parse_config(to_json(small_config()))), to_json(small_config()));
}

TEST(Config, RejectsUnknownKeysAndWrongTypes) {
  EXPECT_THROW(parse_config(json::parse(R"({"mesh": {"point": 41}})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"meshes": {}})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"mesh": {"points": "41"}})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"mesh": {"points": -41}})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"observables": {"tail_window": [1]}})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"observables": {"fft_window": "blackman"}})")),
               ConfigError);
  const RunConfig c = parse_config(json::parse(R"({"physics": {"g": 1, "kappa": -5}})"));
  EXPECT_EQ(c.physics.g, 1.0);
  EXPECT_EQ(c.physics.kappa, -5.0);
}

TEST(Config, ValidationPerVerb) {
  RunConfig c = small_config();
  EXPECT_NO_THROW(validate(c, "run"));
  EXPECT_THROW(validate(c, "sweep"), ConfigError);
  EXPECT_THROW(validate(c, "converge"), ConfigError);
  c.mesh.points = 40;
  EXPECT_THROW(validate(c, "run"), ConfigError);
  c = small_config();
  c.dynamics.sum_rule_threshold = 1.5;
  EXPECT_THROW(validate(c, "run"), ConfigError);
  c = small_config();
  c.observables.tail_lo = 50.0;
  EXPECT_THROW(validate(c, "run"), ConfigError);
  c = small_config();
  EXPECT_THROW(validate(c, "dance"), ConfigError);
}

TEST(Config, EnvironmentOverridesOutputDirectory) {
  RunConfig c = small_config();
  ::setenv(kOutputDirEnv, "/tmp/elsewhere", 1);
  apply_environment(c);
  ::unsetenv(kOutputDirEnv);
  EXPECT_EQ(c.output.directory, "/tmp/elsewhere");
  RunConfig d = small_config();
  apply_environment(d);
  EXPECT_EQ(d.output.directory, "quench-out");
}

TEST(Bundle, DigestsAndNumberFormatting) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  CsvTable t({"a", "b"});
  t.add_row(std::vector<double>{1.0, 2.5});
  EXPECT_EQ(t.text(), "a,b\n1,2.5\n");
  EXPECT_THROW(t.add_row(std::vector<double>{1.0}), InvalidArgument);
}

TEST(Pipeline, RunWritesCompleteDeterministicBundle) {
  const RunConfig c = small_config();
  const fs::path a = scratch("run-a"), b = scratch("run-b");
  const PointRecord r = run_single(c, a);
  run_single(c, b);
  EXPECT_TRUE(r.ok);
  EXPECT_GE(r.sum_rule, c.dynamics.sum_rule_threshold);
  for (const char* f : {"echo.csv", "histogram.csv", "histogram_span.csv", "spectral_discrete.csv",
                        "spectral_fft.csv", "overlaps.csv", "density.csv", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(a / f)) << f;
  }
  EXPECT_EQ(tree(a), tree(b));

  const json manifest = json::parse(slurp(a / "manifest.json"));
  EXPECT_EQ(manifest["verb"], "run");
  ASSERT_EQ(manifest["files"].size(), 7u);
  for (const json& entry : manifest["files"]) {
    const std::string name = entry["path"];
    EXPECT_EQ(entry["sha256"], sha256_hex(slurp(a / name))) << name;
    EXPECT_EQ(entry["bytes"], fs::file_size(a / name)) << name;
  }
  EXPECT_EQ(manifest["config"], to_json(c));
}

TEST(Pipeline, CacheReproducesUncachedResultsBitForBit) {
  RunConfig c = small_config();
  const fs::path plain = scratch("plain"), cold = scratch("cold"), warm = scratch("warm");
  run_single(c, plain);
  c.output.cache_directory = scratch("cache").string();
  run_single(c, cold);
  EXPECT_FALSE(fs::is_empty(c.output.cache_directory));
  run_single(c, warm);
  auto strip = [](std::map<std::string, std::string> files) {
    files.erase("manifest.json");
    return files;
  };
  EXPECT_EQ(strip(tree(plain)), strip(tree(cold)));
  EXPECT_EQ(strip(tree(cold)), strip(tree(warm)));
  EXPECT_EQ(json::parse(slurp(cold / "manifest.json"))["results"],
            json::parse(slurp(plain / "manifest.json"))["results"]);
}

TEST(Pipeline, SingleCellSweepMatchesRun) {
  RunConfig c = small_config();
  c.sweep.g = {c.physics.g};
  c.sweep.kappa = {c.physics.kappa};
  const fs::path single = scratch("single"), grid = scratch("grid");
  run_single(c, single);
  std::vector<PointRecord> records;
  EXPECT_EQ(run_sweep(c, grid, &records), kExitOk);
  ASSERT_EQ(records.size(), 1u);
  const fs::path point = grid / records[0].directory;
  for (const char* f : {"echo.csv", "histogram.csv", "spectral_discrete.csv", "overlaps.csv"}) {
    EXPECT_EQ(slurp(single / f), slurp(point / f)) << f;
  }
  EXPECT_EQ(json::parse(slurp(single / "manifest.json"))["results"],
            json::parse(slurp(point / "manifest.json"))["results"]);
  EXPECT_TRUE(fs::exists(grid / "sweep.csv"));
  EXPECT_TRUE(fs::exists(grid / "manifest.json"));
}

TEST(Pipeline, SweepRecordsFailedPointsAndKeepsGoing) {
  RunConfig c = small_config();
  c.sweep.g = {1.0};
  c.sweep.kappa = {0.0, 5.0};
  c.dynamics.max_states = 1;  // only the null quench fits in one state
  c.observables.density = false;
  const fs::path dir = scratch("partial");
  std::vector<PointRecord> records;
  EXPECT_EQ(run_sweep(c, dir, &records), kExitPartial);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_TRUE(records[0].ok);
  EXPECT_FALSE(records[1].ok);
  EXPECT_EQ(records[1].exit_code, kExitNumeric);
  EXPECT_TRUE(fs::exists(dir / records[1].directory / "error.json"));
  const std::string table = slurp(dir / "sweep.csv");
  EXPECT_NE(table.find("failed"), std::string::npos);
}

TEST(Pipeline, ParallelSweepMatchesSerialSweep) {
  RunConfig c = small_config();
  c.sweep.g = {1.0, 5.0};
  c.sweep.kappa = {-2.0, 0.7};
  c.observables.density = false;
  const fs::path serial = scratch("serial"), parallel = scratch("parallel");
  run_sweep(c, serial);
  c.parallelism = 3;
  run_sweep(c, parallel);
  // manifests differ only in the recorded parallelism
  auto data = [](std::map<std::string, std::string> files) {
    std::erase_if(files, [](const auto& f) { return f.first.ends_with("manifest.json"); });
    return files;
  };
  const auto a = data(tree(serial)), b = data(tree(parallel));
  EXPECT_EQ(a.size(), 25u);
  EXPECT_EQ(a, b);
}

TEST(Pipeline, ConvergenceTableShrinksWithResolution) {
  const std::vector<ConvergenceRow> rows = convergence_report(1.0, 0.7, {31, 41, 51}, {0.3}, {});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_TRUE(std::isnan(rows[0].d_initial));
  EXPECT_LT(std::abs(rows[2].d_initial), 1e-4);
  EXPECT_LT(std::abs(rows[2].d_mean_le), 1e-3);

  RunConfig c = small_config();
  c.convergence.points = {31, 41};
  c.convergence.scalings = {0.3};
  const fs::path dir = scratch("converge");
  run_convergence(c, dir);
  EXPECT_TRUE(fs::exists(dir / "convergence.csv"));
}

TEST(Pipeline, TgCheckSummary) {
  RunConfig c = small_config();
  c.physics.g = 25.0;
  c.tg_check.duration = 5.0;
  c.tg_check.step = 0.05;
  const TgCheckSummary s = run_tg_check(c, scratch("tg"));
  EXPECT_LT(s.sup_tg_vs_determinant, 1e-8);
  EXPECT_LT(s.sup_two_body_vs_tg, 0.1);
}
