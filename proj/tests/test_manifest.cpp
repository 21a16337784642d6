#include <cstdint>
#include <filesystem>
#include <string>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include "blpp/manifest.hpp"

namespace {

using blpp::GridSpec;
using blpp::manifest_from_json;
using blpp::read_manifest;
using blpp::RunManifest;
using blpp::to_json;
using blpp::write_manifest;

RunManifest sample_manifest() {
  RunManifest m;
  m.command = "simulate";
  m.parameters = {{"m", "3"}, {"t", "1.5"}, {"b", "2,1,0"}};
  m.master_seed = 0x9E3779B97F4A7C15ull;  // needs all 64 bits to survive
  m.grid = GridSpec{0.0, 1.0000000000000002, 65536};
  m.started = "2026-01-02T03:04:05Z";
  m.finished = "2026-01-02T03:04:09Z";
  m.output_files = {"out/sim.csv", "out/sim2.csv"};
  return m;
}

}  // namespace

TEST_CASE("manifests round-trip losslessly through JSON") {
  const RunManifest m = sample_manifest();
  const nlohmann::json j = to_json(m);
  const RunManifest back = manifest_from_json(j);
  CHECK(back == m);
  // Serialize -> parse -> serialize is a fixed point, including the
  // full-precision double in the grid and the 64-bit seed.
  const nlohmann::json j2 = nlohmann::json::parse(j.dump());
  CHECK(to_json(manifest_from_json(j2)) == j);
  CHECK(j2.at("master_seed").get<std::uint64_t>() == m.master_seed);
  CHECK(j2.at("grid").at("t1").get<double>() == 1.0000000000000002);
}

TEST_CASE("manifests round-trip through files") {
  const RunManifest m = sample_manifest();
  const std::string path =
      (std::filesystem::temp_directory_path() / "blpp_manifest_test.json").string();
  write_manifest(m, path);
  CHECK(read_manifest(path) == m);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_manifest(path), std::runtime_error);
}

TEST_CASE("grid specs materialize as time grids") {
  const GridSpec spec{0.0, 2.0, 512};
  const blpp::TimeGrid grid = spec.to_grid();
  CHECK(grid.t0 == 0.0);
  CHECK(grid.t1 == 2.0);
  CHECK(grid.n_steps == 512);
  CHECK_THROWS_AS((GridSpec{1.0, 0.5, 4}.to_grid()), std::invalid_argument);
}
