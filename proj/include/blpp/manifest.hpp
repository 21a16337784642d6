#pragma once

#include <cstdint>
#include <ctime>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "blpp/core.hpp"

// Run manifests: every file the command line tool writes is accompanied by a
// manifest recording the command, its parameters, the master seed and grid,
// and the produced files, so a run can be reproduced bit for bit from the
// manifest alone (timestamps live here, never in the data files).

namespace blpp {

inline constexpr const char* kArtifactVersion = "1.0.0";

struct GridSpec {
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t n_steps = 1;

  TimeGrid to_grid() const { return make_grid(t0, t1, n_steps); }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.t0 == b.t0 && a.t1 == b.t1 && a.n_steps == b.n_steps;
  }
};

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::uint64_t master_seed = 0;
  GridSpec grid;
  std::string artifact_version = kArtifactVersion;
  std::string started;
  std::string finished;
  std::vector<std::string> output_files;

  friend bool operator==(const RunManifest& a, const RunManifest& b) {
    return a.command == b.command && a.parameters == b.parameters &&
           a.master_seed == b.master_seed && a.grid == b.grid &&
           a.artifact_version == b.artifact_version && a.started == b.started &&
           a.finished == b.finished && a.output_files == b.output_files;
  }
};

inline nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["parameters"] = m.parameters;
  j["master_seed"] = m.master_seed;
  j["grid"] = {{"t0", m.grid.t0}, {"t1", m.grid.t1}, {"n_steps", m.grid.n_steps}};
  j["artifact_version"] = m.artifact_version;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["output_files"] = m.output_files;
  return j;
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.parameters = j.at("parameters").get<std::map<std::string, std::string>>();
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  m.grid.t0 = j.at("grid").at("t0").get<double>();
  m.grid.t1 = j.at("grid").at("t1").get<double>();
  m.grid.n_steps = j.at("grid").at("n_steps").get<std::size_t>();
  m.artifact_version = j.at("artifact_version").get<std::string>();
  m.started = j.at("started").get<std::string>();
  m.finished = j.at("finished").get<std::string>();
  m.output_files = j.at("output_files").get<std::vector<std::string>>();
  return m;
}

inline std::string iso_timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_manifest(const RunManifest& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_manifest: cannot open " + path);
  os << to_json(m).dump(2) << '\n';
}

inline RunManifest read_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_manifest: cannot open " + path);
  nlohmann::json j;
  is >> j;
  return manifest_from_json(j);
}

}  // namespace blpp
