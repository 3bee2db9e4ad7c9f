#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fairgate/core.hpp"
#include "fairgate/dynamics.hpp"
#include "fairgate/genlab.hpp"
#include "fairgate/static_solver.hpp"

namespace fairgate {

using Json = nlohmann::ordered_json;

// {"grid":[...], "weight_a":w, "dist_a":[...], "dist_b":[...]}
Json to_json(const PopulationState& state);
PopulationState population_from_json(const Json& j);

// {"grid":[...], "selected":[[...],...], "rejected":[[...],...]}
Json to_json(const DynamicsKernel& kernel);
DynamicsKernel kernel_from_json(const Json& j);

Json to_json(const SelectionPolicy& policy);
Json to_json(const StaticSolution& solution);
Json to_json(const BandKernelParams& params);

/// Shortest round-trip decimal spelling of a double.
std::string format_number(double x);

/// `lambda delta objective` rows.
struct SweepRow {
  double lambda;
  double delta;
  double objective;
};
std::string sweep_table(const std::vector<SweepRow>& rows);

/// `t delta profit utility tv` rows.
std::string trajectory_table(const TrajectoryRecord& record);

std::string read_file(const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
void write_json_atomic(const std::filesystem::path& path, const Json& j);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Provenance record written next to generated outputs.
struct RunManifest {
  std::string command;
  Json parameters = Json::object();
  std::vector<std::pair<std::string, std::string>> input_digests;  // path, sha256
  std::vector<std::uint64_t> seeds;
  std::string generator_version = std::string(kGeneratorVersion);
  std::vector<std::string> outputs;

  void add_input(const std::filesystem::path& path);
  Json to_json() const;
};

}  // namespace fairgate
