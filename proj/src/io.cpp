#include "fairgate/io.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <array>
#include <fstream>
#include <memory>
#include <sstream>

namespace fairgate {

namespace {

Vector vector_from_json(const Json& j, const char* name) {
  if (!j.is_array()) throw ValidationError(fmt::format("'{}' must be an array of numbers", name));
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ValidationError(fmt::format("'{}'[{}] is not a number", name, i));
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

Matrix matrix_from_json(const Json& j, const char* name) {
  if (!j.is_array() || j.empty()) throw ValidationError(fmt::format("'{}' must be a nonempty array of rows", name));
  const auto rows = static_cast<Eigen::Index>(j.size());
  Matrix m(rows, rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Vector row = vector_from_json(j[static_cast<std::size_t>(i)], name);
    if (row.size() != rows) throw ValidationError(fmt::format("'{}' row {} has {} entries, expected {}", name, i, row.size(), rows));
    m.row(i) = row.transpose();
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_to_json(m.row(i).transpose()));
  return out;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(fmt::format("missing field '{}'", key));
  return j.at(key);
}

std::vector<double> grid_values(const Json& j) {
  const Vector v = vector_from_json(j, "grid");
  return {v.data(), v.data() + v.size()};
}

}  // namespace

Json to_json(const PopulationState& s) {
  Json j;
  j["grid"] = s.grid.values();
  j["weight_a"] = s.weight_a;
  j["dist_a"] = vector_to_json(s.dist_a);
  j["dist_b"] = vector_to_json(s.dist_b);
  return j;
}

PopulationState population_from_json(const Json& j) {
  const Json& w = field(j, "weight_a");
  if (!w.is_number()) throw ValidationError("'weight_a' must be a number");
  return make_population(QualificationGrid(grid_values(field(j, "grid"))), w.get<double>(),
                         vector_from_json(field(j, "dist_a"), "dist_a"), vector_from_json(field(j, "dist_b"), "dist_b"));
}

Json to_json(const DynamicsKernel& k) {
  Json j;
  j["grid"] = k.grid.values();
  j["selected"] = matrix_to_json(k.selected);
  j["rejected"] = matrix_to_json(k.rejected);
  return j;
}

DynamicsKernel kernel_from_json(const Json& j) {
  DynamicsKernel k{QualificationGrid(grid_values(field(j, "grid"))), matrix_from_json(field(j, "selected"), "selected"),
                   matrix_from_json(field(j, "rejected"), "rejected")};
  validate_kernel(k);
  return k;
}

Json to_json(const SelectionPolicy& p) {
  Json j;
  j["select_a"] = vector_to_json(p.select_a);
  j["select_b"] = vector_to_json(p.select_b);
  return j;
}

Json to_json(const StaticSolution& s) {
  Json z = Json::array();
  for (const ZAllocation& a : s.z_allocation) {
    z.push_back({{"qualification", a.qualification}, {"group", to_string(a.group)}, {"mass", a.mass}});
  }
  Json j;
  j["z_allocation"] = std::move(z);
  j["total_mass"] = s.total_mass;
  j["delta"] = s.delta;
  j["objective"] = s.objective;
  j["u_um"] = s.u_um;
  j["delta_um"] = s.delta_um;
  j["swapped"] = s.swapped;
  j["policy"] = to_json(s.policy);
  return j;
}

Json to_json(const BandKernelParams& p) {
  return {{"q1_up", p.q1_up}, {"q1_down", p.q1_down}, {"q0_up", p.q0_up}, {"q0_down", p.q0_down}};
}

std::string format_number(double x) { return fmt::format("{}", x); }

std::string sweep_table(const std::vector<SweepRow>& rows) {
  std::string out = "lambda delta objective\n";
  for (const SweepRow& r : rows) {
    out += fmt::format("{} {} {}\n", r.lambda, r.delta, r.objective);
  }
  return out;
}

std::string trajectory_table(const TrajectoryRecord& rec) {
  std::string out = "t delta profit utility tv\n";
  for (const StepRecord& r : rec.steps) {
    out += fmt::format("{} {} {} {} {}\n", r.t, r.delta, r.profit, r.utility, r.tv);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("error reading '{}'", path.string()));
  return buf.str();
}

Json read_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += fmt::format(".tmp{}", ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write '{}'", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError(fmt::format("error writing '{}'", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError(fmt::format("cannot move output into place at '{}'", path.string()));
  }
}

void write_json_atomic(const std::filesystem::path& path, const Json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

void RunManifest::add_input(const std::filesystem::path& path) {
  input_digests.emplace_back(path.string(), sha256_hex(read_file(path)));
}

Json RunManifest::to_json() const {
  Json inputs = Json::array();
  for (const auto& [path, digest] : input_digests) inputs.push_back({{"path", path}, {"sha256", digest}});
  Json j;
  j["command"] = command;
  j["parameters"] = parameters;
  j["inputs"] = std::move(inputs);
  j["seeds"] = seeds;
  j["generator_version"] = generator_version;
  j["outputs"] = outputs;
  return j;
}

}  // namespace fairgate
