#include "fairgate/ingest.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace fairgate {

void validate_config(const IngestConfig& c) {
  if (!(c.bin_width > 0.0) || !std::isfinite(c.bin_width)) {
    throw ValidationError(fmt::format("bin_width must be > 0, got {}", c.bin_width));
  }
  if (!std::isfinite(c.offset)) throw ValidationError("offset must be finite");
  if (c.zero_policy == ZeroPolicy::Nudge && !(c.nudge_epsilon > 0.0)) {
    throw ValidationError(fmt::format("nudge epsilon must be > 0, got {}", c.nudge_epsilon));
  }
  if (c.group_a_values.empty()) throw ValidationError("no group A values configured");
  for (const auto& v : c.group_b_values) {
    if (c.group_a_values.count(v)) throw ValidationError(fmt::format("group value '{}' assigned to both groups", v));
  }
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ValidationError(fmt::format("missing column '{}'", name));
}

CsvTable parse_csv(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // Blank lines carry no data.
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started) throw ValidationError(fmt::format("CSV: stray quote in record {}", records.size() + 1));
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw ValidationError("CSV: unterminated quoted field");
  if (field_started || !record.empty()) end_record();
  if (records.empty()) throw ValidationError("CSV: no header row");

  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw ValidationError(fmt::format("CSV: row {} has {} fields, header has {}", r, records[r].size(),
                                        table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("error reading '{}'", path.string()));
  return parse_csv(buf.str());
}

long bin_index(double raw, double offset, double width) {
  const double q = (raw - offset) / width;
  const double mag = std::abs(q);
  const double whole = std::floor(mag);
  long k = 0;
  if (std::abs(mag - whole - 0.5) < 1e-9) {
    k = static_cast<long>(whole) + 1;
  } else {
    k = static_cast<long>(std::round(mag));
  }
  return q < 0.0 ? -k : k;
}

namespace {

// Histogram keyed by qualification level: per-group counts.
using Histogram = std::map<double, std::pair<std::size_t, std::size_t>>;

PopulationState from_histogram(const Histogram& hist, std::size_t count_a, std::size_t count_b) {
  if (count_a == 0) throw ValidationError("group A has no rows");
  if (count_b == 0) throw ValidationError("group B has no rows");
  std::vector<double> levels;
  Vector dist_a(static_cast<Eigen::Index>(hist.size()));
  Vector dist_b(static_cast<Eigen::Index>(hist.size()));
  Eigen::Index i = 0;
  for (const auto& [y, counts] : hist) {
    levels.push_back(y);
    dist_a[i] = static_cast<double>(counts.first) / static_cast<double>(count_a);
    dist_b[i] = static_cast<double>(counts.second) / static_cast<double>(count_b);
    ++i;
  }
  const double total = static_cast<double>(count_a + count_b);
  return make_population(QualificationGrid(std::move(levels)), static_cast<double>(count_a) / total,
                         std::move(dist_a), std::move(dist_b));
}

double parse_number(const std::string& cell, std::size_t row) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < cell.size() && (cell[used] == ' ' || cell[used] == '\t')) ++used;
  if (used == 0 || used != cell.size() || !std::isfinite(v)) {
    throw ValidationError(fmt::format("row {}: cannot parse value '{}'", row, cell));
  }
  return v;
}

}  // namespace

PopulationState population_from_table(const CsvTable& table, const IngestConfig& config) {
  validate_config(config);
  const std::size_t gcol = table.column(config.group_column);
  const std::size_t vcol = table.column(config.value_column);

  Histogram hist;
  std::size_t count_a = 0;
  std::size_t count_b = 0;
  std::set<std::string> unknown;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& label = table.rows[r][gcol];
    Group g;
    if (config.group_a_values.count(label)) {
      g = Group::A;
    } else if (config.group_b_values.empty() ? !label.empty() : config.group_b_values.count(label) > 0) {
      g = Group::B;
    } else {
      unknown.insert(label);
      continue;
    }
    const double raw = parse_number(table.rows[r][vcol], r + 1);
    const long k = bin_index(raw, config.offset, config.bin_width);
    double y = static_cast<double>(k) * config.bin_width;
    if (k == 0) {
      if (config.zero_policy == ZeroPolicy::Error) {
        throw ValidationError(fmt::format("row {}: zero qualification (value {})", r + 1, raw));
      }
      y = raw - config.offset < 0.0 ? -config.nudge_epsilon : config.nudge_epsilon;
    }
    auto& counts = hist[y];
    (g == Group::A ? counts.first : counts.second) += 1;
    (g == Group::A ? count_a : count_b) += 1;
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& u : unknown) list += (list.empty() ? "'" : ", '") + u + "'";
    throw ValidationError(fmt::format("unknown group values: {}", list));
  }
  return from_histogram(hist, count_a, count_b);
}

PopulationState load_population(const std::filesystem::path& csv_path, const IngestConfig& config) {
  return population_from_table(read_csv(csv_path), config);
}

PopulationState reduce_features(std::span<const FeatureRow> rows, const ReduceOptions& options) {
  if (options.bin_width < 0.0) throw ValidationError("bin_width must be >= 0");
  struct Cell {
    double sum = 0.0;
    std::size_t count = 0;
  };
  std::map<std::pair<Group, std::string>, Cell> cells;
  for (const FeatureRow& row : rows) {
    if (!std::isfinite(row.outcome)) throw ValidationError("non-finite outcome");
    Cell& c = cells[{row.group, row.feature_key}];
    c.sum += row.outcome;
    ++c.count;
  }

  Histogram hist;
  std::size_t count_a = 0;
  std::size_t count_b = 0;
  for (const auto& [key, cell] : cells) {
    const double mean = cell.sum / static_cast<double>(cell.count);
    double y = mean;
    if (options.bin_width > 0.0) y = static_cast<double>(bin_index(mean, 0.0, options.bin_width)) * options.bin_width;
    if (y == 0.0) {
      if (options.zero_policy == ZeroPolicy::Error) {
        throw ValidationError(fmt::format("feature cell '{}' has zero mean outcome", key.second));
      }
      y = mean < 0.0 ? -options.nudge_epsilon : options.nudge_epsilon;
    }
    auto& counts = hist[y];
    if (key.first == Group::A) {
      counts.first += cell.count;
      count_a += cell.count;
    } else {
      counts.second += cell.count;
      count_b += cell.count;
    }
  }
  return from_histogram(hist, count_a, count_b);
}

}  // namespace fairgate
