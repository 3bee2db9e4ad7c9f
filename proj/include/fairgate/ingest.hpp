#pragma once

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairgate/core.hpp"

namespace fairgate {

enum class ZeroPolicy { Error, Nudge };

struct IngestConfig {
  std::string group_column = "race";
  /// Raw group labels mapped to group A.
  std::set<std::string> group_a_values;
  /// Raw labels mapped to group B. Empty: every other non-empty label is B.
  std::set<std::string> group_b_values;
  std::string value_column = "gpa";
  double offset = 2.95;
  double bin_width = 0.1;
  ZeroPolicy zero_policy = ZeroPolicy::Error;
  /// Magnitude a zero qualification is moved to under ZeroPolicy::Nudge; the
  /// sign follows raw - offset (positive when exactly zero).
  double nudge_epsilon = 1e-3;
};

void validate_config(const IngestConfig& config);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws ValidationError if absent.
  std::size_t column(std::string_view name) const;
};

/// RFC-4180 CSV: comma separated, double-quote quoting with "" escapes,
/// LF or CRLF line ends, leading UTF-8 BOM ignored, first row is the header.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

/// Bin index round((raw - offset) / width), ties (within 1e-9 of a half bin)
/// rounded away from zero.
long bin_index(double raw, double offset, double width);

PopulationState population_from_table(const CsvTable& table, const IngestConfig& config);
PopulationState load_population(const std::filesystem::path& csv_path, const IngestConfig& config);

struct FeatureRow {
  Group group = Group::A;
  std::string feature_key;
  double outcome = 0.0;
};

struct ReduceOptions {
  /// Bin the per-cell means to multiples of this width; 0 keeps them exact.
  double bin_width = 0.0;
  ZeroPolicy zero_policy = ZeroPolicy::Error;
  double nudge_epsilon = 1e-3;
};

/// Replaces each outcome by the mean outcome of its (group, feature) cell and
/// returns the induced population over the distinct means.
PopulationState reduce_features(std::span<const FeatureRow> rows, const ReduceOptions& options = {});

}  // namespace fairgate
