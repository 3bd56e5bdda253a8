#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "csufs/cluster_eval.hpp"
#include "csufs/data_model.hpp"

namespace csufs {

// ---- CSV ingestion ---------------------------------------------------------

enum class HeaderMode { absent, present, detect };

/// Column index (0-based) or header name.
using LabelSelector = std::variant<std::size_t, std::string>;

/// All-digit text selects by index, anything else by name.
LabelSelector parse_label_selector(std::string_view text);

struct LoadedData {
  Dataset data;
  std::optional<LabelVector> labels;
  std::vector<std::string> header;  // empty when the file has none
};

/// Parses comma-separated text: one sample per line, RFC-4180 quoting,
/// decimal-point reals parsed independently of the C locale. `detect`
/// treats the first line as a header when any of its fields is not numeric.
LoadedData parse_csv(std::string_view text, HeaderMode header,
                     const std::optional<LabelSelector>& label_column);

LoadedData load_csv(const std::filesystem::path& path, HeaderMode header,
                    const std::optional<LabelSelector>& label_column);

/// Writes the matrix as CSV with shortest round-trip number formatting and a
/// header line when the dataset carries feature names.
void write_matrix_csv(const Dataset& x, const std::filesystem::path& path);

// ---- reports ---------------------------------------------------------------

struct BenchCell {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 0;
  double naive_seconds = 0.0;
  double optimized_seconds = 0.0;
  double speedup = 0.0;
  bool agree = false;
  double max_rel_diff = 0.0;  // between naive and optimized d vectors
  double d_checksum = 0.0;    // sum of the optimized d vector
  bool operator==(const BenchCell&) const = default;
};

struct BenchReport {
  std::vector<BenchCell> grid;
  std::size_t repetitions = 1;
  std::uint64_t seed = 0;
  bool operator==(const BenchReport&) const = default;
};

using ReportPayload = std::variant<SelectionResult, EvalReport, SweepReport, BenchReport>;

struct ReportDocument {
  std::string tool_version;
  nlohmann::json invocation = nlohmann::json::object();
  ReportPayload payload;
  std::string timestamp;
  bool operator==(const ReportDocument&) const = default;
};

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string iso8601_now();

nlohmann::json to_json(const ReportDocument& doc);
ReportDocument from_json(const nlohmann::json& j);

/// Pretty-printed JSON. Non-finite reals are written as the strings "inf",
/// "-inf" and "nan"; finite reals use the shortest text that round-trips.
std::string serialize_report(const ReportDocument& doc);
ReportDocument parse_report(std::string_view text);

/// Writes to a sibling temp file and renames it into place. Throws IoError.
void write_report(const ReportDocument& doc, const std::filesystem::path& path);
ReportDocument read_report(const std::filesystem::path& path);

/// Writes `content` to `path` via temp file + rename. Throws IoError.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest round-trip decimal text for a finite double.
std::string format_real(double x);

}  // namespace csufs
