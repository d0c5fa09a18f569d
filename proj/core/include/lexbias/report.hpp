#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexbias/types.hpp"

// SVG charts and summaries of bias analyses.
//
// Number formatting rule for every value label: half away from zero on the
// shortest round-trip decimal form of the double; 3 decimals for biases,
// 1 decimal for percentages (fractions are shown x100).
namespace lexbias::report {

inline constexpr int kSummarySchemaVersion = 1;

// Per-variant scores of one system on one dataset.
struct ScoreTable {
  std::string dataset;
  std::string system;
  std::map<VariantKind, ScoreSummary> scores;

  friend bool operator==(const ScoreTable&, const ScoreTable&) = default;
};

struct NamedEntropy {
  std::string dataset;
  EntropyReport report;

  friend bool operator==(const NamedEntropy&, const NamedEntropy&) = default;
};

struct Metadata {
  std::string toolkit_version;
  std::string generated_at;  // empty keeps outputs reproducible
  std::map<std::string, std::string> input_digests;  // name -> sha256 hex

  friend bool operator==(const Metadata&, const Metadata&) = default;
};

struct ReportBundle {
  std::vector<BiasReport> bias_reports;
  std::vector<ScoreTable> score_tables;
  std::vector<NamedEntropy> entropy_reports;
  Metadata metadata;

  friend bool operator==(const ReportBundle&, const ReportBundle&) = default;
};

struct ScatterThresholds {
  double shade = 0.8;
  double line = 1.0;
};

std::string format_half_up(double value, int decimals);
std::string format_bias(double value);     // 3 decimals
std::string format_percent(double fraction);  // x100, 1 decimal

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// Context bias (x) against target-word bias (y), one point per report with
// both biases. Shaded bands mark biases >= thresholds.shade on each axis and
// dashed red lines mark thresholds.line. Axes span at least [0, 1.1] and grow
// to include every point. Throws ValidationError when nothing is plottable.
std::string bias_scatter(const ReportBundle& bundle, ScatterThresholds thresholds = {});

// Grouped bars per (dataset, system), one bar per variant present.
std::string baseline_bars(std::span<const ScoreTable> tables);

// One min(Full-Context, Full-Word) bar per (dataset, system); negative gaps
// drop below the axis. Throws ValidationError if a table lacks full, context
// or word.
std::string gap_chart(std::span<const ScoreTable> tables);

// Schema-versioned JSON holding every plotted number.
std::string summary_json(const ReportBundle& bundle);
ReportBundle bundle_from_summary_json(std::string_view json);

// dataset | system | Full | Context | Word | Label | Bias_C | Bias_W | min-gap
std::string summary_markdown(const ReportBundle& bundle);

// Writes `json_path` and the markdown digest next to it (extension .md).
void write_summary(const ReportBundle& bundle, const std::filesystem::path& json_path);

}  // namespace lexbias::report
