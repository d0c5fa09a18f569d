#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lexbias {

enum class TaskKind { pair_classification, disambiguation, retrieval };

// Probing baselines. full is the unperturbed input.
enum class VariantKind { full, context, word, label, guessed_word };

enum class Metric { accuracy, accuracy_at_1 };

std::string_view to_string(TaskKind kind);
std::string_view to_string(VariantKind kind);
std::string_view to_string(Metric metric);

// Throw ValidationError on unknown names.
TaskKind parse_task_kind(std::string_view name);
VariantKind parse_variant(std::string_view name);
Metric parse_metric(std::string_view name);

Metric metric_for(TaskKind kind);

// Half-open [start, end) in Unicode scalar values.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  friend bool operator==(const Span&, const Span&) = default;
};

struct Segment {
  std::string text;  // UTF-8
  Span target;
  std::string surface;

  friend bool operator==(const Segment&, const Segment&) = default;
};

// Binary labels are stored as "T"/"F"; candidate labels carry the id.
class Label {
 public:
  enum class Kind { binary, candidate };

  Label() = default;
  static Label binary(bool value);
  static Label candidate(std::string id);
  // "T"/"F" parse as binary, anything else as a candidate id.
  static Label parse(std::string_view text);

  Kind kind() const { return kind_; }
  bool is_binary() const { return kind_ == Kind::binary; }
  const std::string& text() const { return value_; }

  friend bool operator==(const Label&, const Label&) = default;
  friend auto operator<=>(const Label&, const Label&) = default;

 private:
  Label(Kind kind, std::string value) : kind_(kind), value_(std::move(value)) {}

  Kind kind_ = Kind::binary;
  std::string value_ = "F";
};

struct Instance {
  std::string id;
  TaskKind task_kind = TaskKind::pair_classification;
  std::vector<Segment> segments;
  Label gold;
  std::optional<std::vector<std::string>> candidates;
  std::string word_key;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// Every invariant violation of the instance, empty when valid.
std::vector<std::string> instance_problems(const Instance& instance);
// Throws ValidationError naming the instance id.
void validate(const Instance& instance);

// Gold labels keyed by instance id.
using GoldMap = std::map<std::string, Label>;
GoldMap gold_map(const std::vector<Instance>& instances);

// One prediction line. (instance_id, system, variant, seed, annotator) is the
// uniqueness key.
struct PredictionRecord {
  std::string instance_id;
  std::string system;
  VariantKind variant = VariantKind::full;
  std::optional<std::int64_t> seed;
  Label prediction;
  std::optional<std::string> annotator;
  std::optional<std::string> guessed_surface;
  // Set on human exports for ids shared between sibling batches.
  bool overlap = false;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

// One system's predictions for one variant and run.
struct PredictionSet {
  std::string system;
  VariantKind variant = VariantKind::full;
  std::optional<std::int64_t> seed;
  std::optional<std::string> annotator;
  std::map<std::string, Label> predictions;
};

// Groups records by (system, variant, seed, annotator), ordered by that key.
std::vector<PredictionSet> group_predictions(const std::vector<PredictionRecord>& records);

struct ScoreRun {
  std::optional<std::int64_t> seed;
  std::optional<std::string> annotator;
  double score = 0.0;  // fraction in [0, 1]

  friend bool operator==(const ScoreRun&, const ScoreRun&) = default;
};

struct ScoreSummary {
  std::string system;
  VariantKind variant = VariantKind::full;
  Metric metric = Metric::accuracy;
  std::vector<ScoreRun> runs;
  double mean = 0.0;
  double std = 0.0;
  std::size_t n_instances = 0;
  std::size_t n_missing = 0;

  friend bool operator==(const ScoreSummary&, const ScoreSummary&) = default;
};

// Builds a summary from runs via aggregate_runs.
ScoreSummary make_summary(std::string system, VariantKind variant, Metric metric,
                          std::vector<ScoreRun> runs, std::size_t n_instances,
                          std::size_t n_missing = 0);

enum class BiasFlag {
  degenerate_denominator,
  exceeds_one_c,
  exceeds_one_w,
  negative_c,
  negative_w,
};

std::string_view to_string(BiasFlag flag);
BiasFlag parse_bias_flag(std::string_view name);

struct BiasReport {
  std::string dataset;
  std::string system;
  Metric metric = Metric::accuracy;
  // Mean scores the report was computed from.
  std::map<VariantKind, double> scores;
  std::optional<double> bias_c;
  std::optional<double> bias_w;
  std::optional<double> min_gap;
  std::set<BiasFlag> flags;

  friend bool operator==(const BiasReport&, const BiasReport&) = default;
};

enum class EntropyKind { label_entropy, sense_entropy };
std::string_view to_string(EntropyKind kind);
EntropyKind parse_entropy_kind(std::string_view name);

struct WordEntropy {
  std::size_t count = 0;
  std::size_t n_labels = 0;  // distinct labels observed
  double entropy_bits = 0.0;
  double majority_proportion = 0.0;
  std::string majority_label;

  friend bool operator==(const WordEntropy&, const WordEntropy&) = default;
};

struct EntropyReport {
  EntropyKind kind = EntropyKind::label_entropy;
  std::map<std::string, WordEntropy> per_word;
  // Unweighted mean over included word types (headline number).
  double average = 0.0;
  // Mean weighted by each word's instance count.
  double token_weighted_average = 0.0;
  // Instance-weighted share of examples carrying their word's majority label.
  double majority_proportion = 0.0;
  std::size_t n_words_included = 0;
  std::size_t n_words_discarded = 0;

  friend bool operator==(const EntropyReport&, const EntropyReport&) = default;
};

}  // namespace lexbias
