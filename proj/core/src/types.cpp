#include "lexbias/types.hpp"

#include <algorithm>
#include <array>
#include <tuple>
#include <utility>

#include "lexbias/error.hpp"
#include "lexbias/metrics.hpp"
#include "lexbias/text.hpp"

namespace lexbias {
namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view name, const std::array<std::pair<std::string_view, Enum>, N>& table,
                std::string_view what) {
  for (const auto& [key, value] : table) {
    if (key == name) return value;
  }
  throw ValidationError("unknown " + std::string(what) + " \"" + std::string(name) + "\"");
}

constexpr std::array<std::pair<std::string_view, TaskKind>, 3> kTaskKinds{{
    {"pair_classification", TaskKind::pair_classification},
    {"disambiguation", TaskKind::disambiguation},
    {"retrieval", TaskKind::retrieval},
}};

constexpr std::array<std::pair<std::string_view, VariantKind>, 5> kVariants{{
    {"full", VariantKind::full},
    {"context", VariantKind::context},
    {"word", VariantKind::word},
    {"label", VariantKind::label},
    {"guessed_word", VariantKind::guessed_word},
}};

constexpr std::array<std::pair<std::string_view, Metric>, 2> kMetrics{{
    {"accuracy", Metric::accuracy},
    {"accuracy_at_1", Metric::accuracy_at_1},
}};

constexpr std::array<std::pair<std::string_view, BiasFlag>, 5> kFlags{{
    {"degenerate_denominator", BiasFlag::degenerate_denominator},
    {"exceeds_one_c", BiasFlag::exceeds_one_c},
    {"exceeds_one_w", BiasFlag::exceeds_one_w},
    {"negative_c", BiasFlag::negative_c},
    {"negative_w", BiasFlag::negative_w},
}};

constexpr std::array<std::pair<std::string_view, EntropyKind>, 2> kEntropyKinds{{
    {"label_entropy", EntropyKind::label_entropy},
    {"sense_entropy", EntropyKind::sense_entropy},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(Enum value, const std::array<std::pair<std::string_view, Enum>, N>& table) {
  for (const auto& [key, v] : table) {
    if (v == value) return key;
  }
  return "?";
}

}  // namespace

std::string_view to_string(TaskKind kind) { return name_of(kind, kTaskKinds); }
std::string_view to_string(VariantKind kind) { return name_of(kind, kVariants); }
std::string_view to_string(Metric metric) { return name_of(metric, kMetrics); }
std::string_view to_string(BiasFlag flag) { return name_of(flag, kFlags); }
std::string_view to_string(EntropyKind kind) { return name_of(kind, kEntropyKinds); }

TaskKind parse_task_kind(std::string_view name) { return parse_enum(name, kTaskKinds, "task kind"); }
VariantKind parse_variant(std::string_view name) { return parse_enum(name, kVariants, "variant"); }
Metric parse_metric(std::string_view name) { return parse_enum(name, kMetrics, "metric"); }
BiasFlag parse_bias_flag(std::string_view name) { return parse_enum(name, kFlags, "bias flag"); }
EntropyKind parse_entropy_kind(std::string_view name) {
  return parse_enum(name, kEntropyKinds, "entropy kind");
}

Metric metric_for(TaskKind kind) {
  return kind == TaskKind::retrieval ? Metric::accuracy_at_1 : Metric::accuracy;
}

Label Label::binary(bool value) { return Label(Kind::binary, value ? "T" : "F"); }

Label Label::candidate(std::string id) { return Label(Kind::candidate, std::move(id)); }

Label Label::parse(std::string_view text) {
  if (text == "T") return binary(true);
  if (text == "F") return binary(false);
  return candidate(std::string(text));
}

std::vector<std::string> instance_problems(const Instance& instance) {
  std::vector<std::string> problems;
  if (instance.id.empty()) problems.emplace_back("empty id");
  if (instance.word_key.empty()) problems.emplace_back("empty word_key");

  const std::size_t expected =
      instance.task_kind == TaskKind::pair_classification ? 2 : 1;
  if (instance.segments.size() != expected) {
    problems.push_back(std::string(to_string(instance.task_kind)) + " needs " +
                       std::to_string(expected) + " segment(s), got " +
                       std::to_string(instance.segments.size()));
  }

  for (std::size_t i = 0; i < instance.segments.size(); ++i) {
    const Segment& seg = instance.segments[i];
    const std::string where = "segment " + std::to_string(i) + ": ";
    if (!text::is_valid_utf8(seg.text)) {
      problems.push_back(where + "text is not valid UTF-8");
      continue;
    }
    const std::size_t len = text::scalar_length(seg.text);
    if (seg.target.start >= seg.target.end || seg.target.end > len) {
      problems.push_back(where + "invalid span [" + std::to_string(seg.target.start) + ", " +
                         std::to_string(seg.target.end) + ") for text of length " +
                         std::to_string(len));
      continue;
    }
    const std::string covered = text::substr(seg.text, seg.target.start, seg.target.end);
    if (covered != seg.surface) {
      problems.push_back(where + "surface mismatch: span covers \"" + covered +
                         "\" but surface is \"" + seg.surface + "\"");
    }
  }

  const bool binary_gold = instance.gold.is_binary();
  if (instance.task_kind == TaskKind::pair_classification) {
    if (!binary_gold) problems.emplace_back("pair_classification gold must be binary");
  } else {
    if (binary_gold) {
      problems.push_back("binary gold on " + std::string(to_string(instance.task_kind)) +
                         " instance");
    }
  }
  if (instance.task_kind == TaskKind::disambiguation) {
    if (!instance.candidates || instance.candidates->empty()) {
      problems.emplace_back("disambiguation instance without candidates");
    } else if (std::find(instance.candidates->begin(), instance.candidates->end(),
                         instance.gold.text()) == instance.candidates->end()) {
      problems.push_back("gold \"" + instance.gold.text() + "\" not among candidates");
    }
  }
  if (instance.task_kind == TaskKind::pair_classification && instance.candidates) {
    problems.emplace_back("pair_classification instance must not carry candidates");
  }
  return problems;
}

void validate(const Instance& instance) {
  const auto problems = instance_problems(instance);
  if (problems.empty()) return;
  std::vector<Diagnostic> diagnostics;
  for (const auto& p : problems) diagnostics.push_back({instance.id, 0, p});
  throw ValidationError(std::move(diagnostics));
}

GoldMap gold_map(const std::vector<Instance>& instances) {
  GoldMap gold;
  for (const auto& inst : instances) gold.emplace(inst.id, inst.gold);
  return gold;
}

std::vector<PredictionSet> group_predictions(const std::vector<PredictionRecord>& records) {
  using Key = std::tuple<std::string, VariantKind, std::optional<std::int64_t>,
                         std::optional<std::string>>;
  std::map<Key, PredictionSet> groups;
  for (const auto& r : records) {
    Key key{r.system, r.variant, r.seed, r.annotator};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) {
      it->second.system = r.system;
      it->second.variant = r.variant;
      it->second.seed = r.seed;
      it->second.annotator = r.annotator;
    }
    it->second.predictions.insert_or_assign(r.instance_id, r.prediction);
  }
  std::vector<PredictionSet> out;
  out.reserve(groups.size());
  for (auto& [key, set] : groups) out.push_back(std::move(set));
  return out;
}

ScoreSummary make_summary(std::string system, VariantKind variant, Metric metric,
                          std::vector<ScoreRun> runs, std::size_t n_instances,
                          std::size_t n_missing) {
  ScoreSummary s;
  s.system = std::move(system);
  s.variant = variant;
  s.metric = metric;
  const RunStats stats = aggregate_runs(runs);
  s.mean = stats.mean;
  s.std = stats.std;
  s.runs = std::move(runs);
  s.n_instances = n_instances;
  s.n_missing = n_missing;
  return s;
}

}  // namespace lexbias
