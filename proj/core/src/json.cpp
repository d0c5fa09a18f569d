#include "lexbias/json.hpp"

#include <algorithm>

#include "lexbias/error.hpp"

namespace lexbias::json {
namespace {

void reject_unknown_keys(const Json& j, std::initializer_list<std::string_view> known,
                         std::initializer_list<std::string_view> extra = {}) {
  for (const auto& [key, value] : j.items()) {
    const bool ok = std::find(known.begin(), known.end(), key) != known.end() ||
                    std::find(extra.begin(), extra.end(), key) != extra.end();
    if (!ok) throw ValidationError("unknown field \"" + key + "\"");
  }
}

void require_object(const Json& j, std::string_view what) {
  if (!j.is_object()) throw ValidationError(std::string(what) + " must be a JSON object");
}

std::optional<double> optional_number(const Json& j, std::string_view key) {
  auto it = j.find(std::string(key));
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw ValidationError("field \"" + std::string(key) + "\" must be a number");
  return it->get<double>();
}

Json optional_to_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

const Json& field(const Json& j, std::string_view key) {
  auto it = j.find(std::string(key));
  if (it == j.end()) throw ValidationError("missing field \"" + std::string(key) + "\"");
  return *it;
}

std::string string_field(const Json& j, std::string_view key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw ValidationError("field \"" + std::string(key) + "\" must be a string");
  return v.get<std::string>();
}

std::size_t count_field(const Json& j, std::string_view key) {
  const Json& v = field(j, key);
  if (!v.is_number_unsigned()) {
    throw ValidationError("field \"" + std::string(key) + "\" must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double number_field(const Json& j, std::string_view key) {
  const Json& v = field(j, key);
  if (!v.is_number()) throw ValidationError("field \"" + std::string(key) + "\" must be a number");
  return v.get<double>();
}

OrderedJson gold_to_json(const Label& label) {
  OrderedJson j;
  if (label.is_binary()) {
    j["binary"] = label.text();
  } else {
    j["candidate"] = label.text();
  }
  return j;
}

Label gold_from_json(const Json& j) {
  require_object(j, "gold");
  if (j.size() != 1) throw ValidationError("gold must have exactly one of \"binary\", \"candidate\"");
  if (j.contains("binary")) {
    const std::string v = string_field(j, "binary");
    if (v != "T" && v != "F") throw ValidationError("binary gold must be \"T\" or \"F\", got \"" + v + "\"");
    return Label::binary(v == "T");
  }
  if (j.contains("candidate")) {
    std::string v = string_field(j, "candidate");
    if (v.empty()) throw ValidationError("empty candidate gold");
    return Label::candidate(std::move(v));
  }
  throw ValidationError("gold must have exactly one of \"binary\", \"candidate\"");
}

OrderedJson to_json(const Instance& instance) {
  OrderedJson j;
  j["id"] = instance.id;
  j["task_kind"] = std::string(to_string(instance.task_kind));
  j["word_key"] = instance.word_key;
  OrderedJson segments = OrderedJson::array();
  for (const auto& s : instance.segments) {
    OrderedJson seg;
    seg["text"] = s.text;
    seg["start"] = s.target.start;
    seg["end"] = s.target.end;
    seg["surface"] = s.surface;
    segments.push_back(std::move(seg));
  }
  j["segments"] = std::move(segments);
  j["gold"] = gold_to_json(instance.gold);
  if (instance.candidates) j["candidates"] = *instance.candidates;
  return j;
}

Instance instance_from_json(const Json& j, std::initializer_list<std::string_view> allowed_extra) {
  require_object(j, "instance");
  reject_unknown_keys(j, {"id", "task_kind", "word_key", "segments", "gold", "candidates"},
                      allowed_extra);
  Instance inst;
  inst.id = string_field(j, "id");
  inst.task_kind = parse_task_kind(string_field(j, "task_kind"));
  inst.word_key = string_field(j, "word_key");

  const Json& segments = field(j, "segments");
  if (!segments.is_array()) throw ValidationError("field \"segments\" must be an array");
  for (const Json& s : segments) {
    require_object(s, "segment");
    reject_unknown_keys(s, {"text", "start", "end", "surface"});
    Segment seg;
    seg.text = string_field(s, "text");
    seg.surface = string_field(s, "surface");
    const Json& start = field(s, "start");
    const Json& end = field(s, "end");
    if (!start.is_number_integer() || !end.is_number_integer()) {
      throw ValidationError("invalid span: start/end must be integers");
    }
    if (!start.is_number_unsigned() || !end.is_number_unsigned() ||
        end.get<std::size_t>() <= start.get<std::size_t>()) {
      throw ValidationError("invalid span [" + start.dump() + ", " + end.dump() + ")");
    }
    seg.target = {start.get<std::size_t>(), end.get<std::size_t>()};
    inst.segments.push_back(std::move(seg));
  }

  inst.gold = gold_from_json(field(j, "gold"));
  if (auto it = j.find("candidates"); it != j.end()) {
    if (!it->is_array()) throw ValidationError("field \"candidates\" must be an array");
    std::vector<std::string> candidates;
    for (const Json& c : *it) {
      if (!c.is_string()) throw ValidationError("candidates must be strings");
      candidates.push_back(c.get<std::string>());
    }
    inst.candidates = std::move(candidates);
  }
  return inst;
}

OrderedJson to_json(const PredictionRecord& r) {
  OrderedJson j;
  j["instance_id"] = r.instance_id;
  j["system"] = r.system;
  j["variant"] = std::string(to_string(r.variant));
  if (r.seed) j["seed"] = *r.seed;
  j["prediction"] = r.prediction.text();
  if (r.annotator) j["annotator"] = *r.annotator;
  if (r.guessed_surface) j["guessed_surface"] = *r.guessed_surface;
  if (r.overlap) j["overlap"] = true;
  return j;
}

PredictionRecord prediction_from_json(const Json& j) {
  require_object(j, "prediction record");
  reject_unknown_keys(j, {"instance_id", "system", "variant", "seed", "prediction", "annotator",
                          "guessed_surface", "overlap"});
  PredictionRecord r;
  r.instance_id = string_field(j, "instance_id");
  r.system = string_field(j, "system");
  r.variant = parse_variant(string_field(j, "variant"));
  if (auto it = j.find("seed"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw ValidationError("field \"seed\" must be an integer");
    r.seed = it->get<std::int64_t>();
  }
  const std::string prediction = string_field(j, "prediction");
  if (prediction.empty()) throw ValidationError("empty prediction");
  r.prediction = Label::parse(prediction);
  if (auto it = j.find("annotator"); it != j.end() && !it->is_null()) {
    r.annotator = string_field(j, "annotator");
  }
  if (auto it = j.find("guessed_surface"); it != j.end() && !it->is_null()) {
    r.guessed_surface = string_field(j, "guessed_surface");
    if (r.variant != VariantKind::context && r.variant != VariantKind::guessed_word) {
      throw ValidationError("guessed_surface is only allowed on context or guessed_word predictions");
    }
  }
  if (auto it = j.find("overlap"); it != j.end()) {
    if (!it->is_boolean()) throw ValidationError("field \"overlap\" must be a boolean");
    r.overlap = it->get<bool>();
  }
  if (r.instance_id.empty()) throw ValidationError("empty instance_id");
  if (r.system.empty()) throw ValidationError("empty system");
  return r;
}

OrderedJson to_json(const ScoreRun& run) {
  OrderedJson j;
  j["seed"] = run.seed ? OrderedJson(*run.seed) : OrderedJson(nullptr);
  if (run.annotator) j["annotator"] = *run.annotator;
  j["score"] = run.score;
  return j;
}

ScoreRun score_run_from_json(const Json& j) {
  require_object(j, "run");
  ScoreRun run;
  if (auto it = j.find("seed"); it != j.end() && !it->is_null()) run.seed = it->get<std::int64_t>();
  if (auto it = j.find("annotator"); it != j.end() && !it->is_null()) {
    run.annotator = it->get<std::string>();
  }
  run.score = number_field(j, "score");
  return run;
}

OrderedJson to_json(const ScoreSummary& s) {
  OrderedJson j;
  j["system"] = s.system;
  j["variant"] = std::string(to_string(s.variant));
  j["metric"] = std::string(to_string(s.metric));
  OrderedJson runs = OrderedJson::array();
  for (const auto& r : s.runs) runs.push_back(to_json(r));
  j["runs"] = std::move(runs);
  j["mean"] = s.mean;
  j["std"] = s.std;
  j["n_instances"] = s.n_instances;
  j["n_missing"] = s.n_missing;
  return j;
}

ScoreSummary score_summary_from_json(const Json& j) {
  require_object(j, "score summary");
  ScoreSummary s;
  s.system = string_field(j, "system");
  s.variant = parse_variant(string_field(j, "variant"));
  s.metric = parse_metric(string_field(j, "metric"));
  const Json& runs = field(j, "runs");
  if (!runs.is_array() || runs.empty()) throw ValidationError("field \"runs\" must be a non-empty array");
  for (const Json& r : runs) s.runs.push_back(score_run_from_json(r));
  s.mean = number_field(j, "mean");
  s.std = number_field(j, "std");
  s.n_instances = count_field(j, "n_instances");
  if (j.contains("n_missing")) s.n_missing = count_field(j, "n_missing");
  return s;
}

OrderedJson to_json(const BiasReport& r) {
  OrderedJson j;
  j["dataset"] = r.dataset;
  j["system"] = r.system;
  j["metric"] = std::string(to_string(r.metric));
  OrderedJson scores = OrderedJson::object();
  for (const auto& [variant, value] : r.scores) scores[std::string(to_string(variant))] = value;
  j["scores"] = std::move(scores);
  j["bias_c"] = optional_to_json(r.bias_c);
  j["bias_w"] = optional_to_json(r.bias_w);
  j["min_gap"] = optional_to_json(r.min_gap);
  OrderedJson flags = OrderedJson::array();
  for (BiasFlag f : r.flags) flags.push_back(std::string(to_string(f)));
  j["flags"] = std::move(flags);
  return j;
}

BiasReport bias_report_from_json(const Json& j) {
  require_object(j, "bias report");
  BiasReport r;
  r.dataset = string_field(j, "dataset");
  r.system = string_field(j, "system");
  if (j.contains("metric")) r.metric = parse_metric(string_field(j, "metric"));
  if (auto it = j.find("scores"); it != j.end()) {
    for (const auto& [variant, value] : it->items()) {
      r.scores.emplace(parse_variant(variant), value.get<double>());
    }
  }
  r.bias_c = optional_number(j, "bias_c");
  r.bias_w = optional_number(j, "bias_w");
  r.min_gap = optional_number(j, "min_gap");
  if (auto it = j.find("flags"); it != j.end()) {
    for (const Json& f : *it) r.flags.insert(parse_bias_flag(f.get<std::string>()));
  }
  return r;
}

OrderedJson to_json(const EntropyReport& r) {
  OrderedJson j;
  j["kind"] = std::string(to_string(r.kind));
  j["average_bits"] = r.average;
  j["token_weighted_average_bits"] = r.token_weighted_average;
  j["majority_proportion"] = r.majority_proportion;
  j["n_words_included"] = r.n_words_included;
  j["n_words_discarded"] = r.n_words_discarded;
  OrderedJson words = OrderedJson::object();
  for (const auto& [word, w] : r.per_word) {
    OrderedJson entry;
    entry["count"] = w.count;
    entry["n_labels"] = w.n_labels;
    entry["entropy_bits"] = w.entropy_bits;
    entry["majority_proportion"] = w.majority_proportion;
    entry["majority_label"] = w.majority_label;
    words[word] = std::move(entry);
  }
  j["per_word"] = std::move(words);
  return j;
}

EntropyReport entropy_report_from_json(const Json& j) {
  require_object(j, "entropy report");
  EntropyReport r;
  r.kind = parse_entropy_kind(string_field(j, "kind"));
  r.average = number_field(j, "average_bits");
  r.token_weighted_average = number_field(j, "token_weighted_average_bits");
  r.majority_proportion = number_field(j, "majority_proportion");
  r.n_words_included = count_field(j, "n_words_included");
  r.n_words_discarded = count_field(j, "n_words_discarded");
  for (const auto& [word, entry] : field(j, "per_word").items()) {
    WordEntropy w;
    w.count = count_field(entry, "count");
    w.n_labels = count_field(entry, "n_labels");
    w.entropy_bits = number_field(entry, "entropy_bits");
    w.majority_proportion = number_field(entry, "majority_proportion");
    w.majority_label = string_field(entry, "majority_label");
    r.per_word.emplace(word, std::move(w));
  }
  return r;
}

}  // namespace lexbias::json
