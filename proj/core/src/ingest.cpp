#include "lexbias/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "lexbias/json.hpp"
#include "lexbias/text.hpp"

namespace lexbias::ingest {
namespace {

using json::Json;

struct Line {
  std::size_t number;  // 1-based
  std::string_view content;
};

// Splits on LF, dropping a trailing CR and the empty tail after a final LF.
std::vector<Line> split_lines(std::string_view content) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  std::size_t number = 1;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back({number++, line});
    pos = end + 1;
  }
  return lines;
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t'; });
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(pos));
      return cols;
    }
    cols.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

std::optional<std::size_t> parse_index(std::string_view s) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

// Runs `parse_line` on every non-blank line, collecting located diagnostics,
// then enforces unique ids and the instance invariants.
template <typename ParseLine>
std::vector<Instance> parse_instances(std::string_view content, const std::string& source,
                                      ParseLine&& parse_line) {
  std::vector<Instance> instances;
  std::vector<Diagnostic> diagnostics;
  std::map<std::string, std::size_t> seen;
  for (const Line& line : split_lines(content)) {
    if (blank(line.content)) continue;
    try {
      Instance inst = parse_line(line.content);
      for (const auto& problem : instance_problems(inst)) {
        diagnostics.push_back({source, line.number, inst.id + ": " + problem});
      }
      if (auto [it, inserted] = seen.emplace(inst.id, line.number); !inserted) {
        diagnostics.push_back({source, line.number,
                               "duplicate id \"" + inst.id + "\" (first seen on line " +
                                   std::to_string(it->second) + ")"});
      }
      instances.push_back(std::move(inst));
    } catch (const Json::parse_error& e) {
      diagnostics.push_back({source, line.number, std::string("malformed JSON: ") + e.what()});
    } catch (const Json::exception& e) {
      diagnostics.push_back({source, line.number, e.what()});
    } catch (const ValidationError& e) {
      diagnostics.push_back({source, line.number, e.what()});
    }
  }
  if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
  return instances;
}

Label binary_label(const Json& v) {
  if (v.is_boolean()) return Label::binary(v.get<bool>());
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "T" || s == "F") return Label::binary(s == "T");
  }
  throw ValidationError("label must be \"T\", \"F\", true or false");
}

Segment segment_from(const Json& j, std::string_view text_key, std::string_view start_key,
                     std::string_view end_key) {
  Segment seg;
  seg.text = json::string_field(j, text_key);
  const Json& start = json::field(j, start_key);
  const Json& end = json::field(j, end_key);
  if (!start.is_number_unsigned() || !end.is_number_unsigned() ||
      end.get<std::size_t>() <= start.get<std::size_t>()) {
    throw ValidationError("invalid span [" + start.dump() + ", " + end.dump() + ")");
  }
  seg.target = {start.get<std::size_t>(), end.get<std::size_t>()};
  const std::u32string scalars = text::decode(seg.text);
  if (seg.target.end > scalars.size()) {
    throw ValidationError("invalid span [" + std::to_string(seg.target.start) + ", " +
                          std::to_string(seg.target.end) + ") for text of length " +
                          std::to_string(scalars.size()));
  }
  seg.surface = text::encode(
      std::u32string_view(scalars).substr(seg.target.start, seg.target.length()));
  return seg;
}

std::string file_label(const std::filesystem::path& path) { return path.string(); }

}  // namespace

std::string_view to_string(SourceFormat format) {
  switch (format) {
    case SourceFormat::canonical_jsonl: return "canonical_jsonl";
    case SourceFormat::wic_tsv: return "wic_tsv";
    case SourceFormat::pair_jsonl: return "pair_jsonl";
    case SourceFormat::retrieval_jsonl: return "retrieval_jsonl";
  }
  return "?";
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "?";
}

SourceFormat parse_source_format(std::string_view name) {
  for (auto f : {SourceFormat::canonical_jsonl, SourceFormat::wic_tsv, SourceFormat::pair_jsonl,
                 SourceFormat::retrieval_jsonl}) {
    if (to_string(f) == name) return f;
  }
  throw ValidationError("unknown source format \"" + std::string(name) + "\"");
}

Split parse_split(std::string_view name) {
  for (auto s : {Split::train, Split::dev, Split::test}) {
    if (to_string(s) == name) return s;
  }
  throw ValidationError("unknown split \"" + std::string(name) + "\"");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(std::vector<Diagnostic>{{file_label(path), 0, "cannot open file"}});
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

DatasetManifest make_manifest(std::string name, Split split, SourceFormat format,
                              std::vector<std::string> languages,
                              const std::vector<Instance>& instances) {
  DatasetManifest m;
  m.name = std::move(name);
  m.split = split;
  m.source_format = format;
  m.languages = std::move(languages);
  m.count = instances.size();
  if (!instances.empty()) m.task_kind = instances.front().task_kind;
  return m;
}

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  json::OrderedJson j;
  j["name"] = m.name;
  j["task_kind"] = std::string(lexbias::to_string(m.task_kind));
  j["languages"] = m.languages;
  j["split"] = std::string(to_string(m.split));
  j["source_format"] = std::string(to_string(m.source_format));
  j["count"] = m.count;
  write_file(path, j.dump(2) + "\n");
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  try {
    const Json j = Json::parse(read_file(path));
    DatasetManifest m;
    m.name = json::string_field(j, "name");
    m.task_kind = parse_task_kind(json::string_field(j, "task_kind"));
    for (const Json& lang : json::field(j, "languages")) m.languages.push_back(lang.get<std::string>());
    m.split = parse_split(json::string_field(j, "split"));
    m.source_format = parse_source_format(json::string_field(j, "source_format"));
    m.count = json::count_field(j, "count");
    return m;
  } catch (const Json::exception& e) {
    throw ValidationError(std::vector<Diagnostic>{{file_label(path), 0, e.what()}});
  }
}

void check_manifest(const DatasetManifest& m, const std::vector<Instance>& instances) {
  std::vector<Diagnostic> problems;
  if (m.count != instances.size()) {
    problems.push_back({m.name, 0,
                        "manifest count " + std::to_string(m.count) + " but " +
                            std::to_string(instances.size()) + " instances parsed"});
  }
  for (const auto& inst : instances) {
    if (inst.task_kind != m.task_kind) {
      problems.push_back({m.name, 0, inst.id + ": task kind differs from manifest"});
      break;
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

std::vector<Instance> parse_canonical_text(std::string_view content, const std::string& source) {
  return parse_instances(content, source, [](std::string_view line) {
    return json::instance_from_json(Json::parse(line), {"variant", "provenance"});
  });
}

std::vector<Instance> parse_canonical(const std::filesystem::path& path) {
  return parse_canonical_text(read_file(path), file_label(path));
}

std::string canonical_text(const std::vector<Instance>& instances) {
  std::string out;
  for (const auto& inst : instances) {
    out += json::to_json(inst).dump();
    out += '\n';
  }
  return out;
}

void write_canonical(const std::vector<Instance>& instances, const std::filesystem::path& path) {
  for (const auto& inst : instances) validate(inst);
  write_file(path, canonical_text(instances));
}

std::vector<Instance> parse_wic_tsv_text(std::string_view data, std::string_view gold,
                                         const std::string& id_prefix,
                                         std::vector<Diagnostic>* warnings,
                                         const std::string& source,
                                         const std::string& gold_source) {
  const std::string& gold_label = gold_source.empty() ? source : gold_source;
  const auto data_lines = split_lines(data);
  const auto gold_lines = split_lines(gold);
  if (data_lines.size() != gold_lines.size()) {
    throw ValidationError(std::vector<Diagnostic>{
        {source, 0,
         "line count mismatch: " + std::to_string(data_lines.size()) + " data lines, " +
             std::to_string(gold_lines.size()) + " gold lines"}});
  }

  std::vector<Instance> instances;
  std::vector<Diagnostic> diagnostics;
  for (std::size_t i = 0; i < data_lines.size(); ++i) {
    const Line& line = data_lines[i];
    auto fail = [&](std::string message) { diagnostics.push_back({source, line.number, std::move(message)}); };

    const auto cols = split_tabs(line.content);
    if (cols.size() != 5) {
      fail("expected 5 tab-separated columns, got " + std::to_string(cols.size()));
      continue;
    }
    const std::string_view word = cols[0];
    const std::string_view indices = cols[2];
    const std::size_t dash = indices.find('-');
    const auto idx1 = dash == std::string_view::npos ? std::nullopt : parse_index(indices.substr(0, dash));
    const auto idx2 = dash == std::string_view::npos ? std::nullopt : parse_index(indices.substr(dash + 1));
    if (!idx1 || !idx2) {
      fail("malformed token indices \"" + std::string(indices) + "\" (expected i-j)");
      continue;
    }

    std::string_view gold_text = gold_lines[i].content;
    while (!gold_text.empty() && (gold_text.back() == ' ' || gold_text.back() == '\t')) {
      gold_text.remove_suffix(1);
    }
    if (gold_text != "T" && gold_text != "F") {
      diagnostics.push_back({gold_label, gold_lines[i].number,
                             "gold label must be T or F, got \"" + std::string(gold_text) + "\""});
      continue;
    }

    Instance inst;
    inst.id = id_prefix + "-" + std::to_string(i);
    inst.task_kind = TaskKind::pair_classification;
    inst.gold = Label::binary(gold_text == "T");
    bool ok = true;
    try {
      inst.word_key = text::normalize_word_key(word);
      const std::string folded_word = text::case_fold(word);
      for (const auto& [sentence, index] : {std::pair{cols[3], *idx1}, std::pair{cols[4], *idx2}}) {
        const std::u32string scalars = text::decode(sentence);
        const auto tokens = text::whitespace_tokens(std::u32string_view(scalars));
        if (index >= tokens.size()) {
          fail("token index " + std::to_string(index) + " beyond " + std::to_string(tokens.size()) +
               " tokens");
          ok = false;
          break;
        }
        Segment seg;
        seg.text = std::string(sentence);
        seg.target = tokens[index];
        seg.surface = text::encode(
            std::u32string_view(scalars).substr(seg.target.start, seg.target.length()));
        if (warnings && !text::case_fold(seg.surface).starts_with(folded_word)) {
          warnings->push_back({source, line.number,
                               "surface \"" + seg.surface + "\" does not start with \"" +
                                   std::string(word) + "\"; kept verbatim"});
        }
        inst.segments.push_back(std::move(seg));
      }
    } catch (const ValidationError& e) {
      fail(e.what());
      ok = false;
    }
    if (!ok) continue;
    for (const auto& problem : instance_problems(inst)) fail(inst.id + ": " + problem);
    instances.push_back(std::move(inst));
  }
  if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
  return instances;
}

std::vector<Instance> parse_wic_tsv(const std::filesystem::path& data_path,
                                    const std::filesystem::path& gold_path,
                                    const std::string& id_prefix,
                                    std::vector<Diagnostic>* warnings) {
  return parse_wic_tsv_text(read_file(data_path), read_file(gold_path), id_prefix, warnings,
                            file_label(data_path), file_label(gold_path));
}

std::vector<Instance> parse_pair_jsonl_text(std::string_view content, const std::string& source) {
  return parse_instances(content, source, [](std::string_view line) {
    const Json j = Json::parse(line);
    if (!j.is_object()) throw ValidationError("pair line must be a JSON object");
    Instance inst;
    inst.id = json::string_field(j, "id");
    inst.task_kind = TaskKind::pair_classification;
    inst.segments.push_back(segment_from(j, "sentence1", "start1", "end1"));
    inst.segments.push_back(segment_from(j, "sentence2", "start2", "end2"));
    inst.gold = binary_label(json::field(j, "label"));
    if (j.contains("word")) {
      inst.word_key = text::normalize_word_key(json::string_field(j, "word"));
    } else {
      inst.word_key = text::pair_word_key(inst.segments[0].surface, inst.segments[1].surface);
    }
    return inst;
  });
}

std::vector<Instance> parse_pair_jsonl(const std::filesystem::path& path) {
  return parse_pair_jsonl_text(read_file(path), file_label(path));
}

std::vector<Instance> parse_retrieval_jsonl_text(std::string_view content, const std::string& source) {
  return parse_instances(content, source, [](std::string_view line) {
    const Json j = Json::parse(line);
    if (!j.is_object()) throw ValidationError("retrieval line must be a JSON object");
    Instance inst;
    inst.id = json::string_field(j, "id");
    inst.segments.push_back(segment_from(j, "context", "start", "end"));
    std::string gold = json::string_field(j, "gold");
    if (gold.empty()) throw ValidationError("empty gold");
    inst.gold = Label::candidate(std::move(gold));
    if (auto it = j.find("candidates"); it != j.end()) {
      inst.task_kind = TaskKind::disambiguation;
      inst.candidates = it->get<std::vector<std::string>>();
    } else {
      inst.task_kind = TaskKind::retrieval;
    }
    inst.word_key = text::normalize_word_key(inst.segments[0].surface);
    return inst;
  });
}

std::vector<Instance> parse_retrieval_jsonl(const std::filesystem::path& path) {
  return parse_retrieval_jsonl_text(read_file(path), file_label(path));
}

std::vector<Instance> parse_dataset(SourceFormat format, const std::filesystem::path& path,
                                    const std::optional<std::filesystem::path>& gold_path,
                                    const std::string& id_prefix, std::vector<Diagnostic>* warnings) {
  switch (format) {
    case SourceFormat::canonical_jsonl: return parse_canonical(path);
    case SourceFormat::pair_jsonl: return parse_pair_jsonl(path);
    case SourceFormat::retrieval_jsonl: return parse_retrieval_jsonl(path);
    case SourceFormat::wic_tsv:
      if (!gold_path) throw ValidationError("wic_tsv needs a gold file");
      return parse_wic_tsv(path, *gold_path, id_prefix, warnings);
  }
  throw ValidationError("unsupported format");
}

std::vector<PredictionRecord> parse_predictions_text(std::string_view content, const std::string& source) {
  using Key = std::tuple<std::string, std::string, VariantKind, std::optional<std::int64_t>,
                         std::optional<std::string>>;
  std::vector<PredictionRecord> records;
  std::vector<Diagnostic> diagnostics;
  std::map<Key, std::size_t> seen;
  for (const Line& line : split_lines(content)) {
    if (blank(line.content)) continue;
    try {
      PredictionRecord r = json::prediction_from_json(Json::parse(line.content));
      Key key{r.instance_id, r.system, r.variant, r.seed, r.annotator};
      if (auto [it, inserted] = seen.emplace(key, line.number); !inserted) {
        diagnostics.push_back({source, line.number,
                               "duplicate prediction key for \"" + r.instance_id +
                                   "\" (first seen on line " + std::to_string(it->second) + ")"});
        continue;
      }
      records.push_back(std::move(r));
    } catch (const Json::parse_error& e) {
      diagnostics.push_back({source, line.number, std::string("malformed JSON: ") + e.what()});
    } catch (const Json::exception& e) {
      diagnostics.push_back({source, line.number, e.what()});
    } catch (const ValidationError& e) {
      diagnostics.push_back({source, line.number, e.what()});
    }
  }
  if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
  return records;
}

std::vector<PredictionRecord> parse_predictions(const std::filesystem::path& path) {
  return parse_predictions_text(read_file(path), file_label(path));
}

std::string predictions_text(const std::vector<PredictionRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += json::to_json(r).dump();
    out += '\n';
  }
  return out;
}

void write_predictions(const std::vector<PredictionRecord>& records, const std::filesystem::path& path) {
  write_file(path, predictions_text(records));
}

std::vector<std::string> entity_inventory(const std::vector<Instance>& dataset) {
  std::set<std::string> ids;
  for (const auto& inst : dataset) {
    if (inst.task_kind == TaskKind::retrieval) ids.insert(inst.gold.text());
  }
  return {ids.begin(), ids.end()};
}

void validate_predictions(const std::vector<PredictionRecord>& records,
                          const std::vector<Instance>& dataset, const std::string& source) {
  std::map<std::string, const Instance*> by_id;
  for (const auto& inst : dataset) by_id.emplace(inst.id, &inst);
  const auto inventory = entity_inventory(dataset);
  const std::set<std::string> inventory_set(inventory.begin(), inventory.end());

  std::vector<Diagnostic> diagnostics;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const PredictionRecord& r = records[i];
    auto it = by_id.find(r.instance_id);
    if (it == by_id.end()) {
      diagnostics.push_back({source, i + 1, "unknown instance id \"" + r.instance_id + "\""});
      continue;
    }
    const Instance& inst = *it->second;
    const std::string& p = r.prediction.text();
    bool in_space = true;
    switch (inst.task_kind) {
      case TaskKind::pair_classification:
        in_space = r.prediction.is_binary();
        break;
      case TaskKind::disambiguation:
        in_space = inst.candidates &&
                   std::find(inst.candidates->begin(), inst.candidates->end(), p) != inst.candidates->end();
        break;
      case TaskKind::retrieval:
        in_space = inventory_set.contains(p);
        break;
    }
    if (!in_space) {
      diagnostics.push_back({source, i + 1,
                             "prediction \"" + p + "\" for \"" + r.instance_id +
                                 "\" is outside the label space"});
    }
  }
  if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
}

}  // namespace lexbias::ingest
