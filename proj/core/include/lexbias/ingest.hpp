#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexbias/error.hpp"
#include "lexbias/types.hpp"

// Dataset and prediction file formats. Every parser is all-or-nothing: it
// either returns a fully valid list or throws ValidationError carrying one
// located Diagnostic per problem found.
namespace lexbias::ingest {

enum class SourceFormat { canonical_jsonl, wic_tsv, pair_jsonl, retrieval_jsonl };
enum class Split { train, dev, test };

std::string_view to_string(SourceFormat format);
std::string_view to_string(Split split);
SourceFormat parse_source_format(std::string_view name);
Split parse_split(std::string_view name);

struct DatasetManifest {
  std::string name;
  TaskKind task_kind = TaskKind::pair_classification;
  std::vector<std::string> languages;  // BCP-47 tags
  Split split = Split::test;
  SourceFormat source_format = SourceFormat::canonical_jsonl;
  std::size_t count = 0;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

DatasetManifest make_manifest(std::string name, Split split, SourceFormat format,
                              std::vector<std::string> languages,
                              const std::vector<Instance>& instances);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);
// Checks the manifest against the instances it describes.
void check_manifest(const DatasetManifest& manifest, const std::vector<Instance>& instances);

// Canonical instance JSONL. Lines carrying "variant"/"provenance" (perturbed
// output) are accepted; those fields are ignored.
std::vector<Instance> parse_canonical(const std::filesystem::path& path);
std::vector<Instance> parse_canonical_text(std::string_view content, const std::string& source = "");

// Byte-stable: fixed field order, UTF-8, LF endings, no trailing spaces.
void write_canonical(const std::vector<Instance>& instances, const std::filesystem::path& path);
std::string canonical_text(const std::vector<Instance>& instances);

// WiC release format: `word<TAB>pos<TAB>i-j<TAB>sentence1<TAB>sentence2` with a
// parallel gold file of T/F lines. Token indices are zero-based positions in
// the whitespace tokenisation of each sentence. Ids are `<id_prefix>-<line>`
// with a zero-based line index. Surfaces that do not start with `word` after
// case folding are kept verbatim and reported in `warnings`.
std::vector<Instance> parse_wic_tsv(const std::filesystem::path& data_path,
                                    const std::filesystem::path& gold_path,
                                    const std::string& id_prefix = "wic",
                                    std::vector<Diagnostic>* warnings = nullptr);
std::vector<Instance> parse_wic_tsv_text(std::string_view data, std::string_view gold,
                                         const std::string& id_prefix = "wic",
                                         std::vector<Diagnostic>* warnings = nullptr,
                                         const std::string& source = "",
                                         const std::string& gold_source = "");

// Pair JSONL (XL-WiC / AM2iCo style), one object per line:
// {"id", "sentence1", "start1", "end1", "sentence2", "start2", "end2",
//  "label": "T"|"F"|true|false, "word"?}
// Offsets are scalar offsets. word_key is the normalised "word" when present,
// otherwise text::pair_word_key of the two surfaces.
std::vector<Instance> parse_pair_jsonl(const std::filesystem::path& path);
std::vector<Instance> parse_pair_jsonl_text(std::string_view content, const std::string& source = "");

// Retrieval/disambiguation JSONL, one mention per line:
// {"id", "context", "start", "end", "gold", "candidates"?: [...]}
// Lines with candidates become disambiguation instances, lines without become
// retrieval instances resolved against a global inventory.
std::vector<Instance> parse_retrieval_jsonl(const std::filesystem::path& path);
std::vector<Instance> parse_retrieval_jsonl_text(std::string_view content,
                                                 const std::string& source = "");

std::vector<Instance> parse_dataset(SourceFormat format, const std::filesystem::path& path,
                                    const std::optional<std::filesystem::path>& gold_path = {},
                                    const std::string& id_prefix = "wic",
                                    std::vector<Diagnostic>* warnings = nullptr);

std::vector<PredictionRecord> parse_predictions(const std::filesystem::path& path);
std::vector<PredictionRecord> parse_predictions_text(std::string_view content,
                                                     const std::string& source = "");
void write_predictions(const std::vector<PredictionRecord>& records, const std::filesystem::path& path);
std::string predictions_text(const std::vector<PredictionRecord>& records);

// Cross-checks predictions against a dataset: ids must exist and each
// prediction must lie in its instance's label space (T/F for pair tasks, the
// candidate list for disambiguation, the dataset's entity inventory for
// retrieval). Throws ValidationError listing every offending record.
void validate_predictions(const std::vector<PredictionRecord>& records,
                          const std::vector<Instance>& dataset, const std::string& source = "");

// Gold ids of every retrieval instance: the inventory retrieval predictions are
// checked against when no explicit inventory is supplied.
std::vector<std::string> entity_inventory(const std::vector<Instance>& dataset);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace lexbias::ingest
