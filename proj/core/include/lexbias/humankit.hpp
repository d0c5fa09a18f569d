#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lexbias/json.hpp"
#include "lexbias/perturb.hpp"
#include "lexbias/types.hpp"

// Human baseline protocol: two annotators per variant, each judging
// n_per_annotator sampled test items, `overlap` of which both see.
namespace lexbias::humankit {

struct SampleRequest {
  std::string dataset;
  VariantKind variant = VariantKind::full;
  std::pair<std::string, std::string> annotators{"a", "b"};
  std::size_t n_per_annotator = 100;
  std::size_t overlap = 50;
  std::uint64_t seed = 0;
  std::string created_at;
};

struct AnnotationBatch {
  std::string batch_id;
  std::string dataset;
  VariantKind variant = VariantKind::full;
  std::string annotator;
  std::vector<std::string> instance_ids;  // presentation order
  std::vector<std::string> overlap_ids;   // shared with the sibling batch
  std::string sibling_id;
  std::string created_at;
  std::uint64_t seed = 0;
  std::string token;  // shared secret for annotator endpoints

  friend bool operator==(const AnnotationBatch&, const AnnotationBatch&) = default;
};

// Deterministic in (dataset_ids order, request). Procedure:
//   rng = SplitMix64(seed); shuffle a copy of dataset_ids with rng;
//   take the first 2n - overlap ids; the first `overlap` go to both batches,
//   the next n - overlap to the first annotator, the rest to the second;
//   each batch's presentation order is then shuffled with its own
//   rng.split() stream (first annotator first), and each token is the hex of
//   one further draw from that stream.
// Throws ValidationError if the dataset is too small, overlap > n, n == 0,
// annotators coincide, or ids repeat.
std::pair<AnnotationBatch, AnnotationBatch> sample_batches(std::span<const std::string> dataset_ids,
                                                           const SampleRequest& request);

struct Judgment {
  std::string batch_id;
  std::string instance_id;
  std::string annotator;
  Label prediction;
  std::optional<std::string> guessed_surface;
  std::optional<std::int64_t> elapsed_ms;
  std::string submitted_at;

  // Same judgment content; submitted_at is not compared.
  bool same_payload(const Judgment& other) const;
  friend bool operator==(const Judgment&, const Judgment&) = default;
};

struct PayloadSegment {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;
};

// What the annotation UI shows for one item. Masked variants never carry the
// hidden surface.
struct TaskPayload {
  std::string batch_id;
  std::string instance_id;
  VariantKind variant = VariantKind::full;
  TaskKind task_kind = TaskKind::pair_classification;
  std::size_t position = 0;  // 0-based index in presentation order
  std::size_t total = 0;
  std::vector<PayloadSegment> segments;
  std::vector<std::string> label_space;  // T/F for pair tasks
  std::vector<std::string> candidates;   // disambiguation senses or retrieval shortlist
  std::vector<std::string> search_results;
  bool accepts_guess = false;
};

struct Progress {
  std::size_t done = 0;
  std::size_t total = 0;
};

enum class RecordOutcome { stored, duplicate };

json::OrderedJson to_json(const AnnotationBatch& batch);
AnnotationBatch batch_from_json(const json::Json& j);
json::OrderedJson to_json(const Judgment& judgment);
Judgment judgment_from_json(const json::Json& j);
json::OrderedJson to_json(const TaskPayload& payload);

// Batches, their judgments and the datasets they draw from. Every batch has an
// append-only JSONL journal `<journal_dir>/<batch_id>.journal.jsonl` whose
// first line is the batch and whose other lines are judgments; a judgment is
// fsync'ed to the journal before record_judgment returns. open() replays the
// journals, ignoring an unterminated final line left by a crash.
//
// Thread-safe: writes to one batch are serialised, reads of other batches
// proceed concurrently.
class AnnotationStore {
 public:
  struct Options {
    std::filesystem::path journal_dir;
    perturb::MaskConfig mask;
    std::size_t shortlist_k = 10;
  };

  explicit AnnotationStore(Options options);
  ~AnnotationStore();
  AnnotationStore(const AnnotationStore&) = delete;
  AnnotationStore& operator=(const AnnotationStore&) = delete;

  // Datasets must be registered before batches that reference them are
  // created or replayed.
  void add_dataset(const std::string& name, std::vector<Instance> instances);
  std::vector<std::string> dataset_names() const;

  // Replays every journal in journal_dir.
  void open();

  std::pair<AnnotationBatch, AnnotationBatch> create_batches(const SampleRequest& request);
  // Registers an externally sampled batch and writes its journal header.
  void add_batch(const AnnotationBatch& batch);

  std::optional<AnnotationBatch> find_batch(const std::string& batch_id) const;
  std::vector<std::string> batch_ids() const;
  bool check_token(const std::string& batch_id, const std::string& token) const;

  // First un-judged item in presentation order, or nullopt when complete.
  // `search` filters the retrieval inventory (case-folded substring).
  std::optional<TaskPayload> serve_next(const std::string& batch_id, const std::string& annotator,
                                        const std::string& search = "") const;

  RecordOutcome record_judgment(Judgment judgment);
  Progress progress(const std::string& batch_id) const;
  std::vector<Judgment> judgments(const std::string& batch_id) const;

  // One human PredictionRecord per stored judgment, in batch then
  // presentation order. Overlap ids are flagged.
  std::vector<PredictionRecord> export_judgments(std::span<const std::string> batch_ids) const;

 private:
  struct Dataset;
  struct BatchState;

  BatchState& state(const std::string& batch_id) const;
  const Dataset& dataset(const std::string& name) const;
  void install_batch(const AnnotationBatch& batch, bool write_header);

  Options options_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::unique_ptr<Dataset>> datasets_;
  std::map<std::string, std::unique_ptr<BatchState>> batches_;
};

}  // namespace lexbias::humankit
