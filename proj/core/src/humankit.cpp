#include "lexbias/humankit.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <set>

#include "lexbias/error.hpp"
#include "lexbias/ingest.hpp"
#include "lexbias/rng.hpp"
#include "lexbias/text.hpp"

namespace lexbias::humankit {
namespace {

using json::Json;
using json::OrderedJson;

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
  return out;
}

std::string sanitize(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string now_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Append-only file; every append is fsync'ed before returning.
class Journal {
 public:
  explicit Journal(const std::filesystem::path& path) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error("cannot open journal " + path.string() + ": " + std::strerror(errno));
  }
  ~Journal() {
    if (fd_ >= 0) ::close(fd_);
  }
  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;

  void append(std::string line) {
    line += '\n';
    const char* p = line.data();
    std::size_t left = line.size();
    while (left > 0) {
      const ssize_t n = ::write(fd_, p, left);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(std::string("journal write failed: ") + std::strerror(errno));
      }
      p += n;
      left -= static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) throw Error(std::string("journal fsync failed: ") + std::strerror(errno));
  }

 private:
  int fd_ = -1;
};

constexpr std::string_view kJournalSuffix = ".journal.jsonl";

}  // namespace

std::pair<AnnotationBatch, AnnotationBatch> sample_batches(std::span<const std::string> dataset_ids,
                                                           const SampleRequest& request) {
  const std::size_t n = request.n_per_annotator;
  const std::size_t overlap = request.overlap;
  if (n == 0) throw ValidationError("n_per_annotator must be positive");
  if (overlap > n) {
    throw ValidationError("overlap " + std::to_string(overlap) + " exceeds n_per_annotator " +
                          std::to_string(n));
  }
  const std::size_t needed = 2 * n - overlap;
  if (dataset_ids.size() < needed) {
    throw ValidationError("dataset too small: " + std::to_string(dataset_ids.size()) +
                          " instances, sampling needs " + std::to_string(needed));
  }
  const auto& [first, second] = request.annotators;
  if (first.empty() || second.empty() || first == second) {
    throw ValidationError("two distinct, non-empty annotator names are required");
  }
  if (std::set<std::string>(dataset_ids.begin(), dataset_ids.end()).size() != dataset_ids.size()) {
    throw ValidationError("dataset ids are not unique");
  }

  SplitMix64 rng(request.seed);
  std::vector<std::string> ids(dataset_ids.begin(), dataset_ids.end());
  shuffle(std::span<std::string>(ids), rng);

  std::vector<std::string> shared(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(overlap));
  auto make = [&](const std::string& annotator, std::size_t from, SplitMix64 stream) {
    AnnotationBatch b;
    b.dataset = request.dataset;
    b.variant = request.variant;
    b.annotator = annotator;
    b.seed = request.seed;
    b.created_at = request.created_at;
    b.overlap_ids = shared;
    b.instance_ids = shared;
    b.instance_ids.insert(b.instance_ids.end(), ids.begin() + static_cast<std::ptrdiff_t>(from),
                          ids.begin() + static_cast<std::ptrdiff_t>(from + n - overlap));
    shuffle(std::span<std::string>(b.instance_ids), stream);
    b.token = hex64(stream.next());
    b.batch_id = sanitize(request.dataset + "-" + std::string(to_string(request.variant)) + "-s" +
                          std::to_string(request.seed) + "-" + annotator);
    return b;
  };
  SplitMix64 stream_a = rng.split();
  SplitMix64 stream_b = rng.split();
  AnnotationBatch a = make(first, overlap, stream_a);
  AnnotationBatch b = make(second, overlap + (n - overlap), stream_b);
  if (a.batch_id == b.batch_id) b.batch_id += "-2";
  a.sibling_id = b.batch_id;
  b.sibling_id = a.batch_id;
  return {std::move(a), std::move(b)};
}

bool Judgment::same_payload(const Judgment& other) const {
  return batch_id == other.batch_id && instance_id == other.instance_id &&
         annotator == other.annotator && prediction.text() == other.prediction.text() &&
         guessed_surface == other.guessed_surface && elapsed_ms == other.elapsed_ms;
}

OrderedJson to_json(const AnnotationBatch& b) {
  OrderedJson j;
  j["batch_id"] = b.batch_id;
  j["dataset"] = b.dataset;
  j["variant"] = std::string(to_string(b.variant));
  j["annotator"] = b.annotator;
  j["instance_ids"] = b.instance_ids;
  j["overlap_ids"] = b.overlap_ids;
  j["sibling_id"] = b.sibling_id;
  j["created_at"] = b.created_at;
  j["seed"] = b.seed;
  j["token"] = b.token;
  return j;
}

AnnotationBatch batch_from_json(const Json& j) {
  AnnotationBatch b;
  b.batch_id = json::string_field(j, "batch_id");
  b.dataset = json::string_field(j, "dataset");
  b.variant = parse_variant(json::string_field(j, "variant"));
  b.annotator = json::string_field(j, "annotator");
  b.instance_ids = json::field(j, "instance_ids").get<std::vector<std::string>>();
  b.overlap_ids = json::field(j, "overlap_ids").get<std::vector<std::string>>();
  if (j.contains("sibling_id")) b.sibling_id = json::string_field(j, "sibling_id");
  if (j.contains("created_at")) b.created_at = json::string_field(j, "created_at");
  b.seed = json::field(j, "seed").get<std::uint64_t>();
  b.token = json::string_field(j, "token");
  return b;
}

OrderedJson to_json(const Judgment& jd) {
  OrderedJson j;
  j["batch_id"] = jd.batch_id;
  j["instance_id"] = jd.instance_id;
  j["annotator"] = jd.annotator;
  j["prediction"] = jd.prediction.text();
  if (jd.guessed_surface) j["guessed_surface"] = *jd.guessed_surface;
  if (jd.elapsed_ms) j["elapsed_ms"] = *jd.elapsed_ms;
  j["submitted_at"] = jd.submitted_at;
  return j;
}

Judgment judgment_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("judgment must be a JSON object");
  Judgment jd;
  jd.batch_id = json::string_field(j, "batch_id");
  jd.instance_id = json::string_field(j, "instance_id");
  jd.annotator = json::string_field(j, "annotator");
  const std::string prediction = json::string_field(j, "prediction");
  if (prediction.empty()) throw ValidationError("empty prediction");
  jd.prediction = Label::parse(prediction);
  if (auto it = j.find("guessed_surface"); it != j.end() && !it->is_null()) {
    jd.guessed_surface = json::string_field(j, "guessed_surface");
  }
  if (auto it = j.find("elapsed_ms"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw ValidationError("field \"elapsed_ms\" must be an integer");
    jd.elapsed_ms = it->get<std::int64_t>();
  }
  if (auto it = j.find("submitted_at"); it != j.end() && !it->is_null()) {
    jd.submitted_at = json::string_field(j, "submitted_at");
  }
  return jd;
}

OrderedJson to_json(const TaskPayload& p) {
  OrderedJson j;
  j["batch_id"] = p.batch_id;
  j["instance_id"] = p.instance_id;
  j["variant"] = std::string(to_string(p.variant));
  j["task_kind"] = std::string(to_string(p.task_kind));
  j["position"] = p.position;
  j["total"] = p.total;
  OrderedJson segments = OrderedJson::array();
  for (const auto& s : p.segments) {
    OrderedJson seg;
    seg["text"] = s.text;
    seg["start"] = s.start;
    seg["end"] = s.end;
    segments.push_back(std::move(seg));
  }
  j["segments"] = std::move(segments);
  j["label_space"] = p.label_space;
  j["candidates"] = p.candidates;
  j["search_results"] = p.search_results;
  j["accepts_guess"] = p.accepts_guess;
  return j;
}

struct AnnotationStore::Dataset {
  std::map<std::string, Instance> by_id;
  std::vector<std::string> order;
  std::vector<std::string> inventory;  // sorted retrieval entity ids
};

struct AnnotationStore::BatchState {
  AnnotationBatch batch;
  std::set<std::string> members;
  std::map<std::string, Judgment> judgments;
  std::unique_ptr<Journal> journal;
  mutable std::shared_mutex mu;
};

AnnotationStore::AnnotationStore(Options options) : options_(std::move(options)) {
  perturb::validate(options_.mask);
  if (options_.journal_dir.empty()) throw ValidationError("annotation store needs a journal directory");
  std::filesystem::create_directories(options_.journal_dir);
}

AnnotationStore::~AnnotationStore() = default;

void AnnotationStore::add_dataset(const std::string& name, std::vector<Instance> instances) {
  auto ds = std::make_unique<Dataset>();
  for (auto& inst : instances) {
    validate(inst);
    ds->order.push_back(inst.id);
    const std::string id = inst.id;
    if (!ds->by_id.emplace(id, std::move(inst)).second) {
      throw ValidationError("dataset " + name + " repeats id " + id);
    }
  }
  std::set<std::string> inventory;
  for (const auto& [id, inst] : ds->by_id) {
    if (inst.task_kind == TaskKind::retrieval) inventory.insert(inst.gold.text());
  }
  ds->inventory.assign(inventory.begin(), inventory.end());
  std::unique_lock lock(mu_);
  datasets_[name] = std::move(ds);
}

std::vector<std::string> AnnotationStore::dataset_names() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> names;
  for (const auto& [name, ds] : datasets_) names.push_back(name);
  return names;
}

const AnnotationStore::Dataset& AnnotationStore::dataset(const std::string& name) const {
  auto it = datasets_.find(name);
  if (it == datasets_.end()) throw NotFound("unknown dataset " + name);
  return *it->second;
}

AnnotationStore::BatchState& AnnotationStore::state(const std::string& batch_id) const {
  std::shared_lock lock(mu_);
  auto it = batches_.find(batch_id);
  if (it == batches_.end()) throw NotFound("unknown batch " + batch_id);
  return *it->second;
}

void AnnotationStore::install_batch(const AnnotationBatch& batch, bool write_header) {
  const Dataset& ds = [&]() -> const Dataset& {
    std::shared_lock lock(mu_);
    return dataset(batch.dataset);
  }();
  for (const auto& id : batch.instance_ids) {
    if (!ds.by_id.contains(id)) {
      throw ValidationError("batch " + batch.batch_id + " references unknown instance " + id);
    }
  }
  if (batch.variant == VariantKind::guessed_word) {
    throw ValidationError("guessed_word batches are not supported; annotate context or full");
  }
  auto st = std::make_unique<BatchState>();
  st->batch = batch;
  st->members.insert(batch.instance_ids.begin(), batch.instance_ids.end());
  const auto path = options_.journal_dir / (batch.batch_id + std::string(kJournalSuffix));

  std::unique_lock lock(mu_);
  if (batches_.contains(batch.batch_id)) throw Conflict("batch " + batch.batch_id + " already exists");
  if (write_header && std::filesystem::exists(path)) {
    throw Conflict("journal for batch " + batch.batch_id + " already exists");
  }
  st->journal = std::make_unique<Journal>(path);
  if (write_header) {
    OrderedJson header = to_json(batch);
    header["type"] = "batch";
    st->journal->append(header.dump());
  }
  batches_.emplace(batch.batch_id, std::move(st));
}

void AnnotationStore::open() {
  std::vector<std::filesystem::path> journals;
  for (const auto& entry : std::filesystem::directory_iterator(options_.journal_dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.ends_with(kJournalSuffix)) journals.push_back(entry.path());
  }
  std::sort(journals.begin(), journals.end());

  for (const auto& path : journals) {
    const std::string content = ingest::read_file(path);
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < content.size()) {
      const std::size_t nl = content.find('\n', pos);
      if (nl == std::string::npos) break;  // unterminated tail: never acknowledged
      lines.push_back(content.substr(pos, nl - pos));
      pos = nl + 1;
    }
    if (lines.empty()) continue;
    try {
      const Json header = Json::parse(lines.front());
      if (json::string_field(header, "type") != "batch") {
        throw ValidationError("first journal line is not a batch header");
      }
      const AnnotationBatch batch = batch_from_json(header);
      install_batch(batch, false);
      BatchState& st = state(batch.batch_id);
      for (std::size_t i = 1; i < lines.size(); ++i) {
        const Json j = Json::parse(lines[i]);
        Judgment jd = judgment_from_json(j);
        st.judgments.insert_or_assign(jd.instance_id, std::move(jd));
      }
    } catch (const Json::exception& e) {
      throw ValidationError(std::vector<Diagnostic>{{path.string(), 0, e.what()}});
    }
  }
}

std::pair<AnnotationBatch, AnnotationBatch> AnnotationStore::create_batches(const SampleRequest& request) {
  std::vector<std::string> ids;
  {
    std::shared_lock lock(mu_);
    ids = dataset(request.dataset).order;
  }
  SampleRequest req = request;
  if (req.created_at.empty()) req.created_at = now_utc();
  auto batches = sample_batches(ids, req);
  add_batch(batches.first);
  add_batch(batches.second);
  return batches;
}

void AnnotationStore::add_batch(const AnnotationBatch& batch) { install_batch(batch, true); }

std::optional<AnnotationBatch> AnnotationStore::find_batch(const std::string& batch_id) const {
  std::shared_lock lock(mu_);
  auto it = batches_.find(batch_id);
  if (it == batches_.end()) return std::nullopt;
  return it->second->batch;
}

std::vector<std::string> AnnotationStore::batch_ids() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> ids;
  for (const auto& [id, st] : batches_) ids.push_back(id);
  return ids;
}

bool AnnotationStore::check_token(const std::string& batch_id, const std::string& token) const {
  const BatchState& st = state(batch_id);
  return !token.empty() && st.batch.token == token;
}

std::optional<TaskPayload> AnnotationStore::serve_next(const std::string& batch_id,
                                                       const std::string& annotator,
                                                       const std::string& search) const {
  const BatchState& st = state(batch_id);
  std::shared_lock lock(st.mu);
  if (annotator != st.batch.annotator) {
    throw ValidationError("annotator " + annotator + " does not own batch " + batch_id);
  }
  const Dataset* ds = nullptr;
  {
    std::shared_lock store_lock(mu_);
    ds = &dataset(st.batch.dataset);
  }

  const auto& ids = st.batch.instance_ids;
  for (std::size_t pos = 0; pos < ids.size(); ++pos) {
    if (st.judgments.contains(ids[pos])) continue;
    const Instance& inst = ds->by_id.at(ids[pos]);
    const perturb::PerturbedInstance view = perturb::make_variant(inst, st.batch.variant, options_.mask);

    TaskPayload p;
    p.batch_id = batch_id;
    p.instance_id = inst.id;
    p.variant = st.batch.variant;
    p.task_kind = inst.task_kind;
    p.position = pos;
    p.total = ids.size();
    for (const auto& seg : view.instance.segments) {
      p.segments.push_back({seg.text, seg.target.start, seg.target.end});
    }
    p.accepts_guess = st.batch.variant == VariantKind::context;
    switch (inst.task_kind) {
      case TaskKind::pair_classification:
        p.label_space = {"T", "F"};
        break;
      case TaskKind::disambiguation:
        p.candidates = *inst.candidates;
        break;
      case TaskKind::retrieval: {
        // Gold plus k-1 inventory entries drawn deterministically per item.
        std::set<std::string> shortlist{inst.gold.text()};
        SplitMix64 rng(st.batch.seed ^ fnv1a(inst.id));
        const std::size_t k = std::min(options_.shortlist_k, ds->inventory.size());
        while (shortlist.size() < k) {
          shortlist.insert(ds->inventory[static_cast<std::size_t>(rng.below(ds->inventory.size()))]);
        }
        p.candidates.assign(shortlist.begin(), shortlist.end());
        if (!search.empty()) {
          const std::string needle = text::case_fold(search);
          for (const auto& entity : ds->inventory) {
            if (text::case_fold(entity).find(needle) != std::string::npos) {
              p.search_results.push_back(entity);
              if (p.search_results.size() >= options_.shortlist_k) break;
            }
          }
        }
        break;
      }
    }
    return p;
  }
  return std::nullopt;
}

RecordOutcome AnnotationStore::record_judgment(Judgment judgment) {
  BatchState& st = state(judgment.batch_id);
  const Dataset* ds = nullptr;
  {
    std::shared_lock store_lock(mu_);
    ds = &dataset(st.batch.dataset);
  }
  if (judgment.annotator != st.batch.annotator) {
    throw ValidationError("annotator " + judgment.annotator + " does not own batch " + judgment.batch_id);
  }
  if (!st.members.contains(judgment.instance_id)) {
    throw NotFound("instance " + judgment.instance_id + " is not in batch " + judgment.batch_id);
  }
  if (judgment.guessed_surface && st.batch.variant != VariantKind::context) {
    throw ValidationError("guesses are only accepted on context batches");
  }

  const Instance& inst = ds->by_id.at(judgment.instance_id);
  const std::string& p = judgment.prediction.text();
  switch (inst.task_kind) {
    case TaskKind::pair_classification:
      if (!judgment.prediction.is_binary()) throw ValidationError("prediction must be T or F");
      break;
    case TaskKind::disambiguation:
      if (std::find(inst.candidates->begin(), inst.candidates->end(), p) == inst.candidates->end()) {
        throw ValidationError("prediction \"" + p + "\" is not a candidate of " + inst.id);
      }
      judgment.prediction = Label::candidate(p);
      break;
    case TaskKind::retrieval:
      if (!std::binary_search(ds->inventory.begin(), ds->inventory.end(), p)) {
        throw ValidationError("prediction \"" + p + "\" is not an inventory id");
      }
      judgment.prediction = Label::candidate(p);
      break;
  }

  std::unique_lock lock(st.mu);
  if (auto it = st.judgments.find(judgment.instance_id); it != st.judgments.end()) {
    if (it->second.same_payload(judgment)) return RecordOutcome::duplicate;
    throw Conflict("instance " + judgment.instance_id + " already judged differently in batch " +
                   judgment.batch_id);
  }
  if (judgment.submitted_at.empty()) judgment.submitted_at = now_utc();
  OrderedJson line = to_json(judgment);
  line["type"] = "judgment";
  st.journal->append(line.dump());
  st.judgments.emplace(judgment.instance_id, std::move(judgment));
  return RecordOutcome::stored;
}

Progress AnnotationStore::progress(const std::string& batch_id) const {
  const BatchState& st = state(batch_id);
  std::shared_lock lock(st.mu);
  return {st.judgments.size(), st.batch.instance_ids.size()};
}

std::vector<Judgment> AnnotationStore::judgments(const std::string& batch_id) const {
  const BatchState& st = state(batch_id);
  std::shared_lock lock(st.mu);
  std::vector<Judgment> out;
  for (const auto& id : st.batch.instance_ids) {
    if (auto it = st.judgments.find(id); it != st.judgments.end()) out.push_back(it->second);
  }
  return out;
}

std::vector<PredictionRecord> AnnotationStore::export_judgments(std::span<const std::string> batch_ids) const {
  std::vector<PredictionRecord> out;
  for (const auto& batch_id : batch_ids) {
    const BatchState& st = state(batch_id);
    std::shared_lock lock(st.mu);
    const std::set<std::string> overlap(st.batch.overlap_ids.begin(), st.batch.overlap_ids.end());
    for (const auto& id : st.batch.instance_ids) {
      auto it = st.judgments.find(id);
      if (it == st.judgments.end()) continue;
      const Judgment& jd = it->second;
      PredictionRecord r;
      r.instance_id = id;
      r.system = "human";
      r.variant = st.batch.variant;
      r.seed = static_cast<std::int64_t>(st.batch.seed);
      r.prediction = jd.prediction;
      r.annotator = jd.annotator;
      if (st.batch.variant == VariantKind::context) r.guessed_surface = jd.guessed_surface;
      r.overlap = overlap.contains(id);
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace lexbias::humankit
