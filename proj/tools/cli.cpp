#include "cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "lexbias/error.hpp"
#include "lexbias/humankit.hpp"
#include "lexbias/ingest.hpp"
#include "lexbias/json.hpp"
#include "lexbias/metrics.hpp"
#include "lexbias/perturb.hpp"
#include "lexbias/report.hpp"
#include "lexbias/service.hpp"
#include "lexbias/synth.hpp"
#include "lexbias/text.hpp"
#include "lexbias/version.hpp"

namespace lexbias::cli {
namespace {

namespace fs = std::filesystem;
using json::Json;
using json::OrderedJson;

constexpr int kScoreFileVersion = 1;

// Score summaries of every system on one dataset, as written by `score`.
struct ScoreFile {
  std::string dataset;
  TaskKind task_kind = TaskKind::pair_classification;
  std::vector<ScoreSummary> summaries;
};

OrderedJson to_json(const ScoreFile& f) {
  OrderedJson j;
  j["schema_version"] = kScoreFileVersion;
  j["dataset"] = f.dataset;
  j["task_kind"] = std::string(to_string(f.task_kind));
  OrderedJson summaries = OrderedJson::array();
  for (const auto& s : f.summaries) summaries.push_back(json::to_json(s));
  j["summaries"] = std::move(summaries);
  return j;
}

ScoreFile read_score_file(const fs::path& path) {
  try {
    const Json j = Json::parse(ingest::read_file(path));
    if (json::field(j, "schema_version").get<int>() != kScoreFileVersion) {
      throw ValidationError("unsupported score file schema_version");
    }
    ScoreFile f;
    f.dataset = json::string_field(j, "dataset");
    f.task_kind = parse_task_kind(json::string_field(j, "task_kind"));
    for (const Json& s : json::field(j, "summaries")) f.summaries.push_back(json::score_summary_from_json(s));
    return f;
  } catch (const Json::exception& e) {
    throw ValidationError(std::vector<Diagnostic>{{path.string(), 0, e.what()}});
  } catch (const ValidationError& e) {
    if (!e.diagnostics().empty() && !e.diagnostics().front().source.empty()) throw;
    throw ValidationError(std::vector<Diagnostic>{{path.string(), 0, e.what()}});
  }
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string workspace;
  bool as_json = false;

  fs::path resolve(const std::string& p) const {
    fs::path path(p);
    if (path.is_absolute() || workspace.empty()) return path;
    return fs::path(workspace) / path;
  }

  fs::path existing(const std::string& p) const {
    fs::path path = resolve(p);
    if (!fs::exists(path)) throw ValidationError(std::vector<Diagnostic>{{path.string(), 0, "no such file"}});
    return path;
  }
};

std::string opt_num(const std::optional<double>& v) {
  if (!v) return "-";
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << *v;
  return os.str();
}

std::string fixed(double v) { return opt_num(v); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

bool same_word_pairs(const std::vector<Instance>& dataset) {
  for (const auto& inst : dataset) {
    if (inst.task_kind != TaskKind::pair_classification) return false;
    if (inst.word_key.find(text::kKeySeparator) != std::string::npos) return false;
  }
  return true;
}

enum class Scope { gold, predictions };

// Scores every (system, variant) in `records`; each (seed, annotator) group
// is one run.
std::vector<ScoreSummary> score_records(const std::vector<PredictionRecord>& records,
                                        const std::vector<Instance>& dataset, Scope scope) {
  const GoldMap gold = gold_map(dataset);
  const Metric metric = dataset.empty() ? Metric::accuracy : metric_for(dataset.front().task_kind);
  struct Acc {
    std::vector<ScoreRun> runs;
    std::size_t n_instances = 0;
    std::size_t n_missing = 0;
  };
  std::map<std::pair<std::string, VariantKind>, Acc> acc;
  for (const auto& set : group_predictions(records)) {
    const GoldMap universe = scope == Scope::gold ? gold : restrict_to_predictions(gold, set);
    const AccuracyResult r = accuracy(set, universe);
    Acc& a = acc[{set.system, set.variant}];
    a.runs.push_back({set.seed, set.annotator, r.accuracy});
    a.n_instances = std::max(a.n_instances, r.n_total);
    a.n_missing += r.n_missing;
  }
  std::vector<ScoreSummary> out;
  for (auto& [key, a] : acc) {
    out.push_back(make_summary(key.first, key.second, metric, std::move(a.runs), a.n_instances, a.n_missing));
  }
  return out;
}

// Adds convention-based word/label summaries for `system` where none were
// measured.
void add_conventions(std::vector<ScoreSummary>& summaries, const std::string& system,
                     const std::vector<Instance>& dataset) {
  if (dataset.empty()) return;
  const TaskKind kind = dataset.front().task_kind;
  const bool same = same_word_pairs(dataset);
  bool has_system = false;
  std::set<VariantKind> present;
  for (const auto& s : summaries) {
    if (s.system != system) continue;
    has_system = true;
    present.insert(s.variant);
  }
  if (!has_system) return;
  for (VariantKind v : {VariantKind::word, VariantKind::label}) {
    if (present.contains(v)) continue;
    if (auto value = human_convention_baseline(kind, v, same)) {
      summaries.push_back(make_summary(system, v, metric_for(kind), {ScoreRun{std::nullopt, std::nullopt, *value}},
                                       dataset.size()));
    }
  }
}

std::map<std::string, std::map<VariantKind, ScoreSummary>> by_system(const std::vector<ScoreSummary>& summaries) {
  std::map<std::string, std::map<VariantKind, ScoreSummary>> out;
  for (const auto& s : summaries) out[s.system].insert_or_assign(s.variant, s);
  return out;
}

void print_scores(const Context& ctx, const ScoreFile& f) {
  if (ctx.as_json) {
    ctx.out << to_json(f).dump(2) << "\n";
    return;
  }
  ctx.out << "dataset\tsystem\tvariant\tmetric\truns\tmean\tstd\tn_instances\tn_missing\n";
  for (const auto& s : f.summaries) {
    ctx.out << f.dataset << '\t' << s.system << '\t' << to_string(s.variant) << '\t' << to_string(s.metric)
            << '\t' << s.runs.size() << '\t' << fixed(s.mean) << '\t' << fixed(s.std) << '\t' << s.n_instances
            << '\t' << s.n_missing << '\n';
  }
}

void print_bias(const Context& ctx, const std::vector<BiasReport>& reports) {
  if (ctx.as_json) {
    OrderedJson arr = OrderedJson::array();
    for (const auto& r : reports) arr.push_back(json::to_json(r));
    ctx.out << arr.dump(2) << "\n";
    return;
  }
  ctx.out << "dataset\tsystem\tfull\tcontext\tword\tlabel\tbias_c\tbias_w\tmin_gap\tflags\n";
  for (const auto& r : reports) {
    auto score = [&](VariantKind v) {
      auto it = r.scores.find(v);
      return it == r.scores.end() ? std::optional<double>() : std::optional<double>(it->second);
    };
    std::string flags;
    for (BiasFlag f : r.flags) flags += (flags.empty() ? "" : ",") + std::string(to_string(f));
    ctx.out << r.dataset << '\t' << r.system << '\t' << opt_num(score(VariantKind::full)) << '\t'
            << opt_num(score(VariantKind::context)) << '\t' << opt_num(score(VariantKind::word)) << '\t'
            << opt_num(score(VariantKind::label)) << '\t' << opt_num(r.bias_c) << '\t' << opt_num(r.bias_w) << '\t'
            << opt_num(r.min_gap) << '\t' << (flags.empty() ? "-" : flags) << '\n';
  }
}

std::vector<BiasReport> bias_reports_from(const ScoreFile& f, bool lenient, std::ostream& err) {
  std::vector<BiasReport> reports;
  for (const auto& [system, summaries] : by_system(f.summaries)) {
    if (!summaries.contains(VariantKind::full) || !summaries.contains(VariantKind::label) ||
        (!summaries.contains(VariantKind::context) && !summaries.contains(VariantKind::word))) {
      err << "note: " << f.dataset << "/" << system << " lacks the variants needed for bias; skipped\n";
      continue;
    }
    std::map<VariantKind, ScoreSummary> needed;
    for (VariantKind v : {VariantKind::full, VariantKind::context, VariantKind::word, VariantKind::label}) {
      if (summaries.contains(v)) needed.emplace(v, summaries.at(v));
    }
    reports.push_back(build_bias_report(f.dataset, needed, BiasOptions{!lenient}));
  }
  return reports;
}

// --- subcommands ---------------------------------------------------------

struct ConvertArgs {
  std::string format = "canonical_jsonl";
  std::string input, gold, output, id_prefix = "wic", name, split = "test", manifest;
  std::vector<std::string> languages;
};

int cmd_convert(const Context& ctx, const ConvertArgs& a) {
  const auto format = ingest::parse_source_format(a.format);
  std::optional<fs::path> gold;
  if (!a.gold.empty()) gold = ctx.existing(a.gold);
  std::vector<Diagnostic> warnings;
  const auto instances = ingest::parse_dataset(format, ctx.existing(a.input), gold, a.id_prefix, &warnings);
  for (const auto& w : warnings) ctx.err << "warning: " << w.str() << '\n';
  ingest::write_canonical(instances, ctx.resolve(a.output));
  if (!a.manifest.empty()) {
    const std::string name = a.name.empty() ? fs::path(a.output).stem().string() : a.name;
    ingest::write_manifest(ingest::make_manifest(name, ingest::parse_split(a.split), format, a.languages, instances),
                           ctx.resolve(a.manifest));
  }
  ctx.out << "converted\t" << instances.size() << '\n';
  return kOk;
}

struct PerturbArgs {
  std::string input, output, variant = "context", mask_token = "[MASK]", markers = "[,]", guesses;
  bool label_single_mask = false;
  bool mark_targets = false;
};

perturb::MaskConfig mask_config(const std::string& mask_token, const std::string& markers, bool single) {
  perturb::MaskConfig cfg;
  cfg.mask_token = mask_token;
  const auto parts = split(markers, ',');
  if (parts.size() != 2) throw ValidationError("--markers takes OPEN,CLOSE");
  cfg.marker_open = parts[0];
  cfg.marker_close = parts[1];
  cfg.label_single_mask = single;
  perturb::validate(cfg);
  return cfg;
}

int cmd_perturb(const Context& ctx, const PerturbArgs& a) {
  const auto cfg = mask_config(a.mask_token, a.markers, a.label_single_mask);
  const auto instances = ingest::parse_canonical(ctx.existing(a.input));
  const auto out_path = ctx.resolve(a.output);

  if (a.mark_targets) {
    std::string content;
    for (const auto& inst : instances) {
      OrderedJson j;
      j["id"] = inst.id;
      j["texts"] = perturb::mark_targets(inst, cfg);
      content += j.dump() + "\n";
    }
    ingest::write_file(out_path, content);
    ctx.out << "marked\t" << instances.size() << '\n';
    return kOk;
  }

  const VariantKind variant = parse_variant(a.variant);
  std::vector<perturb::PerturbedInstance> variants;
  if (variant == VariantKind::guessed_word) {
    if (a.guesses.empty()) throw ValidationError("guessed_word needs --guesses (prediction JSONL with guessed_surface)");
    std::map<std::string, std::string> guesses;
    for (const auto& r : ingest::parse_predictions(ctx.existing(a.guesses))) {
      if (r.guessed_surface && !r.guessed_surface->empty()) guesses.emplace(r.instance_id, *r.guessed_surface);
    }
    for (const auto& inst : instances) {
      auto it = guesses.find(inst.id);
      if (it == guesses.end()) continue;
      // "a|b" gives one surface per segment; a single surface is reused.
      std::vector<std::string> replacements = split(it->second, '|');
      if (replacements.size() == 1) replacements.assign(inst.segments.size(), replacements.front());
      variants.push_back(perturb::substitute_target(inst, replacements));
    }
  } else {
    variants = perturb::make_variants(instances, variant, cfg);
  }
  perturb::write_perturbed(variants, out_path);
  ctx.out << "perturbed\t" << to_string(variant) << '\t' << variants.size() << '\n';
  return kOk;
}

struct ScoreArgs {
  std::vector<std::string> predictions;
  std::string gold, dataset, scope = "gold", output, convention_system = "human";
  bool conventions = false;
};

Scope parse_scope(const std::string& s) {
  if (s == "gold") return Scope::gold;
  if (s == "predictions") return Scope::predictions;
  throw ValidationError("unknown scope \"" + s + "\" (gold|predictions)");
}

std::vector<PredictionRecord> load_predictions(const Context& ctx, const std::vector<std::string>& files,
                                               const std::vector<Instance>& dataset) {
  std::vector<PredictionRecord> records;
  for (const auto& file : files) {
    const fs::path path = ctx.existing(file);
    auto part = ingest::parse_predictions(path);
    ingest::validate_predictions(part, dataset, path.string());
    records.insert(records.end(), part.begin(), part.end());
  }
  return records;
}

int cmd_score(const Context& ctx, const ScoreArgs& a) {
  const fs::path gold_path = ctx.existing(a.gold);
  const auto dataset = ingest::parse_canonical(gold_path);
  if (dataset.empty()) throw ValidationError("gold dataset is empty");
  const auto records = load_predictions(ctx, a.predictions, dataset);

  ScoreFile f;
  f.dataset = a.dataset.empty() ? gold_path.stem().string() : a.dataset;
  f.task_kind = dataset.front().task_kind;
  f.summaries = score_records(records, dataset, parse_scope(a.scope));
  if (a.conventions) add_conventions(f.summaries, a.convention_system, dataset);
  std::stable_sort(f.summaries.begin(), f.summaries.end(), [](const ScoreSummary& x, const ScoreSummary& y) {
    return std::tie(x.system, x.variant) < std::tie(y.system, y.variant);
  });
  if (!a.output.empty()) ingest::write_file(ctx.resolve(a.output), to_json(f).dump(2) + "\n");
  print_scores(ctx, f);
  return kOk;
}

struct BiasArgs {
  std::vector<std::string> scores;
  std::string full, context, word, label, gold, train, dataset, scope = "gold", output;
  std::optional<double> label_value;
  bool label_analytic = false;
  bool lenient = false;
};

int cmd_bias(const Context& ctx, const BiasArgs& a) {
  std::vector<BiasReport> reports;
  if (!a.scores.empty()) {
    for (const auto& file : a.scores) {
      auto part = bias_reports_from(read_score_file(ctx.existing(file)), a.lenient, ctx.err);
      reports.insert(reports.end(), part.begin(), part.end());
    }
  } else {
    if (a.gold.empty() || a.full.empty()) throw ValidationError("bias needs --scores, or --gold and --full");
    const fs::path gold_path = ctx.existing(a.gold);
    const auto dataset = ingest::parse_canonical(gold_path);
    if (dataset.empty()) throw ValidationError("gold dataset is empty");
    std::vector<std::string> files;
    for (const auto* f : {&a.full, &a.context, &a.word, &a.label}) {
      if (!f->empty()) files.push_back(*f);
    }
    ScoreFile sf;
    sf.dataset = a.dataset.empty() ? gold_path.stem().string() : a.dataset;
    sf.task_kind = dataset.front().task_kind;
    sf.summaries = score_records(load_predictions(ctx, files, dataset), dataset, parse_scope(a.scope));

    std::optional<double> label = a.label_value;
    if (a.label_analytic) {
      if (a.train.empty()) throw ValidationError("--label-analytic needs --train");
      const auto train = ingest::parse_canonical(ctx.existing(a.train));
      label = perturb::analytic_label_baseline(train, dataset);
    }
    if (label) {
      // Measured label predictions take precedence.
      std::set<std::string> systems;
      std::set<std::string> with_label;
      for (const auto& s : sf.summaries) {
        systems.insert(s.system);
        if (s.variant == VariantKind::label) with_label.insert(s.system);
      }
      for (const auto& system : systems) {
        if (with_label.contains(system)) continue;
        sf.summaries.push_back(make_summary(system, VariantKind::label, metric_for(sf.task_kind),
                                            {ScoreRun{std::nullopt, std::nullopt, *label}}, dataset.size()));
      }
    }
    reports = bias_reports_from(sf, a.lenient, ctx.err);
  }
  if (reports.empty()) throw ValidationError("no system has full, label and a context or word score");
  if (!a.output.empty()) {
    OrderedJson arr = OrderedJson::array();
    for (const auto& r : reports) arr.push_back(json::to_json(r));
    ingest::write_file(ctx.resolve(a.output), arr.dump(2) + "\n");
  }
  print_bias(ctx, reports);
  return kOk;
}

struct EntropyArgs {
  std::string input, kind, dataset, output;
  std::size_t min_count = 2;
  bool per_word = false;
};

int cmd_entropy(const Context& ctx, const EntropyArgs& a) {
  const fs::path path = ctx.existing(a.input);
  const auto dataset = ingest::parse_canonical(path);
  if (dataset.empty()) throw ValidationError("empty dataset");
  EntropyKind kind = dataset.front().task_kind == TaskKind::pair_classification ? EntropyKind::label_entropy
                                                                                 : EntropyKind::sense_entropy;
  if (!a.kind.empty()) kind = parse_entropy_kind(a.kind == "label" ? "label_entropy" : a.kind == "sense" ? "sense_entropy" : a.kind);
  const EntropyReport r = kind == EntropyKind::label_entropy ? label_entropy(dataset, a.min_count) : sense_entropy(dataset);
  const std::string name = a.dataset.empty() ? path.stem().string() : a.dataset;

  OrderedJson j;
  j["dataset"] = name;
  j["report"] = json::to_json(r);
  if (!a.output.empty()) ingest::write_file(ctx.resolve(a.output), j.dump(2) + "\n");
  if (ctx.as_json) {
    ctx.out << j.dump(2) << "\n";
    return kOk;
  }
  ctx.out << "dataset\tkind\taverage_bits\ttoken_weighted_bits\tmajority_proportion\twords_included\twords_discarded\n";
  ctx.out << name << '\t' << to_string(r.kind) << '\t' << fixed(r.average) << '\t' << fixed(r.token_weighted_average)
          << '\t' << fixed(r.majority_proportion) << '\t' << r.n_words_included << '\t' << r.n_words_discarded << '\n';
  if (a.per_word) {
    ctx.out << "\nword\tcount\tentropy_bits\tmajority_proportion\tmajority_label\n";
    for (const auto& [word, w] : r.per_word) {
      ctx.out << word << '\t' << w.count << '\t' << fixed(w.entropy_bits) << '\t' << fixed(w.majority_proportion)
              << '\t' << w.majority_label << '\n';
    }
  }
  return kOk;
}

struct SampleArgs {
  std::string input, dataset, variant = "context", annotators = "a,b", store, output, created_at;
  std::size_t n = 100;
  std::size_t overlap = 50;
  std::uint64_t seed = 0;
};

int cmd_sample(const Context& ctx, const SampleArgs& a) {
  const fs::path path = ctx.existing(a.input);
  auto dataset = ingest::parse_canonical(path);
  const auto names = split(a.annotators, ',');
  if (names.size() != 2) throw ValidationError("--annotators takes exactly two names: A,B");

  humankit::SampleRequest req;
  req.dataset = a.dataset.empty() ? path.stem().string() : a.dataset;
  req.variant = parse_variant(a.variant);
  req.annotators = {names[0], names[1]};
  req.n_per_annotator = a.n;
  req.overlap = a.overlap;
  req.seed = a.seed;
  req.created_at = a.created_at;

  std::vector<std::string> ids;
  for (const auto& inst : dataset) ids.push_back(inst.id);
  const auto [first, second] = humankit::sample_batches(ids, req);

  if (!a.store.empty()) {
    humankit::AnnotationStore store({ctx.resolve(a.store), {}, 10});
    store.add_dataset(req.dataset, std::move(dataset));
    store.add_batch(first);
    store.add_batch(second);
  }
  OrderedJson j;
  j["batches"] = OrderedJson::array({humankit::to_json(first), humankit::to_json(second)});
  if (!a.output.empty()) ingest::write_file(ctx.resolve(a.output), j.dump(2) + "\n");
  if (ctx.as_json) {
    ctx.out << j.dump(2) << "\n";
  } else {
    ctx.out << "batch_id\tannotator\tn\toverlap\ttoken\n";
    for (const auto* b : {&first, &second}) {
      ctx.out << b->batch_id << '\t' << b->annotator << '\t' << b->instance_ids.size() << '\t'
              << b->overlap_ids.size() << '\t' << b->token << '\n';
    }
  }
  return kOk;
}

struct ServeArgs {
  std::string store, host = "127.0.0.1", mask_token = "[MASK]";
  std::vector<std::string> datasets;
  int port = 8080;
  std::size_t shortlist_k = 10;
};

humankit::AnnotationServer* g_server = nullptr;

extern "C" void handle_stop(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const Context& ctx, const ServeArgs& a) {
  perturb::MaskConfig mask;
  mask.mask_token = a.mask_token;
  humankit::AnnotationStore store({ctx.resolve(a.store), mask, a.shortlist_k});
  for (const auto& spec : a.datasets) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw ValidationError("--dataset takes NAME=PATH");
    store.add_dataset(spec.substr(0, eq), ingest::parse_canonical(ctx.existing(spec.substr(eq + 1))));
  }
  store.open();
  humankit::AnnotationServer server(store);
  const int port = server.bind(a.host, a.port);
  ctx.out << "listening\thttp://" << a.host << ":" << port << '\n' << std::flush;
  g_server = &server;
  std::signal(SIGINT, handle_stop);
  std::signal(SIGTERM, handle_stop);
  server.listen();
  g_server = nullptr;
  return kOk;
}

struct AgreeArgs {
  std::string predictions, a, b, ids = "overlap", variant;
};

int cmd_agree(const Context& ctx, const AgreeArgs& args) {
  std::vector<PredictionRecord> records;
  if (!args.predictions.empty()) {
    records = ingest::parse_predictions(ctx.existing(args.predictions));
  } else {
    if (args.a.empty() || args.b.empty()) throw ValidationError("agree needs --predictions or both --a and --b");
    records = ingest::parse_predictions(ctx.existing(args.a));
    auto more = ingest::parse_predictions(ctx.existing(args.b));
    records.insert(records.end(), more.begin(), more.end());
  }
  if (!args.variant.empty()) {
    const VariantKind v = parse_variant(args.variant);
    std::erase_if(records, [&](const PredictionRecord& r) { return r.variant != v; });
  }
  const bool overlap_only = args.ids == "overlap";
  if (!overlap_only && args.ids != "shared") throw ValidationError("--ids takes overlap or shared");

  std::map<VariantKind, std::vector<PredictionSet>> by_variant;
  for (auto& set : group_predictions(records)) by_variant[set.variant].push_back(std::move(set));
  std::map<VariantKind, std::set<std::string>> flagged;
  for (const auto& r : records) {
    if (r.overlap) flagged[r.variant].insert(r.instance_id);
  }

  if (!ctx.as_json) ctx.out << "variant\ta\tb\tn_ids\tagreement\n";
  OrderedJson rows = OrderedJson::array();
  for (const auto& [variant, sets] : by_variant) {
    if (sets.size() != 2) {
      throw ValidationError("variant " + std::string(to_string(variant)) + " has " + std::to_string(sets.size()) +
                            " prediction sets; agreement needs exactly two");
    }
    std::set<std::string> ids;
    if (overlap_only && flagged.contains(variant)) {
      ids = flagged.at(variant);
    } else {
      for (const auto& [id, label] : sets[0].predictions) {
        if (sets[1].predictions.contains(id)) ids.insert(id);
      }
    }
    const double value = agreement(sets[0], sets[1], ids);
    auto name = [](const PredictionSet& s) { return s.annotator.value_or(s.system); };
    if (ctx.as_json) {
      rows.push_back({{"variant", std::string(to_string(variant))}, {"a", name(sets[0])}, {"b", name(sets[1])},
                      {"n_ids", ids.size()}, {"agreement", value}});
    } else {
      ctx.out << to_string(variant) << '\t' << name(sets[0]) << '\t' << name(sets[1]) << '\t' << ids.size() << '\t'
              << report::format_half_up(value, 1) << '\n';
    }
  }
  if (ctx.as_json) ctx.out << rows.dump(2) << "\n";
  return kOk;
}

struct SynthArgs {
  std::size_t n_words = 100, examples_per_word = 20, senses = 2;
  std::string task = "pair_classification", output_dir;
  double p = 0.5, q = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> policies;
};

int cmd_synth(const Context& ctx, const SynthArgs& a) {
  synth::SynthSpec spec;
  spec.n_words = a.n_words;
  spec.examples_per_word = a.examples_per_word;
  spec.task_kind = parse_task_kind(a.task);
  spec.label_determinism = a.p;
  spec.context_informativeness = a.q;
  spec.seed = a.seed;
  spec.senses_per_word = a.senses;
  const auto data = synth::generate(spec);

  const fs::path dir = ctx.resolve(a.output_dir);
  ingest::write_canonical(data.train, dir / "train.jsonl");
  ingest::write_canonical(data.test, dir / "test.jsonl");

  std::vector<PredictionRecord> records;
  for (const auto& name : a.policies) {
    const synth::Policy policy = synth::parse_policy(name);
    for (VariantKind v : {VariantKind::full, VariantKind::context, VariantKind::word, VariantKind::label}) {
      const auto variants = perturb::make_variants(data.test, v);
      const auto sim = synth::simulate(policy, data.train, variants, a.seed);
      if (!sim.note.empty()) ctx.err << "note: " << sim.note << '\n';
      auto part = synth::to_records(sim.predictions);
      records.insert(records.end(), part.begin(), part.end());
    }
  }
  if (!a.policies.empty()) ingest::write_predictions(records, dir / "predictions.jsonl");
  ctx.out << "train\t" << data.train.size() << "\ntest\t" << data.test.size() << "\npredictions\t" << records.size()
          << '\n';
  return kOk;
}

struct ReportArgs {
  std::vector<std::string> scores, bias, entropy;
  std::string output_dir, generated_at;
  double shade = 0.8, line = 1.0;
  bool lenient = false;
};

int cmd_report(const Context& ctx, const ReportArgs& a) {
  report::ReportBundle bundle;
  bundle.metadata.toolkit_version = kVersion;
  bundle.metadata.generated_at = a.generated_at;
  auto digest = [&](const fs::path& p) { bundle.metadata.input_digests[p.filename().string()] = report::sha256_file(p); };

  for (const auto& file : a.scores) {
    const fs::path path = ctx.existing(file);
    digest(path);
    const ScoreFile f = read_score_file(path);
    for (const auto& [system, summaries] : by_system(f.summaries)) {
      bundle.score_tables.push_back({f.dataset, system, summaries});
    }
    if (a.bias.empty()) {
      auto reports = bias_reports_from(f, a.lenient, ctx.err);
      bundle.bias_reports.insert(bundle.bias_reports.end(), reports.begin(), reports.end());
    }
  }
  for (const auto& file : a.bias) {
    const fs::path path = ctx.existing(file);
    digest(path);
    const Json j = Json::parse(ingest::read_file(path));
    for (const Json& r : j.is_array() ? j : Json::array({j})) bundle.bias_reports.push_back(json::bias_report_from_json(r));
  }
  for (const auto& file : a.entropy) {
    const fs::path path = ctx.existing(file);
    digest(path);
    const Json j = Json::parse(ingest::read_file(path));
    bundle.entropy_reports.push_back({json::string_field(j, "dataset"), json::entropy_report_from_json(json::field(j, "report"))});
  }

  const fs::path dir = ctx.resolve(a.output_dir);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    ingest::write_file(dir / name, content);
    written.push_back(name);
  };
  if (std::any_of(bundle.bias_reports.begin(), bundle.bias_reports.end(),
                  [](const BiasReport& r) { return r.bias_c && r.bias_w; })) {
    emit("bias_scatter.svg", report::bias_scatter(bundle, {a.shade, a.line}));
  }
  if (!bundle.score_tables.empty()) emit("baselines.svg", report::baseline_bars(bundle.score_tables));
  std::vector<report::ScoreTable> complete;
  for (const auto& t : bundle.score_tables) {
    if (t.scores.contains(VariantKind::full) && t.scores.contains(VariantKind::context) &&
        t.scores.contains(VariantKind::word)) {
      complete.push_back(t);
    }
  }
  if (!complete.empty()) emit("gaps.svg", report::gap_chart(complete));
  report::write_summary(bundle, dir / "summary.json");
  written.emplace_back("summary.json");
  written.emplace_back("summary.md");
  for (const auto& name : written) ctx.out << "wrote\t" << (dir / name).string() << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lexbias: context and target-word bias analysis for lexical semantic datasets", "lexbias"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "Key-value (TOML/INI) file supplying option defaults; sections name subcommands");
  app.require_subcommand(1);

  std::string workspace;
  bool as_json = false;
  app.add_option("--workspace", workspace, "Base directory for relative paths")->envname("LEXBIAS_WORKSPACE");
  app.add_flag("--json", as_json, "Print JSON instead of tab-separated tables");

  ConvertArgs convert;
  auto* c = app.add_subcommand("convert", "Parse a source dataset into canonical JSONL");
  c->add_option("--format", convert.format, "canonical_jsonl | wic_tsv | pair_jsonl | retrieval_jsonl")->capture_default_str();
  c->add_option("--input", convert.input, "Dataset file")->required();
  c->add_option("--gold", convert.gold, "Gold file (wic_tsv)");
  c->add_option("--output", convert.output, "Canonical JSONL output")->required();
  c->add_option("--id-prefix", convert.id_prefix, "Id prefix for wic_tsv")->capture_default_str();
  c->add_option("--manifest", convert.manifest, "Also write a dataset manifest here");
  c->add_option("--name", convert.name, "Dataset name for the manifest");
  c->add_option("--split", convert.split, "train | dev | test")->capture_default_str();
  c->add_option("--language", convert.languages, "BCP-47 language tag (repeatable)");

  PerturbArgs pert;
  auto* p = app.add_subcommand("perturb", "Emit probing-baseline variants");
  p->add_option("--input", pert.input, "Canonical JSONL")->required();
  p->add_option("--output", pert.output, "Output JSONL")->required();
  p->add_option("--variant", pert.variant, "full | context | word | label | guessed_word")->capture_default_str();
  p->add_option("--mask-token", pert.mask_token)->capture_default_str();
  p->add_option("--markers", pert.markers, "OPEN,CLOSE target markers")->capture_default_str();
  p->add_flag("--label-single-mask", pert.label_single_mask, "Label variant: one mask per segment");
  p->add_option("--guesses", pert.guesses, "Predictions with guessed_surface (guessed_word)");
  p->add_flag("--mark-targets", pert.mark_targets, "Write marker-wrapped texts instead of a variant");

  ScoreArgs score;
  auto* s = app.add_subcommand("score", "Score prediction files against gold");
  s->add_option("--predictions", score.predictions, "Prediction JSONL (repeatable)")->required();
  s->add_option("--gold", score.gold, "Canonical dataset")->required();
  s->add_option("--dataset", score.dataset, "Dataset name (default: gold file stem)");
  s->add_option("--scope", score.scope, "gold: every gold id; predictions: ids each run covers")->capture_default_str();
  s->add_flag("--conventions", score.conventions, "Add assumed human word/label scores where unmeasured");
  s->add_option("--convention-system", score.convention_system)->capture_default_str();
  s->add_option("--output", score.output, "Write the score file here");

  BiasArgs bias;
  auto* b = app.add_subcommand("bias", "Context and target-word bias");
  b->add_option("--scores", bias.scores, "Score files from `score` (repeatable)");
  b->add_option("--full", bias.full, "Full-input predictions");
  b->add_option("--context", bias.context, "Context-variant predictions");
  b->add_option("--word", bias.word, "Word-variant predictions");
  b->add_option("--label", bias.label, "Label-variant predictions");
  b->add_option("--gold", bias.gold, "Canonical dataset");
  b->add_option("--dataset", bias.dataset, "Dataset name");
  b->add_option("--scope", bias.scope)->capture_default_str();
  b->add_option("--label-value", bias.label_value, "Label score (fraction) when not measured");
  b->add_flag("--label-analytic", bias.label_analytic, "Label score from the training majority label");
  b->add_option("--train", bias.train, "Training set for --label-analytic");
  b->add_flag("--lenient", bias.lenient, "Flag degenerate denominators instead of failing");
  b->add_option("--output", bias.output, "Write bias reports (JSON) here");

  EntropyArgs entropy;
  auto* e = app.add_subcommand("entropy", "Label or sense entropy per word");
  e->add_option("--input", entropy.input, "Canonical dataset")->required();
  e->add_option("--kind", entropy.kind, "label | sense (default from task kind)");
  e->add_option("--min-count", entropy.min_count, "Label entropy frequency filter")->capture_default_str();
  e->add_option("--dataset", entropy.dataset, "Dataset name");
  e->add_option("--output", entropy.output, "Write the entropy report (JSON) here");
  e->add_flag("--per-word", entropy.per_word, "Also print per-word rows");

  SampleArgs sample;
  auto* sa = app.add_subcommand("sample", "Sample two overlapping annotation batches");
  sa->add_option("--input", sample.input, "Canonical test set")->required();
  sa->add_option("--dataset", sample.dataset, "Dataset name (default: file stem)");
  sa->add_option("--variant", sample.variant)->capture_default_str();
  sa->add_option("--annotators", sample.annotators, "A,B")->capture_default_str();
  sa->add_option("--n", sample.n, "Items per annotator")->capture_default_str();
  sa->add_option("--overlap", sample.overlap, "Items both annotators see")->capture_default_str();
  sa->add_option("--seed", sample.seed)->required();
  sa->add_option("--store", sample.store, "Journal directory to register the batches in");
  sa->add_option("--output", sample.output, "Write the batches (JSON) here");
  sa->add_option("--created-at", sample.created_at, "Timestamp recorded on the batches");

  ServeArgs serve;
  auto* sv = app.add_subcommand("serve", "Run the annotation HTTP service");
  sv->add_option("--store", serve.store, "Journal directory")->required();
  sv->add_option("--dataset", serve.datasets, "NAME=PATH (repeatable)")->required();
  sv->add_option("--host", serve.host)->capture_default_str();
  sv->add_option("--port", serve.port)->capture_default_str();
  sv->add_option("--shortlist-k", serve.shortlist_k, "Retrieval candidate shortlist size")->capture_default_str();
  sv->add_option("--mask-token", serve.mask_token)->capture_default_str();

  AgreeArgs agree;
  auto* ag = app.add_subcommand("agree", "Percent agreement between two annotators");
  ag->add_option("--predictions", agree.predictions, "Export holding both annotators");
  ag->add_option("--a", agree.a, "First annotator's predictions");
  ag->add_option("--b", agree.b, "Second annotator's predictions");
  ag->add_option("--ids", agree.ids, "overlap (flagged ids) | shared (all common ids)")->capture_default_str();
  ag->add_option("--variant", agree.variant, "Restrict to one variant");

  SynthArgs syn;
  auto* sy = app.add_subcommand("synth", "Generate a synthetic dataset with planted bias");
  sy->add_option("--n-words", syn.n_words)->capture_default_str();
  sy->add_option("--examples-per-word", syn.examples_per_word)->capture_default_str();
  sy->add_option("--task", syn.task)->capture_default_str();
  sy->add_option("--p", syn.p, "Label determinism in [0.5, 1]")->capture_default_str();
  sy->add_option("--q", syn.q, "Context informativeness in [0, 1]")->capture_default_str();
  sy->add_option("--senses", syn.senses, "Senses per word (disambiguation/retrieval)")->capture_default_str();
  sy->add_option("--seed", syn.seed)->required();
  sy->add_option("--policy", syn.policies, "oracle | majority | word_lookup | context_lookup (repeatable)");
  sy->add_option("--output-dir", syn.output_dir)->required();

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Charts and summary");
  r->add_option("--scores", rep.scores, "Score files (repeatable)");
  r->add_option("--bias", rep.bias, "Bias report JSON (repeatable; default: computed from scores)");
  r->add_option("--entropy", rep.entropy, "Entropy report JSON (repeatable)");
  r->add_option("--output-dir", rep.output_dir)->required();
  r->add_option("--shade", rep.shade, "Shaded-region threshold")->capture_default_str();
  r->add_option("--line", rep.line, "Reference-line value")->capture_default_str();
  r->add_option("--generated-at", rep.generated_at, "Timestamp recorded in the summary");
  r->add_flag("--lenient", rep.lenient);

  std::vector<std::string> argv_storage{"lexbias"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& arg : argv_storage) argv.push_back(arg.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n\n" << app.help();
    return kUsage;
  }

  Context ctx{out, err, workspace, as_json};
  try {
    if (c->parsed()) return cmd_convert(ctx, convert);
    if (p->parsed()) return cmd_perturb(ctx, pert);
    if (s->parsed()) return cmd_score(ctx, score);
    if (b->parsed()) return cmd_bias(ctx, bias);
    if (e->parsed()) return cmd_entropy(ctx, entropy);
    if (sa->parsed()) return cmd_sample(ctx, sample);
    if (sv->parsed()) return cmd_serve(ctx, serve);
    if (ag->parsed()) return cmd_agree(ctx, agree);
    if (sy->parsed()) return cmd_synth(ctx, syn);
    if (r->parsed()) return cmd_report(ctx, rep);
  } catch (const ValidationError& ex) {
    for (const auto& d : ex.diagnostics()) err << "error: " << d.str() << '\n';
    return kValidation;
  } catch (const Json::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kValidation;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return kValidation;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kValidation;
  }
  err << app.help();
  return kUsage;
}

}  // namespace lexbias::cli
