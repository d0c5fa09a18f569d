#include "lexbias/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "lexbias/error.hpp"
#include "lexbias/metrics.hpp"
#include "lexbias/rng.hpp"
#include "lexbias/text.hpp"

namespace lexbias::synth {
namespace {

constexpr std::size_t kFillerVocabulary = 50;
constexpr std::string_view kCuePrefix = "<cue:";

std::string numbered(std::string_view prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, i);
  return std::string(prefix) + buf;
}

std::string word_surface(std::size_t i) { return numbered("w", i, 4); }

std::string sense_id(const std::string& word, std::size_t k) { return word + "#" + std::to_string(k); }

std::vector<Label> label_space(const SynthSpec& spec, const std::string& word) {
  if (spec.task_kind == TaskKind::pair_classification) return {Label::binary(true), Label::binary(false)};
  std::vector<Label> labels;
  for (std::size_t k = 0; k < spec.senses_per_word; ++k) {
    const std::string id = sense_id(word, k);
    labels.push_back(Label::candidate(spec.task_kind == TaskKind::retrieval ? "E:" + id : id));
  }
  return labels;
}

// Filler tokens around the target, plus the cue when planted.
Segment make_segment(const std::string& word, SplitMix64& rng, const std::optional<Label>& cue) {
  std::vector<std::string> before;
  std::vector<std::string> after;
  const std::size_t n_before = 1 + rng.below(3);
  const std::size_t n_after = 1 + rng.below(3);
  for (std::size_t i = 0; i < n_before; ++i) before.push_back(numbered("ctx", rng.below(kFillerVocabulary), 2));
  for (std::size_t i = 0; i < n_after; ++i) after.push_back(numbered("ctx", rng.below(kFillerVocabulary), 2));
  if (cue) after.push_back(cue_token(*cue));
  after.emplace_back(".");

  Segment seg;
  for (const auto& tok : before) seg.text += tok + " ";
  const std::size_t start = text::scalar_length(seg.text);
  seg.text += word;
  seg.target = {start, start + text::scalar_length(word)};
  seg.surface = word;
  for (const auto& tok : after) seg.text += " " + tok;
  return seg;
}

std::string majority_of(const std::map<std::string, std::size_t>& counts) {
  std::string best_label;
  std::size_t best = 0;
  for (const auto& [label, count] : counts) {
    if (count > best) {
      best = count;
      best_label = label;
    }
  }
  return best_label;
}

std::uint64_t mix(std::uint64_t seed, std::string_view id) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (char c : id) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool masked(const Segment& seg, const perturb::MaskConfig& cfg) {
  const auto tokens = text::whitespace_tokens(seg.surface);
  if (tokens.empty()) return true;
  const std::u32string surface = text::decode(seg.surface);
  const std::u32string mask = text::decode(cfg.mask_token);
  return std::all_of(tokens.begin(), tokens.end(), [&](const Span& t) {
    return std::u32string_view(surface).substr(t.start, t.length()) == mask;
  });
}

std::string lookup_key(const Instance& inst) {
  if (inst.segments.size() == 2) return text::pair_word_key(inst.segments[0].surface, inst.segments[1].surface);
  return text::normalize_word_key(inst.segments.front().surface);
}

std::optional<std::string> find_cue(const Instance& inst) {
  for (const auto& seg : inst.segments) {
    const std::u32string scalars = text::decode(seg.text);
    for (const Span& tok : text::whitespace_tokens(std::u32string_view(scalars))) {
      if (tok.start < seg.target.end && seg.target.start < tok.end) continue;
      const std::string t = text::encode(std::u32string_view(scalars).substr(tok.start, tok.length()));
      if (t.starts_with(kCuePrefix) && t.ends_with(">") && t.size() > kCuePrefix.size() + 1) {
        return t.substr(kCuePrefix.size(), t.size() - kCuePrefix.size() - 1);
      }
    }
  }
  return std::nullopt;
}

Label as_label(const Instance& inst, const std::string& text) {
  return inst.task_kind == TaskKind::pair_classification ? Label::parse(text) : Label::candidate(text);
}

}  // namespace

void validate(const SynthSpec& spec) {
  if (spec.n_words == 0) throw ValidationError("n_words must be positive");
  if (spec.examples_per_word == 0) throw ValidationError("examples_per_word must be positive");
  if (!(spec.label_determinism >= 0.5 && spec.label_determinism <= 1.0)) {
    throw ValidationError("label_determinism must lie in [0.5, 1]");
  }
  if (!(spec.context_informativeness >= 0.0 && spec.context_informativeness <= 1.0)) {
    throw ValidationError("context_informativeness must lie in [0, 1]");
  }
  if (spec.task_kind != TaskKind::pair_classification && spec.senses_per_word < 2) {
    throw ValidationError("senses_per_word must be at least 2");
  }
}

std::string cue_token(const Label& label) { return std::string(kCuePrefix) + label.text() + ">"; }

SynthDataset generate(const SynthSpec& spec) {
  validate(spec);
  SplitMix64 rng(spec.seed);
  SynthDataset out;
  const int width = 6;
  std::size_t serial = 0;

  for (std::size_t w = 0; w < spec.n_words; ++w) {
    const std::string word = word_surface(w);
    const std::vector<Label> labels = label_space(spec, word);
    const std::size_t majority = rng.below(labels.size());

    for (auto* split : {&out.train, &out.test}) {
      const std::string prefix = split == &out.train ? "train-" : "test-";
      for (std::size_t e = 0; e < spec.examples_per_word; ++e) {
        std::size_t label_index = majority;
        if (!rng.bernoulli(spec.label_determinism)) {
          const std::size_t other = rng.below(labels.size() - 1);
          label_index = other >= majority ? other + 1 : other;
        }
        const Label gold = labels[label_index];
        const bool cued = rng.bernoulli(spec.context_informativeness);

        Instance inst;
        inst.id = numbered(prefix, serial++, width);
        inst.task_kind = spec.task_kind;
        inst.gold = gold;
        inst.word_key = text::normalize_word_key(word);
        inst.segments.push_back(make_segment(word, rng, cued ? std::optional<Label>(gold) : std::nullopt));
        if (spec.task_kind == TaskKind::pair_classification) {
          inst.segments.push_back(make_segment(word, rng, std::nullopt));
        } else if (spec.task_kind == TaskKind::disambiguation) {
          std::vector<std::string> candidates;
          for (const auto& l : labels) candidates.push_back(l.text());
          inst.candidates = std::move(candidates);
        }
        split->push_back(std::move(inst));
      }
    }
  }
  return out;
}

std::string_view to_string(Policy policy) {
  switch (policy) {
    case Policy::oracle: return "oracle";
    case Policy::majority: return "majority";
    case Policy::word_lookup: return "word_lookup";
    case Policy::context_lookup: return "context_lookup";
  }
  return "?";
}

Policy parse_policy(std::string_view name) {
  for (auto p : {Policy::oracle, Policy::majority, Policy::word_lookup, Policy::context_lookup}) {
    if (to_string(p) == name) return p;
  }
  throw ValidationError("unknown policy \"" + std::string(name) + "\"");
}

Simulation simulate(Policy policy, std::span<const Instance> train,
                    std::span<const perturb::PerturbedInstance> test, std::uint64_t seed,
                    const perturb::MaskConfig& cfg) {
  if (train.empty()) throw ValidationError("simulation needs a training set");
  if (test.empty()) throw ValidationError("simulation needs test instances");

  std::map<std::string, std::size_t> global_counts;
  std::map<std::string, std::map<std::string, std::size_t>> word_counts;
  std::set<std::string> train_labels;
  for (const auto& inst : train) {
    ++global_counts[inst.gold.text()];
    ++word_counts[lookup_key(inst)][inst.gold.text()];
    train_labels.insert(inst.gold.text());
  }
  const std::string global_majority = majority_of(global_counts);
  std::map<std::string, std::string> word_majority;
  for (const auto& [key, counts] : word_counts) word_majority.emplace(key, majority_of(counts));

  Simulation sim;
  sim.predictions.system = std::string(to_string(policy));
  sim.predictions.variant = test.front().variant;
  sim.predictions.seed = static_cast<std::int64_t>(seed);

  for (const auto& p : test) {
    if (p.variant != sim.predictions.variant) throw ValidationError("test instances mix variants");
    const Instance& inst = p.instance;
    std::string prediction;
    switch (policy) {
      case Policy::oracle:
        prediction = inst.gold.text();
        break;
      case Policy::majority:
        prediction = global_majority;
        break;
      case Policy::word_lookup: {
        const bool available = std::none_of(inst.segments.begin(), inst.segments.end(),
                                            [&](const Segment& s) { return masked(s, cfg); });
        auto it = available ? word_majority.find(lookup_key(inst)) : word_majority.end();
        if (it != word_majority.end()) {
          prediction = it->second;
        } else {
          prediction = global_majority;
          ++sim.n_fallback;
        }
        break;
      }
      case Policy::context_lookup: {
        if (auto cue = find_cue(inst)) {
          prediction = *cue;
        } else {
          std::vector<std::string> space;
          if (inst.task_kind == TaskKind::pair_classification) {
            space = {"F", "T"};
          } else if (inst.candidates) {
            space = *inst.candidates;
          } else {
            space.assign(train_labels.begin(), train_labels.end());
          }
          SplitMix64 rng(mix(seed, inst.id));
          prediction = space[static_cast<std::size_t>(rng.below(space.size()))];
          ++sim.n_fallback;
        }
        break;
      }
    }
    sim.predictions.predictions.emplace(inst.id, as_label(inst, prediction));
  }

  if (sim.n_fallback > 0) {
    sim.note = std::string(to_string(policy)) + ": feature unavailable on " + std::to_string(sim.n_fallback) +
               " of " + std::to_string(test.size()) + " " + std::string(lexbias::to_string(sim.predictions.variant)) +
               " items; " + (policy == Policy::word_lookup ? "used the training majority label" : "guessed");
  }
  return sim;
}

std::map<VariantKind, ScoreSummary> probe(Policy policy, std::span<const Instance> train,
                                          std::span<const Instance> test, std::uint64_t seed,
                                          const perturb::MaskConfig& cfg) {
  const GoldMap gold = gold_map(std::vector<Instance>(test.begin(), test.end()));
  const Metric metric = metric_for(test.front().task_kind);
  std::map<VariantKind, ScoreSummary> out;
  for (VariantKind v : {VariantKind::full, VariantKind::context, VariantKind::word, VariantKind::label}) {
    const auto variants = perturb::make_variants(test, v, cfg);
    const Simulation sim = simulate(policy, train, variants, seed, cfg);
    const AccuracyResult acc = accuracy(sim.predictions, gold);
    out.emplace(v, make_summary(sim.predictions.system, v, metric,
                                {ScoreRun{static_cast<std::int64_t>(seed), std::nullopt, acc.accuracy}},
                                acc.n_total, acc.n_missing));
  }
  return out;
}

std::vector<PredictionRecord> to_records(const PredictionSet& set) {
  std::vector<PredictionRecord> out;
  out.reserve(set.predictions.size());
  for (const auto& [id, label] : set.predictions) {
    PredictionRecord r;
    r.instance_id = id;
    r.system = set.system;
    r.variant = set.variant;
    r.seed = set.seed;
    r.annotator = set.annotator;
    r.prediction = label;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace lexbias::synth
