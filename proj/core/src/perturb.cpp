#include "lexbias/perturb.hpp"

#include <algorithm>
#include <map>

#include "lexbias/error.hpp"
#include "lexbias/ingest.hpp"
#include "lexbias/json.hpp"
#include "lexbias/text.hpp"

namespace lexbias::perturb {
namespace {

PerturbedInstance start_from(const Instance& instance, VariantKind variant, std::string provenance) {
  PerturbedInstance out;
  out.instance = instance;
  out.variant = variant;
  out.provenance = std::move(provenance);
  return out;
}

// Replaces the target span of `seg` with `replacement`; returns the new segment.
Segment replace_target(const Segment& seg, std::string_view replacement) {
  const std::u32string scalars = text::decode(seg.text);
  const std::u32string inserted = text::decode(replacement);
  std::u32string out;
  out.reserve(scalars.size() + inserted.size());
  out.append(scalars, 0, seg.target.start);
  out += inserted;
  out.append(scalars, seg.target.end, std::u32string::npos);
  Segment result;
  result.text = text::encode(out);
  result.target = {seg.target.start, seg.target.start + inserted.size()};
  result.surface = std::string(replacement);
  return result;
}

Segment mask_all_tokens(const Segment& seg, const MaskConfig& cfg) {
  const std::u32string mask = text::decode(cfg.mask_token);
  Segment result;
  if (cfg.label_single_mask) {
    result.text = cfg.mask_token;
    result.target = {0, mask.size()};
    result.surface = cfg.mask_token;
    return result;
  }

  const std::u32string scalars = text::decode(seg.text);
  const auto tokens = text::whitespace_tokens(std::u32string_view(scalars));
  if (tokens.empty()) {
    result.text = cfg.mask_token;
    result.target = {0, mask.size()};
    result.surface = cfg.mask_token;
    return result;
  }

  std::u32string out;
  std::vector<Span> masked;
  std::size_t cursor = 0;
  for (const Span& tok : tokens) {
    out.append(scalars, cursor, tok.start - cursor);
    const std::size_t start = out.size();
    out += mask;
    masked.push_back({start, out.size()});
    cursor = tok.end;
  }
  out.append(scalars, cursor, std::u32string::npos);

  // The new target covers every masked token the old target overlapped.
  std::size_t first = tokens.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].start < seg.target.end && seg.target.start < tokens[i].end) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == tokens.size()) {
    // Whitespace-only target: point at the next token, or the last one.
    first = last = tokens.size() - 1;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i].start >= seg.target.start) {
        first = last = i;
        break;
      }
    }
  }
  result.target = {masked[first].start, masked[last].end};
  result.surface = text::encode(std::u32string_view(out).substr(result.target.start, result.target.length()));
  result.text = text::encode(out);
  return result;
}

}  // namespace

void validate(const MaskConfig& cfg) {
  if (cfg.mask_token.empty()) throw ValidationError("mask token must be non-empty");
  for (char32_t c : text::decode(cfg.mask_token)) {
    if (text::is_space(c)) throw ValidationError("mask token must not contain whitespace");
  }
  if (cfg.marker_open.empty() || cfg.marker_close.empty()) {
    throw ValidationError("markers must be non-empty");
  }
  if (cfg.marker_open == cfg.mask_token || cfg.marker_close == cfg.mask_token) {
    throw ValidationError("markers must differ from the mask token");
  }
}

PerturbedInstance make_full_variant(const Instance& instance) {
  return start_from(instance, VariantKind::full, "unchanged");
}

PerturbedInstance make_context_variant(const Instance& instance, const MaskConfig& cfg) {
  validate(cfg);
  PerturbedInstance out = start_from(instance, VariantKind::context,
                                     "target span replaced by " + cfg.mask_token);
  for (auto& seg : out.instance.segments) seg = replace_target(seg, cfg.mask_token);
  return out;
}

PerturbedInstance make_word_variant(const Instance& instance) {
  PerturbedInstance out = start_from(instance, VariantKind::word, "segment reduced to target surface");
  for (auto& seg : out.instance.segments) {
    seg.text = seg.surface;
    seg.target = {0, text::scalar_length(seg.surface)};
  }
  return out;
}

PerturbedInstance make_label_variant(const Instance& instance, const MaskConfig& cfg) {
  validate(cfg);
  PerturbedInstance out = start_from(
      instance, VariantKind::label,
      cfg.label_single_mask ? "segment replaced by a single " + cfg.mask_token
                            : "every token replaced by " + cfg.mask_token);
  for (auto& seg : out.instance.segments) seg = mask_all_tokens(seg, cfg);
  return out;
}

PerturbedInstance substitute_target(const Instance& instance, std::span<const std::string> replacements) {
  if (replacements.size() != instance.segments.size()) {
    throw ValidationError(instance.id + ": expected " + std::to_string(instance.segments.size()) +
                          " replacement(s), got " + std::to_string(replacements.size()));
  }
  std::string provenance = "target replaced by";
  for (const auto& r : replacements) {
    if (r.empty()) throw ValidationError(instance.id + ": empty replacement surface");
    provenance += " \"" + r + "\"";
  }
  PerturbedInstance out = start_from(instance, VariantKind::guessed_word, std::move(provenance));
  for (std::size_t i = 0; i < replacements.size(); ++i) {
    out.instance.segments[i] = replace_target(out.instance.segments[i], replacements[i]);
  }
  return out;
}

std::vector<std::string> mark_targets(const Instance& instance, const MaskConfig& cfg) {
  std::vector<std::string> out;
  for (const auto& seg : instance.segments) {
    const std::u32string scalars = text::decode(seg.text);
    const std::u32string_view view(scalars);
    out.push_back(text::encode(view.substr(0, seg.target.start)) + cfg.marker_open + seg.surface +
                  cfg.marker_close + text::encode(view.substr(seg.target.end)));
  }
  return out;
}

PerturbedInstance make_variant(const Instance& instance, VariantKind variant, const MaskConfig& cfg) {
  switch (variant) {
    case VariantKind::full: return make_full_variant(instance);
    case VariantKind::context: return make_context_variant(instance, cfg);
    case VariantKind::word: return make_word_variant(instance);
    case VariantKind::label: return make_label_variant(instance, cfg);
    case VariantKind::guessed_word:
      throw ValidationError("guessed_word variants need replacement surfaces");
  }
  throw ValidationError("unknown variant");
}

std::vector<PerturbedInstance> make_variants(std::span<const Instance> instances, VariantKind variant,
                                             const MaskConfig& cfg) {
  std::vector<PerturbedInstance> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) out.push_back(make_variant(inst, variant, cfg));
  return out;
}

double analytic_label_baseline(std::span<const Instance> train, std::span<const Instance> test) {
  if (train.empty()) throw ValidationError("label baseline needs a non-empty training set");
  if (test.empty()) throw ValidationError("label baseline needs a non-empty test set");
  const TaskKind kind = train.front().task_kind;
  std::map<std::string, std::size_t> counts;
  for (const auto& inst : train) {
    if (inst.task_kind != kind) throw ValidationError("training set mixes task kinds");
    ++counts[inst.gold.text()];
  }
  std::string majority;
  std::size_t best = 0;
  for (const auto& [label, count] : counts) {
    if (count > best) {
      best = count;
      majority = label;
    }
  }
  std::size_t correct = 0;
  for (const auto& inst : test) {
    if (inst.task_kind != kind) throw ValidationError("train and test task kinds differ");
    if (inst.gold.text() == majority) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

std::string perturbed_text(std::span<const PerturbedInstance> instances) {
  std::string out;
  for (const auto& p : instances) {
    json::OrderedJson j = json::to_json(p.instance);
    j["variant"] = std::string(to_string(p.variant));
    j["provenance"] = p.provenance;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_perturbed(std::span<const PerturbedInstance> instances, const std::filesystem::path& path) {
  ingest::write_file(path, perturbed_text(instances));
}

}  // namespace lexbias::perturb
