#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lexbias/types.hpp"

// Probing-baseline inputs. Every perturbation keeps the instance id, task kind,
// gold label, candidates and word_key; only segments change.
namespace lexbias::perturb {

struct MaskConfig {
  std::string mask_token = "[MASK]";
  std::string marker_open = "[";
  std::string marker_close = "]";
  // Label variant: one mask per whitespace token (default) or a single mask
  // for the whole segment.
  bool label_single_mask = false;
};

// Mask token must be non-empty and whitespace-free; markers must be non-empty
// and differ from the mask token. Throws ValidationError.
void validate(const MaskConfig& cfg);

struct PerturbedInstance {
  Instance instance;  // perturbed segments, spans re-pointed at the new targets
  VariantKind variant = VariantKind::full;
  std::string provenance;

  const std::string& source_id() const { return instance.id; }
  friend bool operator==(const PerturbedInstance&, const PerturbedInstance&) = default;
};

PerturbedInstance make_full_variant(const Instance& instance);

// Replaces each target span, however many tokens it covers, with one mask
// token. Everything outside the span is byte-identical.
PerturbedInstance make_context_variant(const Instance& instance, const MaskConfig& cfg = {});

// Reduces each segment to its target surface (inflection kept).
PerturbedInstance make_word_variant(const Instance& instance);

// Replaces every whitespace token of every segment with the mask token,
// keeping the original whitespace between tokens.
PerturbedInstance make_label_variant(const Instance& instance, const MaskConfig& cfg = {});

// Puts `replacements[i]` in place of segment i's target. Throws
// ValidationError on a count mismatch or an empty replacement.
PerturbedInstance substitute_target(const Instance& instance, std::span<const std::string> replacements);

// Segment texts with the target wrapped in the configured markers.
std::vector<std::string> mark_targets(const Instance& instance, const MaskConfig& cfg = {});

// Dispatches on `variant`. guessed_word is not supported here (it needs
// replacements); use substitute_target.
PerturbedInstance make_variant(const Instance& instance, VariantKind variant, const MaskConfig& cfg = {});
std::vector<PerturbedInstance> make_variants(std::span<const Instance> instances, VariantKind variant,
                                             const MaskConfig& cfg = {});

// Accuracy on `test` of the constant predictor that always emits the most
// frequent gold label of `train` (ties: lexicographically smallest label).
// Stands in for a trained label-only baseline.
double analytic_label_baseline(std::span<const Instance> train, std::span<const Instance> test);

// Canonical JSONL plus "variant" and "provenance" fields.
std::string perturbed_text(std::span<const PerturbedInstance> instances);
void write_perturbed(std::span<const PerturbedInstance> instances, const std::filesystem::path& path);

}  // namespace lexbias::perturb
