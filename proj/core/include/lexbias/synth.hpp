#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lexbias/perturb.hpp"
#include "lexbias/types.hpp"

// Synthetic datasets with planted word and context bias, and scripted
// predictors, so measured biases can be checked against known ground truth.
namespace lexbias::synth {

struct SynthSpec {
  std::size_t n_words = 100;
  // Per word, in each of train and test.
  std::size_t examples_per_word = 20;
  TaskKind task_kind = TaskKind::pair_classification;
  // Probability that an example carries its word's majority label, in [0.5, 1].
  double label_determinism = 0.5;
  // Probability that an example's context holds a cue token naming the gold
  // label, in [0, 1].
  double context_informativeness = 0.0;
  std::uint64_t seed = 0;
  // Senses (or entities) per word for disambiguation and retrieval.
  std::size_t senses_per_word = 2;
};

// Throws ValidationError for out-of-range parameters.
void validate(const SynthSpec& spec);

// Cue token planted in contexts, e.g. "<cue:T>".
std::string cue_token(const Label& label);

struct SynthDataset {
  std::vector<Instance> train;
  std::vector<Instance> test;
};

// Deterministic in spec. Every word draws a majority label uniformly, then
// each example takes it with probability label_determinism and otherwise a
// different label uniformly. Contexts are filler tokens plus, with
// probability context_informativeness, the gold cue token.
SynthDataset generate(const SynthSpec& spec);

enum class Policy { oracle, majority, word_lookup, context_lookup };
std::string_view to_string(Policy policy);
Policy parse_policy(std::string_view name);

struct Simulation {
  PredictionSet predictions;
  // Items where the policy's feature was unavailable (masked word, missing
  // cue) and it fell back to its default.
  std::size_t n_fallback = 0;
  std::string note;
};

// Scripted predictors over a perturbed test set:
//   oracle          gold label
//   majority        most frequent training label
//   word_lookup     per-word majority label memorised from train; masked or
//                   unseen words fall back to the training majority
//   context_lookup  label named by a cue token outside the target; a seeded
//                   uniform guess over the label space otherwise
Simulation simulate(Policy policy, std::span<const Instance> train,
                    std::span<const perturb::PerturbedInstance> test, std::uint64_t seed = 0,
                    const perturb::MaskConfig& cfg = {});

// Runs `policy` on the full, context, word and label variants of `test` and
// scores each against gold.
std::map<VariantKind, ScoreSummary> probe(Policy policy, std::span<const Instance> train,
                                          std::span<const Instance> test, std::uint64_t seed = 0,
                                          const perturb::MaskConfig& cfg = {});

std::vector<PredictionRecord> to_records(const PredictionSet& set);

}  // namespace lexbias::synth
