#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexbias/types.hpp"

// Metric mathematics: scoring, the context/word bias ratios, gaps, entropies,
// agreement and seed aggregation. Every function here is pure.
namespace lexbias {

// Guard for the bias denominator |m_full - m_l|.
inline constexpr double kBiasEpsilon = 1e-9;

struct AccuracyResult {
  double accuracy = 0.0;
  std::size_t n_correct = 0;
  // Size of the scoring universe (every id in gold).
  std::size_t n_total = 0;
  // Gold ids without a prediction; scored as wrong.
  std::size_t n_missing = 0;
};

// Strict accuracy over the ids in `gold`. Predictions for ids absent from
// `gold` are a ValidationError; an empty prediction set is an error too.
// Labels compare by their text, so a binary "T" and a candidate "T" match.
AccuracyResult accuracy(const PredictionSet& preds, const GoldMap& gold);

// Restricts `gold` to the ids that `preds` covers (for sampled evaluations
// such as the human baselines).
GoldMap restrict_to_predictions(const GoldMap& gold, const PredictionSet& preds);

// Min-max normalisation of a partial-input score m_x between the label floor
// m_l and the full-input score m_full:
//
//   bias = (m_x - m_l) / (m_full - m_l)
//
// With m_x = context score this is the context bias, with m_x = word score the
// target-word bias. Results outside [0, 1] are legal: above 1 means the partial
// input beats the full input. Throws DegenerateDenominator when
// |m_full - m_l| <= kBiasEpsilon; `where` names the dataset/system in the
// message.
double bias_score(double m_x, double m_l, double m_full, std::string_view where = {});

// min(full - context, full - word). Negative when a baseline beats full input.
double min_gap(double full, double context, double word);

// Per-word Shannon entropy (bits) of gold labels on pair tasks. Words seen
// fewer than `min_count` times are discarded. Throws ValidationError if the
// dataset is empty, holds a non-pair instance, or nothing survives the filter.
EntropyReport label_entropy(std::span<const Instance> dataset, std::size_t min_count = 2);

// Per-word entropy (bits) of gold senses/entities on disambiguation and
// retrieval data. No frequency filter.
EntropyReport sense_entropy(std::span<const Instance> dataset);

// Percent of `ids` on which the two prediction sets agree. Symmetric.
// Throws ValidationError listing ids missing from either side.
double agreement(const PredictionSet& a, const PredictionSet& b, const std::set<std::string>& ids);

struct RunStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single run
};

RunStats aggregate_runs(std::span<const ScoreRun> runs);
RunStats aggregate_runs(std::span<const double> scores);

// Scores assumed for human annotators instead of measured:
//   word  + pair task whose two targets are the same word -> 0.5
//   label + binary (pair) task                            -> 0.5
//   label + retrieval                                     -> 0.0
// Anything else must be measured (nullopt). `variant` must be word or label.
std::optional<double> human_convention_baseline(TaskKind task_kind, VariantKind variant,
                                                bool same_word_pairs);

struct BiasOptions {
  // When false, a degenerate denominator yields a report flagged
  // degenerate_denominator with empty biases instead of an exception.
  bool strict = true;
};

// Bias ratios and min-gap from per-variant mean scores. Requires full, label
// and at least one of context/word, all from one system and metric.
BiasReport build_bias_report(std::string dataset, const std::map<VariantKind, ScoreSummary>& summaries,
                             BiasOptions options = {});

// Same, from bare mean scores (fractions).
BiasReport build_bias_report(std::string dataset, std::string system,
                             const std::map<VariantKind, double>& scores, BiasOptions options = {});

}  // namespace lexbias
