#include "lexbias/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lexbias/error.hpp"

namespace lexbias {
namespace {

std::string id_list(const std::vector<std::string>& ids, std::size_t limit = 10) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < limit; ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  if (ids.size() > limit) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

bool finite(double x) { return std::isfinite(x); }

struct Tally {
  std::map<std::string, std::size_t> label_counts;
  std::size_t total = 0;
};

WordEntropy word_entropy(const Tally& tally) {
  WordEntropy w;
  w.count = tally.total;
  w.n_labels = tally.label_counts.size();
  const double n = static_cast<double>(tally.total);
  double h = 0.0;
  std::size_t best = 0;
  // std::map iterates labels in lexicographic order, so the strict > keeps the
  // smallest label among ties.
  for (const auto& [label, count] : tally.label_counts) {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log2(p);
    if (count > best) {
      best = count;
      w.majority_label = label;
    }
  }
  w.entropy_bits = std::max(0.0, h);
  w.majority_proportion = static_cast<double>(best) / n;
  return w;
}

EntropyReport summarize(EntropyKind kind, const std::map<std::string, Tally>& groups,
                        std::size_t min_count) {
  EntropyReport report;
  report.kind = kind;
  double sum = 0.0;
  double weighted = 0.0;
  std::size_t instances = 0;
  std::size_t majority = 0;
  for (const auto& [word, tally] : groups) {
    if (tally.total < min_count) {
      ++report.n_words_discarded;
      continue;
    }
    WordEntropy w = word_entropy(tally);
    sum += w.entropy_bits;
    weighted += w.entropy_bits * static_cast<double>(w.count);
    instances += w.count;
    majority += static_cast<std::size_t>(std::llround(w.majority_proportion * static_cast<double>(w.count)));
    report.per_word.emplace(word, std::move(w));
  }
  report.n_words_included = report.per_word.size();
  if (report.n_words_included > 0) {
    report.average = sum / static_cast<double>(report.n_words_included);
    report.token_weighted_average = weighted / static_cast<double>(instances);
    report.majority_proportion = static_cast<double>(majority) / static_cast<double>(instances);
  }
  return report;
}

}  // namespace

AccuracyResult accuracy(const PredictionSet& preds, const GoldMap& gold) {
  if (preds.predictions.empty()) throw ValidationError("no predictions");

  std::vector<std::string> unknown;
  for (const auto& [id, label] : preds.predictions) {
    if (!gold.contains(id)) unknown.push_back(id);
  }
  if (!unknown.empty()) {
    throw ValidationError("predictions reference unknown instance ids: " + id_list(unknown));
  }

  AccuracyResult result;
  result.n_total = gold.size();
  for (const auto& [id, gold_label] : gold) {
    auto it = preds.predictions.find(id);
    if (it == preds.predictions.end()) {
      ++result.n_missing;
    } else if (it->second.text() == gold_label.text()) {
      ++result.n_correct;
    }
  }
  result.accuracy = result.n_total == 0
                        ? 0.0
                        : static_cast<double>(result.n_correct) / static_cast<double>(result.n_total);
  return result;
}

GoldMap restrict_to_predictions(const GoldMap& gold, const PredictionSet& preds) {
  GoldMap out;
  for (const auto& [id, label] : preds.predictions) {
    if (auto it = gold.find(id); it != gold.end()) out.emplace(id, it->second);
  }
  return out;
}

double bias_score(double m_x, double m_l, double m_full, std::string_view where) {
  if (!finite(m_x) || !finite(m_l) || !finite(m_full)) {
    throw ValidationError("bias inputs must be finite");
  }
  const double denom = m_full - m_l;
  if (std::abs(denom) <= kBiasEpsilon) {
    std::string msg = "degenerate denominator: full and label scores coincide";
    if (!where.empty()) msg += " for " + std::string(where);
    throw DegenerateDenominator(msg);
  }
  return (m_x - m_l) / denom;
}

double min_gap(double full, double context, double word) {
  return std::min(full - context, full - word);
}

EntropyReport label_entropy(std::span<const Instance> dataset, std::size_t min_count) {
  if (dataset.empty()) throw ValidationError("empty dataset");
  std::map<std::string, Tally> groups;
  for (const auto& inst : dataset) {
    if (inst.task_kind != TaskKind::pair_classification) {
      throw ValidationError("label entropy needs pair_classification instances; " + inst.id +
                            " is " + std::string(to_string(inst.task_kind)));
    }
    Tally& t = groups[inst.word_key];
    ++t.label_counts[inst.gold.text()];
    ++t.total;
  }
  EntropyReport report = summarize(EntropyKind::label_entropy, groups, min_count);
  if (report.n_words_included == 0) throw ValidationError("no repeated words");
  return report;
}

EntropyReport sense_entropy(std::span<const Instance> dataset) {
  if (dataset.empty()) throw ValidationError("empty dataset");
  std::map<std::string, Tally> groups;
  for (const auto& inst : dataset) {
    if (inst.task_kind == TaskKind::pair_classification || inst.gold.is_binary()) {
      throw ValidationError("sense entropy needs disambiguation or retrieval instances; " +
                            inst.id + " is " + std::string(to_string(inst.task_kind)));
    }
    Tally& t = groups[inst.word_key];
    ++t.label_counts[inst.gold.text()];
    ++t.total;
  }
  return summarize(EntropyKind::sense_entropy, groups, 1);
}

double agreement(const PredictionSet& a, const PredictionSet& b, const std::set<std::string>& ids) {
  if (ids.empty()) throw ValidationError("agreement needs a non-empty id set");
  std::vector<std::string> missing;
  for (const auto& id : ids) {
    if (!a.predictions.contains(id) || !b.predictions.contains(id)) missing.push_back(id);
  }
  if (!missing.empty()) {
    throw ValidationError("ids missing from an annotator's predictions: " + id_list(missing));
  }
  std::size_t same = 0;
  for (const auto& id : ids) {
    if (a.predictions.at(id).text() == b.predictions.at(id).text()) ++same;
  }
  return 100.0 * static_cast<double>(same) / static_cast<double>(ids.size());
}

RunStats aggregate_runs(std::span<const double> scores) {
  if (scores.empty()) throw ValidationError("no runs to aggregate");
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  if (*lo == *hi) return {*lo, 0.0};

  const double n = static_cast<double>(scores.size());
  const double mean = std::clamp(std::accumulate(scores.begin(), scores.end(), 0.0) / n, *lo, *hi);
  double ss = 0.0;
  for (double s : scores) ss += (s - mean) * (s - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

RunStats aggregate_runs(std::span<const ScoreRun> runs) {
  std::vector<double> scores;
  scores.reserve(runs.size());
  for (const auto& r : runs) scores.push_back(r.score);
  return aggregate_runs(std::span<const double>(scores));
}

std::optional<double> human_convention_baseline(TaskKind task_kind, VariantKind variant,
                                                bool same_word_pairs) {
  switch (variant) {
    case VariantKind::word:
      if (task_kind == TaskKind::pair_classification && same_word_pairs) return 0.5;
      return std::nullopt;
    case VariantKind::label:
      if (task_kind == TaskKind::pair_classification) return 0.5;
      if (task_kind == TaskKind::retrieval) return 0.0;
      return std::nullopt;
    default:
      throw ValidationError("human conventions exist only for the word and label variants");
  }
}

BiasReport build_bias_report(std::string dataset, std::string system,
                             const std::map<VariantKind, double>& scores, BiasOptions options) {
  BiasReport report;
  report.dataset = std::move(dataset);
  report.system = std::move(system);
  report.scores = scores;

  const std::string where = report.dataset + "/" + report.system;
  auto require = [&](VariantKind v) {
    if (!scores.contains(v)) {
      throw ValidationError(where + ": missing required variant " + std::string(to_string(v)));
    }
    return scores.at(v);
  };
  const double full = require(VariantKind::full);
  const double label = require(VariantKind::label);
  const auto context = scores.contains(VariantKind::context)
                           ? std::optional<double>(scores.at(VariantKind::context))
                           : std::nullopt;
  const auto word = scores.contains(VariantKind::word)
                        ? std::optional<double>(scores.at(VariantKind::word))
                        : std::nullopt;
  if (!context && !word) {
    throw ValidationError(where + ": needs a context or word score");
  }

  if (context && word) report.min_gap = min_gap(full, *context, *word);

  try {
    if (context) report.bias_c = bias_score(*context, label, full, where);
    if (word) report.bias_w = bias_score(*word, label, full, where);
  } catch (const DegenerateDenominator&) {
    if (options.strict) throw;
    report.bias_c.reset();
    report.bias_w.reset();
    report.flags.insert(BiasFlag::degenerate_denominator);
  }

  if (report.bias_c) {
    if (*report.bias_c > 1.0) report.flags.insert(BiasFlag::exceeds_one_c);
    if (*report.bias_c < 0.0) report.flags.insert(BiasFlag::negative_c);
  }
  if (report.bias_w) {
    if (*report.bias_w > 1.0) report.flags.insert(BiasFlag::exceeds_one_w);
    if (*report.bias_w < 0.0) report.flags.insert(BiasFlag::negative_w);
  }
  return report;
}

BiasReport build_bias_report(std::string dataset, const std::map<VariantKind, ScoreSummary>& summaries,
                             BiasOptions options) {
  if (summaries.empty()) throw ValidationError(dataset + ": no score summaries");
  const ScoreSummary& first = summaries.begin()->second;
  std::map<VariantKind, double> means;
  for (const auto& [variant, summary] : summaries) {
    if (summary.variant != variant) {
      throw ValidationError(dataset + ": summary filed under " + std::string(to_string(variant)) +
                            " is for variant " + std::string(to_string(summary.variant)));
    }
    if (summary.system != first.system) {
      throw ValidationError(dataset + ": summaries mix systems " + first.system + " and " +
                            summary.system);
    }
    if (summary.metric != first.metric) {
      throw ValidationError(dataset + ": summaries mix metrics");
    }
    means.emplace(variant, summary.mean);
  }
  BiasReport report = build_bias_report(std::move(dataset), first.system, means, options);
  report.metric = first.metric;
  return report;
}

}  // namespace lexbias
