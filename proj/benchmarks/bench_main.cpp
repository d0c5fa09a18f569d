#include <benchmark/benchmark.h>

#include "lexbias/ingest.hpp"
#include "lexbias/metrics.hpp"
#include "lexbias/perturb.hpp"
#include "lexbias/synth.hpp"

using namespace lexbias;

namespace {

const synth::SynthDataset& corpus(std::size_t n_words) {
  static std::map<std::size_t, synth::SynthDataset> cache;
  auto it = cache.find(n_words);
  if (it == cache.end()) {
    synth::SynthSpec spec;
    spec.n_words = n_words;
    spec.examples_per_word = 10;
    spec.label_determinism = 0.8;
    spec.context_informativeness = 0.3;
    it = cache.emplace(n_words, synth::generate(spec)).first;
  }
  return it->second;
}

void BM_BiasScore(benchmark::State& state) {
  double x = 0.66;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bias_score(x, 0.5, 0.71));
    x += 1e-12;
  }
}
BENCHMARK(BM_BiasScore);

void BM_Accuracy(benchmark::State& state) {
  const auto& test = corpus(state.range(0)).test;
  const GoldMap gold = gold_map(test);
  PredictionSet preds;
  preds.system = "s";
  for (const auto& inst : test) preds.predictions.emplace(inst.id, Label::binary(true));
  for (auto _ : state) benchmark::DoNotOptimize(accuracy(preds, gold));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(test.size()));
}
BENCHMARK(BM_Accuracy)->Arg(100)->Arg(1000);

void BM_LabelEntropy(benchmark::State& state) {
  const auto& test = corpus(state.range(0)).test;
  for (auto _ : state) benchmark::DoNotOptimize(label_entropy(test));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(test.size()));
}
BENCHMARK(BM_LabelEntropy)->Arg(100)->Arg(1000);

void BM_Perturb(benchmark::State& state) {
  const auto& test = corpus(1000).test;
  const auto variant = static_cast<VariantKind>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(perturb::make_variants(test, variant));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(test.size()));
  state.SetLabel(std::string(to_string(variant)));
}
BENCHMARK(BM_Perturb)
    ->Arg(static_cast<int>(VariantKind::context))
    ->Arg(static_cast<int>(VariantKind::word))
    ->Arg(static_cast<int>(VariantKind::label));

void BM_ParseCanonical(benchmark::State& state) {
  const std::string text = ingest::canonical_text(corpus(state.range(0)).test);
  for (auto _ : state) benchmark::DoNotOptimize(ingest::parse_canonical_text(text));
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_ParseCanonical)->Arg(100)->Arg(1000);

void BM_WriteCanonical(benchmark::State& state) {
  const auto& test = corpus(1000).test;
  for (auto _ : state) benchmark::DoNotOptimize(ingest::canonical_text(test));
}
BENCHMARK(BM_WriteCanonical);

}  // namespace

BENCHMARK_MAIN();
