#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "lexbias/error.hpp"
#include "lexbias/ingest.hpp"
#include "lexbias/perturb.hpp"
#include "lexbias/text.hpp"

using namespace lexbias;

namespace {

std::string marked(const perturb::PerturbedInstance& p, std::size_t seg) {
  return perturb::mark_targets(p.instance, {})[seg];
}

Instance mention(const std::string& text, std::size_t start, std::size_t end, const std::string& surface) {
  Instance inst;
  inst.id = "m";
  inst.task_kind = TaskKind::retrieval;
  inst.segments = {testutil::segment(text, start, end, surface)};
  inst.gold = Label::candidate("e");
  inst.word_key = text::normalize_word_key(surface);
  return inst;
}

const std::vector<std::string> kVocab{"the", "bank", "Ärger", "航天员", "🐝", "run", "of", "a", "Σοφία", "x"};

// Random pair instance with a target that never occurs elsewhere.
Instance fuzz_instance(std::mt19937_64& rng, int serial) {
  Instance inst;
  inst.id = "f" + std::to_string(serial);
  inst.task_kind = TaskKind::pair_classification;
  inst.gold = Label::binary(rng() % 2);
  const std::string target = (rng() % 2 ? "tgt" : "目标") + std::to_string(serial);
  const std::string surface = rng() % 3 == 0 ? target + " " + target + "x" : target;
  for (int s = 0; s < 2; ++s) {
    std::vector<std::string> before, after;
    for (std::size_t i = rng() % 4; i > 0; --i) before.push_back(kVocab[rng() % kVocab.size()]);
    for (std::size_t i = rng() % 4; i > 0; --i) after.push_back(kVocab[rng() % kVocab.size()]);
    std::string text;
    for (const auto& w : before) text += w + (rng() % 5 == 0 ? "  " : " ");
    const std::size_t start = text::scalar_length(text);
    text += surface;
    for (const auto& w : after) text += " " + w;
    inst.segments.push_back(testutil::segment(text, start, start + text::scalar_length(surface), surface));
  }
  inst.word_key = text::pair_word_key(inst.segments[0].surface, inst.segments[1].surface);
  return inst;
}

}  // namespace

TEST_CASE("breed example: context, word and guessed word") {
  const Instance full = testutil::breed_pair();
  CHECK(marked(perturb::make_full_variant(full), 0) == "Google represents a new [breed] of entrepreneurs .");
  CHECK(marked(perturb::make_full_variant(full), 1) == "The [breed] of tulip .");

  const auto context = perturb::make_context_variant(full);
  CHECK(context.variant == VariantKind::context);
  CHECK(context.instance.segments[0].text == "Google represents a new [MASK] of entrepreneurs .");
  CHECK(context.instance.segments[1].text == "The [MASK] of tulip .");
  CHECK(context.instance.segments[0].surface == "[MASK]");
  CHECK(context.instance.gold == full.gold);
  CHECK(context.instance.id == full.id);

  const auto word = perturb::make_word_variant(full);
  CHECK(word.instance.segments[0].text == "breed");
  CHECK(word.instance.segments[1].text == "breed");
  CHECK(word.instance.segments[0].target == Span{0, 5});

  const std::vector<std::string> guesses{"type", "type"};
  const auto guessed = perturb::substitute_target(full, guesses);
  CHECK(guessed.variant == VariantKind::guessed_word);
  CHECK(marked(guessed, 0) == "Google represents a new [type] of entrepreneurs .");
  CHECK(marked(guessed, 1) == "The [type] of tulip .");
}

TEST_CASE("kill example: guessed word with inflection") {
  const Instance full = testutil::kill_pair();
  const auto context = perturb::make_context_variant(full);
  CHECK(context.instance.segments[0].text == "[MASK] the engine .");
  CHECK(context.instance.segments[1].text == "He [MASK] the ball .");

  const std::vector<std::string> guesses{"Hit", "hits"};
  const auto guessed = perturb::substitute_target(full, guesses);
  CHECK(marked(guessed, 0) == "[Hit] the engine .");
  CHECK(marked(guessed, 1) == "He [hits] the ball .");
  CHECK(marked(perturb::make_full_variant(full), 0) == "[Kill] the engine .");
  CHECK(marked(perturb::make_full_variant(full), 1) == "He [kills] the ball .");
}

TEST_CASE("substitution errors and identity") {
  const Instance full = testutil::breed_pair();
  const std::vector<std::string> one{"type"};
  CHECK_THROWS_AS(perturb::substitute_target(full, one), ValidationError);
  const std::vector<std::string> empty{"type", ""};
  CHECK_THROWS_AS(perturb::substitute_target(full, empty), ValidationError);
  const std::vector<std::string> same{"breed", "breed"};
  CHECK(perturb::substitute_target(full, same).instance.segments == full.segments);
}

TEST_CASE("multi-token mention becomes a single mask") {
  const std::string text = "for instance sweat bees in the genera";
  const auto p = perturb::make_context_variant(mention(text, 13, 23, "sweat bees"));
  CHECK(p.instance.segments[0].text == "for instance [MASK] in the genera");
  CHECK(p.instance.segments[0].target == Span{13, 19});
}

TEST_CASE("label variant masks every token") {
  const auto label = perturb::make_label_variant(testutil::breed_pair());
  CHECK(label.instance.segments[0].text == "[MASK] [MASK] [MASK] [MASK] [MASK] [MASK] [MASK] [MASK]");
  CHECK(label.instance.segments[1].text == "[MASK] [MASK] [MASK] [MASK] [MASK]");
  CHECK(label.instance.segments[0].surface == "[MASK]");
  CHECK(instance_problems(label.instance).empty());

  perturb::MaskConfig single;
  single.label_single_mask = true;
  CHECK(perturb::make_label_variant(testutil::breed_pair(), single).instance.segments[1].text == "[MASK]");
}

TEST_CASE("custom mask and markers") {
  perturb::MaskConfig cfg;
  cfg.mask_token = "<mask>";
  cfg.marker_open = "<t>";
  cfg.marker_close = "</t>";
  CHECK(perturb::make_context_variant(testutil::breed_pair(), cfg).instance.segments[1].text == "The <mask> of tulip .");
  CHECK(perturb::mark_targets(testutil::kill_pair(), cfg)[0] == "<t>Kill</t> the engine .");
  cfg.mask_token = "two words";
  CHECK_THROWS_AS(perturb::validate(cfg), ValidationError);
}

TEST_CASE("marking the multi-script fixture") {
  const auto instances = ingest::parse_canonical(testutil::fixture("multiscript.jsonl"));
  CHECK(perturb::mark_targets(instances[0])[1] == "...the six [Apollo] Moon landings...");
  CHECK(perturb::mark_targets(instances[0])[0] == "...航天员训练及[阿波罗]中飞船...");
}

TEST_CASE("fuzzed perturbation properties") {
  std::mt19937_64 rng(2024);
  const perturb::MaskConfig cfg;
  for (int i = 0; i < 500; ++i) {
    const Instance inst = fuzz_instance(rng, i);
    REQUIRE(instance_problems(inst).empty());

    const auto context = perturb::make_context_variant(inst, cfg);
    const auto label = perturb::make_label_variant(inst, cfg);
    const auto word = perturb::make_word_variant(inst);
    for (const auto* p : {&context, &label, &word}) {
      CHECK(instance_problems(p->instance).empty());
      CHECK(p->instance.id == inst.id);
      CHECK(p->instance.gold == inst.gold);
      CHECK(p->instance.word_key == inst.word_key);
    }

    CHECK(perturb::make_context_variant(context.instance, cfg).instance == context.instance);
    CHECK(perturb::make_label_variant(label.instance, cfg).instance == label.instance);

    for (std::size_t s = 0; s < inst.segments.size(); ++s) {
      const auto& orig = inst.segments[s];
      const auto& ctx = context.instance.segments[s];
      // The surface is gone and everything around the span is untouched.
      CHECK(ctx.text.find(orig.surface) == std::string::npos);
      CHECK(text::substr(ctx.text, 0, ctx.target.start) == text::substr(orig.text, 0, orig.target.start));
      CHECK(text::substr(ctx.text, ctx.target.end, text::scalar_length(ctx.text)) ==
            text::substr(orig.text, orig.target.end, text::scalar_length(orig.text)));

      const auto& lab = label.instance.segments[s];
      const auto tokens = text::whitespace_tokens(std::string_view(lab.text));
      CHECK(tokens.size() == text::whitespace_tokens(std::string_view(orig.text)).size());
      for (const Span& t : tokens) CHECK(text::substr(lab.text, t.start, t.end) == cfg.mask_token);

      CHECK(word.instance.segments[s].text == orig.surface);
    }

    const std::vector<std::string> originals{inst.segments[0].surface, inst.segments[1].surface};
    CHECK(perturb::substitute_target(inst, originals).instance.segments == inst.segments);
  }
}

TEST_CASE("analytic label baseline") {
  std::vector<Instance> train;
  for (int i = 0; i < 5; ++i) {
    auto inst = testutil::breed_pair();
    inst.id = "t" + std::to_string(i);
    inst.gold = Label::binary(i < 3);
    train.push_back(inst);
  }
  std::vector<Instance> test;
  for (int i = 0; i < 4; ++i) {
    auto inst = testutil::breed_pair();
    inst.id = "e" + std::to_string(i);
    inst.gold = Label::binary(i == 0);
    test.push_back(inst);
  }
  CHECK(perturb::analytic_label_baseline(train, test) == 0.25);
  // Tie: F sorts before T.
  train[2].gold = Label::binary(false);
  train.pop_back();
  CHECK(perturb::analytic_label_baseline(train, test) == 0.75);
}

TEST_CASE("perturbed JSONL parses back as canonical") {
  const auto instances = ingest::parse_canonical(testutil::fixture("multiscript.jsonl"));
  const auto variants = perturb::make_variants(instances, VariantKind::context);
  const std::string text = perturb::perturbed_text(variants);
  CHECK(text.find("\"variant\":\"context\"") != std::string::npos);
  const auto back = ingest::parse_canonical_text(text);
  REQUIRE(back.size() == variants.size());
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == variants[i].instance);
  CHECK_THROWS_AS(perturb::make_variant(instances[0], VariantKind::guessed_word), ValidationError);
}
