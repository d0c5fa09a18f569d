#include <doctest.h>

#include "helpers.hpp"
#include "lexbias/error.hpp"
#include "lexbias/ingest.hpp"
#include "lexbias/text.hpp"

using namespace lexbias;

namespace {

// Parses `content` expecting failure; returns the diagnostics.
template <typename Parse>
std::vector<Diagnostic> diagnostics_of(Parse&& parse) {
  try {
    parse();
  } catch (const ValidationError& e) {
    return e.diagnostics();
  }
  FAIL("expected a ValidationError");
  return {};
}

const char* kGood =
    R"({"id":"x1","task_kind":"pair_classification","word_key":"bank","segments":[{"text":"the bank","start":4,"end":8,"surface":"bank"},{"text":"a bank","start":2,"end":6,"surface":"bank"}],"gold":{"binary":"T"}})";

}  // namespace

TEST_CASE("canonical round trip over multi-script fixtures") {
  const auto instances = ingest::parse_canonical(testutil::fixture("multiscript.jsonl"));
  REQUIRE(instances.size() == 8);
  const std::string written = ingest::canonical_text(instances);
  const auto again = ingest::parse_canonical_text(written);
  CHECK(again == instances);
  CHECK(ingest::canonical_text(again) == written);

  const auto& amico = instances.front();
  CHECK(text::substr(amico.segments[0].text, amico.segments[0].target.start, amico.segments[0].target.end) == "阿波罗");
  CHECK(amico.segments[1].surface == "Apollo");
  CHECK(instances.back().segments[0].surface == "🐝");
}

TEST_CASE("canonical output is byte stable") {
  const auto instances = ingest::parse_canonical(testutil::fixture("multiscript.jsonl"));
  const auto dir = testutil::scratch_dir("ingest");
  ingest::write_canonical(instances, dir / "a.jsonl");
  ingest::write_canonical(ingest::parse_canonical(dir / "a.jsonl"), dir / "b.jsonl");
  const std::string a = ingest::read_file(dir / "a.jsonl");
  CHECK(a == ingest::read_file(dir / "b.jsonl"));
  CHECK(a.find('\r') == std::string::npos);
  CHECK(a.find(" \n") == std::string::npos);
  CHECK(a.find("阿波罗") != std::string::npos);  // not \u-escaped
  std::filesystem::remove_all(dir);
}

TEST_CASE("WiC TSV parses to valid spans") {
  std::vector<Diagnostic> warnings;
  const auto instances =
      ingest::parse_wic_tsv(testutil::fixture("wic.data.txt"), testutil::fixture("wic.gold.txt"), "wic", &warnings);
  REQUIRE(instances.size() == 4);
  CHECK(warnings.empty());
  for (const auto& inst : instances) CHECK(instance_problems(inst).empty());

  const auto& breed = instances[0];
  CHECK(breed.id == "wic-0");
  CHECK(breed.segments[0].target == Span{24, 29});
  CHECK(breed.segments[1].target == Span{4, 9});
  CHECK(breed.gold == Label::binary(false));

  const auto& board = instances[1];
  CHECK(board.word_key == "board");
  CHECK(board.segments[0].surface == "board");
  CHECK(board.segments[1].surface == "boards");
  CHECK(instances[2].segments[1].surface == "Spring");
  CHECK(instances[2].gold == Label::binary(true));
}

TEST_CASE("WiC surfaces that do not start with the lemma are kept with a warning") {
  std::vector<Diagnostic> warnings;
  const auto instances =
      ingest::parse_wic_tsv_text("go\tV\t1-1\tI went home\tWe go now\n", "T\n", "wic", &warnings, "dev.tsv");
  CHECK(instances[0].segments[0].surface == "went");
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].line == 1);
}

TEST_CASE("pair and retrieval JSONL") {
  const auto pairs = ingest::parse_pair_jsonl(testutil::fixture("pairs.jsonl"));
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].word_key == "breed");
  CHECK(pairs[1].word_key == std::string("board") + std::string(text::kKeySeparator) + "boards");
  CHECK(pairs[2].word_key == "starke");
  CHECK(pairs[2].gold == Label::binary(true));

  const auto mentions = ingest::parse_retrieval_jsonl(testutil::fixture("retrieval.jsonl"));
  REQUIRE(mentions.size() == 3);
  CHECK(mentions[0].task_kind == TaskKind::retrieval);
  CHECK(mentions[0].segments[0].surface == "sweat bees");
  CHECK(mentions[2].task_kind == TaskKind::disambiguation);
  CHECK(ingest::entity_inventory(mentions) == std::vector<std::string>{"dizziness (finding)", "halictidae"});
}

TEST_CASE("every malformed canonical class yields a located diagnostic") {
  const std::string good = kGood;
  auto with = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
  };
  const std::vector<std::pair<std::string, std::string>> cases{
      {"malformed JSON", good.substr(0, good.size() - 1)},
      {"unknown field", with(R"("gold")", R"("extra":1,"gold")")},
      {"missing field", with(R"("word_key":"bank",)", "")},
      {"invalid span", with(R"("start":4,"end":8)", R"("start":8,"end":4)")},
      {"invalid span", with(R"("start":4,"end":8)", R"("start":4,"end":80)")},
      {"surface mismatch", with(R"("surface":"bank"},{)", R"("surface":"band"},{)")},
      {"unknown task_kind", with("pair_classification", "regression")},
      {"binary", with(R"({"binary":"T"})", R"({"binary":"maybe"})")},
      {"UTF-8", with("the bank", "the \xC3 bank")},
  };
  for (const auto& [needle, line] : cases) {
    CAPTURE(needle);
    const std::string content = good + "\n" + line + "\n";
    const auto diags = diagnostics_of([&] { ingest::parse_canonical_text(content, "in.jsonl"); });
    REQUIRE_FALSE(diags.empty());
    for (const auto& d : diags) {
      CHECK(d.source == "in.jsonl");
      CHECK(d.line == 2);
      CHECK(d.str().rfind("in.jsonl:2:", 0) == 0);
    }
  }
}

TEST_CASE("duplicate ids point at both lines") {
  const auto diags = diagnostics_of([] { ingest::parse_canonical_text(std::string(kGood) + "\n\n" + kGood + "\n", "f"); });
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].line == 3);
  CHECK(diags[0].message.find("line 1") != std::string::npos);
}

TEST_CASE("all diagnostics are collected, nothing is returned") {
  const auto diags = diagnostics_of([] { ingest::parse_canonical_text("{\n[]\n{}\n", "f"); });
  CHECK(diags.size() == 3);
}

TEST_CASE("malformed WiC TSV classes") {
  const std::vector<std::tuple<std::string, std::string, std::string>> cases{
      {"columns", "bank\tN\t1-1\tthe bank\n", "T\n"},
      {"i-j", "bank\tN\tone-1\tthe bank\ta bank\n", "T\n"},
      {"beyond", "bank\tN\t7-1\tthe bank\ta bank\n", "T\n"},
      {"T or F", "bank\tN\t1-1\tthe bank\ta bank\n", "yes\n"},
  };
  for (const auto& [needle, data, gold] : cases) {
    CAPTURE(needle);
    const auto diags = diagnostics_of([&] { ingest::parse_wic_tsv_text(data, gold, "wic", nullptr, "d.tsv"); });
    REQUIRE_FALSE(diags.empty());
    CHECK(diags[0].line == 1);
    CHECK(diags[0].message.find(needle) != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(ingest::parse_wic_tsv_text("bank\tN\t1-1\tthe bank\ta bank\n", "T\nF\n"),
                       doctest::Contains("line count mismatch"), ValidationError);
}

TEST_CASE("predictions round trip and reject duplicate keys") {
  std::vector<PredictionRecord> records(2);
  records[0] = {"x1", "bert", VariantKind::context, 1, Label::binary(true), std::nullopt, "type", false};
  records[1] = {"x1", "human", VariantKind::full, std::nullopt, Label::binary(false), "ann-a", std::nullopt, true};
  const std::string text = ingest::predictions_text(records);
  CHECK(ingest::parse_predictions_text(text) == records);

  const auto diags = diagnostics_of([&] {
    ingest::parse_predictions_text(text + ingest::predictions_text({records[0]}), "p.jsonl");
  });
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].line == 3);
  CHECK(diags[0].message.find("duplicate") != std::string::npos);

  CHECK_THROWS_AS(ingest::parse_predictions_text(R"({"instance_id":"x","system":"s","variant":"full","prediction":"T","guessed_surface":"g"})"),
                  ValidationError);
}

TEST_CASE("predictions are checked against the dataset label space") {
  const auto dataset = ingest::parse_retrieval_jsonl(testutil::fixture("retrieval.jsonl"));
  auto rec = [](std::string id, std::string label) {
    PredictionRecord r;
    r.instance_id = std::move(id);
    r.system = "s";
    r.prediction = Label::candidate(std::move(label));
    return r;
  };
  CHECK_NOTHROW(ingest::validate_predictions({rec("r0", "dizziness (finding)"), rec("d0", "art%1:06:00::")}, dataset));
  CHECK_THROWS_AS(ingest::validate_predictions({rec("r0", "not an entity")}, dataset), ValidationError);
  CHECK_THROWS_AS(ingest::validate_predictions({rec("d0", "art%9")}, dataset), ValidationError);
  CHECK_THROWS_WITH_AS(ingest::validate_predictions({rec("nope", "halictidae")}, dataset),
                       doctest::Contains("unknown instance id"), ValidationError);
}

TEST_CASE("manifests") {
  const auto instances = ingest::parse_pair_jsonl(testutil::fixture("pairs.jsonl"));
  const auto dir = testutil::scratch_dir("manifest");
  const auto m = ingest::make_manifest("pairs", ingest::Split::test, ingest::SourceFormat::pair_jsonl, {"en", "de"},
                                       instances);
  ingest::write_manifest(m, dir / "m.json");
  const auto back = ingest::read_manifest(dir / "m.json");
  CHECK(back.count == 3);
  CHECK(back.languages == std::vector<std::string>{"en", "de"});
  CHECK_NOTHROW(ingest::check_manifest(back, instances));
  CHECK_THROWS_AS(ingest::check_manifest(back, {instances[0]}), ValidationError);
  std::filesystem::remove_all(dir);
}
