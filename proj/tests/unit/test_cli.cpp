#include <doctest.h>
#include <nlohmann/json.hpp>

#include <sstream>

#include "cli.hpp"
#include "helpers.hpp"
#include "lexbias/ingest.hpp"

using namespace lexbias;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("synth, score, bias and report end to end") {
  const auto dir = testutil::scratch_dir("cli");
  const std::string ws = dir.string();

  auto r = run({"--workspace", ws, "synth", "--seed", "3", "--p", "1", "--q", "0", "--n-words", "40",
                "--examples-per-word", "10", "--policy", "word_lookup", "--output-dir", "s"});
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(dir / "s" / "predictions.jsonl"));

  r = run({"--workspace", ws, "score", "--predictions", "s/predictions.jsonl", "--gold", "s/test.jsonl", "--dataset",
           "planted", "--output", "scores.json"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("planted\tword_lookup\tfull\taccuracy\t1\t1.000000") != std::string::npos);

  r = run({"--workspace", ws, "--json", "bias", "--scores", "scores.json", "--output", "bias.json"});
  REQUIRE(r.code == 0);
  const auto reports = nlohmann::json::parse(r.out);
  REQUIRE(reports.size() == 1);
  CHECK(std::abs(reports[0]["bias_w"].get<double>() - 1.0) < 1e-9);
  CHECK(std::abs(reports[0]["bias_c"].get<double>()) < 1e-9);

  r = run({"--workspace", ws, "entropy", "--input", "s/test.jsonl", "--output", "entropy.json"});
  REQUIRE(r.code == 0);

  r = run({"--workspace", ws, "report", "--scores", "scores.json", "--entropy", "entropy.json", "--output-dir", "out"});
  REQUIRE(r.code == 0);
  for (const char* name : {"bias_scatter.svg", "baselines.svg", "gaps.svg", "summary.json", "summary.md"}) {
    CHECK(std::filesystem::exists(dir / "out" / name));
  }
  const auto summary = nlohmann::json::parse(ingest::read_file(dir / "out" / "summary.json"));
  CHECK(summary["metadata"]["input_digests"].contains("scores.json"));

  // Separate prediction files per variant plus an explicit label score.
  r = run({"--workspace", ws, "bias", "--gold", "s/test.jsonl", "--full", "s/predictions.jsonl", "--label-value", "0.5"});
  CHECK(r.code == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("convert, perturb and sample") {
  const auto dir = testutil::scratch_dir("cli-convert");
  const std::string ws = dir.string();
  auto r = run({"--workspace", ws, "convert", "--format", "wic_tsv", "--input", testutil::fixture("wic.data.txt").string(),
                "--gold", testutil::fixture("wic.gold.txt").string(), "--output", "wic.jsonl", "--manifest", "wic.manifest.json",
                "--language", "en"});
  REQUIRE(r.code == 0);
  CHECK(ingest::read_manifest(dir / "wic.manifest.json").count == 4);

  r = run({"--workspace", ws, "perturb", "--input", "wic.jsonl", "--variant", "context", "--output", "ctx.jsonl"});
  REQUIRE(r.code == 0);
  const auto text = ingest::read_file(dir / "ctx.jsonl");
  CHECK(text.find("Google represents a new [MASK] of entrepreneurs .") != std::string::npos);

  ingest::write_file(dir / "guesses.jsonl",
                     R"({"instance_id":"wic-0","system":"human","variant":"context","prediction":"T","annotator":"a","guessed_surface":"type"})"
                     "\n");
  r = run({"--workspace", ws, "perturb", "--input", "wic.jsonl", "--variant", "guessed_word", "--guesses", "guesses.jsonl",
           "--output", "guessed.jsonl"});
  REQUIRE(r.code == 0);
  CHECK(ingest::read_file(dir / "guessed.jsonl").find("Google represents a new type of entrepreneurs .") != std::string::npos);

  r = run({"--workspace", ws, "synth", "--seed", "1", "--n-words", "20", "--examples-per-word", "10", "--output-dir", "s"});
  REQUIRE(r.code == 0);
  r = run({"--workspace", ws, "sample", "--input", "s/test.jsonl", "--seed", "4", "--annotators", "x,y", "--store", "store",
           "--output", "batches.json"});
  REQUIRE(r.code == 0);
  const auto batches = nlohmann::json::parse(ingest::read_file(dir / "batches.json"))["batches"];
  CHECK(batches[0]["instance_ids"].size() == 100);
  std::filesystem::remove_all(dir);
}

TEST_CASE("agreement over overlap-flagged ids") {
  const auto dir = testutil::scratch_dir("cli-agree");
  std::string lines;
  for (int i = 0; i < 50; ++i) {
    const std::string id = "i" + std::to_string(i);
    lines += R"({"instance_id":")" + id + R"(","system":"human","variant":"context","prediction":"T","annotator":"a","overlap":true})" "\n";
    lines += R"({"instance_id":")" + id + R"(","system":"human","variant":"context","prediction":")" + (i < 44 ? "T" : "F") +
             R"(","annotator":"b","overlap":true})" "\n";
  }
  ingest::write_file(dir / "human.jsonl", lines);
  const auto r = run({"--workspace", dir.string(), "agree", "--predictions", "human.jsonl"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("context\ta\tb\t50\t88.0") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("exit codes") {
  const auto dir = testutil::scratch_dir("cli-errors");
  const std::string ws = dir.string();
  run({"--workspace", ws, "synth", "--seed", "1", "--n-words", "5", "--examples-per-word", "2", "--output-dir", "s"});
  ingest::write_file(dir / "bad.jsonl", R"({"instance_id":"ghost","system":"s","variant":"full","prediction":"T"})" "\n");
  auto r = run({"--workspace", ws, "score", "--predictions", "bad.jsonl", "--gold", "s/test.jsonl"});
  CHECK(r.code == cli::kValidation);
  CHECK(r.err.find("ghost") != std::string::npos);
  CHECK(r.err.find("bad.jsonl") != std::string::npos);

  CHECK(run({"frobnicate"}).code == cli::kUsage);
  CHECK(run({"score", "--gold"}).code == cli::kUsage);
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"--help"}).code == cli::kOk);
  CHECK(run({"--workspace", ws, "entropy", "--input", "missing.jsonl"}).code == cli::kValidation);
  std::filesystem::remove_all(dir);
}
