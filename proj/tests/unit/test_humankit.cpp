#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <thread>

#include "helpers.hpp"
#include "lexbias/error.hpp"
#include "lexbias/humankit.hpp"
#include "lexbias/ingest.hpp"
#include "lexbias/synth.hpp"

using namespace lexbias;
using humankit::AnnotationStore;

namespace {

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("id-" + std::to_string(i));
  return out;
}

humankit::SampleRequest request(std::uint64_t seed) {
  humankit::SampleRequest req;
  req.dataset = "wic";
  req.variant = VariantKind::context;
  req.annotators = {"ann-a", "ann-b"};
  req.seed = seed;
  return req;
}

std::vector<Instance> dataset(std::size_t n) {
  synth::SynthSpec spec;
  spec.n_words = n / 10;
  spec.examples_per_word = 10;
  spec.seed = 1;
  return synth::generate(spec).test;
}

humankit::Judgment judgment(const humankit::AnnotationBatch& b, const std::string& id, bool label) {
  humankit::Judgment j;
  j.batch_id = b.batch_id;
  j.instance_id = id;
  j.annotator = b.annotator;
  j.prediction = Label::binary(label);
  j.submitted_at = "2026-01-01T00:00:00Z";
  return j;
}

}  // namespace

TEST_CASE("sampling sizes and overlap over many seeds") {
  const auto pool = ids(1000);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto [a, b] = humankit::sample_batches(pool, request(seed));
    REQUIRE(a.instance_ids.size() == 100);
    REQUIRE(b.instance_ids.size() == 100);
    std::set<std::string> sa(a.instance_ids.begin(), a.instance_ids.end());
    std::set<std::string> sb(b.instance_ids.begin(), b.instance_ids.end());
    CHECK(sa.size() == 100);
    std::vector<std::string> shared;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(shared));
    CHECK(shared.size() == 50);
    CHECK(std::set<std::string>(a.overlap_ids.begin(), a.overlap_ids.end()) ==
          std::set<std::string>(shared.begin(), shared.end()));
    CHECK(a.sibling_id == b.batch_id);
    CHECK(b.sibling_id == a.batch_id);
    CHECK(a.token != b.token);
  }
}

TEST_CASE("sampling is deterministic and seed-sensitive") {
  const auto pool = ids(300);
  const auto first = humankit::sample_batches(pool, request(7));
  const auto second = humankit::sample_batches(pool, request(7));
  CHECK(first == second);
  CHECK(humankit::to_json(first.first).dump() == humankit::to_json(second.first).dump());
  CHECK(humankit::sample_batches(pool, request(8)).first.instance_ids != first.first.instance_ids);
}

TEST_CASE("sampling preconditions") {
  CHECK_THROWS_AS(humankit::sample_batches(ids(149), request(1)), ValidationError);
  CHECK_NOTHROW(humankit::sample_batches(ids(150), request(1)));
  auto req = request(1);
  req.overlap = 101;
  CHECK_THROWS_AS(humankit::sample_batches(ids(500), req), ValidationError);
  req = request(1);
  req.annotators = {"same", "same"};
  CHECK_THROWS_AS(humankit::sample_batches(ids(500), req), ValidationError);
  auto dup = ids(200);
  dup.push_back("id-0");
  CHECK_THROWS_AS(humankit::sample_batches(dup, request(1)), ValidationError);
}

TEST_CASE("batch and judgment JSON round trip") {
  const auto [a, b] = humankit::sample_batches(ids(200), request(3));
  CHECK(humankit::batch_from_json(humankit::to_json(a)) == a);
  auto j = judgment(a, a.instance_ids[0], true);
  j.guessed_surface = "type";
  j.elapsed_ms = 1200;
  CHECK(humankit::judgment_from_json(humankit::to_json(j)) == j);
}

TEST_CASE("store serves masked items, records, replays and exports") {
  const auto dir = testutil::scratch_dir("store");
  const auto data = dataset(150);
  std::pair<humankit::AnnotationBatch, humankit::AnnotationBatch> batches;
  {
    AnnotationStore store({dir, {}, 10});
    store.add_dataset("wic", data);
    batches = store.create_batches(request(5));
    const auto& a = batches.first;

    auto task = store.serve_next(a.batch_id, a.annotator);
    REQUIRE(task);
    CHECK(task->instance_id == a.instance_ids[0]);
    CHECK(task->position == 0);
    CHECK(task->total == 100);
    CHECK(task->label_space == std::vector<std::string>{"T", "F"});
    CHECK(task->accepts_guess);
    const auto& inst = *std::find_if(data.begin(), data.end(), [&](const Instance& i) { return i.id == task->instance_id; });
    for (const auto& seg : task->segments) {
      CHECK(seg.text.find(inst.segments[0].surface) == std::string::npos);
      CHECK(seg.text.find("[MASK]") != std::string::npos);
    }

    CHECK(store.record_judgment(judgment(a, a.instance_ids[0], true)) == humankit::RecordOutcome::stored);
    auto again = judgment(a, a.instance_ids[0], true);
    again.submitted_at = "later";
    CHECK(store.record_judgment(again) == humankit::RecordOutcome::duplicate);
    CHECK_THROWS_AS(store.record_judgment(judgment(a, a.instance_ids[0], false)), Conflict);
    CHECK_THROWS_AS(store.record_judgment(judgment(a, "not-in-batch", true)), NotFound);
    const auto& b_ids = batches.second.instance_ids;
    const auto only_b = *std::find_if(b_ids.begin(), b_ids.end(), [&](const std::string& id) {
      return std::find(a.instance_ids.begin(), a.instance_ids.end(), id) == a.instance_ids.end();
    });
    CHECK_THROWS_AS(store.record_judgment(judgment(a, only_b, true)), NotFound);
    auto wrong_space = judgment(a, a.instance_ids[1], true);
    wrong_space.prediction = Label::candidate("maybe");
    CHECK_THROWS_AS(store.record_judgment(wrong_space), ValidationError);
    CHECK_THROWS_AS(store.serve_next("nope", "x"), NotFound);

    CHECK(store.serve_next(a.batch_id, a.annotator)->instance_id == a.instance_ids[1]);
    CHECK(store.progress(a.batch_id).done == 1);
  }

  // Simulate a crash mid-write: an unterminated trailing line is ignored.
  {
    std::ofstream torn(dir / (batches.first.batch_id + ".journal.jsonl"), std::ios::app);
    torn << R"({"batch_id":"torn)";
  }

  AnnotationStore store({dir, {}, 10});
  store.add_dataset("wic", data);
  store.open();
  const auto& a = batches.first;
  const auto& b = batches.second;
  CHECK(store.batch_ids().size() == 2);
  CHECK(store.find_batch(a.batch_id) == a);
  CHECK(store.check_token(a.batch_id, a.token));
  CHECK_FALSE(store.check_token(a.batch_id, b.token));
  CHECK(store.progress(a.batch_id).done == 1);

  for (const auto& id : a.instance_ids) store.record_judgment(judgment(a, id, true));
  for (const auto& id : b.instance_ids) store.record_judgment(judgment(b, id, false));
  CHECK_FALSE(store.serve_next(a.batch_id, a.annotator));

  const std::vector<std::string> both{a.batch_id, b.batch_id};
  const auto records = store.export_judgments(both);
  CHECK(records.size() == 200);
  std::set<std::string> distinct;
  std::size_t flagged = 0;
  for (const auto& r : records) {
    distinct.insert(r.instance_id);
    flagged += r.overlap;
    CHECK(r.system == "human");
    CHECK(r.variant == VariantKind::context);
    CHECK(r.annotator);
  }
  CHECK(distinct.size() == 150);
  CHECK(flagged == 100);
  std::filesystem::remove_all(dir);
}

TEST_CASE("concurrent writes to one batch stay consistent") {
  const auto dir = testutil::scratch_dir("concurrent");
  AnnotationStore store({dir, {}, 10});
  store.add_dataset("wic", dataset(150));
  const auto [a, b] = store.create_batches(request(9));
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (std::size_t i = t; i < a.instance_ids.size(); i += 2) store.record_judgment(judgment(a, a.instance_ids[i], true));
    });
  }
  for (auto& t : threads) t.join();
  CHECK(store.progress(a.batch_id).done == 100);
  CHECK(store.judgments(a.batch_id).size() == 100);

  AnnotationStore replay({dir, {}, 10});
  replay.add_dataset("wic", dataset(150));
  replay.open();
  CHECK(replay.progress(a.batch_id).done == 100);
  std::filesystem::remove_all(dir);
}

TEST_CASE("retrieval items get a shortlist containing the gold entity") {
  const auto dir = testutil::scratch_dir("retrieval");
  synth::SynthSpec spec;
  spec.task_kind = TaskKind::retrieval;
  spec.n_words = 30;
  spec.examples_per_word = 5;
  spec.senses_per_word = 3;
  const auto data = synth::generate(spec).test;
  AnnotationStore store({dir, {}, 5});
  store.add_dataset("wiki", data);
  auto req = request(4);
  req.dataset = "wiki";
  req.variant = VariantKind::full;
  const auto [a, b] = store.create_batches(req);
  const auto task = store.serve_next(a.batch_id, a.annotator);
  REQUIRE(task);
  const auto& inst = *std::find_if(data.begin(), data.end(), [&](const Instance& i) { return i.id == task->instance_id; });
  CHECK(task->candidates.size() == 5);
  CHECK(std::find(task->candidates.begin(), task->candidates.end(), inst.gold.text()) != task->candidates.end());
  CHECK_FALSE(task->accepts_guess);
  const auto searched = store.serve_next(a.batch_id, a.annotator, "W0001");
  REQUIRE(searched);
  CHECK_FALSE(searched->search_results.empty());
  for (const auto& r : searched->search_results) CHECK(r.find("w0001") != std::string::npos);
  std::filesystem::remove_all(dir);
}
