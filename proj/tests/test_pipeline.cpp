/* Copyright 2026 The CultureMod Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <filesystem>

#include "culturemod/core/error.hpp"
#include "culturemod/core/io.hpp"
#include "culturemod/pipeline/manifest.hpp"
#include "culturemod/pipeline/pipeline.hpp"
#include "culturemod/pipeline/report.hpp"
#include "culturemod/synthetic/synthetic.hpp"

using namespace culturemod;
using namespace culturemod::pipeline;
namespace fs = std::filesystem;

namespace {

model::TrainingSchedule schedule(int steps) {
  model::TrainingSchedule s;
  s.total_steps = steps;
  s.learning_rate = 1e-3;
  s.warmup_fraction = 0.05;
  return s;
}

// A two-culture experiment small enough to run end to end in well under a second.
fs::path make_experiment(const std::string& name, const std::string& id = "") {
  const auto dir = fs::temp_directory_path() / ("culturemod_pipeline_" + name);
  fs::remove_all(dir);
  synthetic::CorpusOptions corpus;
  corpus.cultures = {CultureId("US"), CultureId("AU")};
  corpus.articles_per_culture = 60;
  corpus.events = {15, 5, 25};
  corpus.seed = 3;
  synthetic::write_corpus(dir / "corpus", corpus);

  ExperimentManifest m;
  m.experiment_id = id.empty() ? name : id;
  m.cultures = corpus.cultures;
  m.data.articles = "corpus/articles.jsonl";
  m.data.events = "corpus/events.jsonl";
  m.data.summarizer = "reference:corpus/summaries.jsonl";
  m.model.config.hidden_dim = 32;
  m.model.config.num_layers = 1;
  m.model.config.num_heads = 2;
  m.model.config.ffn_dim = 64;
  m.model.config.max_sequence_length = 32;
  m.model.vocab_budget = 2000;
  m.schedules.stage1 = schedule(20);
  m.schedules.stage2 = schedule(10);
  m.schedules.stage2_all = schedule(10);
  m.schedules.head.iterations = 5;
  m.evaluation.decoding.beam_width = 2;
  m.evaluation.decoding.max_output_tokens = 12;
  m.evaluation.heatmap_holdout = 10;
  m.evaluation.study_items = 3;
  m.evaluation.kendall_bootstrap = 1000;
  m.evaluation.kendall_permutation = 1000;
  m.seeds = Seeds::from_root(42);
  m.base_dir = dir;
  save_manifest(m, dir / "manifest.json");
  return dir;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::io;
}

}  // namespace

TEST_CASE("manifest validation") {
  const auto dir = make_experiment("validate");
  auto m = load_manifest(dir / "manifest.json");
  CHECK_NOTHROW(m.validate());
  auto empty = m;
  empty.cultures.clear();
  CHECK_THROWS_AS(empty.validate(), Error);
  auto dup = m;
  dup.cultures = {CultureId("US"), CultureId("US")};
  CHECK_THROWS_AS(dup.validate(), Error);
  auto missing = m;
  missing.data.events = "corpus/nope.jsonl";
  CHECK_THROWS_AS(missing.validate(), Error);
  const auto back = ExperimentManifest::from_json(m.to_json(), dir);
  CHECK(back.to_json() == m.to_json());
  fs::remove_all(dir);
}

TEST_CASE("a root seed expands to all per-stage seeds") {
  const auto a = Seeds::from_root(7);
  const auto b = Seeds::from_root(7);
  CHECK(a.split == b.split);
  CHECK(a.split != a.init);
  CHECK(a.stage1 != Seeds::from_root(8).stage1);
}

TEST_CASE("pipeline runs end to end, then skips every stage on rerun") {
  const auto dir = make_experiment("rerun");
  auto m = load_manifest(dir / "manifest.json");
  const auto first = run_pipeline(m, dir / "manifest.json");
  CHECK(first.executed.size() == std::size(kStages));
  CHECK(first.skipped.empty());
  CHECK(fs::exists(dir / "work" / "report" / "report.txt"));
  for (const char* c : {"US", "AU"}) CHECK(fs::exists(dir / "work" / "stage3" / c / "manifest.json"));

  auto again = load_manifest(dir / "manifest.json");
  const auto second = run_pipeline(again, dir / "manifest.json");
  CHECK(second.executed.empty());
  CHECK(second.skipped.size() == std::size(kStages));

  // Changing a late setting reruns only the stages downstream of it.
  again.evaluation.study_items = 2;
  const auto third = run_pipeline(again, dir / "manifest.json");
  CHECK(third.executed == std::vector<std::string>{"evaluate", "report"});

  // Damaged outputs are rebuilt.
  fs::remove(dir / "work" / "report" / "report.txt");
  const auto fourth = run_pipeline(again, dir / "manifest.json");
  CHECK(fourth.executed == std::vector<std::string>{"report"});

  RunOptions force;
  force.force = true;
  force.until = "dataset";
  const auto fifth = run_pipeline(again, dir / "manifest.json", force);
  CHECK(fifth.executed == std::vector<std::string>{"ingest", "dataset"});
  fs::remove_all(dir);
}

TEST_CASE("identical manifests give identical artifacts and reports") {
  const auto a = make_experiment("det_a", "det");
  const auto b = make_experiment("det_b", "det");
  auto ma = load_manifest(a / "manifest.json");
  auto mb = load_manifest(b / "manifest.json");
  run_pipeline(ma, a / "manifest.json");
  run_pipeline(mb, b / "manifest.json");
  for (const char* stage : kStages) {
    const std::string name = stage;
    CAPTURE(name);
    CHECK(ma.stages.at(stage).outputs == mb.stages.at(stage).outputs);
    CHECK(stage_digest(ma, stage) == stage_digest(mb, stage));
  }
  const auto ra = io::read_file(a / "work" / "report" / "report.txt");
  CHECK(ra == io::read_file(b / "work" / "report" / "report.txt"));
  CHECK(render_report(ma) == ra);
  CHECK(ra.find("ROUGE") != std::string::npos);
  CHECK(ra.find("AUC=") != std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("report lists missing artifacts") {
  const auto dir = make_experiment("missing");
  auto m = load_manifest(dir / "manifest.json");
  RunOptions until;
  until.until = "stage3";
  run_pipeline(m, dir / "manifest.json", until);
  try {
    render_report(m);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_found);
    CHECK(std::string(e.what()).find("heatmap.json") != std::string::npos);
    CHECK(std::string(e.what()).find("auroc.json") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("a failing stage is named and earlier stages are kept") {
  const auto dir = make_experiment("failing");
  auto m = load_manifest(dir / "manifest.json");
  m.data.rationale_llm = "no-such-backend";
  try {
    run_pipeline(m, dir / "manifest.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("stage dataset failed", 0) == 0);
    CHECK(e.kind() == ErrorKind::configuration);
  }
  const auto saved = load_manifest(dir / "manifest.json");
  CHECK(saved.stages.contains("ingest"));
  CHECK(!saved.stages.contains("dataset"));
  fs::remove_all(dir);
}

TEST_CASE("a second run on the same work directory is refused") {
  const auto dir = make_experiment("locked");
  auto m = load_manifest(dir / "manifest.json");
  fs::create_directories(dir / "work");
  const int fd = ::open((dir / "work" / ".lock").c_str(), O_RDWR | O_CREAT, 0644);
  REQUIRE(fd >= 0);
  REQUIRE(::flock(fd, LOCK_EX | LOCK_NB) == 0);
  CHECK(kind_of([&] { run_pipeline(m, dir / "manifest.json"); }) == ErrorKind::conflict);
  ::flock(fd, LOCK_UN);
  ::close(fd);
  RunOptions until;
  until.until = "ingest";
  CHECK(run_pipeline(m, dir / "manifest.json", until).executed.size() == 1);
  fs::remove_all(dir);
}

TEST_CASE("unknown stage names are rejected") {
  const auto dir = make_experiment("badstage");
  auto m = load_manifest(dir / "manifest.json");
  RunOptions o;
  o.until = "stage9";
  CHECK_THROWS_AS(run_pipeline(m, dir / "manifest.json", o), Error);
  fs::remove_all(dir);
}
