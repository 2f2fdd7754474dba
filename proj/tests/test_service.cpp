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

#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <thread>

#include "culturemod/core/error.hpp"
#include "culturemod/core/io.hpp"
#include "culturemod/core/random.hpp"
#include "culturemod/model/stages.hpp"
#include "culturemod/model/tokenizer.hpp"
#include "culturemod/service/annotation_store.hpp"
#include "culturemod/service/config.hpp"
#include "culturemod/service/http_server.hpp"
#include "culturemod/service/moderation_service.hpp"
#include "culturemod/service/registry.hpp"

using namespace culturemod;
using namespace culturemod::service;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

model::CulturalModelBundle tuned_bundle(const std::string& culture, std::uint64_t seed) {
  static const auto tok = std::make_shared<model::WordTokenizer>(model::WordTokenizer::train(
      {"those people are vermin and a threat", "harmful slur toward a group", "weather town calm"}, 100));
  model::EncoderDecoderConfig c;
  c.vocab_size = tok->vocab_size();
  c.hidden_dim = 16;
  c.num_layers = 1;
  c.num_heads = 2;
  c.ffn_dim = 32;
  c.max_sequence_length = 16;
  auto base = model::init_base_model(c, tok, seed);
  ingestion::MediaDietDataset diet;
  diet.culture = CultureId(culture);
  diet.pairs.push_back({"1", "those people are vermin", "vermin", "x"});
  model::TrainingSchedule s;
  s.total_steps = 1;
  s.batch_size = 1;
  auto d = model::finetune_summarization(base, diet, s).bundle;
  dataset::ModerationDataset ds;
  ds.records.push_back({"r", "those people are vermin", 1, "harmful slur", CultureId(culture), "hate", false});
  return model::finetune_rationales(d, ds, model::RationaleMode::stratified, s).bundle;
}

// Classifier with a constant probability.
std::shared_ptr<const model::CulturalModelBundle> constant_classifier(const std::string& culture, double p) {
  auto b = tuned_bundle(culture, stable_hash(culture));
  model::LogisticHead h;
  h.weights.assign(16, 0.0);
  h.bias = std::log(p / (1.0 - p));
  b.head = h;
  b.stage = model::Stage::classifier_ready;
  return std::make_shared<const model::CulturalModelBundle>(std::move(b));
}

std::shared_ptr<const model::CulturalModelBundle> random_classifier(const std::string& culture) {
  auto b = tuned_bundle(culture, stable_hash(culture) + 1);
  auto rng = make_rng(stable_hash(culture));
  std::normal_distribution<double> n(0.0, 1.0);
  model::LogisticHead h;
  for (int i = 0; i < 16; ++i) h.weights.push_back(n(rng));
  h.bias = 0.1;
  b.head = h;
  b.stage = model::Stage::classifier_ready;
  return std::make_shared<const model::CulturalModelBundle>(std::move(b));
}

struct DiskFixture {
  fs::path root;
  DiskFixture() : root(fs::temp_directory_path() / "culturemod_registry") {
    fs::remove_all(root);
    for (const char* c : {"US", "AU", "NG"}) model::save_bundle(*random_classifier(c), root / c);
    model::save_bundle(tuned_bundle("IN", 3), root / "IN");
    auto diet = tuned_bundle("BR", 4);
    diet.stage = model::Stage::media_diet;
    model::save_bundle(diet, root / "BR");
    fs::create_directories(root / "JP");
  }
  ~DiskFixture() { fs::remove_all(root); }
};

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::io;
}

eval::StudySet fixture_study() {
  eval::StudySet s;
  s.target_culture = CultureId("US");
  for (int i = 0; i < 3; ++i) {
    eval::StudyQuestion q;
    q.item_id = "item" + std::to_string(i);
    q.content = "those people are vermin " + std::to_string(i);
    q.explanations = {"slur toward a group", "harmful language"};
    q.assignment = {{"A", CultureId(i % 2 ? "US" : "AU")}, {"B", CultureId(i % 2 ? "AU" : "US")}};
    s.questions.push_back(q);
  }
  return s;
}

void collect_keys(const json& j, std::set<std::string>& keys) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      keys.insert(k);
      collect_keys(v, keys);
    }
  } else if (j.is_array()) {
    for (const auto& v : j) collect_keys(v, keys);
  }
}

struct RunningServer {
  std::unique_ptr<HttpServer> server;
  std::thread thread;
  int port = 0;
  RunningServer(std::shared_ptr<ModerationService> svc, std::shared_ptr<AnnotationStore> store,
                std::shared_ptr<const StudyCoordinator> study, ServiceConfig cfg) {
    cfg.port = 0;
    server = std::make_unique<HttpServer>(std::move(svc), std::move(store), std::move(study), cfg);
    port = server->bind();
    thread = std::thread([this] { server->serve(); });
    for (int i = 0; i < 200 && !server->running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ~RunningServer() {
    server->stop();
    thread.join();
  }
};

model::DecodingConfig quick() {
  model::DecodingConfig d;
  d.beam_width = 1;
  d.max_output_tokens = 4;
  return d;
}

}  // namespace

TEST_CASE("registry lists ready and training bundles from disk") {
  DiskFixture f;
  BundleRegistry reg(f.root);
  const auto list = reg.list();
  REQUIRE(list.size() == 6);
  std::map<std::string, CultureListing> by;
  for (const auto& l : list) by[l.culture.code()] = l;
  CHECK(by["US"].stage == model::Stage::classifier_ready);
  CHECK(by["IN"].stage == model::Stage::rationale_tuned);
  CHECK(by["BR"].stage == model::Stage::media_diet);
  CHECK(!by["JP"].stage.has_value());
  CHECK(!by["US"].loaded);
  CHECK(reg.contains(CultureId("US")));
  CHECK(!reg.contains(CultureId("ZA")));
  const auto us = reg.get(CultureId("US"));
  CHECK(reg.get(CultureId("US")) == us);
  CHECK(kind_of([&] { reg.get(CultureId("ZA")); }) == ErrorKind::not_found);
  CHECK(kind_of([&] { reg.get(CultureId("JP")); }) == ErrorKind::unavailable);
  const auto again = reg.reload(CultureId("US"));
  CHECK(again != us);
  CHECK(again->version() == us->version());
}

TEST_CASE("assess returns one result per culture in request order") {
  DiskFixture f;
  auto reg = std::make_shared<BundleRegistry>(f.root);
  ModerationService svc(reg, quick());
  ModerationQuery q;
  q.content = "those people are vermin";
  q.cultures = {CultureId("NG"), CultureId("US"), CultureId("AU")};
  const auto out = svc.assess(q);
  REQUIRE(out.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(out[i].culture == q.cultures[i]);
    CHECK(!out[i].explanation.has_value());
    const auto direct = model::predict_violation(*reg->get(q.cultures[i]), q.content);
    CHECK(std::abs(out[i].probability - direct) < 1e-12);
  }
  q.want_explanations = true;
  for (const auto& a : svc.assess(q)) CHECK(a.explanation.has_value());

  q.cultures = {CultureId("US"), CultureId("IN")};
  CHECK(kind_of([&] { svc.assess(q); }) == ErrorKind::unavailable);
  q.cultures = {CultureId("ZA")};
  CHECK(kind_of([&] { svc.assess(q); }) == ErrorKind::not_found);
  q.cultures = {};
  CHECK(kind_of([&] { svc.assess(q); }) == ErrorKind::invalid_argument);
  q.cultures = {CultureId("US")};
  q.content = "   ";
  CHECK(kind_of([&] { svc.assess(q); }) == ErrorKind::empty_input);
}

TEST_CASE("reasoning flags disagreement against the threshold") {
  auto reg = std::make_shared<BundleRegistry>();
  reg->insert(CultureId("US"), constant_classifier("US", 0.1));
  reg->insert(CultureId("AU"), constant_classifier("AU", 0.9));
  ModerationQuery q;
  q.content = "those people are vermin";
  q.cultures = {CultureId("US"), CultureId("AU")};
  q.moderator_culture = CultureId("US");

  ModerationService low(reg, quick(), ReasonOptions{0.3});
  const auto t = low.reason(q);
  REQUIRE(t.steps.size() == 2);
  CHECK(t.steps[0].tool_invoked == CultureId("US"));
  CHECK(t.steps[0].observation.probability == doctest::Approx(0.1));
  CHECK(t.steps[1].observation.probability == doctest::Approx(0.9));
  CHECK(t.steps[0].observation.explanation.has_value());
  CHECK(t.disagreement);
  CHECK(!t.degraded);
  CHECK(t.summary.find("Disagreement") != std::string::npos);
  CHECK(t.summary.find("Moderator culture: United States (US)") != std::string::npos);

  ModerationService high(reg, quick(), ReasonOptions{0.9});
  const auto u = high.reason(q);
  CHECK(!u.disagreement);
  CHECK(u.summary.find("Disagreement") == std::string::npos);

  q.cultures = {CultureId("US")};
  CHECK(!low.reason(q).disagreement);
}

TEST_CASE("summaries fall back to the template when the generator fails or omits a culture") {
  auto reg = std::make_shared<BundleRegistry>();
  reg->insert(CultureId("US"), constant_classifier("US", 0.2));
  reg->insert(CultureId("AU"), constant_classifier("AU", 0.3));
  struct Down final : llm::TextGenerator {
    std::string id() const override { return "down"; }
    std::string generate(const llm::ChatPrompt&) override { throw Error(ErrorKind::retriable, "down"); }
  };
  struct Vague final : llm::TextGenerator {
    std::string id() const override { return "vague"; }
    std::string generate(const llm::ChatPrompt&) override { return "Looks fine in US."; }
  };
  struct Good final : llm::TextGenerator {
    std::string id() const override { return "good"; }
    std::string generate(const llm::ChatPrompt&) override { return "US and AU agree it is mild."; }
  };
  ModerationQuery q;
  q.content = "those people";
  q.cultures = {CultureId("US"), CultureId("AU")};
  for (auto g : std::vector<std::shared_ptr<llm::TextGenerator>>{std::make_shared<Down>(), std::make_shared<Vague>()}) {
    ModerationService svc(reg, quick(), {}, g);
    const auto t = svc.reason(q);
    CHECK(t.degraded);
    CHECK(t.summary == template_summary(t.steps, std::nullopt, 0.25));
  }
  ModerationService svc(reg, quick(), {}, std::make_shared<Good>());
  const auto t = svc.reason(q);
  CHECK(!t.degraded);
  CHECK(t.summary == "US and AU agree it is mild.");
}

TEST_CASE("annotation stores reject duplicate sessions") {
  eval::AnnotationSession s;
  s.session_id = "s1";
  s.annotator_culture = CultureId("US");
  s.ranking = {"A", "B"};
  s.model_assignment = {{"A", CultureId("US")}, {"B", CultureId("AU")}};
  MemoryAnnotationStore mem;
  CHECK(mem.append(s) == "s1");
  CHECK(kind_of([&] { mem.append(s); }) == ErrorKind::conflict);
  CHECK(mem.contains("s1"));

  const auto path = fs::temp_directory_path() / "culturemod_annotations.jsonl";
  fs::remove(path);
  {
    JsonlAnnotationStore store(path);
    store.append(s);
    CHECK(kind_of([&] { store.append(s); }) == ErrorKind::conflict);
  }
  JsonlAnnotationStore reopened(path);
  CHECK(reopened.all().size() == 1);
  CHECK(kind_of([&] { reopened.append(s); }) == ErrorKind::conflict);
  fs::remove(path);
}

TEST_CASE("error kinds map to HTTP status codes") {
  CHECK(http_status(ErrorKind::invalid_argument) == 400);
  CHECK(http_status(ErrorKind::empty_input) == 400);
  CHECK(http_status(ErrorKind::not_found) == 404);
  CHECK(http_status(ErrorKind::conflict) == 409);
  CHECK(http_status(ErrorKind::unavailable) == 503);
  CHECK(http_status(ErrorKind::retriable) == 503);
  CHECK(http_status(ErrorKind::io) == 500);
  CHECK(http_status(ErrorKind::diverged) == 500);
}

TEST_CASE("HTTP contract") {
  DiskFixture f;
  auto reg = std::make_shared<BundleRegistry>(f.root);
  auto svc = std::make_shared<ModerationService>(reg, quick());
  auto store = std::make_shared<MemoryAnnotationStore>();
  auto study = std::make_shared<const StudyCoordinator>(std::vector<eval::StudySet>{fixture_study()});
  ServiceConfig cfg;
  cfg.kendall_bootstrap_iters = 200;
  cfg.kendall_permutation_iters = 200;
  RunningServer rs(svc, store, study, cfg);
  httplib::Client cli("127.0.0.1", rs.port);

  auto health = cli.Get("/v1/health");
  REQUIRE(health);
  CHECK(health->status == 200);

  SUBCASE("assess parity with direct calls") {
    const std::vector<std::string> snippets = {"those people are vermin", "weather town calm", "a threat"};
    for (const auto& s : snippets) {
      const json body = {{"content", s}, {"cultures", {"US", "NG"}}};
      auto res = cli.Post("/v1/assess", body.dump(), "application/json");
      REQUIRE(res);
      CHECK(res->status == 200);
      const auto j = json::parse(res->body);
      REQUIRE(j.size() == 2);
      CHECK(j[0]["culture"] == "US");
      CHECK(j[1]["culture"] == "NG");
      CHECK(j[0]["explanation"].is_null());
      CHECK(std::abs(j[0]["probability"].get<double>() - model::predict_violation(*reg->get(CultureId("US")), s)) < 1e-9);
      CHECK(std::abs(j[1]["probability"].get<double>() - model::predict_violation(*reg->get(CultureId("NG")), s)) < 1e-9);
    }
  }

  SUBCASE("error statuses") {
    auto bad = cli.Post("/v1/assess", "{not json", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    CHECK(json::parse(bad->body).contains("error"));
    auto unknown = cli.Post("/v1/assess", json{{"content", "x"}, {"cultures", {"ZA"}}}.dump(), "application/json");
    CHECK(unknown->status == 404);
    auto training = cli.Post("/v1/assess", json{{"content", "x"}, {"cultures", {"IN"}}}.dump(), "application/json");
    CHECK(training->status == 503);
    auto empty = cli.Post("/v1/assess", json{{"content", ""}, {"cultures", {"US"}}}.dump(), "application/json");
    CHECK(empty->status == 400);
  }

  SUBCASE("reason trace shape") {
    auto res = cli.Post("/v1/reason",
                        json{{"content", "those people"}, {"cultures", {"US", "AU"}}, {"moderator_culture", "AU"}}.dump(),
                        "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto j = json::parse(res->body);
    CHECK(j["steps"].size() == 2);
    CHECK(j["steps"][0]["tool_invoked"] == "US");
    CHECK(j["steps"][0]["observation"]["explanation"].is_string());
    CHECK(j.contains("summary"));
    CHECK(j.contains("disagreement"));
  }

  SUBCASE("cultures listing and reload") {
    auto res = cli.Get("/v1/cultures");
    REQUIRE(res);
    const auto j = json::parse(res->body);
    CHECK(j.size() == 6);
    int ready = 0;
    for (const auto& row : j) ready += row["ready"].get<bool>();
    CHECK(ready == 3);
    auto rl = cli.Post("/v1/admin/reload", json{{"culture", "US"}}.dump(), "application/json");
    REQUIRE(rl);
    CHECK(rl->status == 200);
    CHECK(json::parse(rl->body)["reloaded"] == true);
    auto missing = cli.Post("/v1/admin/reload", json{{"culture", "ZA"}}.dump(), "application/json");
    CHECK(missing->status == 404);
  }

  SUBCASE("study flow without leaking assignments") {
    std::set<std::string> seen;
    for (int i = 0; i < 3; ++i) {
      auto res = cli.Get("/v1/study/next?annotator=ann1&culture=US");
      REQUIRE(res);
      CHECK(res->status == 200);
      const auto q = json::parse(res->body);
      CHECK(q["done"] == false);
      std::set<std::string> keys;
      collect_keys(q, keys);
      CHECK(!keys.contains("assignment"));
      CHECK(!keys.contains("model_assignment"));
      CHECK(res->body.find("assignment") == std::string::npos);
      seen.insert(q["item_id"].get<std::string>());
      const json rank = {{"session_id", q["session_id"]}, {"annotator", "ann1"}, {"culture", "US"},
                         {"item_id", q["item_id"]}, {"ranking", {"B", "A"}}};
      auto posted = cli.Post("/v1/study/rank", rank.dump(), "application/json");
      REQUIRE(posted);
      CHECK(posted->status == 201);
      CHECK(posted->body.find("assignment") == std::string::npos);
      auto dup = cli.Post("/v1/study/rank", json{{"session", rank}}.dump(), "application/json");
      CHECK(dup->status == 409);
    }
    CHECK(seen.size() == 3);
    auto done = cli.Get("/v1/study/next?annotator=ann1&culture=US");
    CHECK(json::parse(done->body)["done"] == true);
    auto forged = cli.Post("/v1/study/rank",
                           json{{"session_id", "0000000000000000"}, {"annotator", "ann2"}, {"culture", "US"},
                                {"item_id", "item0"}, {"ranking", {"A", "B"}}}.dump(),
                           "application/json");
    CHECK(forged->status == 400);
    auto report = cli.Get("/v1/study/report");
    REQUIRE(report);
    const auto r = json::parse(report->body);
    CHECK(r["sessions"] == 3);
    CHECK(store->all().front().model_assignment.size() == 2);
  }
}

TEST_CASE("bearer token is required when configured") {
  auto reg = std::make_shared<BundleRegistry>();
  reg->insert(CultureId("US"), constant_classifier("US", 0.4));
  auto svc = std::make_shared<ModerationService>(reg, quick());
  ServiceConfig cfg;
  cfg.api_token = "secret";
  RunningServer rs(svc, std::make_shared<MemoryAnnotationStore>(), std::make_shared<const StudyCoordinator>(), cfg);
  httplib::Client cli("127.0.0.1", rs.port);
  const auto body = json{{"content", "x y"}, {"cultures", {"US"}}}.dump();
  auto denied = cli.Post("/v1/assess", body, "application/json");
  REQUIRE(denied);
  CHECK(denied->status == 401);
  CHECK(json::parse(denied->body)["error"] == "unauthorized");
  httplib::Headers h = {{"Authorization", "Bearer secret"}};
  auto ok = cli.Post("/v1/assess", h, body, "application/json");
  REQUIRE(ok);
  CHECK(ok->status == 200);
  CHECK(cli.Get("/v1/health")->status == 200);
  auto nostudy = cli.Get("/v1/study/next?annotator=a", h);
  CHECK(nostudy->status == 503);
}

TEST_CASE("service configuration from file and environment") {
  const auto path = fs::temp_directory_path() / "culturemod_service.json";
  io::write_json(path, {{"port", 9000}, {"disagreement_threshold", 0.4}, {"bundle_dir", "b"}});
  auto cfg = load_service_config(path);
  CHECK(cfg.port == 9000);
  CHECK(cfg.disagreement_threshold == doctest::Approx(0.4));
  ::setenv("CULTUREMOD_PORT", "9100", 1);
  ::setenv("CULTUREMOD_API_TOKEN", "s3cr3t-value", 1);
  ::setenv("CULTUREMOD_DISAGREEMENT_THRESHOLD", "0.5", 1);
  cfg = load_service_config(path);
  CHECK(cfg.port == 9100);
  CHECK(cfg.api_token == "s3cr3t-value");
  CHECK(cfg.disagreement_threshold == doctest::Approx(0.5));
  CHECK(cfg.to_json().dump().find("s3cr3t-value") == std::string::npos);
  ::setenv("CULTUREMOD_DISAGREEMENT_THRESHOLD", "1.5", 1);
  CHECK_THROWS_AS(load_service_config(path), Error);
  ::setenv("CULTUREMOD_PORT", "70000", 1);
  ::unsetenv("CULTUREMOD_DISAGREEMENT_THRESHOLD");
  CHECK_THROWS_AS(load_service_config(path), Error);
  ::unsetenv("CULTUREMOD_PORT");
  ::unsetenv("CULTUREMOD_API_TOKEN");
  fs::remove(path);
  CHECK(load_service_config(std::nullopt).port == 8080);
}

TEST_CASE("study session ids are stable and coordinator validates input") {
  const auto a = StudyCoordinator::session_id("ann", CultureId("US"), "item0");
  CHECK(a.size() == 16);
  CHECK(a == StudyCoordinator::session_id("ann", CultureId("US"), "item0"));
  CHECK(a != StudyCoordinator::session_id("ann", CultureId("US"), "item1"));
  StudyCoordinator c({fixture_study()});
  MemoryAnnotationStore store;
  CHECK(kind_of([&] { c.next("", std::nullopt, store); }) == ErrorKind::invalid_argument);
  CHECK(c.next("ann", std::nullopt, store).has_value());
  CHECK(kind_of([&] { c.next("ann", CultureId("AU"), store); }) == ErrorKind::not_found);
  CHECK(kind_of([&] {
          c.make_session({{"session_id", a}, {"annotator", "ann"}, {"item_id", "nope"}, {"ranking", {"A", "B"}}});
        }) == ErrorKind::not_found);
  const auto s = c.make_session({{"session_id", a}, {"annotator", "ann"}, {"item_id", "item0"}, {"ranking", {"A", "B"}}});
  CHECK(s.annotator_culture == CultureId("US"));
  CHECK(s.model_assignment.at("A") == CultureId("AU"));
}
