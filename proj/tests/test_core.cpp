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

#include <filesystem>
#include <set>

#include "culturemod/core/culture.hpp"
#include "culturemod/core/digest.hpp"
#include "culturemod/core/error.hpp"
#include "culturemod/core/io.hpp"
#include "culturemod/core/random.hpp"
#include "culturemod/core/text.hpp"
#include "culturemod/core/text_generator.hpp"
#include "culturemod/core/timestamp.hpp"

using namespace culturemod;
namespace fs = std::filesystem;

TEST_CASE("culture registry defaults hold the ten case-study regions") {
  const auto reg = CultureRegistry::defaults();
  CHECK(reg.size() == 10);
  std::set<std::string> codes;
  for (const auto& e : reg.entries()) codes.insert(e.id.code());
  CHECK(codes.size() == 10);
  CHECK(reg.display_name(CultureId("AU")) == "Australia");
  CHECK_THROWS_AS(reg.require(CultureId("XX")), Error);
}

TEST_CASE("culture registry rejects empty and duplicate codes") {
  CultureRegistry reg;
  reg.add(CultureId("ZZ"), "Zed");
  CHECK_THROWS(reg.add(CultureId("ZZ"), "Again"));
  CHECK_THROWS(reg.add(CultureId(""), "Empty"));
}

TEST_CASE("sha256 matches the published test vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("tree digest depends on names and bytes, not on creation order") {
  const auto root = fs::temp_directory_path() / "culturemod_tree_digest";
  fs::remove_all(root);
  io::write_file(root / "a" / "x.txt", "one");
  io::write_file(root / "b.txt", "two");
  const auto d1 = sha256_tree(root);
  fs::remove_all(root);
  io::write_file(root / "b.txt", "two");
  io::write_file(root / "a" / "x.txt", "one");
  CHECK(sha256_tree(root) == d1);
  io::write_file(root / "b.txt", "two!");
  CHECK(sha256_tree(root) != d1);
  fs::remove_all(root);
}

TEST_CASE("seed derivation is deterministic and separates streams") {
  CHECK(derive_seed(7, 1) == derive_seed(7, 1));
  CHECK(derive_seed(7, 1) != derive_seed(7, 2));
  CHECK(derive_seed(7, 1) != derive_seed(8, 1));
  auto a = make_rng(3, 9), b = make_rng(3, 9);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
  CHECK(stable_hash("US") != stable_hash("AU"));
  // FNV-1a reference value for "a".
  CHECK(stable_hash("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("uniform_index stays in range and covers it") {
  auto rng = make_rng(1);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits[uniform_index(rng, 7)];
  for (int h : hits) CHECK(h > 800);
}

TEST_CASE("iso8601 round trip and offsets") {
  const auto t = parse_iso8601("2024-03-01T12:30:00Z");
  CHECK(format_iso8601(t) == "2024-03-01T12:30:00Z");
  CHECK(parse_iso8601("2024-03-01T14:30:00+02:00") == t);
  CHECK(parse_iso8601("2024-03-01T12:30:00.250Z") == t);
  CHECK_THROWS_AS(parse_iso8601("yesterday"), Error);
}

TEST_CASE("text helpers") {
  CHECK(text::token_count("  a  b\tc\n") == 3);
  CHECK(text::token_prefix("one two three", 2) == "one two");
  CHECK(text::token_prefix("one two", 5) == "one two");
  CHECK(text::alnum_tokens("It's 2024, OK?") == std::vector<std::string>{"it", "s", "2024", "ok"});
  CHECK(text::first_sentence("First one. Second.") == "First one.");
  CHECK(text::first_sentence("No stop") == "No stop");
  CHECK(text::trim("  x ") == "x");
}

TEST_CASE("json lines round trip") {
  const auto p = fs::temp_directory_path() / "culturemod_rows.jsonl";
  std::vector<io::json> rows = {{{"a", 1}}, {{"b", "two"}}};
  io::write_jsonl(p, rows);
  CHECK(io::read_jsonl(p) == rows);
  fs::remove(p);
  CHECK_THROWS_AS(io::read_jsonl(p), Error);
}

TEST_CASE("echo generator returns the rendered prompt and the stub is deterministic") {
  llm::ChatPrompt prompt{"sys", "user text", {{"boundary", "Hate Content"}, {"rationale", "Slur."}, {"highlight", "\"x\""}}};
  llm::EchoGenerator echo;
  const auto e = echo.generate(prompt);
  CHECK(e.find("sys") != std::string::npos);
  CHECK(e.find("user text") != std::string::npos);
  llm::StubRationaleGenerator stub;
  CHECK(stub.generate(prompt) == stub.generate(prompt));
  CHECK(stub.generate(prompt).find("hate content") != std::string::npos);
}

TEST_CASE("generate_with_retry retries only retriable failures") {
  struct Flaky final : llm::TextGenerator {
    int calls = 0;
    int fail_first = 0;
    ErrorKind kind = ErrorKind::retriable;
    std::string id() const override { return "flaky"; }
    std::string generate(const llm::ChatPrompt&) override {
      if (++calls <= fail_first) throw Error(kind, "boom");
      return "ok";
    }
  };
  Flaky f;
  f.fail_first = 2;
  CHECK(llm::generate_with_retry(f, {}, 2) == "ok");
  CHECK(f.calls == 3);
  Flaky g;
  g.fail_first = 3;
  CHECK_THROWS_AS(llm::generate_with_retry(g, {}, 2), Error);
  Flaky h;
  h.fail_first = 1;
  h.kind = ErrorKind::configuration;
  CHECK_THROWS_AS(llm::generate_with_retry(h, {}, 5), Error);
  CHECK(h.calls == 1);
}

TEST_CASE("error kinds have names") {
  CHECK(std::string(to_string(ErrorKind::not_found)) == "not_found");
  CHECK(std::string(to_string(ErrorKind::conflict)) == "conflict");
}
