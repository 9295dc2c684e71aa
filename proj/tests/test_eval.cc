// tests/test_eval.cc

// Copyright 2026  The corpus-forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.h"
#include "support.h"

#include "corpus_forge/eval.h"
#include "corpus_forge/ngram_lm.h"
#include "corpus_forge/rng.h"
#include "corpus_forge/text_norm.h"

using namespace cforge;

namespace {

std::vector<std::string> words(const std::string &s) { return tokenize_whitespace(s); }

WerBreakdown wer_of(const std::string &ref, const std::string &hyp) {
  const auto r = words(ref), h = words(hyp);
  return compute_wer(r, h);
}

std::vector<std::string> random_words(CounterRng &rng, int max_len) {
  static const char *vocab[] = {"a", "b", "c", "d"};
  std::vector<std::string> out(rng.uniform(max_len + 1));
  for (auto &w : out) w = vocab[rng.uniform(4)];
  return out;
}

EvalRecord rec(std::string id, const std::string &ref, const std::string &hyp,
               std::map<std::string, std::string> md = {}) {
  EvalRecord r;
  r.utterance_id = std::move(id);
  r.reference = words(ref);
  r.hypothesis = words(hyp);
  r.metadata = std::move(md);
  return r;
}

// A record with `n` reference tokens and exactly `e` substitutions.
EvalRecord planted(const std::string &id, int n, int e, std::map<std::string, std::string> md) {
  EvalRecord r;
  r.utterance_id = id;
  for (int i = 0; i < n; ++i) {
    r.reference.push_back("w" + std::to_string(i));
    r.hypothesis.push_back(i < e ? "x" + std::to_string(i) : "w" + std::to_string(i));
  }
  r.metadata = std::move(md);
  return r;
}

}  // namespace

TEST_CASE("WER examples") {
  CHECK(wer_of("the cat sat on mat", "the cat sat on mat") == WerBreakdown{0, 0, 0, 5});
  const auto w = wer_of("a b c", "a x c d");
  CHECK(w == WerBreakdown{1, 1, 0, 3});
  CHECK(w.wer() == doctest::Approx(2.0 / 3.0));
  const auto del = wer_of("a b c", "");
  CHECK(del == WerBreakdown{0, 0, 3, 3});
  CHECK(del.wer() == 1.0);
  CHECK(wer_of("", "") == WerBreakdown{0, 0, 0, 0});
  CHECK(wer_of("", "").wer() == 0.0);
  CHECK(cft::error_code_of([] { wer_of("", "a"); }) == Errc::kEmptyReference);
}

TEST_CASE("WER agrees with exhaustive alignment") {
  CounterRng rng(41);
  for (int i = 0; i < 1000; ++i) {
    auto ref = random_words(rng, 6);
    if (ref.empty()) ref.push_back("a");
    const auto hyp = random_words(rng, 6);
    const auto w = compute_wer(ref, hyp);
    const auto o = oracle::best_alignment(ref, hyp);
    CAPTURE(i);
    REQUIRE(w.errors() == oracle::edit_distance(ref, hyp));
    CHECK(w.substitutions == o.s);
    CHECK(w.insertions == o.i);
    CHECK(w.deletions == o.d);
    CHECK(w.ref_tokens == static_cast<std::int64_t>(ref.size()));
    CHECK(w.deletions - w.insertions ==
          static_cast<std::int64_t>(ref.size()) - static_cast<std::int64_t>(hyp.size()));
  }
}

TEST_CASE("edit distance is a metric") {
  CounterRng rng(42);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_words(rng, 8), b = random_words(rng, 8), c = random_words(rng, 8);
    CHECK(edit_distance(a, b) == edit_distance(b, a));
    CHECK(edit_distance(a, a) == 0);
    CHECK(edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c));
    if (!a.empty() && !b.empty()) {
      const auto ab = compute_wer(a, b), ba = compute_wer(b, a);
      // Swapping roles exchanges insertions and deletions.
      CHECK(ab.substitutions == ba.substitutions);
      CHECK(ab.insertions == ba.deletions);
      CHECK(ab.deletions == ba.insertions);
    }
  }
}

TEST_CASE("pooled aggregation") {
  std::vector<EvalRecord> rs{rec("1", "a b c d e", "a b c d x"), rec("2", "a b c d e", "a b x d y")};
  const auto w = aggregate(rs);
  CHECK(w.errors() == 3);
  CHECK(w.ref_tokens == 10);
  CHECK(w.wer() == doctest::Approx(0.3));

  std::vector<EvalRecord> tenth{rec("1", "a b c d e f g h i j", "a b c d e f g h x y")};
  CHECK(aggregate(tenth).wer() == doctest::Approx(0.2));
  CHECK(aggregate({rec("1", "a b", "a b")}).wer() == 0.0);

  // Pooled WER is the token-weighted mean of per-record WERs, not the mean.
  CounterRng rng(43);
  std::vector<EvalRecord> many;
  for (int i = 0; i < 200; ++i) {
    auto r = random_words(rng, 9);
    if (r.empty()) r.push_back("b");
    EvalRecord e;
    e.utterance_id = std::to_string(i);
    e.reference = r;
    e.hypothesis = random_words(rng, 9);
    many.push_back(e);
  }
  double num = 0, den = 0;
  for (const auto &e : many) {
    const auto w1 = record_wer(e);
    num += w1.wer() * w1.ref_tokens;
    den += w1.ref_tokens;
  }
  CHECK(aggregate(many).wer() == doctest::Approx(num / den).epsilon(1e-12));
  CHECK(aggregate(many) == aggregate_serial(many));
}

TEST_CASE("aggregation errors and flagged empty references") {
  CHECK(cft::error_code_of([] { aggregate({}); }) == Errc::kEmptyEvalSet);
  std::vector<EvalRecord> rs{rec("1", "a", "a"), rec("2", "", "a")};
  CHECK(cft::error_code_of([&] { aggregate(rs); }) == Errc::kEmptyReference);
  rs[1].empty_reference_ok = true;
  CHECK(aggregate(rs) == WerBreakdown{0, 0, 0, 1});
  std::vector<EvalRecord> only_empty{rs[1]};
  CHECK(cft::error_code_of([&] { aggregate(only_empty); }) == Errc::kEmptyEvalSet);
}

TEST_CASE("stratified report") {
  std::vector<EvalRecord> rs;
  for (int i = 0; i < 10; ++i) rs.push_back(planted("x" + std::to_string(i), 10, 1, {{"region", "X"}}));
  for (int i = 0; i < 10; ++i)
    rs.push_back(planted("y" + std::to_string(i), 50, 1, {{"region", "Y"}}));
  const auto r = stratified_report(rs, "region");
  REQUIRE(r.groups.size() == 2);
  CHECK(r.groups.at("X").wer.wer() == doctest::Approx(0.10));
  CHECK(r.groups.at("Y").wer.wer() == doctest::Approx(0.02));
  CHECK_FALSE(r.groups.at("X").low_support);
  CHECK(r.overall.wer() == doctest::Approx(20.0 / 600.0));
  CHECK(r.splits == std::vector<std::string>{"unspecified"});

  const auto one = stratified_report({rs[0], rs[1]}, "region");
  CHECK(one.groups.size() == 1);
  CHECK(one.groups.at("X").low_support);
  CHECK(one.groups.at("X").records == 2);

  auto missing = rs;
  missing[3].metadata.clear();
  CHECK(cft::error_code_of([&] { stratified_report(missing, "region"); }) ==
        Errc::kMissingMetadata);

  std::ostringstream text;
  render_text(text, r);
  CHECK(text.str().find("# normalization: " + std::string(kNormalizationVersion)) !=
        std::string::npos);
  CHECK(text.str().find("10.00") != std::string::npos);
  const auto j = to_json(r);
  CHECK(j["groups"]["Y"]["wer"].get<double>() == doctest::Approx(0.02));
}

TEST_CASE("grid report recovers planted rates") {
  std::vector<EvalRecord> rs;
  const std::vector<std::string> regions{"north", "south", "west"};
  const std::vector<std::string> models{"m1", "m2"};
  int id = 0;
  for (std::size_t r = 0; r < regions.size(); ++r)
    for (std::size_t m = 0; m < models.size(); ++m) {
      const int count = (r == 2 && m == 1) ? 3 : 12;
      const int errs = static_cast<int>(1 + r + 2 * m);
      for (int k = 0; k < count; ++k)
        rs.push_back(planted(std::to_string(id++), 20, errs,
                             {{"region", regions[r]}, {"model", models[m]}, {"split", "dev"}}));
    }
  const auto g = grid_report(rs, "region", "model");
  CHECK(g.rows == regions);
  CHECK(g.cols == models);
  for (std::size_t r = 0; r < regions.size(); ++r)
    for (std::size_t m = 0; m < models.size(); ++m) {
      const auto &c = g.cells.at({regions[r], models[m]});
      CHECK(c.wer.wer() == doctest::Approx((1 + r + 2 * m) / 20.0));
      CHECK(c.low_support == (r == 2 && m == 1));
    }
  CHECK(g.col_totals.at("m1").records == 36);
  CHECK(g.splits == std::vector<std::string>{"dev"});
  std::ostringstream text;
  render_text(text, g);
  CHECK(text.str().find('*') != std::string::npos);
}

TEST_CASE("sentence-disjoint split") {
  std::vector<SplitRow> rows;
  for (int i = 0; i < 100; ++i)
    rows.push_back({"u" + std::to_string(i), "sentence number " + std::to_string(i), "s", "r"});
  const auto r = split_by_sentence(rows, 0.02, 7);
  CHECK(r.unique_sentences == 100);
  CHECK(r.test_sentences == 2);
  CHECK(r.test_ids.size() == 2);
  CHECK(r.train_ids.size() == 98);

  // One sentence read by three speakers lands on one side only.
  std::vector<SplitRow> shared;
  for (int i = 0; i < 20; ++i) shared.push_back({"a" + std::to_string(i), "line " + std::to_string(i), "x", ""});
  for (const char *spk : {"p", "q", "r"}) shared.push_back({std::string("z") + spk, "Shared, Line!", spk, ""});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = split_by_sentence(shared, 0.3, seed);
    const bool a = s.row_is_test[20], b = s.row_is_test[21], c = s.row_is_test[22];
    CHECK(a == b);
    CHECK(b == c);
  }

  const std::vector<SplitRow> two{{"1", "one", "", ""}, {"2", "two", "", ""}};
  const auto half = split_by_sentence(two, 0.5, 3);
  CHECK(half.test_ids.size() == 1);
  CHECK(half.train_ids.size() == 1);

  CHECK(cft::error_code_of([] { split_by_sentence({{"1", "same", "", ""}, {"2", "Same.", "", ""}}, 0.5, 1); }) ==
        Errc::kTooFewSentences);
  CHECK(cft::error_code_of([&] { split_by_sentence(two, 0.0, 1); }) == Errc::kInvalidArgument);
  CHECK(cft::error_code_of([&] { split_by_sentence(two, 1.0, 1); }) == Errc::kInvalidArgument);
}

TEST_CASE("split never shares a sentence across sides") {
  CounterRng rng(44);
  std::vector<SplitRow> rows;
  for (int i = 0; i < 1000; ++i) {
    const int s = rng.uniform01() < 0.1 && i > 0 ? static_cast<int>(rng.uniform(i)) : i;
    rows.push_back({"r" + std::to_string(i), "text " + std::to_string(s), "spk", ""});
  }
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto r = split_by_sentence(rows, 0.02, seed);
    std::set<std::string> test, train;
    for (std::size_t i = 0; i < rows.size(); ++i)
      (r.row_is_test[i] ? test : train).insert(normalize_text(rows[i].sentence));
    for (const auto &s : test) CHECK(train.count(s) == 0);
    CHECK(static_cast<std::int64_t>(test.size()) ==
          static_cast<std::int64_t>(std::ceil(0.02 * r.unique_sentences)));
    CHECK(r.test_ids.size() + r.train_ids.size() == rows.size());
  }
  // Same seed, same answer.
  CHECK(split_by_sentence(rows, 0.02, 5).row_is_test == split_by_sentence(rows, 0.02, 5).row_is_test);
}

TEST_CASE("text normalization") {
  CHECK(normalize_text("Hello, World!") == "hello world");
  CHECK(normalize_text("  ÅÄÖ  åäö ") == "åäö åäö");
  CHECK(normalize_text("don't stop") == "don't stop");
  CHECK(normalize_text("it’s") == "it's");
  CHECK(normalize_text("well-known - fact") == "well-known fact");
  CHECK(normalize_text("«quoted» … ¿ok?") == "quoted ok");
  CHECK(normalize_text("") == "");
  CHECK(normalize_text(normalize_text("A-b, C’d!")) == normalize_text("A-b, C’d!"));
}

TEST_CASE("eval records from JSONL") {
  std::istringstream in(
      "{\"utterance_id\":\"u1\",\"reference\":\"Hello, World\",\"hypothesis\":\"hello word\","
      "\"metadata\":{\"region\":\"X\",\"age\":42}}\n"
      "\n"
      "{\"utterance_id\":\"u2\",\"reference\":[\"a\",\"b\"],\"hypothesis\":[],"
      "\"empty_reference\":false}\n");
  const auto rs = read_eval_records(in);
  REQUIRE(rs.size() == 2);
  CHECK(rs[0].reference == std::vector<std::string>{"hello", "world"});
  CHECK(rs[0].metadata.at("region") == "X");
  CHECK(rs[0].metadata.at("age") == "42");
  CHECK(record_wer(rs[0]) == WerBreakdown{1, 0, 0, 2});
  CHECK(rs[1].hypothesis.empty());

  std::stringstream again;
  for (const auto &r : rs) write_eval_record(again, r);
  const auto back = read_eval_records(again);
  CHECK(back[0].reference == rs[0].reference);
  CHECK(back[1].metadata == rs[1].metadata);

  std::istringstream bad("{\"utterance_id\":\"u1\",\"reference\":\"a\",\"hypothesis\":\"a\"}\n{oops\n");
  try {
    read_eval_records(bad);
    FAIL("expected a parse error");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::kParseError);
    CHECK(e.line() == 2);
  }
}
