#include <doctest.h>

#include "sumstate/corpus.hpp"
#include "sumstate/error.hpp"
#include "test_util.hpp"

using namespace sumstate;

namespace {

const char* kOneRecord =
    R"({"id":"d1","sentences":[["A","top","leader"],["He","died"]],"summary":[["leader","died"]]})"
    "\n";

}  // namespace

TEST_CASE("load_corpus parses a one-record file") {
  const auto dir = test_util::scratch_dir("corpus_one");
  const auto path = test_util::write_file(dir / "corpus.jsonl", kOneRecord);
  const auto result = load_corpus(path);
  REQUIRE(result.documents.size() == 1);
  const auto& doc = result.documents[0];
  CHECK(doc.id == "d1");
  CHECK(doc.num_sentences() == 2);
  CHECK(doc.sentences[0] == test_util::tokens("A top leader"));
  CHECK(doc.reference.size() == 1);
  CHECK_FALSE(doc.spans.has_value());
  CHECK(result.skipped_records == 0);
}

TEST_CASE("load_corpus on an empty file yields an empty corpus") {
  const auto dir = test_util::scratch_dir("corpus_empty");
  const auto path = test_util::write_file(dir / "corpus.jsonl", "");
  const auto result = load_corpus(path);
  CHECK(result.documents.empty());
  CHECK(result.skipped_records == 0);
}

TEST_CASE("load_corpus reports a missing file") {
  CHECK_THROWS_AS(load_corpus("does/not/exist.jsonl"), Error);
}

TEST_CASE("empty sentence aborts in strict mode and is skipped otherwise") {
  const std::string bad =
      R"({"id":"ok","sentences":[["fine"]],"summary":[["fine"]]})"
      "\n"
      R"({"id":"bad","sentences":[[]],"summary":[["x"]]})"
      "\n";
  const auto dir = test_util::scratch_dir("corpus_bad");
  const auto path = test_util::write_file(dir / "corpus.jsonl", bad);

  LoadOptions strict;
  strict.strict = true;
  CHECK_THROWS_WITH_AS(load_corpus(path, strict),
                       doctest::Contains("line 2"), Error);

  const auto lax = load_corpus(path);
  CHECK(lax.documents.size() == 1);
  CHECK(lax.skipped_records == 1);
}

TEST_CASE("malformed JSON names the line") {
  const auto dir = test_util::scratch_dir("corpus_malformed");
  const auto path = test_util::write_file(dir / "corpus.jsonl",
                                          std::string(kOneRecord) + "{not json\n");
  LoadOptions strict;
  strict.strict = true;
  CHECK_THROWS_WITH_AS(load_corpus(path, strict), doctest::Contains("line 2"), Error);
}

TEST_CASE("duplicate ids abort in strict mode") {
  const auto dir = test_util::scratch_dir("corpus_dup");
  const auto path =
      test_util::write_file(dir / "corpus.jsonl", std::string(kOneRecord) + kOneRecord);
  LoadOptions strict;
  strict.strict = true;
  CHECK_THROWS_WITH_AS(load_corpus(path, strict), doctest::Contains("duplicate"), Error);
  const auto lax = load_corpus(path);
  CHECK(lax.documents.size() == 1);
  CHECK(lax.skipped_records == 1);
}

TEST_CASE("tokens with whitespace are rejected") {
  const auto dir = test_util::scratch_dir("corpus_ws");
  const auto path = test_util::write_file(
      dir / "corpus.jsonl",
      R"({"id":"w","sentences":[["a b"]],"summary":[["a"]]})" "\n");
  LoadOptions strict;
  strict.strict = true;
  CHECK_THROWS_AS(load_corpus(path, strict), Error);
}

TEST_CASE("over-long documents are truncated with a warning") {
  std::string long_sentence = "[\"w\"";
  for (int i = 1; i < 250; ++i) long_sentence += ",\"w\"";
  long_sentence += "]";
  const auto dir = test_util::scratch_dir("corpus_trunc");
  const auto path = test_util::write_file(
      dir / "corpus.jsonl",
      R"({"id":"t","sentences":[)" + long_sentence + R"(],"summary":[["w"]]})" "\n");
  const auto result = load_corpus(path);
  REQUIRE(result.documents.size() == 1);
  CHECK(result.documents[0].sentences[0].size() == 200);
  REQUIRE(result.warnings.size() == 1);
  CHECK(result.warnings[0].find("truncated") != std::string::npos);
}

TEST_CASE("spans parse, validate and truncate with the sentence") {
  const auto dir = test_util::scratch_dir("corpus_spans");
  const auto good = test_util::write_file(
      dir / "good.jsonl",
      R"x({"id":"s","sentences":[["(","x",")","rest"]],"summary":[["rest"]],"spans":[[[0,3]]]})x"
      "\n");
  const auto result = load_corpus(good);
  REQUIRE(result.documents.size() == 1);
  REQUIRE(result.documents[0].spans.has_value());
  CHECK((*result.documents[0].spans)[0] == SentenceSpans{Span{0, 3}});

  const auto overlapping = test_util::write_file(
      dir / "overlap.jsonl",
      R"({"id":"s","sentences":[["a","b","c"]],"summary":[["a"]],"spans":[[[0,2],[1,3]]]})"
      "\n");
  LoadOptions strict;
  strict.strict = true;
  CHECK_THROWS_WITH_AS(load_corpus(overlapping, strict), doctest::Contains("overlap"), Error);

  const auto wrong_arity = test_util::write_file(
      dir / "arity.jsonl",
      R"({"id":"s","sentences":[["a"],["b"]],"summary":[["a"]],"spans":[[]]})" "\n");
  CHECK_THROWS_AS(load_corpus(wrong_arity, strict), Error);
}

TEST_CASE("save then load round-trips token lists byte for byte") {
  const auto fixture = std::string(SUMSTATE_DATA_DIR) + "/fixture.jsonl";
  LoadOptions strict;
  strict.strict = true;
  const auto first = load_corpus(fixture, strict);
  REQUIRE(first.documents.size() == 20);

  const auto dir = test_util::scratch_dir("corpus_roundtrip");
  const auto copy = (dir / "copy.jsonl").string();
  save_corpus(first.documents, copy);
  const auto second = load_corpus(copy, strict);
  REQUIRE(second.documents.size() == first.documents.size());
  for (std::size_t i = 0; i < first.documents.size(); ++i) {
    const auto& a = first.documents[i];
    const auto& b = second.documents[i];
    CHECK(a.id == b.id);
    CHECK(a.sentences == b.sentences);
    CHECK(a.reference == b.reference);
    CHECK(a.spans == b.spans);
  }
}

TEST_CASE("records with wrong field types are rejected with the line number") {
  const auto dir = test_util::scratch_dir("corpus_types");
  LoadOptions strict;
  strict.strict = true;
  const std::vector<std::string> bad_records = {
      R"({"id":1,"sentences":[["a"]],"summary":[["a"]]})",           // id not a string
      R"({"id":"x","sentences":"a","summary":[["a"]]})",             // sentences not a list
      R"({"id":"x","sentences":[["a",3]],"summary":[["a"]]})",       // token not a string
      R"({"id":"x","sentences":[["a"]],"summary":[["a"]],"spans":[[[0,"1"]]]})",
      R"({"id":"x","sentences":[["a"]],"summary":[["a"]],"spans":[[[-1,1]]]})",
      R"({"id":"x","sentences":[["a"]],"summary":[["a"]],"spans":[[[0,2]]]})",  // out of bounds
      R"({"id":"x","sentences":[["a"]],"summary":[]})",              // empty reference
      R"({"id":"x","sentences":[["a"]]})",                           // missing summary
      R"([1,2,3])",                                                  // not an object
  };
  int index = 0;
  for (const auto& record : bad_records) {
    const auto path =
        test_util::write_file(dir / ("bad" + std::to_string(index++) + ".jsonl"), record + "\n");
    CHECK_THROWS_WITH_AS(load_corpus(path, strict), doctest::Contains("line 1"), Error);
    const auto lax = load_corpus(path);
    CHECK(lax.documents.empty());
    CHECK(lax.skipped_records == 1);
  }
}

TEST_CASE("multi-byte UTF-8 tokens pass through untouched") {
  const std::string record =
      "{\"id\":\"u\",\"sentences\":[[\"café\",\"über\"]],\"summary\":[[\"café\"]]}\n";
  const auto dir = test_util::scratch_dir("corpus_utf8");
  const auto path = test_util::write_file(dir / "corpus.jsonl", record);
  LoadOptions strict;
  strict.strict = true;
  const auto loaded = load_corpus(path, strict);
  REQUIRE(loaded.documents.size() == 1);
  CHECK(loaded.documents[0].sentences[0][0] == "café");

  const auto copy = (dir / "copy.jsonl").string();
  save_corpus(loaded.documents, copy);
  const auto again = load_corpus(copy, strict);
  CHECK(again.documents[0].sentences[0] == loaded.documents[0].sentences[0]);
}

TEST_CASE("lead baseline clamps to the document length") {
  const auto doc5 = test_util::make_doc("d", {"s0 a", "s1 b", "s2 c", "s3 d", "s4 e"}, {"s0"});
  const auto lead3 = lead_baseline(doc5, 3);
  REQUIRE(lead3.sentences.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(lead3.sentences[i].sentence_index == i);
    CHECK(lead3.sentences[i].kept_tokens == std::vector<int>{0, 1});
  }

  const auto doc1 = test_util::make_doc("d1", {"only one"}, {"only"});
  CHECK(lead_baseline(doc1, 2).sentences.size() == 1);

  const auto doc4 = test_util::make_doc("d4", {"a x", "b y", "c z", "d w"}, {"a"});
  const auto lead2 = lead_baseline(doc4, 2);
  REQUIRE(lead2.sentences.size() == 2);
  CHECK(lead2.sentences[1].sentence_index == 1);

  CHECK_THROWS_AS(lead_baseline(doc1, 0), Error);
}

TEST_CASE("lead length equals min(m, M) over random documents") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto doc = test_util::random_doc(rng, "r", {.with_spans = false});
    std::uniform_int_distribution<int> m_dist(1, 12);
    const int m = m_dist(rng);
    const auto lead = lead_baseline(doc, m);
    CHECK(lead.sentences.size() ==
          std::min<std::size_t>(static_cast<std::size_t>(m), doc.sentences.size()));
    validate_summary(lead, doc);
  }
}

TEST_CASE("summary validator rejects bad indices") {
  const auto doc = test_util::make_doc("v", {"a b c", "d e"}, {"a"});

  Summary out_of_range;
  out_of_range.sentences.push_back({2, {0}});
  CHECK_THROWS_AS(validate_summary(out_of_range, doc), Error);

  Summary unsorted;
  unsorted.sentences.push_back({1, {0}});
  unsorted.sentences.push_back({0, {0}});
  CHECK_THROWS_AS(validate_summary(unsorted, doc), Error);

  Summary bad_token;
  bad_token.sentences.push_back({0, {0, 0}});
  CHECK_THROWS_AS(validate_summary(bad_token, doc), Error);

  Summary ok;
  ok.sentences.push_back({0, {0, 2}});
  ok.sentences.push_back({1, {1}});
  CHECK_NOTHROW(validate_summary(ok, doc));
  const auto realized = realize_summary(ok, doc);
  REQUIRE(realized.size() == 2);
  CHECK(realized[0] == test_util::tokens("a c"));
  CHECK(realized[1] == test_util::tokens("e"));
}
