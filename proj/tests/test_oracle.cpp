#include <doctest.h>

#include <cstdint>
#include <random>

#include "sumstate/error.hpp"
#include "sumstate/oracle.hpp"
#include "sumstate/rouge.hpp"
#include "brute_oracle.hpp"
#include "test_util.hpp"

using namespace sumstate;
using test_util::make_doc;
using test_util::tokens;

namespace {

using brute::avg_r1r2;
using brute::mean_f1;

}  // namespace

TEST_CASE("extractive oracle finds a verbatim reference sentence") {
  const auto doc = make_doc("v",
                            {"rain soaked the green hills",
                             "a market opened at dawn",
                             "the mayor signed the treaty",
                             "gulls wheeled over the pier"},
                            {"the mayor signed the treaty"});
  const auto labels = extractive_oracle(doc, 10, 3);
  CHECK(labels.z == std::vector<int>{0, 0, 1, 0});
  CHECK(labels.score == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(labels.objective == OracleObjective::MeanR1R2RL);
  CHECK(labels.y[2] == std::vector<int>(5, 1));
  CHECK(labels.y[0] == std::vector<int>(5, 0));
}

TEST_CASE("extractive oracle with p = M equals exhaustive subset search") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    const auto doc =
        test_util::random_doc(rng, "x" + std::to_string(trial), {.with_spans = false});
    const int m_cap = 3;
    const auto labels = extractive_oracle(doc, static_cast<int>(doc.sentences.size()), m_cap);
    const auto best_brute = brute::extractive(doc, m_cap);
    CHECK(labels.score == doctest::Approx(best_brute.score).epsilon(1e-12));
    std::vector<int> selected;
    for (std::size_t i = 0; i < labels.z.size(); ++i) {
      if (labels.z[i]) selected.push_back(static_cast<int>(i));
    }
    CHECK(selected == best_brute.indices);
  }
}

TEST_CASE("compressive oracle deletes the marked filler span") {
  auto doc = make_doc("c", {"the cat ( truly ) sat", "dogs bark at night"}, {"the cat sat"});
  CompressionSpans spans = {{Span{2, 5}}, {}};
  const auto labels = compressive_oracle(doc, spans, {.beam_width = 0});
  CHECK(labels.z == std::vector<int>{1, 0});
  CHECK(labels.y[0] == std::vector<int>{1, 1, 0, 0, 0, 1});
  CHECK(labels.score == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(labels.objective == OracleObjective::AvgR1R2);
}

TEST_CASE("compressive oracle with empty spans equals subset search under avg(R1,R2)") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 40; ++trial) {
    const auto doc =
        test_util::random_doc(rng, "e" + std::to_string(trial), {.with_spans = false});
    CompressionSpans empty(doc.sentences.size());
    CompressiveOracleOptions options;
    options.beam_width = 0;
    options.max_sentences = 4;
    const auto labels = compressive_oracle(doc, empty, options);
    const auto best_brute = brute::compressive(doc, empty, options.max_sentences);
    CHECK(labels.score == doctest::Approx(best_brute.score).epsilon(1e-12));
    std::vector<int> selected;
    for (std::size_t i = 0; i < labels.z.size(); ++i) {
      if (labels.z[i]) selected.push_back(static_cast<int>(i));
    }
    CHECK(selected == best_brute.indices);
  }
}

TEST_CASE("compressive oracle with unbounded beam equals brute force over spans") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 60; ++trial) {
    const auto doc = test_util::random_doc(rng, "s" + std::to_string(trial));
    const auto& spans = *doc.spans;
    CompressiveOracleOptions options;
    options.beam_width = 0;
    options.max_sentences = 7;
    const auto labels = compressive_oracle(doc, spans, options);
    const auto best_brute = brute::compressive(doc, spans, options.max_sentences);
    CHECK(labels.score == doctest::Approx(best_brute.score).epsilon(1e-12));
    const auto expected_y = brute::to_word_bits(doc, best_brute, spans);
    CHECK(labels.y == expected_y);
    std::vector<int> selected;
    for (std::size_t i = 0; i < labels.z.size(); ++i) {
      if (labels.z[i]) selected.push_back(static_cast<int>(i));
    }
    CHECK(selected == best_brute.indices);
  }
}

TEST_CASE("compressive oracle dominates the extractive selection under avg(R1,R2)") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 40; ++trial) {
    const auto doc = test_util::random_doc(rng, "d" + std::to_string(trial));
    const auto extractive = extractive_oracle(doc, static_cast<int>(doc.sentences.size()), 4);
    std::vector<Sentence> selection;
    for (std::size_t i = 0; i < extractive.z.size(); ++i) {
      if (extractive.z[i]) selection.push_back(doc.sentences[i]);
    }
    const double extractive_score = avg_r1r2(selection, doc.reference);
    const auto compressive = compressive_oracle(doc, *doc.spans, {.beam_width = 0});
    CHECK(compressive.score >= extractive_score - 1e-12);
  }
}

TEST_CASE("oracle outputs are deterministic") {
  std::mt19937_64 rng(505);
  const auto doc = test_util::random_doc(rng, "det");
  const auto a = compressive_oracle(doc, *doc.spans, {.beam_width = 8});
  const auto b = compressive_oracle(doc, *doc.spans, {.beam_width = 8});
  CHECK(a.z == b.z);
  CHECK(a.y == b.y);
  CHECK(a.score == b.score);

  const auto ea = extractive_oracle(doc, 4, 3);
  const auto eb = extractive_oracle(doc, 4, 3);
  CHECK(ea.z == eb.z);
  CHECK(ea.score == eb.score);
}

TEST_CASE("compressive oracle rejects sentences above the span cap") {
  Document doc = make_doc("cap", {"a b c d e f g h i j k l m n"}, {"a"});
  CompressionSpans spans(1);
  for (int s = 0; s < 13; ++s) spans[0].push_back(Span{s, s + 1});
  CHECK_THROWS_WITH_AS(compressive_oracle(doc, spans, {}), doctest::Contains("cap"), Error);
}

TEST_CASE("bow oracle keeps words licensed by the reference multiset") {
  const auto superset = make_doc("s", {"a b", "c d"}, {"a b c d e"});
  const auto all = bow_oracle(superset);
  CHECK(all.z == std::vector<int>{1, 1});
  CHECK(all.y[0] == std::vector<int>{1, 1});
  CHECK(all.y[1] == std::vector<int>{1, 1});

  const auto disjoint = make_doc("d", {"a b", "c"}, {"x y"});
  const auto none = bow_oracle(disjoint);
  CHECK(none.z == std::vector<int>{0, 0});
  CHECK(none.y[0] == std::vector<int>{0, 0});

  const auto dup = make_doc("m", {"a a b"}, {"a b"});
  const auto counted = bow_oracle(dup);
  CHECK(counted.y[0] == std::vector<int>{1, 0, 1});
  CHECK(counted.z == std::vector<int>{1});
  CHECK(counted.objective == OracleObjective::Bow);
}

TEST_CASE("bow oracle consumes counts across sentences in document order") {
  const auto doc = make_doc("o", {"a", "a"}, {"a"});
  const auto labels = bow_oracle(doc);
  CHECK(labels.z == std::vector<int>{1, 0});
}

TEST_CASE("heuristic spans: dateline, connective clause, no trigger") {
  const auto dateline = make_doc("h1", {"( CNN ) A top leader died"}, {"x"});
  CHECK(heuristic_spans(dateline)[0] == SentenceSpans{Span{0, 3}});

  const auto plain = make_doc("h2", {"nothing special here"}, {"x"});
  CHECK(heuristic_spans(plain)[0].empty());

  const auto clause = make_doc("h3", {"the man , who was 91 , died"}, {"x"});
  CHECK(heuristic_spans(clause)[0] == SentenceSpans{Span{2, 7}});
}

TEST_CASE("heuristic spans never overlap and stay in bounds") {
  const auto mixed = make_doc(
      "h4", {"( wire ) the man , who was 91 , died ( they said ) at home"}, {"x"});
  const auto spans = heuristic_spans(mixed);
  int previous_end = 0;
  for (const auto& s : spans[0]) {
    CHECK(s.start >= previous_end);
    CHECK(s.start < s.end);
    CHECK(s.end <= static_cast<int>(mixed.sentences[0].size()));
    previous_end = s.end;
  }
  // Unmatched parenthesis: no span.
  const auto unmatched = make_doc("h5", {"( still open forever"}, {"x"});
  CHECK(heuristic_spans(unmatched)[0].empty());
  // Connective comma without a closing comma: no span.
  const auto open_clause = make_doc("h6", {"the man , who was 91 died"}, {"x"});
  CHECK(heuristic_spans(open_clause)[0].empty());
}

TEST_CASE("labels_to_summary drops empty sentences and satisfies invariants") {
  OracleLabels labels;
  labels.z = {1, 0, 1};
  labels.y = {{1, 0, 1}, {0, 0}, {0, 0, 0, 0}};
  const auto summary = labels_to_summary(labels);
  REQUIRE(summary.sentences.size() == 1);
  CHECK(summary.sentences[0].sentence_index == 0);
  CHECK(summary.sentences[0].kept_tokens == std::vector<int>{0, 2});
}

TEST_CASE("run_oracle is parallel-stable and counts heuristic fallbacks") {
  std::mt19937_64 rng(606);
  std::vector<Document> corpus;
  for (int i = 0; i < 12; ++i) {
    auto doc = test_util::random_doc(rng, "p" + std::to_string(i));
    if (i % 3 == 0) doc.spans.reset();
    corpus.push_back(std::move(doc));
  }
  OracleRunOptions options;
  options.objective = OracleObjective::AvgR1R2;
  options.beam = 16;
  options.workers = 1;
  const auto serial = run_oracle(corpus, options);
  options.workers = 4;
  const auto parallel = run_oracle(corpus, options);
  CHECK(serial.mean_score == parallel.mean_score);
  CHECK(serial.heuristic_span_docs == 4);
  REQUIRE(serial.labels.size() == parallel.labels.size());
  for (std::size_t i = 0; i < serial.labels.size(); ++i) {
    CHECK(serial.labels[i].z == parallel.labels[i].z);
    CHECK(serial.labels[i].y == parallel.labels[i].y);
    CHECK(serial.labels[i].score == parallel.labels[i].score);
  }
}
