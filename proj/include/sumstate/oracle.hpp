#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sumstate/corpus.hpp"

namespace sumstate {

enum class OracleObjective {
  MeanR1R2RL,  // extractive oracle
  AvgR1R2,     // compressive oracle
  Bow,         // bag-of-words baseline
};

std::string objective_name(OracleObjective objective);
OracleObjective objective_from_name(const std::string& name);

struct OracleLabels {
  std::vector<int> z;               // one bit per sentence
  std::vector<std::vector<int>> y;  // per-sentence token bits
  double score = 0.0;               // objective value achieved
  OracleObjective objective = OracleObjective::MeanR1R2RL;

  int selected_count() const {
    int n = 0;
    for (int b : z) n += b;
    return n;
  }
};

// Labels -> summary assembly: sentences with z=1, tokens with y=1.
// Sentences that keep no tokens are dropped.
Summary labels_to_summary(const OracleLabels& labels);

// Top-p sentences by individual mean R1/R2/RL F1 form the candidate pool;
// every subset of size 1..m is scored and the best mean F1 wins. Ties break
// toward fewer sentences, then the lexicographically smallest index set.
OracleLabels extractive_oracle(const Document& doc, int pool_size, int max_summary_sentences);

struct CompressiveOracleOptions {
  int beam_width = 32;      // 0 means unbounded
  int max_sentences = 7;
  int max_spans_per_sentence = 12;
};

// Level-synchronous beam search over sentences in document order. At each
// level a hypothesis either skips the sentence or selects one of its 2^k
// span-deletion variants; partial hypotheses are ranked by their current
// avg(R1,R2) F1 via incremental overlap scoring.
OracleLabels compressive_oracle(const Document& doc, const CompressionSpans& spans,
                                const CompressiveOracleOptions& options = {});

// Keeps a word iff its normalized text is still available in the reference
// token multiset; each reference token licenses at most one kept duplicate.
OracleLabels bow_oracle(const Document& doc);

// Deterministic fallback span tagger. Rules, earlier rule wins, spans never
// overlap:
//  (a) parenthesized token runs including the parentheses,
//  (b) runs between paired commas starting with who/which/where/when/according,
//  (c) a leading dateline run ending in ")" within the first 6 tokens.
CompressionSpans heuristic_spans(const Document& doc);

struct OracleRunOptions {
  OracleObjective objective = OracleObjective::MeanR1R2RL;
  int pool = 10;         // p, extractive candidate pool
  int max_select = 4;    // m, extractive summary length cap
  int beam = 32;         // n, compressive beam width (0 = unbounded)
  int max_sentences = 7; // compressive selected-sentence cap
  int span_cap = 12;
  int workers = 1;
};

struct OracleRunResult {
  std::vector<OracleLabels> labels;
  double mean_score = 0.0;
  // Documents that carried no spans in the corpus file and fell back to
  // heuristic_spans (compressive objective only).
  int heuristic_span_docs = 0;
};

// Labels every document; embarrassingly parallel across documents.
OracleRunResult run_oracle(const std::vector<Document>& corpus, const OracleRunOptions& options);

}  // namespace sumstate
