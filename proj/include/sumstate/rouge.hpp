#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "sumstate/corpus.hpp"

namespace sumstate {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

RougeScore make_rouge(long long matched, long long candidate_total, long long reference_total);

// Metric-time normalization: lowercased token text (ASCII case folding),
// no stemming, punctuation kept.
std::string normalize_token(const std::string& token);
std::vector<std::string> normalize(const Sentence& tokens);
std::vector<std::vector<std::string>> normalize(const std::vector<Sentence>& sentences);

// Clipped n-gram precision/recall/F1, n in {1,2}. Bigrams never cross
// sentence boundaries. The flat overloads treat the input as one sentence.
RougeScore rouge_n(const std::vector<Sentence>& candidate,
                   const std::vector<Sentence>& reference, int n);
RougeScore rouge_n(const Sentence& candidate, const Sentence& reference, int n);

// F1 from the longest common subsequence over the flattened summaries.
RougeScore rouge_l(const std::vector<Sentence>& candidate,
                   const std::vector<Sentence>& reference);
RougeScore rouge_l(const Sentence& candidate, const Sentence& reference);

// Incremental unigram/bigram overlap against a fixed reference. Sentences
// are added and removed as units; remove is the exact inverse of add. Used
// by the oracle search to score candidates without recomputation.
class OverlapState {
 public:
  explicit OverlapState(const std::vector<Sentence>& reference);

  // Adds one candidate sentence and returns the current avg(R1,R2) F1.
  double add(const Sentence& tokens);
  // Exact inverse of add. Removing tokens that were never added is a
  // contract violation and throws Error(Invalid).
  void remove(const Sentence& tokens);

  double score() const;        // avg of R1 and R2 F1
  RougeScore rouge1() const;
  RougeScore rouge2() const;

  bool operator==(const OverlapState& other) const;

 private:
  using Counts = std::unordered_map<std::string, int>;

  Counts ref_unigrams_, ref_bigrams_;
  long long ref_unigram_total_ = 0, ref_bigram_total_ = 0;

  Counts cand_unigrams_, cand_bigrams_;
  long long cand_unigram_total_ = 0, cand_bigram_total_ = 0;
  long long matched_unigrams_ = 0, matched_bigrams_ = 0;

  void add_gram(Counts& cand, const Counts& ref, const std::string& g,
                long long& total, long long& matched);
  void remove_gram(Counts& cand, const Counts& ref, const std::string& g,
                   long long& total, long long& matched);
};

// Sample Pearson correlation. Throws Error(Invalid) for length < 2 or a
// constant input.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace sumstate
