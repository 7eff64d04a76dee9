#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace sumstate {

// Tokens are kept exactly as they appear in the input file; casing is
// preserved and normalization happens only at metric time.
using Token = std::string;
using Sentence = std::vector<Token>;

// Half-open token range [start, end) marked as deletable as a unit.
struct Span {
  int start = 0;
  int end = 0;

  bool operator==(const Span&) const = default;
};

// One list of non-overlapping spans per sentence.
using SentenceSpans = std::vector<Span>;
using CompressionSpans = std::vector<SentenceSpans>;

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  std::vector<Sentence> reference;
  std::optional<CompressionSpans> spans;

  std::size_t num_sentences() const { return sentences.size(); }
};

// A summary is an ordered selection of source sentences, each with the
// ascending token indices that were kept.
struct SummarySentence {
  int sentence_index = 0;
  std::vector<int> kept_tokens;

  bool operator==(const SummarySentence&) const = default;
};

struct Summary {
  std::vector<SummarySentence> sentences;

  bool operator==(const Summary&) const = default;

  std::size_t word_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.kept_tokens.size();
    return n;
  }
};

// Checks ascending indices, bounds against the document, and span validity.
// Throws Error(Invalid) with a descriptive message on violation.
void validate_summary(const Summary& summary, const Document& doc);
void validate_spans(const CompressionSpans& spans, const Document& doc);

// Realized token text of a summary, one token list per kept sentence.
// Sentences that keep zero tokens are dropped from the realized text.
std::vector<Sentence> realize_summary(const Summary& summary, const Document& doc);

struct LoadOptions {
  bool strict = false;
  // Over-long documents are truncated to these caps with a warning.
  int max_sentences = 200;
  int max_tokens_per_sentence = 200;
};

struct LoadResult {
  std::vector<Document> documents;
  int skipped_records = 0;
  std::vector<std::string> warnings;
};

// Reads a newline-delimited corpus file. Each line is a JSON object with
// fields `id`, `sentences`, `summary` and optional `spans`. In strict mode
// any invariant violation aborts; otherwise the offending record is skipped
// and counted.
LoadResult load_corpus(const std::string& path, const LoadOptions& options = {});

// Writes the corpus in the same newline-delimited format, one record per
// line, preserving order and token text byte-for-byte.
void save_corpus(const std::vector<Document>& docs, const std::string& path);

// First min(m, M) sentences with all tokens kept.
Summary lead_baseline(const Document& doc, int m);

}  // namespace sumstate
