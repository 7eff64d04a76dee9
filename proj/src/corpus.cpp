#include "sumstate/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "sumstate/error.hpp"

namespace sumstate {

namespace {

using nlohmann::json;

bool token_ok(const std::string& text) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return false;
  }
  return true;
}

std::vector<Sentence> parse_sentences(const json& j, const std::string& where) {
  if (!j.is_array()) throw_parse(where + ": expected a list of sentences");
  std::vector<Sentence> out;
  out.reserve(j.size());
  for (const auto& js : j) {
    if (!js.is_array()) throw_parse(where + ": sentence must be a list of strings");
    Sentence sent;
    sent.reserve(js.size());
    for (const auto& jt : js) {
      if (!jt.is_string()) throw_parse(where + ": token must be a string");
      std::string text = jt.get<std::string>();
      if (!token_ok(text)) {
        throw_parse(where + ": token must be non-empty without internal whitespace");
      }
      sent.push_back(std::move(text));
    }
    if (sent.empty()) throw_parse(where + ": empty sentence");
    out.push_back(std::move(sent));
  }
  return out;
}

CompressionSpans parse_spans(const json& j, const Document& doc, const std::string& where) {
  if (!j.is_array()) throw_parse(where + ": spans must be a list");
  if (j.size() != doc.sentences.size()) {
    throw_parse(where + ": spans list must have one entry per sentence");
  }
  CompressionSpans spans;
  spans.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& js = j[i];
    if (!js.is_array()) throw_parse(where + ": per-sentence spans must be a list");
    SentenceSpans sent;
    for (const auto& jp : js) {
      if (!jp.is_array() || jp.size() != 2 || !jp[0].is_number_integer() ||
          !jp[1].is_number_integer()) {
        throw_parse(where + ": span must be a [start, end) pair of integers");
      }
      sent.push_back(Span{jp[0].get<int>(), jp[1].get<int>()});
    }
    std::sort(sent.begin(), sent.end(),
              [](const Span& a, const Span& b) { return a.start < b.start; });
    spans.push_back(std::move(sent));
  }
  return spans;
}

Document parse_record(const std::string& line, int line_number) {
  const std::string where = "line " + std::to_string(line_number);
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw_parse(where + ": invalid JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw_parse(where + ": record must be an object");
  if (!j.contains("id") || !j["id"].is_string()) throw_parse(where + ": missing string field 'id'");
  if (!j.contains("sentences")) throw_parse(where + ": missing field 'sentences'");
  if (!j.contains("summary")) throw_parse(where + ": missing field 'summary'");

  Document doc;
  doc.id = j["id"].get<std::string>();
  doc.sentences = parse_sentences(j["sentences"], where + " (id '" + doc.id + "') sentences");
  doc.reference = parse_sentences(j["summary"], where + " (id '" + doc.id + "') summary");
  if (doc.sentences.empty()) throw_parse(where + ": document '" + doc.id + "' has no sentences");
  if (doc.reference.empty()) throw_parse(where + ": document '" + doc.id + "' has no summary");
  if (j.contains("spans") && !j["spans"].is_null()) {
    doc.spans = parse_spans(j["spans"], doc, where + " (id '" + doc.id + "') spans");
    try {
      validate_spans(*doc.spans, doc);
    } catch (const Error& e) {
      throw_parse(where + ": " + e.what());
    }
  }
  return doc;
}

void truncate_document(Document& doc, const LoadOptions& options,
                       std::vector<std::string>& warnings) {
  bool truncated = false;
  if (static_cast<int>(doc.sentences.size()) > options.max_sentences) {
    doc.sentences.resize(options.max_sentences);
    if (doc.spans) doc.spans->resize(options.max_sentences);
    truncated = true;
  }
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    auto& sent = doc.sentences[i];
    if (static_cast<int>(sent.size()) > options.max_tokens_per_sentence) {
      sent.resize(options.max_tokens_per_sentence);
      truncated = true;
      if (doc.spans) {
        auto& spans = (*doc.spans)[i];
        std::erase_if(spans, [&](const Span& s) {
          return s.end > static_cast<int>(sent.size());
        });
      }
    }
  }
  if (truncated) {
    warnings.push_back("document '" + doc.id + "' truncated to " +
                       std::to_string(options.max_sentences) + "x" +
                       std::to_string(options.max_tokens_per_sentence));
  }
}

json sentences_to_json(const std::vector<Sentence>& sentences) {
  json out = json::array();
  for (const auto& s : sentences) out.push_back(s);
  return out;
}

}  // namespace

void validate_spans(const CompressionSpans& spans, const Document& doc) {
  if (spans.size() != doc.sentences.size()) {
    throw_invalid("document '" + doc.id + "': spans list must have one entry per sentence");
  }
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const int n = static_cast<int>(doc.sentences[i].size());
    int previous_end = 0;
    for (const Span& s : spans[i]) {
      if (s.start < 0 || s.end > n || s.start >= s.end) {
        throw_invalid("document '" + doc.id + "', sentence " + std::to_string(i) +
                      ": span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                      ") out of bounds or empty");
      }
      if (s.start < previous_end) {
        throw_invalid("document '" + doc.id + "', sentence " + std::to_string(i) +
                      ": overlapping spans");
      }
      previous_end = s.end;
    }
  }
}

void validate_summary(const Summary& summary, const Document& doc) {
  int previous_sentence = -1;
  for (const auto& s : summary.sentences) {
    if (s.sentence_index <= previous_sentence) {
      throw_invalid("summary sentence indices must be strictly ascending");
    }
    if (s.sentence_index < 0 || s.sentence_index >= static_cast<int>(doc.sentences.size())) {
      throw_invalid("summary references sentence " + std::to_string(s.sentence_index) +
                    " outside document '" + doc.id + "'");
    }
    previous_sentence = s.sentence_index;
    const int n = static_cast<int>(doc.sentences[s.sentence_index].size());
    int previous_token = -1;
    for (int t : s.kept_tokens) {
      if (t <= previous_token) throw_invalid("summary token indices must be strictly ascending");
      if (t < 0 || t >= n) {
        throw_invalid("summary references token " + std::to_string(t) + " outside sentence " +
                      std::to_string(s.sentence_index) + " of document '" + doc.id + "'");
      }
      previous_token = t;
    }
  }
}

std::vector<Sentence> realize_summary(const Summary& summary, const Document& doc) {
  validate_summary(summary, doc);
  std::vector<Sentence> out;
  for (const auto& s : summary.sentences) {
    if (s.kept_tokens.empty()) continue;
    Sentence sent;
    sent.reserve(s.kept_tokens.size());
    for (int t : s.kept_tokens) sent.push_back(doc.sentences[s.sentence_index][t]);
    out.push_back(std::move(sent));
  }
  return out;
}

LoadResult load_corpus(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw_io("cannot open corpus file: " + path);

  LoadResult result;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    try {
      Document doc = parse_record(line, line_number);
      if (!seen_ids.insert(doc.id).second) {
        throw_parse("line " + std::to_string(line_number) + ": duplicate document id '" +
                    doc.id + "'");
      }
      truncate_document(doc, options, result.warnings);
      result.documents.push_back(std::move(doc));
    } catch (const Error& e) {
      if (options.strict) throw;
      ++result.skipped_records;
      result.warnings.push_back(std::string("skipped record: ") + e.what());
    }
  }
  return result;
}

void save_corpus(const std::vector<Document>& docs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw_io("cannot write corpus file: " + path);
  for (const auto& doc : docs) {
    json j;
    j["id"] = doc.id;
    j["sentences"] = sentences_to_json(doc.sentences);
    j["summary"] = sentences_to_json(doc.reference);
    if (doc.spans) {
      json spans = json::array();
      for (const auto& sent : *doc.spans) {
        json js = json::array();
        for (const Span& s : sent) js.push_back(json::array({s.start, s.end}));
        spans.push_back(js);
      }
      j["spans"] = spans;
    }
    out << j.dump() << "\n";
  }
  if (!out.good()) throw_io("failed while writing corpus file: " + path);
}

Summary lead_baseline(const Document& doc, int m) {
  if (m < 1) throw_invalid("lead baseline requires m >= 1");
  Summary summary;
  const int take = std::min<int>(m, static_cast<int>(doc.sentences.size()));
  for (int i = 0; i < take; ++i) {
    SummarySentence s;
    s.sentence_index = i;
    s.kept_tokens.resize(doc.sentences[i].size());
    for (std::size_t t = 0; t < doc.sentences[i].size(); ++t) s.kept_tokens[t] = static_cast<int>(t);
    summary.sentences.push_back(std::move(s));
  }
  return summary;
}

}  // namespace sumstate
