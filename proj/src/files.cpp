#include "sumstate/files.hpp"

#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "sumstate/error.hpp"

namespace sumstate {

using nlohmann::json;

namespace {

// Parses one JSONL file into id-keyed objects, rejecting duplicate ids.
std::unordered_map<std::string, json> read_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw_io("cannot open file: " + path);
  std::unordered_map<std::string, json> records;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw_parse(path + " line " + std::to_string(line_number) + ": invalid JSON (" + e.what() +
                  ")");
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
      throw_parse(path + " line " + std::to_string(line_number) + ": missing string field 'id'");
    }
    const std::string id = j["id"].get<std::string>();
    if (!records.emplace(id, std::move(j)).second) {
      throw_parse(path + " line " + std::to_string(line_number) + ": duplicate id '" + id + "'");
    }
  }
  return records;
}

void check_alignment(const std::unordered_map<std::string, json>& records,
                     const std::vector<Document>& corpus, const std::string& path) {
  if (records.size() != corpus.size()) {
    throw_invalid(path + ": " + std::to_string(records.size()) + " records for " +
                  std::to_string(corpus.size()) + " documents");
  }
  for (const auto& doc : corpus) {
    if (!records.contains(doc.id)) {
      throw_invalid(path + ": no record for document '" + doc.id + "'");
    }
  }
}

}  // namespace

void save_labels(const std::string& path, const std::vector<Document>& corpus,
                 const std::vector<OracleLabels>& labels) {
  if (corpus.size() != labels.size()) throw_invalid("save_labels: misaligned inputs");
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw_io("cannot write label file: " + path);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    json j;
    j["id"] = corpus[i].id;
    j["z"] = labels[i].z;
    j["y"] = labels[i].y;
    j["score"] = labels[i].score;
    j["objective"] = objective_name(labels[i].objective);
    out << j.dump() << "\n";
  }
  if (!out.good()) throw_io("failed while writing label file: " + path);
}

std::vector<OracleLabels> load_labels(const std::string& path,
                                      const std::vector<Document>& corpus) {
  auto records = read_records(path);
  check_alignment(records, corpus, path);
  std::vector<OracleLabels> labels;
  labels.reserve(corpus.size());
  for (const auto& doc : corpus) {
    const json& j = records.at(doc.id);
    OracleLabels l;
    try {
      l.z = j.at("z").get<std::vector<int>>();
      l.y = j.at("y").get<std::vector<std::vector<int>>>();
      l.score = j.at("score").get<double>();
      l.objective = objective_from_name(j.at("objective").get<std::string>());
    } catch (const json::exception& e) {
      throw_parse(path + ": record '" + doc.id + "': " + e.what());
    }
    if (l.z.size() != doc.sentences.size() || l.y.size() != doc.sentences.size()) {
      throw_invalid(path + ": record '" + doc.id + "' misaligned with document shape");
    }
    for (std::size_t i = 0; i < l.y.size(); ++i) {
      if (l.y[i].size() != doc.sentences[i].size()) {
        throw_invalid(path + ": record '" + doc.id + "' sentence " + std::to_string(i) +
                      " word labels misaligned");
      }
      for (int b : l.y[i]) {
        if (b != 0 && b != 1) throw_invalid(path + ": record '" + doc.id + "' has non-bit label");
      }
    }
    for (int b : l.z) {
      if (b != 0 && b != 1) throw_invalid(path + ": record '" + doc.id + "' has non-bit label");
    }
    labels.push_back(std::move(l));
  }
  return labels;
}

void save_summaries(const std::string& path, const std::vector<Document>& corpus,
                    const std::vector<SummaryRecord>& records) {
  if (corpus.size() != records.size()) throw_invalid("save_summaries: misaligned inputs");
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw_io("cannot write summaries file: " + path);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    validate_summary(records[i].summary, corpus[i]);
    json sentences = json::array();
    for (const auto& s : records[i].summary.sentences) {
      sentences.push_back(json{{"index", s.sentence_index}, {"tokens", s.kept_tokens}});
    }
    json j;
    j["id"] = corpus[i].id;
    j["sentences"] = std::move(sentences);
    if (!records[i].sentence_probs.empty()) j["sentence_probs"] = records[i].sentence_probs;
    if (!records[i].word_probs.empty()) j["word_probs"] = records[i].word_probs;
    out << j.dump() << "\n";
  }
  if (!out.good()) throw_io("failed while writing summaries file: " + path);
}

std::vector<SummaryRecord> load_summaries(const std::string& path,
                                          const std::vector<Document>& corpus) {
  auto records = read_records(path);
  check_alignment(records, corpus, path);
  std::vector<SummaryRecord> out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus) {
    const json& j = records.at(doc.id);
    SummaryRecord record;
    try {
      for (const auto& js : j.at("sentences")) {
        SummarySentence s;
        s.sentence_index = js.at("index").get<int>();
        s.kept_tokens = js.at("tokens").get<std::vector<int>>();
        record.summary.sentences.push_back(std::move(s));
      }
      if (j.contains("sentence_probs")) {
        record.sentence_probs = j["sentence_probs"].get<std::vector<double>>();
      }
      if (j.contains("word_probs")) {
        record.word_probs = j["word_probs"].get<std::vector<std::vector<double>>>();
      }
    } catch (const json::exception& e) {
      throw_parse(path + ": record '" + doc.id + "': " + e.what());
    }
    validate_summary(record.summary, doc);
    out.push_back(std::move(record));
  }
  return out;
}

void save_train_log(const std::string& path, const std::vector<TrainLogEntry>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw_io("cannot write training log: " + path);
  for (const auto& e : entries) {
    json j;
    j["epoch"] = e.epoch;
    j["batch"] = e.batch;
    j["sentence_loss"] = e.sentence_loss;
    j["word_loss"] = e.word_loss;
    j["total"] = e.total;
    if (e.validation) j["split"] = "validation";
    out << j.dump() << "\n";
  }
  if (!out.good()) throw_io("failed while writing training log: " + path);
}

}  // namespace sumstate
