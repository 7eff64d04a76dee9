#pragma once

#include <string>
#include <vector>

#include "sumstate/corpus.hpp"
#include "sumstate/model.hpp"
#include "sumstate/oracle.hpp"

namespace sumstate {

// Label files are newline-delimited records {id, z, y, score, objective}
// aligned to the corpus file by id.
void save_labels(const std::string& path, const std::vector<Document>& corpus,
                 const std::vector<OracleLabels>& labels);
std::vector<OracleLabels> load_labels(const std::string& path,
                                      const std::vector<Document>& corpus);

struct SummaryRecord {
  Summary summary;
  std::vector<double> sentence_probs;              // empty when not applicable (e.g. LEAD)
  std::vector<std::vector<double>> word_probs;     // per decoded sentence
};

void save_summaries(const std::string& path, const std::vector<Document>& corpus,
                    const std::vector<SummaryRecord>& records);
std::vector<SummaryRecord> load_summaries(const std::string& path,
                                          const std::vector<Document>& corpus);

void save_train_log(const std::string& path, const std::vector<TrainLogEntry>& entries);

}  // namespace sumstate
