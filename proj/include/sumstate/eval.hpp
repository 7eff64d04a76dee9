#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sumstate/corpus.hpp"
#include "sumstate/rouge.hpp"

namespace sumstate {

struct DocumentScore {
  std::string id;
  RougeScore r1, r2, rl;
  long long system_words = 0;
  long long reference_words = 0;
};

struct Histogram {
  int bin_width = 10;
  long long start = 0;  // lower edge of the first bin, a multiple of bin_width
  std::vector<long long> counts;
};

Histogram build_histogram(const std::vector<long long>& values, int bin_width);

struct EvalReport {
  std::vector<DocumentScore> documents;
  double mean_r1 = 0.0, mean_r2 = 0.0, mean_rl = 0.0;  // means of per-document F1
  double mean_system_words = 0.0;
  double mean_reference_words = 0.0;
  // Undefined (not an error) for fewer than 2 documents or constant lengths.
  std::optional<double> pearson_length;
  Histogram system_histogram, reference_histogram;
};

struct EvaluateOptions {
  int bin_width = 10;
  int workers = 1;
};

// Scores each realized summary against its document's reference and
// aggregates corpus statistics. Summaries are aligned to the corpus by
// position; callers loading from file align by id first.
EvalReport evaluate(const std::vector<Document>& corpus, const std::vector<Summary>& summaries,
                    const EvaluateOptions& options = {});

void save_report(const EvalReport& report, const std::string& path);
EvalReport load_report(const std::string& path);

struct ComparisonRow {
  std::string name;
  double r1 = 0.0, r2 = 0.0, rl = 0.0;
  double mean_words = 0.0;
};

// One row per named report; duplicate names are an error.
std::vector<ComparisonRow> compare(
    const std::vector<std::pair<std::string, EvalReport>>& reports);

std::string comparison_text(const std::vector<ComparisonRow>& rows);
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

}  // namespace sumstate
