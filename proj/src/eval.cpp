#include "sumstate/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "sumstate/error.hpp"
#include "sumstate/parallel.hpp"

namespace sumstate {

using nlohmann::json;

Histogram build_histogram(const std::vector<long long>& values, int bin_width) {
  if (bin_width < 1) throw_invalid("histogram bin width must be >= 1");
  Histogram h;
  h.bin_width = bin_width;
  if (values.empty()) return h;
  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  h.start = (*min_it / bin_width) * bin_width;
  if (*min_it < 0 && *min_it % bin_width != 0) h.start -= bin_width;
  const std::size_t bins = static_cast<std::size_t>((*max_it - h.start) / bin_width) + 1;
  h.counts.assign(bins, 0);
  for (long long v : values) ++h.counts[(v - h.start) / bin_width];
  return h;
}

EvalReport evaluate(const std::vector<Document>& corpus, const std::vector<Summary>& summaries,
                    const EvaluateOptions& options) {
  if (corpus.size() != summaries.size()) {
    throw_invalid("evaluate: " + std::to_string(summaries.size()) + " summaries for " +
                  std::to_string(corpus.size()) + " documents");
  }
  if (corpus.empty()) throw_invalid("evaluate: empty corpus");

  EvalReport report;
  report.documents.resize(corpus.size());

  auto score_one = [&](std::size_t i) {
    const Document& doc = corpus[i];
    const auto realized = realize_summary(summaries[i], doc);
    DocumentScore score;
    score.id = doc.id;
    score.r1 = rouge_n(realized, doc.reference, 1);
    score.r2 = rouge_n(realized, doc.reference, 2);
    score.rl = rouge_l(realized, doc.reference);
    for (const auto& s : realized) score.system_words += static_cast<long long>(s.size());
    for (const auto& s : doc.reference) score.reference_words += static_cast<long long>(s.size());
    report.documents[i] = std::move(score);
  };

  parallel_for(corpus.size(), options.workers, score_one);

  std::vector<double> system_lengths, reference_lengths;
  std::vector<long long> system_counts, reference_counts;
  for (const auto& d : report.documents) {
    report.mean_r1 += d.r1.f1;
    report.mean_r2 += d.r2.f1;
    report.mean_rl += d.rl.f1;
    report.mean_system_words += static_cast<double>(d.system_words);
    report.mean_reference_words += static_cast<double>(d.reference_words);
    system_lengths.push_back(static_cast<double>(d.system_words));
    reference_lengths.push_back(static_cast<double>(d.reference_words));
    system_counts.push_back(d.system_words);
    reference_counts.push_back(d.reference_words);
  }
  const double n = static_cast<double>(report.documents.size());
  report.mean_r1 /= n;
  report.mean_r2 /= n;
  report.mean_rl /= n;
  report.mean_system_words /= n;
  report.mean_reference_words /= n;

  try {
    report.pearson_length = pearson(system_lengths, reference_lengths);
  } catch (const Error&) {
    report.pearson_length = std::nullopt;  // degenerate case, reported as undefined
  }

  report.system_histogram = build_histogram(system_counts, options.bin_width);
  report.reference_histogram = build_histogram(reference_counts, options.bin_width);
  return report;
}

namespace {

json rouge_to_json(const RougeScore& s) {
  return json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

RougeScore rouge_from_json(const json& j) {
  RougeScore s;
  s.precision = j.at("precision").get<double>();
  s.recall = j.at("recall").get<double>();
  s.f1 = j.at("f1").get<double>();
  return s;
}

json histogram_to_json(const Histogram& h) {
  return json{{"bin_width", h.bin_width}, {"start", h.start}, {"counts", h.counts}};
}

Histogram histogram_from_json(const json& j) {
  Histogram h;
  h.bin_width = j.at("bin_width").get<int>();
  h.start = j.at("start").get<long long>();
  h.counts = j.at("counts").get<std::vector<long long>>();
  return h;
}

}  // namespace

void save_report(const EvalReport& report, const std::string& path) {
  json j;
  json docs = json::array();
  for (const auto& d : report.documents) {
    docs.push_back(json{{"id", d.id},
                        {"r1", rouge_to_json(d.r1)},
                        {"r2", rouge_to_json(d.r2)},
                        {"rl", rouge_to_json(d.rl)},
                        {"system_words", d.system_words},
                        {"reference_words", d.reference_words}});
  }
  j["documents"] = std::move(docs);
  j["means"] = json{{"r1", report.mean_r1}, {"r2", report.mean_r2}, {"rl", report.mean_rl}};
  j["mean_system_words"] = report.mean_system_words;
  j["mean_reference_words"] = report.mean_reference_words;
  if (report.pearson_length) {
    j["pearson_length"] = *report.pearson_length;
  } else {
    j["pearson_length"] = nullptr;
  }
  j["system_histogram"] = histogram_to_json(report.system_histogram);
  j["reference_histogram"] = histogram_to_json(report.reference_histogram);

  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw_io("cannot write report file: " + path);
  out << j.dump(2) << "\n";
  if (!out.good()) throw_io("failed while writing report file: " + path);
}

EvalReport load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw_io("cannot open report file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw_parse("report file " + path + ": invalid JSON (" + e.what() + ")");
  }
  EvalReport report;
  try {
    for (const auto& jd : j.at("documents")) {
      DocumentScore d;
      d.id = jd.at("id").get<std::string>();
      d.r1 = rouge_from_json(jd.at("r1"));
      d.r2 = rouge_from_json(jd.at("r2"));
      d.rl = rouge_from_json(jd.at("rl"));
      d.system_words = jd.at("system_words").get<long long>();
      d.reference_words = jd.at("reference_words").get<long long>();
      report.documents.push_back(std::move(d));
    }
    report.mean_r1 = j.at("means").at("r1").get<double>();
    report.mean_r2 = j.at("means").at("r2").get<double>();
    report.mean_rl = j.at("means").at("rl").get<double>();
    report.mean_system_words = j.at("mean_system_words").get<double>();
    report.mean_reference_words = j.at("mean_reference_words").get<double>();
    if (!j.at("pearson_length").is_null()) {
      report.pearson_length = j.at("pearson_length").get<double>();
    }
    report.system_histogram = histogram_from_json(j.at("system_histogram"));
    report.reference_histogram = histogram_from_json(j.at("reference_histogram"));
  } catch (const json::exception& e) {
    throw_parse("report file " + path + ": " + e.what());
  }
  return report;
}

std::vector<ComparisonRow> compare(
    const std::vector<std::pair<std::string, EvalReport>>& reports) {
  if (reports.empty()) throw_invalid("compare: need at least one report");
  std::unordered_set<std::string> names;
  std::vector<ComparisonRow> rows;
  rows.reserve(reports.size());
  for (const auto& [name, report] : reports) {
    if (!names.insert(name).second) throw_invalid("compare: duplicate system name '" + name + "'");
    rows.push_back(ComparisonRow{name, report.mean_r1, report.mean_r2, report.mean_rl,
                                 report.mean_system_words});
  }
  return rows;
}

std::string comparison_text(const std::vector<ComparisonRow>& rows) {
  std::size_t name_width = 6;  // "system"
  for (const auto& r : rows) name_width = std::max(name_width, r.name.size());

  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(name_width) + 2) << "system" << std::right
      << std::setw(9) << "R1" << std::setw(9) << "R2" << std::setw(9) << "RL" << std::setw(12)
      << "mean_words" << "\n";
  out << std::fixed << std::setprecision(4);
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(name_width) + 2) << r.name << std::right
        << std::setw(9) << r.r1 << std::setw(9) << r.r2 << std::setw(9) << r.rl;
    out << std::setprecision(1) << std::setw(12) << r.mean_words << std::setprecision(4) << "\n";
  }
  return out.str();
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "system,r1,r2,rl,mean_words\n";
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.name << "," << r.r1 << "," << r.r2 << "," << r.rl << "," << r.mean_words << "\n";
  }
  return out.str();
}

}  // namespace sumstate
