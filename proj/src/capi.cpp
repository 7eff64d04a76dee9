#include "sumstate.h"

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "sumstate/error.hpp"
#include "sumstate/eval.hpp"
#include "sumstate/files.hpp"
#include "sumstate/model.hpp"
#include "sumstate/oracle.hpp"
#include "sumstate/rouge.hpp"

struct ss_corpus {
  std::vector<sumstate::Document> docs;
  int skipped = 0;
};

struct ss_labels {
  std::vector<sumstate::OracleLabels> labels;
  double mean_score = 0.0;
  int heuristic_span_docs = 0;
};

struct ss_model {
  sumstate::ModelParams params;
};

struct ss_summaries {
  std::vector<sumstate::SummaryRecord> records;
};

struct ss_report {
  sumstate::EvalReport report;
};

namespace {

thread_local std::string g_last_error;

ss_status status_from_kind(sumstate::ErrorKind kind) {
  switch (kind) {
    case sumstate::ErrorKind::Io: return SS_ERR_IO;
    case sumstate::ErrorKind::Parse: return SS_ERR_PARSE;
    case sumstate::ErrorKind::Invalid: return SS_ERR_INVALID;
    case sumstate::ErrorKind::Internal: return SS_ERR_INTERNAL;
  }
  return SS_ERR_INTERNAL;
}

template <typename Fn>
ss_status guarded(Fn&& fn) {
  try {
    fn();
    return SS_OK;
  } catch (const sumstate::Error& e) {
    g_last_error = e.what();
    return status_from_kind(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SS_ERR_INTERNAL;
  }
}

ss_status invalid_argument(const char* what) {
  g_last_error = what;
  return SS_ERR_INVALID;
}

}  // namespace

extern "C" {

const char* ss_version(void) { return "0.1.0"; }

const char* ss_last_error(void) { return g_last_error.c_str(); }

int ss_status_exit_code(ss_status status) {
  switch (status) {
    case SS_OK: return 0;
    case SS_ERR_INTERNAL: return 1;
    default: return 2;
  }
}

ss_status ss_corpus_load(const char* path, int strict, ss_corpus** out) {
  if (!path || !out) return invalid_argument("ss_corpus_load: null argument");
  return guarded([&]() {
    sumstate::LoadOptions options;
    options.strict = strict != 0;
    auto result = sumstate::load_corpus(path, options);
    auto corpus = std::make_unique<ss_corpus>();
    corpus->docs = std::move(result.documents);
    corpus->skipped = result.skipped_records;
    *out = corpus.release();
  });
}

ss_status ss_corpus_save(const ss_corpus* corpus, const char* path) {
  if (!corpus || !path) return invalid_argument("ss_corpus_save: null argument");
  return guarded([&]() { sumstate::save_corpus(corpus->docs, path); });
}

size_t ss_corpus_size(const ss_corpus* corpus) { return corpus ? corpus->docs.size() : 0; }

int ss_corpus_skipped_records(const ss_corpus* corpus) { return corpus ? corpus->skipped : 0; }

ss_status ss_corpus_lead(const ss_corpus* corpus, int m, ss_summaries** out) {
  if (!corpus || !out) return invalid_argument("ss_corpus_lead: null argument");
  return guarded([&]() {
    auto summaries = std::make_unique<ss_summaries>();
    summaries->records.reserve(corpus->docs.size());
    for (const auto& doc : corpus->docs) {
      sumstate::SummaryRecord record;
      record.summary = sumstate::lead_baseline(doc, m);
      summaries->records.push_back(std::move(record));
    }
    *out = summaries.release();
  });
}

void ss_corpus_free(ss_corpus* corpus) { delete corpus; }

void ss_oracle_options_init(ss_oracle_options* options) {
  if (!options) return;
  options->objective = "extractive";
  options->pool = 10;
  options->max_select = 4;
  options->beam = 32;
  options->max_sentences = 7;
  options->span_cap = 12;
  options->workers = 1;
}

ss_status ss_oracle_run(const ss_corpus* corpus, const ss_oracle_options* options,
                        ss_labels** out) {
  if (!corpus || !options || !options->objective || !out) {
    return invalid_argument("ss_oracle_run: null argument");
  }
  return guarded([&]() {
    sumstate::OracleRunOptions run;
    run.objective = sumstate::objective_from_name(options->objective);
    run.pool = options->pool;
    run.max_select = options->max_select;
    run.beam = options->beam;
    run.max_sentences = options->max_sentences;
    run.span_cap = options->span_cap;
    run.workers = options->workers;
    auto result = sumstate::run_oracle(corpus->docs, run);
    auto labels = std::make_unique<ss_labels>();
    labels->labels = std::move(result.labels);
    labels->mean_score = result.mean_score;
    labels->heuristic_span_docs = result.heuristic_span_docs;
    *out = labels.release();
  });
}

ss_status ss_labels_save(const ss_labels* labels, const ss_corpus* corpus, const char* path) {
  if (!labels || !corpus || !path) return invalid_argument("ss_labels_save: null argument");
  return guarded([&]() { sumstate::save_labels(path, corpus->docs, labels->labels); });
}

ss_status ss_labels_load(const char* path, const ss_corpus* corpus, ss_labels** out) {
  if (!path || !corpus || !out) return invalid_argument("ss_labels_load: null argument");
  return guarded([&]() {
    auto labels = std::make_unique<ss_labels>();
    labels->labels = sumstate::load_labels(path, corpus->docs);
    for (const auto& l : labels->labels) labels->mean_score += l.score;
    if (!labels->labels.empty()) {
      labels->mean_score /= static_cast<double>(labels->labels.size());
    }
    *out = labels.release();
  });
}

double ss_labels_mean_score(const ss_labels* labels) { return labels ? labels->mean_score : 0.0; }

int ss_labels_heuristic_span_docs(const ss_labels* labels) {
  return labels ? labels->heuristic_span_docs : 0;
}

ss_status ss_labels_to_summaries(const ss_labels* labels, const ss_corpus* corpus,
                                 ss_summaries** out) {
  if (!labels || !corpus || !out) return invalid_argument("ss_labels_to_summaries: null argument");
  if (labels->labels.size() != corpus->docs.size()) {
    return invalid_argument("ss_labels_to_summaries: labels misaligned with corpus");
  }
  return guarded([&]() {
    auto summaries = std::make_unique<ss_summaries>();
    summaries->records.reserve(labels->labels.size());
    for (std::size_t i = 0; i < labels->labels.size(); ++i) {
      sumstate::SummaryRecord record;
      record.summary = sumstate::labels_to_summary(labels->labels[i]);
      sumstate::validate_summary(record.summary, corpus->docs[i]);
      summaries->records.push_back(std::move(record));
    }
    *out = summaries.release();
  });
}

void ss_labels_free(ss_labels* labels) { delete labels; }

void ss_model_config_init(ss_model_config* config) {
  if (!config) return;
  const sumstate::ModelConfig defaults;
  config->embed_dim = defaults.embed_dim;
  config->hidden_dim = defaults.hidden_dim;
  config->lambda_s0 = defaults.lambda_s0;
  config->lambda_s1 = defaults.lambda_s1;
  config->lambda_w0 = defaults.lambda_w0;
  config->lambda_w1 = defaults.lambda_w1;
  config->learning_rate = defaults.learning_rate;
  config->batch_size = defaults.batch_size;
  config->epochs = defaults.epochs;
  config->mode = "extractive";
  config->state_variant = "lstm";
  config->seed = defaults.seed;
}

ss_status ss_model_init(const ss_model_config* config, const ss_corpus* corpus, ss_model** out) {
  if (!config || !config->mode || !config->state_variant || !corpus || !out) {
    return invalid_argument("ss_model_init: null argument");
  }
  return guarded([&]() {
    sumstate::ModelConfig cfg;
    cfg.embed_dim = config->embed_dim;
    cfg.hidden_dim = config->hidden_dim;
    cfg.lambda_s0 = config->lambda_s0;
    cfg.lambda_s1 = config->lambda_s1;
    cfg.lambda_w0 = config->lambda_w0;
    cfg.lambda_w1 = config->lambda_w1;
    cfg.learning_rate = config->learning_rate;
    cfg.batch_size = config->batch_size;
    cfg.epochs = config->epochs;
    cfg.mode = sumstate::mode_from_name(config->mode);
    cfg.state_variant = sumstate::variant_from_name(config->state_variant);
    cfg.seed = config->seed;
    cfg.validate();
    sumstate::ModelParams params(cfg, sumstate::Vocabulary::build(corpus->docs));
    params.init_random();
    *out = new ss_model{std::move(params)};
  });
}

ss_status ss_model_train(ss_model* model, const ss_corpus* corpus, const ss_labels* labels,
                         const ss_corpus* validation_corpus,
                         const ss_labels* validation_labels, const char* log_path) {
  if (!model || !corpus || !labels) return invalid_argument("ss_model_train: null argument");
  if ((validation_corpus == nullptr) != (validation_labels == nullptr)) {
    return invalid_argument("ss_model_train: validation corpus and labels must come together");
  }
  return guarded([&]() {
    sumstate::TrainOptions options;
    if (validation_corpus) {
      options.validation_docs = &validation_corpus->docs;
      options.validation_labels = &validation_labels->labels;
    }
    auto result = sumstate::train(model->params, corpus->docs, labels->labels, options);
    if (log_path) sumstate::save_train_log(log_path, result.log);
  });
}

ss_status ss_model_save(const ss_model* model, const char* path) {
  if (!model || !path) return invalid_argument("ss_model_save: null argument");
  return guarded([&]() { sumstate::save_model(model->params, path); });
}

ss_status ss_model_load(const char* path, ss_model** out) {
  if (!path || !out) return invalid_argument("ss_model_load: null argument");
  return guarded([&]() { *out = new ss_model{sumstate::load_model(path)}; });
}

ss_status ss_model_summarize(const ss_model* model, const ss_corpus* corpus,
                             ss_summaries** out) {
  if (!model || !corpus || !out) return invalid_argument("ss_model_summarize: null argument");
  return guarded([&]() {
    // Decoding builds a graph over the parameter tensors but never writes
    // them; the handle stays logically const.
    auto& params = const_cast<ss_model*>(model)->params;
    auto summaries = std::make_unique<ss_summaries>();
    summaries->records.reserve(corpus->docs.size());
    for (const auto& doc : corpus->docs) {
      auto result = sumstate::summarize(params, doc);
      sumstate::SummaryRecord record;
      record.summary = std::move(result.summary);
      record.sentence_probs = std::move(result.sentence_probs);
      record.word_probs = std::move(result.word_probs);
      summaries->records.push_back(std::move(record));
    }
    *out = summaries.release();
  });
}

void ss_model_free(ss_model* model) { delete model; }

ss_status ss_summaries_save(const ss_summaries* summaries, const ss_corpus* corpus,
                            const char* path) {
  if (!summaries || !corpus || !path) return invalid_argument("ss_summaries_save: null argument");
  return guarded([&]() { sumstate::save_summaries(path, corpus->docs, summaries->records); });
}

ss_status ss_summaries_load(const char* path, const ss_corpus* corpus, ss_summaries** out) {
  if (!path || !corpus || !out) return invalid_argument("ss_summaries_load: null argument");
  return guarded([&]() {
    auto summaries = std::make_unique<ss_summaries>();
    summaries->records = sumstate::load_summaries(path, corpus->docs);
    *out = summaries.release();
  });
}

void ss_summaries_free(ss_summaries* summaries) { delete summaries; }

ss_status ss_evaluate(const ss_corpus* corpus, const ss_summaries* summaries, int bin_width,
                      int workers, ss_report** out) {
  if (!corpus || !summaries || !out) return invalid_argument("ss_evaluate: null argument");
  return guarded([&]() {
    std::vector<sumstate::Summary> plain;
    plain.reserve(summaries->records.size());
    for (const auto& r : summaries->records) plain.push_back(r.summary);
    sumstate::EvaluateOptions options;
    options.bin_width = bin_width;
    options.workers = workers;
    *out = new ss_report{sumstate::evaluate(corpus->docs, plain, options)};
  });
}

ss_status ss_report_save(const ss_report* report, const char* path) {
  if (!report || !path) return invalid_argument("ss_report_save: null argument");
  return guarded([&]() { sumstate::save_report(report->report, path); });
}

ss_status ss_report_load(const char* path, ss_report** out) {
  if (!path || !out) return invalid_argument("ss_report_load: null argument");
  return guarded([&]() { *out = new ss_report{sumstate::load_report(path)}; });
}

double ss_report_mean_f1(const ss_report* report, int metric) {
  if (!report) return 0.0;
  switch (metric) {
    case 1: return report->report.mean_r1;
    case 2: return report->report.mean_r2;
    default: return report->report.mean_rl;
  }
}

ss_status ss_report_compare(const ss_report* const* reports, const char* const* names,
                            size_t count, const char* text_path, const char* csv_path) {
  if (!reports || !names || count == 0) {
    return invalid_argument("ss_report_compare: null argument");
  }
  return guarded([&]() {
    std::vector<std::pair<std::string, sumstate::EvalReport>> named;
    named.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (!reports[i] || !names[i]) sumstate::throw_invalid("ss_report_compare: null entry");
      named.emplace_back(names[i], reports[i]->report);
    }
    const auto rows = sumstate::compare(named);
    auto write_file = [](const char* path, const std::string& content) {
      if (!path) return;
      std::ofstream out(path, std::ios::binary);
      if (!out.good()) sumstate::throw_io(std::string("cannot write file: ") + path);
      out << content;
      if (!out.good()) sumstate::throw_io(std::string("failed while writing file: ") + path);
    };
    write_file(text_path, sumstate::comparison_text(rows));
    write_file(csv_path, sumstate::comparison_csv(rows));
  });
}

void ss_report_free(ss_report* report) { delete report; }

ss_status ss_rouge_files(const char* candidate_path, const char* reference_path,
                         double out9[9]) {
  if (!candidate_path || !reference_path || !out9) {
    return invalid_argument("ss_rouge_files: null argument");
  }
  return guarded([&]() {
    auto read_text = [](const char* path) {
      std::ifstream in(path, std::ios::binary);
      if (!in.good()) sumstate::throw_io(std::string("cannot open text file: ") + path);
      std::vector<sumstate::Sentence> sentences;
      std::string line;
      while (std::getline(in, line)) {
        sumstate::Sentence sent;
        std::istringstream words(line);
        std::string word;
        while (words >> word) sent.push_back(word);
        if (!sent.empty()) sentences.push_back(std::move(sent));
      }
      return sentences;
    };
    const auto candidate = read_text(candidate_path);
    const auto reference = read_text(reference_path);
    const auto r1 = sumstate::rouge_n(candidate, reference, 1);
    const auto r2 = sumstate::rouge_n(candidate, reference, 2);
    const auto rl = sumstate::rouge_l(candidate, reference);
    out9[0] = r1.precision; out9[1] = r1.recall; out9[2] = r1.f1;
    out9[3] = r2.precision; out9[4] = r2.recall; out9[5] = r2.f1;
    out9[6] = rl.precision; out9[7] = rl.recall; out9[8] = rl.f1;
  });
}

}  // extern "C"
