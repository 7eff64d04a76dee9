/*
 * C API for the sumstate summarization toolkit.
 *
 * All functions return an ss_status; on failure ss_last_error() holds a
 * human-readable message for the calling thread. Objects returned through
 * out-parameters are owned by the caller and released with the matching
 * _free function (all of which accept NULL).
 */
#ifndef SUMSTATE_H
#define SUMSTATE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ss_status {
  SS_OK = 0,
  SS_ERR_IO = 1,
  SS_ERR_PARSE = 2,
  SS_ERR_INVALID = 3,
  SS_ERR_INTERNAL = 4
} ss_status;

typedef struct ss_corpus ss_corpus;
typedef struct ss_labels ss_labels;
typedef struct ss_model ss_model;
typedef struct ss_summaries ss_summaries;
typedef struct ss_report ss_report;

const char* ss_version(void);
const char* ss_last_error(void);
/* Conventional process exit code: 0 ok, 2 usage/input error, 1 internal. */
int ss_status_exit_code(ss_status status);

/* ---- corpus ---- */

ss_status ss_corpus_load(const char* path, int strict, ss_corpus** out);
ss_status ss_corpus_save(const ss_corpus* corpus, const char* path);
size_t ss_corpus_size(const ss_corpus* corpus);
int ss_corpus_skipped_records(const ss_corpus* corpus);
/* LEAD baseline: first m sentences of every document, all tokens kept. */
ss_status ss_corpus_lead(const ss_corpus* corpus, int m, ss_summaries** out);
void ss_corpus_free(ss_corpus* corpus);

/* ---- oracle labels ---- */

typedef struct ss_oracle_options {
  const char* objective; /* "extractive" | "compressive" | "bow" */
  int pool;              /* extractive candidate pool (default 10) */
  int max_select;        /* extractive summary length cap (default 4) */
  int beam;              /* compressive beam width, 0 = unbounded (default 32) */
  int max_sentences;     /* compressive selected-sentence cap (default 7) */
  int span_cap;          /* max deletable spans per sentence (default 12) */
  int workers;           /* corpus-level parallelism (default 1) */
} ss_oracle_options;

void ss_oracle_options_init(ss_oracle_options* options);
ss_status ss_oracle_run(const ss_corpus* corpus, const ss_oracle_options* options,
                        ss_labels** out);
ss_status ss_labels_save(const ss_labels* labels, const ss_corpus* corpus, const char* path);
ss_status ss_labels_load(const char* path, const ss_corpus* corpus, ss_labels** out);
double ss_labels_mean_score(const ss_labels* labels);
/* Documents that had no spans in the file and used the heuristic tagger. */
int ss_labels_heuristic_span_docs(const ss_labels* labels);
/* Realizes label bits as summaries (z-selected sentences, y-kept tokens). */
ss_status ss_labels_to_summaries(const ss_labels* labels, const ss_corpus* corpus,
                                 ss_summaries** out);
void ss_labels_free(ss_labels* labels);

/* ---- model ---- */

typedef struct ss_model_config {
  int embed_dim;
  int hidden_dim;
  double lambda_s0;
  double lambda_s1;
  double lambda_w0;
  double lambda_w1;
  double learning_rate;
  int batch_size;
  int epochs;
  const char* mode;          /* "extractive" | "compressive" */
  const char* state_variant; /* "lstm" | "averaging" */
  uint64_t seed;
} ss_model_config;

void ss_model_config_init(ss_model_config* config);
/* Builds the vocabulary from the corpus and randomly initializes weights. */
ss_status ss_model_init(const ss_model_config* config, const ss_corpus* corpus, ss_model** out);
/* Teacher-forced mini-batch training. Validation inputs may both be NULL.
 * log_path may be NULL to skip writing the training log. */
ss_status ss_model_train(ss_model* model, const ss_corpus* corpus, const ss_labels* labels,
                         const ss_corpus* validation_corpus,
                         const ss_labels* validation_labels, const char* log_path);
ss_status ss_model_save(const ss_model* model, const char* path);
ss_status ss_model_load(const char* path, ss_model** out);
ss_status ss_model_summarize(const ss_model* model, const ss_corpus* corpus,
                             ss_summaries** out);
void ss_model_free(ss_model* model);

/* ---- summaries ---- */

ss_status ss_summaries_save(const ss_summaries* summaries, const ss_corpus* corpus,
                            const char* path);
ss_status ss_summaries_load(const char* path, const ss_corpus* corpus, ss_summaries** out);
void ss_summaries_free(ss_summaries* summaries);

/* ---- evaluation ---- */

ss_status ss_evaluate(const ss_corpus* corpus, const ss_summaries* summaries, int bin_width,
                      int workers, ss_report** out);
ss_status ss_report_save(const ss_report* report, const char* path);
ss_status ss_report_load(const char* path, ss_report** out);
/* metric: 1 = R1, 2 = R2, 0 = RL; returns the corpus mean F1. */
double ss_report_mean_f1(const ss_report* report, int metric);
/* Writes an aligned text table and a CSV with one row per named report.
 * Either output path may be NULL to skip it. */
ss_status ss_report_compare(const ss_report* const* reports, const char* const* names,
                            size_t count, const char* text_path, const char* csv_path);
void ss_report_free(ss_report* report);

/* Scores two plain-text files (one sentence per line, whitespace tokens).
 * out9 = {R1 p,r,f1, R2 p,r,f1, RL p,r,f1}. */
ss_status ss_rouge_files(const char* candidate_path, const char* reference_path,
                         double out9[9]);

#ifdef __cplusplus
}
#endif

#endif /* SUMSTATE_H */
