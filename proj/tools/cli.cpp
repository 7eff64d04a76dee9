// Command-line front end. Links against the C API in sumstate.h only.

#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sumstate.h"

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Applies a flat key=value file to a parsed subcommand. Keys name long
// options without the leading dashes; values already set on the command
// line win. Returns an error message, empty on success.
std::string apply_config_file(CLI::App* cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) return "cannot open config file: " + path;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string entry = trim(line);
    if (entry.empty() || entry[0] == '#') continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      return path + " line " + std::to_string(line_number) + ": expected key=value";
    }
    const std::string key = trim(entry.substr(0, eq));
    std::string value = trim(entry.substr(eq + 1));
    if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                              (value.front() == '\'' && value.back() == '\''))) {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) {
      return path + " line " + std::to_string(line_number) + ": empty key";
    }
    CLI::Option* option = cmd->get_option_no_throw("--" + key);
    if (option == nullptr || key == "config") {
      return path + " line " + std::to_string(line_number) + ": unknown configuration key '" +
             key + "'";
    }
    if (option->count() > 0) continue;  // command-line flags take precedence
    option->add_result(value);
    try {
      option->run_callback();
    } catch (const CLI::Error& e) {
      return path + " line " + std::to_string(line_number) + ": " + e.what();
    }
  }
  return "";
}

int require_values(const std::vector<std::pair<const char*, const std::string*>>& required) {
  for (const auto& [name, value] : required) {
    if (value->empty()) {
      std::fprintf(stderr, "error: missing required option %s\n", name);
      return 2;
    }
  }
  return 0;
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using CorpusHandle = Handle<ss_corpus, ss_corpus_free>;
using LabelsHandle = Handle<ss_labels, ss_labels_free>;
using ModelHandle = Handle<ss_model, ss_model_free>;
using SummariesHandle = Handle<ss_summaries, ss_summaries_free>;
using ReportHandle = Handle<ss_report, ss_report_free>;

int fail(ss_status status) {
  std::fprintf(stderr, "error: %s\n", ss_last_error());
  return ss_status_exit_code(status);
}

#define CLI_TRY(call)                         \
  do {                                        \
    const ss_status status_ = (call);         \
    if (status_ != SS_OK) return fail(status_); \
  } while (0)

struct OracleArgs {
  std::string config;
  std::string corpus, output;
  std::string objective = "extractive";
  int pool = 10;
  int max_select = 4;
  int beam = 32;
  int max_sents = 7;
  int span_cap = 12;
  int workers = 1;
  bool strict = false;
};

int run_oracle(const OracleArgs& args) {
  CorpusHandle corpus;
  CLI_TRY(ss_corpus_load(args.corpus.c_str(), args.strict ? 1 : 0, corpus.out()));
  if (ss_corpus_skipped_records(corpus.get()) > 0) {
    std::fprintf(stderr, "note: skipped %d malformed record(s)\n",
                 ss_corpus_skipped_records(corpus.get()));
  }

  ss_oracle_options options;
  ss_oracle_options_init(&options);
  options.objective = args.objective.c_str();
  options.pool = args.pool;
  options.max_select = args.max_select;
  options.beam = args.beam;
  options.max_sentences = args.max_sents;
  options.span_cap = args.span_cap;
  options.workers = args.workers;

  LabelsHandle labels;
  CLI_TRY(ss_oracle_run(corpus.get(), &options, labels.out()));
  const int heuristic = ss_labels_heuristic_span_docs(labels.get());
  if (heuristic > 0) {
    std::fprintf(stderr, "note: %d/%zu document(s) had no spans; heuristic spans applied\n",
                 heuristic, ss_corpus_size(corpus.get()));
  }
  CLI_TRY(ss_labels_save(labels.get(), corpus.get(), args.output.c_str()));
  std::printf("mean oracle score: %.6f\n", ss_labels_mean_score(labels.get()));
  return 0;
}

struct TrainArgs {
  std::string config;
  std::string corpus, labels, output, log;
  std::string validation, validation_labels;
  std::string mode = "extractive";
  std::string state_variant = "lstm";
  int embed_dim = 32;
  int hidden_dim = 32;
  double lambda_s0 = 2.0, lambda_s1 = 1.0, lambda_w0 = 1.0, lambda_w1 = 0.5;
  double learning_rate = 0.001;
  int batch_size = 2;
  int epochs = 5;
  std::uint64_t seed = 1;
  bool strict = false;
};

int run_train(const TrainArgs& args) {
  CorpusHandle corpus;
  CLI_TRY(ss_corpus_load(args.corpus.c_str(), args.strict ? 1 : 0, corpus.out()));
  LabelsHandle labels;
  CLI_TRY(ss_labels_load(args.labels.c_str(), corpus.get(), labels.out()));

  CorpusHandle validation;
  LabelsHandle validation_labels;
  if (!args.validation.empty()) {
    CLI_TRY(ss_corpus_load(args.validation.c_str(), args.strict ? 1 : 0, validation.out()));
    CLI_TRY(ss_labels_load(args.validation_labels.c_str(), validation.get(),
                           validation_labels.out()));
  }

  ss_model_config config;
  ss_model_config_init(&config);
  config.embed_dim = args.embed_dim;
  config.hidden_dim = args.hidden_dim;
  config.lambda_s0 = args.lambda_s0;
  config.lambda_s1 = args.lambda_s1;
  config.lambda_w0 = args.lambda_w0;
  config.lambda_w1 = args.lambda_w1;
  config.learning_rate = args.learning_rate;
  config.batch_size = args.batch_size;
  config.epochs = args.epochs;
  config.mode = args.mode.c_str();
  config.state_variant = args.state_variant.c_str();
  config.seed = args.seed;

  ModelHandle model;
  CLI_TRY(ss_model_init(&config, corpus.get(), model.out()));
  CLI_TRY(ss_model_train(model.get(), corpus.get(), labels.get(), validation.get(),
                         validation_labels.get(), args.log.empty() ? nullptr : args.log.c_str()));
  CLI_TRY(ss_model_save(model.get(), args.output.c_str()));
  std::fprintf(stderr, "trained %d epoch(s) on %zu document(s)\n", args.epochs,
               ss_corpus_size(corpus.get()));
  return 0;
}

struct SummarizeArgs {
  std::string config;
  std::string corpus, model, labels, output;
  int lead = 0;
  bool strict = false;
};

int run_summarize(const SummarizeArgs& args) {
  CorpusHandle corpus;
  CLI_TRY(ss_corpus_load(args.corpus.c_str(), args.strict ? 1 : 0, corpus.out()));

  SummariesHandle summaries;
  if (!args.model.empty()) {
    ModelHandle model;
    CLI_TRY(ss_model_load(args.model.c_str(), model.out()));
    CLI_TRY(ss_model_summarize(model.get(), corpus.get(), summaries.out()));
  } else if (!args.labels.empty()) {
    LabelsHandle labels;
    CLI_TRY(ss_labels_load(args.labels.c_str(), corpus.get(), labels.out()));
    CLI_TRY(ss_labels_to_summaries(labels.get(), corpus.get(), summaries.out()));
  } else {
    CLI_TRY(ss_corpus_lead(corpus.get(), args.lead, summaries.out()));
  }
  CLI_TRY(ss_summaries_save(summaries.get(), corpus.get(), args.output.c_str()));
  return 0;
}

struct EvaluateArgs {
  std::string config;
  std::string corpus, summaries, output;
  int bin_width = 10;
  int workers = 1;
  std::string name = "system";
  std::vector<std::string> compare;  // name=report.json
  std::string table_text, table_csv;
  bool strict = false;
};

int run_evaluate(const EvaluateArgs& args) {
  CorpusHandle corpus;
  CLI_TRY(ss_corpus_load(args.corpus.c_str(), args.strict ? 1 : 0, corpus.out()));
  SummariesHandle summaries;
  CLI_TRY(ss_summaries_load(args.summaries.c_str(), corpus.get(), summaries.out()));

  ReportHandle report;
  CLI_TRY(ss_evaluate(corpus.get(), summaries.get(), args.bin_width, args.workers,
                      report.out()));
  CLI_TRY(ss_report_save(report.get(), args.output.c_str()));
  std::printf("R1 %.6f R2 %.6f RL %.6f\n", ss_report_mean_f1(report.get(), 1),
              ss_report_mean_f1(report.get(), 2), ss_report_mean_f1(report.get(), 0));

  if (!args.compare.empty()) {
    std::vector<std::string> names = {args.name};
    std::vector<ReportHandle> loaded(args.compare.size());
    std::vector<const ss_report*> reports = {report.get()};
    for (std::size_t i = 0; i < args.compare.size(); ++i) {
      const auto& entry = args.compare[i];
      const auto eq = entry.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
        std::fprintf(stderr, "error: --compare expects name=report.json, got '%s'\n",
                     entry.c_str());
        return 2;
      }
      names.push_back(entry.substr(0, eq));
      CLI_TRY(ss_report_load(entry.substr(eq + 1).c_str(), loaded[i].out()));
      reports.push_back(loaded[i].get());
    }
    std::vector<const char*> name_ptrs;
    for (const auto& n : names) name_ptrs.push_back(n.c_str());
    CLI_TRY(ss_report_compare(reports.data(), name_ptrs.data(), reports.size(),
                              args.table_text.empty() ? nullptr : args.table_text.c_str(),
                              args.table_csv.empty() ? nullptr : args.table_csv.c_str()));
  }
  return 0;
}

struct RougeArgs {
  std::string config;
  std::string candidate, reference;
};

int run_rouge(const RougeArgs& args) {
  double scores[9];
  CLI_TRY(ss_rouge_files(args.candidate.c_str(), args.reference.c_str(), scores));
  std::printf("R1 p=%.6f r=%.6f f1=%.6f\n", scores[0], scores[1], scores[2]);
  std::printf("R2 p=%.6f r=%.6f f1=%.6f\n", scores[3], scores[4], scores[5]);
  std::printf("RL p=%.6f r=%.6f f1=%.6f\n", scores[6], scores[7], scores[8]);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"summary-state extractive/compressive summarizer"};
  app.set_version_flag("--version", ss_version());
  app.require_subcommand(1);

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "build oracle labels for a corpus");
  oracle->add_option("--corpus", oracle_args.corpus, "corpus file (JSONL)");
  oracle->add_option("--output", oracle_args.output, "label file to write");
  oracle
      ->add_option("--objective", oracle_args.objective,
                   "extractive | compressive | bow")
      ->capture_default_str();
  oracle->add_option("--pool", oracle_args.pool, "extractive candidate pool size (p)")
      ->capture_default_str();
  oracle
      ->add_option("--max-select", oracle_args.max_select,
                   "extractive summary length cap (m)")
      ->capture_default_str();
  oracle->add_option("--beam", oracle_args.beam, "compressive beam width (n), 0 = unbounded")
      ->capture_default_str();
  oracle
      ->add_option("--max-sents", oracle_args.max_sents,
                   "compressive selected-sentence cap")
      ->capture_default_str();
  oracle->add_option("--span-cap", oracle_args.span_cap, "max deletable spans per sentence")
      ->capture_default_str();
  oracle->add_option("--workers", oracle_args.workers, "parallel workers")
      ->capture_default_str();
  oracle->add_flag("--strict", oracle_args.strict, "abort on malformed records");
  oracle->add_option("--config", oracle_args.config,
                     "flat key=value file; command-line flags take precedence");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "train the sequence labeler");
  train->add_option("--corpus", train_args.corpus, "corpus file (JSONL)");
  train->add_option("--labels", train_args.labels, "oracle label file");
  train->add_option("--output", train_args.output, "checkpoint file to write");
  train->add_option("--log", train_args.log, "training log file (JSONL)");
  train->add_option("--validation", train_args.validation, "validation corpus file");
  train->add_option("--validation-labels", train_args.validation_labels,
                    "validation label file");
  train->add_option("--mode", train_args.mode, "extractive | compressive")
      ->capture_default_str();
  train->add_option("--state-variant", train_args.state_variant, "lstm | averaging")
      ->capture_default_str();
  train->add_option("--embed-dim", train_args.embed_dim, "word embedding size")
      ->capture_default_str();
  train->add_option("--hidden-dim", train_args.hidden_dim, "LSTM hidden size per direction")
      ->capture_default_str();
  train->add_option("--lambda-s0", train_args.lambda_s0, "sentence class-0 loss weight")
      ->capture_default_str();
  train->add_option("--lambda-s1", train_args.lambda_s1, "sentence class-1 loss weight")
      ->capture_default_str();
  train->add_option("--lambda-w0", train_args.lambda_w0, "word class-0 loss weight")
      ->capture_default_str();
  train->add_option("--lambda-w1", train_args.lambda_w1, "word class-1 loss weight")
      ->capture_default_str();
  train->add_option("--lr", train_args.learning_rate, "Adam learning rate")
      ->capture_default_str();
  train->add_option("--batch-size", train_args.batch_size, "documents per batch")
      ->capture_default_str();
  train->add_option("--epochs", train_args.epochs, "training epochs")->capture_default_str();
  train->add_option("--seed", train_args.seed, "RNG seed")->capture_default_str();
  train->add_flag("--strict", train_args.strict, "abort on malformed records");
  train->add_option("--config", train_args.config,
                    "flat key=value file; command-line flags take precedence");

  SummarizeArgs summarize_args;
  auto* summarize = app.add_subcommand("summarize", "produce summaries for a corpus");
  summarize->add_option("--corpus", summarize_args.corpus, "corpus file (JSONL)");
  auto* model_opt = summarize->add_option("--model", summarize_args.model, "model checkpoint");
  auto* labels_opt =
      summarize->add_option("--labels", summarize_args.labels, "realize oracle labels instead");
  auto* lead_opt = summarize->add_option("--lead", summarize_args.lead,
                                         "LEAD baseline: first m sentences");
  model_opt->excludes(labels_opt)->excludes(lead_opt);
  labels_opt->excludes(lead_opt);
  summarize->add_option("--output", summarize_args.output, "summaries file to write");
  summarize->add_flag("--strict", summarize_args.strict, "abort on malformed records");
  summarize->add_option("--config", summarize_args.config,
                        "flat key=value file; command-line flags take precedence");

  EvaluateArgs evaluate_args;
  auto* evaluate = app.add_subcommand("evaluate", "score summaries against references");
  evaluate->add_option("--corpus", evaluate_args.corpus, "corpus file (JSONL)");
  evaluate->add_option("--summaries", evaluate_args.summaries, "summaries file");
  evaluate->add_option("--output", evaluate_args.output, "report file to write");
  evaluate->add_option("--bin-width", evaluate_args.bin_width, "histogram bin width in words")
      ->capture_default_str();
  evaluate->add_option("--workers", evaluate_args.workers, "parallel workers")
      ->capture_default_str();
  evaluate->add_option("--name", evaluate_args.name, "system name for the comparison table")
      ->capture_default_str();
  evaluate->add_option("--compare", evaluate_args.compare,
                       "additional name=report.json rows for the comparison table");
  evaluate->add_option("--table-text", evaluate_args.table_text,
                       "write the comparison table as aligned text");
  evaluate->add_option("--table-csv", evaluate_args.table_csv,
                       "write the comparison table as CSV");
  evaluate->add_flag("--strict", evaluate_args.strict, "abort on malformed records");
  evaluate->add_option("--config", evaluate_args.config,
                       "flat key=value file; command-line flags take precedence");

  RougeArgs rouge_args;
  auto* rouge = app.add_subcommand("rouge", "score two plain-text files");
  rouge->add_option("--candidate", rouge_args.candidate, "candidate text, one sentence per line");
  rouge->add_option("--reference", rouge_args.reference, "reference text, one sentence per line");
  rouge->add_option("--config", rouge_args.config,
                    "flat key=value file; command-line flags take precedence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* parsed = nullptr;
  const std::string* config_path = nullptr;
  if (oracle->parsed()) {
    parsed = oracle;
    config_path = &oracle_args.config;
  } else if (train->parsed()) {
    parsed = train;
    config_path = &train_args.config;
  } else if (summarize->parsed()) {
    parsed = summarize;
    config_path = &summarize_args.config;
  } else if (evaluate->parsed()) {
    parsed = evaluate;
    config_path = &evaluate_args.config;
  } else if (rouge->parsed()) {
    parsed = rouge;
    config_path = &rouge_args.config;
  } else {
    return 2;
  }

  if (!config_path->empty()) {
    const std::string message = apply_config_file(parsed, *config_path);
    if (!message.empty()) {
      std::fprintf(stderr, "error: %s\n", message.c_str());
      return 2;
    }
  }

  if (parsed == oracle) {
    if (int rc = require_values({{"--corpus", &oracle_args.corpus},
                                 {"--output", &oracle_args.output}})) {
      return rc;
    }
    return run_oracle(oracle_args);
  }
  if (parsed == train) {
    if (int rc = require_values({{"--corpus", &train_args.corpus},
                                 {"--labels", &train_args.labels},
                                 {"--output", &train_args.output}})) {
      return rc;
    }
    if (train_args.validation.empty() != train_args.validation_labels.empty()) {
      std::fprintf(stderr, "error: --validation and --validation-labels come together\n");
      return 2;
    }
    return run_train(train_args);
  }
  if (parsed == summarize) {
    if (int rc = require_values({{"--corpus", &summarize_args.corpus},
                                 {"--output", &summarize_args.output}})) {
      return rc;
    }
    const int sources = (!summarize_args.model.empty() ? 1 : 0) +
                        (!summarize_args.labels.empty() ? 1 : 0) +
                        (summarize_args.lead > 0 ? 1 : 0);
    if (sources != 1) {
      std::fprintf(stderr, "error: summarize needs exactly one of --model, --labels or --lead\n");
      return 2;
    }
    return run_summarize(summarize_args);
  }
  if (parsed == evaluate) {
    if (int rc = require_values({{"--corpus", &evaluate_args.corpus},
                                 {"--summaries", &evaluate_args.summaries},
                                 {"--output", &evaluate_args.output}})) {
      return rc;
    }
    return run_evaluate(evaluate_args);
  }
  if (int rc = require_values({{"--candidate", &rouge_args.candidate},
                               {"--reference", &rouge_args.reference}})) {
    return rc;
  }
  return run_rouge(rouge_args);
}
