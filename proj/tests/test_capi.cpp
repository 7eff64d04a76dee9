#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sumstate.h"

namespace {

namespace fs = std::filesystem;

std::string fixture_path() { return std::string(SUMSTATE_DATA_DIR) + "/fixture.jsonl"; }

fs::path scratch(const std::string& name) {
  fs::path dir = fs::path("scratch") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("corpus load, size and error reporting") {
  ss_corpus* corpus = nullptr;
  REQUIRE(ss_corpus_load(fixture_path().c_str(), 1, &corpus) == SS_OK);
  CHECK(ss_corpus_size(corpus) == 20);
  CHECK(ss_corpus_skipped_records(corpus) == 0);

  const auto dir = scratch("capi_corpus");
  const auto copy = (dir / "copy.jsonl").string();
  CHECK(ss_corpus_save(corpus, copy.c_str()) == SS_OK);
  ss_corpus* reloaded = nullptr;
  REQUIRE(ss_corpus_load(copy.c_str(), 1, &reloaded) == SS_OK);
  CHECK(ss_corpus_size(reloaded) == 20);
  ss_corpus_free(reloaded);
  ss_corpus_free(corpus);

  ss_corpus* missing = nullptr;
  CHECK(ss_corpus_load("no/such/file.jsonl", 0, &missing) == SS_ERR_IO);
  CHECK(std::strstr(ss_last_error(), "no/such/file.jsonl") != nullptr);
  CHECK(ss_corpus_load(nullptr, 0, &missing) == SS_ERR_INVALID);

  CHECK(ss_status_exit_code(SS_OK) == 0);
  CHECK(ss_status_exit_code(SS_ERR_IO) == 2);
  CHECK(ss_status_exit_code(SS_ERR_PARSE) == 2);
  CHECK(ss_status_exit_code(SS_ERR_INVALID) == 2);
  CHECK(ss_status_exit_code(SS_ERR_INTERNAL) == 1);
}

TEST_CASE("oracle labels round-trip through the C surface") {
  ss_corpus* corpus = nullptr;
  REQUIRE(ss_corpus_load(fixture_path().c_str(), 1, &corpus) == SS_OK);

  ss_oracle_options options;
  ss_oracle_options_init(&options);
  CHECK(std::string(options.objective) == "extractive");
  CHECK(options.beam == 32);
  options.workers = 2;

  ss_labels* labels = nullptr;
  REQUIRE(ss_oracle_run(corpus, &options, &labels) == SS_OK);
  CHECK(ss_labels_mean_score(labels) > 0.5);
  CHECK(ss_labels_heuristic_span_docs(labels) == 0);  // extractive never needs spans

  const auto dir = scratch("capi_labels");
  const auto path = (dir / "labels.jsonl").string();
  REQUIRE(ss_labels_save(labels, corpus, path.c_str()) == SS_OK);
  ss_labels* reloaded = nullptr;
  REQUIRE(ss_labels_load(path.c_str(), corpus, &reloaded) == SS_OK);
  CHECK(ss_labels_mean_score(reloaded) == ss_labels_mean_score(labels));

  ss_summaries* realized = nullptr;
  REQUIRE(ss_labels_to_summaries(reloaded, corpus, &realized) == SS_OK);
  const auto summaries_path = (dir / "oracle_summaries.jsonl").string();
  CHECK(ss_summaries_save(realized, corpus, summaries_path.c_str()) == SS_OK);

  ss_report* report = nullptr;
  REQUIRE(ss_evaluate(corpus, realized, 10, 2, &report) == SS_OK);
  CHECK(ss_report_mean_f1(report, 1) > 0.7);
  CHECK(ss_report_mean_f1(report, 2) > 0.5);
  CHECK(ss_report_mean_f1(report, 0) > 0.7);

  ss_report_free(report);
  ss_summaries_free(realized);
  ss_labels_free(reloaded);
  ss_labels_free(labels);
  ss_corpus_free(corpus);
}

TEST_CASE("model lifecycle: init, train, save, load, summarize, evaluate, compare") {
  ss_corpus* corpus = nullptr;
  REQUIRE(ss_corpus_load(fixture_path().c_str(), 1, &corpus) == SS_OK);

  ss_oracle_options oracle_options;
  ss_oracle_options_init(&oracle_options);
  ss_labels* labels = nullptr;
  REQUIRE(ss_oracle_run(corpus, &oracle_options, &labels) == SS_OK);

  ss_model_config config;
  ss_model_config_init(&config);
  CHECK(config.hidden_dim == 32);
  CHECK(config.lambda_s0 == 2.0);
  CHECK(config.batch_size == 2);
  config.hidden_dim = 8;
  config.embed_dim = 8;
  config.epochs = 2;
  config.seed = 9;

  ss_model* model = nullptr;
  REQUIRE(ss_model_init(&config, corpus, &model) == SS_OK);

  const auto dir = scratch("capi_model");
  const auto log_path = (dir / "train.log.jsonl").string();
  REQUIRE(ss_model_train(model, corpus, labels, nullptr, nullptr, log_path.c_str()) == SS_OK);
  CHECK(!slurp(log_path).empty());

  const auto ckpt = (dir / "model.ckpt").string();
  REQUIRE(ss_model_save(model, ckpt.c_str()) == SS_OK);
  ss_model* loaded = nullptr;
  REQUIRE(ss_model_load(ckpt.c_str(), &loaded) == SS_OK);
  const auto ckpt2 = (dir / "model2.ckpt").string();
  REQUIRE(ss_model_save(loaded, ckpt2.c_str()) == SS_OK);
  CHECK(slurp(ckpt) == slurp(ckpt2));

  ss_summaries* summaries = nullptr;
  REQUIRE(ss_model_summarize(loaded, corpus, &summaries) == SS_OK);
  const auto summ_path = (dir / "summaries.jsonl").string();
  REQUIRE(ss_summaries_save(summaries, corpus, summ_path.c_str()) == SS_OK);
  ss_summaries* summaries2 = nullptr;
  REQUIRE(ss_summaries_load(summ_path.c_str(), corpus, &summaries2) == SS_OK);

  ss_report* report = nullptr;
  REQUIRE(ss_evaluate(corpus, summaries2, 10, 1, &report) == SS_OK);
  const auto report_path = (dir / "report.json").string();
  REQUIRE(ss_report_save(report, report_path.c_str()) == SS_OK);
  ss_report* report2 = nullptr;
  REQUIRE(ss_report_load(report_path.c_str(), &report2) == SS_OK);
  CHECK(ss_report_mean_f1(report2, 1) == ss_report_mean_f1(report, 1));

  ss_summaries* lead = nullptr;
  REQUIRE(ss_corpus_lead(corpus, 3, &lead) == SS_OK);
  ss_report* lead_report = nullptr;
  REQUIRE(ss_evaluate(corpus, lead, 10, 1, &lead_report) == SS_OK);

  const ss_report* reports[2] = {report, lead_report};
  const char* names[2] = {"system", "lead"};
  const auto table = (dir / "table.txt").string();
  const auto csv = (dir / "table.csv").string();
  REQUIRE(ss_report_compare(reports, names, 2, table.c_str(), csv.c_str()) == SS_OK);
  CHECK(slurp(table).find("lead") != std::string::npos);
  CHECK(slurp(csv).find("system,") == 0);

  const char* dup_names[2] = {"same", "same"};
  CHECK(ss_report_compare(reports, dup_names, 2, nullptr, nullptr) == SS_ERR_INVALID);

  ss_report_free(lead_report);
  ss_report_free(report2);
  ss_report_free(report);
  ss_summaries_free(lead);
  ss_summaries_free(summaries2);
  ss_summaries_free(summaries);
  ss_model_free(loaded);
  ss_model_free(model);
  ss_labels_free(labels);
  ss_corpus_free(corpus);
}

TEST_CASE("model config validation propagates through the C boundary") {
  ss_corpus* corpus = nullptr;
  REQUIRE(ss_corpus_load(fixture_path().c_str(), 1, &corpus) == SS_OK);
  ss_model_config config;
  ss_model_config_init(&config);
  config.hidden_dim = 0;
  ss_model* model = nullptr;
  CHECK(ss_model_init(&config, corpus, &model) == SS_ERR_INVALID);
  config.hidden_dim = 4;
  config.mode = "bogus";
  CHECK(ss_model_init(&config, corpus, &model) == SS_ERR_INVALID);
  ss_corpus_free(corpus);
}

TEST_CASE("worker errors surface as status codes with a message") {
  const auto dir = scratch("capi_span_cap");
  // One sentence with 13 single-token spans: above the default cap of 12.
  std::ofstream out(dir / "corpus.jsonl");
  out << R"({"id":"a","sentences":[["w0","w1","w2","w3","w4","w5","w6","w7","w8","w9","w10","w11","w12","tail"]],"summary":[["tail"]],)"
      << R"("spans":[[[0,1],[1,2],[2,3],[3,4],[4,5],[5,6],[6,7],[7,8],[8,9],[9,10],[10,11],[11,12],[12,13]]]})"
      << "\n";
  out << R"({"id":"b","sentences":[["plain","text"]],"summary":[["plain"]]})" << "\n";
  out.close();

  ss_corpus* corpus = nullptr;
  REQUIRE(ss_corpus_load((dir / "corpus.jsonl").string().c_str(), 1, &corpus) == SS_OK);
  ss_oracle_options options;
  ss_oracle_options_init(&options);
  options.objective = "compressive";
  options.workers = 4;
  ss_labels* labels = nullptr;
  CHECK(ss_oracle_run(corpus, &options, &labels) == SS_ERR_INVALID);
  CHECK(std::strstr(ss_last_error(), "cap") != nullptr);

  // Raising the cap makes the same corpus labelable.
  options.span_cap = 13;
  REQUIRE(ss_oracle_run(corpus, &options, &labels) == SS_OK);
  ss_labels_free(labels);
  ss_corpus_free(corpus);
}

TEST_CASE("rouge file scoring through the C surface") {
  const auto dir = scratch("capi_rouge");
  const auto a = (dir / "a.txt").string();
  const auto b = (dir / "b.txt").string();
  {
    std::ofstream out(a);
    out << "the cat sat\non the mat\n";
  }
  {
    std::ofstream out(b);
    out << "the cat sat\n";
  }
  double scores[9];
  REQUIRE(ss_rouge_files(a.c_str(), a.c_str(), scores) == SS_OK);
  for (int i = 0; i < 9; ++i) CHECK(scores[i] == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(ss_rouge_files(a.c_str(), b.c_str(), scores) == SS_OK);
  CHECK(scores[1] == doctest::Approx(1.0).epsilon(1e-12));  // R1 recall
  CHECK(scores[0] == doctest::Approx(0.5).epsilon(1e-12));  // R1 precision
  CHECK(ss_rouge_files("missing.txt", b.c_str(), scores) == SS_ERR_IO);
}

TEST_CASE("version string is present") {
  CHECK(std::string(ss_version()) == "0.1.0");
}
