#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sumstate/corpus.hpp"
#include "sumstate/graph.hpp"
#include "sumstate/oracle.hpp"

namespace sumstate {

enum class DecoderMode { Extractive, Compressive };
enum class StateVariant { Lstm, Averaging };

std::string mode_name(DecoderMode mode);
DecoderMode mode_from_name(const std::string& name);
std::string variant_name(StateVariant variant);
StateVariant variant_from_name(const std::string& name);

struct ModelConfig {
  int embed_dim = 32;
  int hidden_dim = 32;  // d, per LSTM direction
  double lambda_s0 = 2.0;
  double lambda_s1 = 1.0;
  double lambda_w0 = 1.0;
  double lambda_w1 = 0.5;
  double learning_rate = 0.001;
  int batch_size = 2;
  int epochs = 5;
  DecoderMode mode = DecoderMode::Extractive;
  StateVariant state_variant = StateVariant::Lstm;
  std::uint64_t seed = 1;

  void validate() const;

  // Dimension of the summary state o^s: the SentStates hidden state (d) or,
  // in the averaging variant, a weighted combination of e(s) vectors (2d).
  int summary_state_dim() const;
  // SentStates input: e(s_k) (2d) when extractive, e(c_k) (d) when compressive.
  int sent_states_input_dim() const;
};

struct Vocabulary {
  std::vector<std::string> words;  // index 0 is the out-of-vocabulary slot
  std::unordered_map<std::string, int> index;

  static Vocabulary build(const std::vector<Document>& docs);
  int lookup(const std::string& word) const;
  void add(const std::string& word);
  std::size_t size() const { return words.size(); }
};

struct LstmWeights {
  // Gate order i,f,o,g stacked along rows: weight is 4h x (input+h).
  Tensor weight;
  Tensor bias;
  int hidden = 0;
  int input = 0;

  LstmWeights() = default;
  LstmWeights(const std::string& name, int input_dim, int hidden_dim);
};

struct ModelParams {
  ModelConfig config;
  Vocabulary vocab;

  Tensor embeddings;  // V x E
  LstmWeights word_encoder_fwd, word_encoder_bwd;
  LstmWeights sent_encoder_fwd, sent_encoder_bwd;
  LstmWeights sent_states, word_states;
  Tensor w_e, b_s;  // sentence head projection
  Tensor w_z, x_z;  // sentence action scores (2 x d, 2)
  Tensor w_c, b_w;  // word head projection
  Tensor w_y, x_y;  // word action scores

  ModelParams(const ModelConfig& cfg, Vocabulary vocabulary);

  // Uniform(-0.1, 0.1) weights, zero biases except forget gates at 1.
  void init_random();
  // Gaussian(0, sigma) everywhere; used by the gradient checker.
  void init_gaussian(double sigma, std::uint64_t seed);

  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
  void zero_grad();
};

struct EncoderOutput {
  Expr doc_embedding;                         // e(D), 2d
  std::vector<Expr> sent_embedding;           // e(s_i), 2d
  std::vector<Expr> sent_hidden;              // h^s_i, 2d
  std::vector<std::vector<Expr>> word_embed;  // e(w_ij), E
  std::vector<std::vector<Expr>> word_hidden; // h^w_ij, 2d
  std::vector<Expr> d_sent;                   // [e(D); e(s_i); h^s_i], 6d
  std::vector<std::vector<Expr>> d_word;      // [e(D); e(s_i); e(w); h^s; h^w], 8d+E
};

struct SentenceDecision {
  double prob_skip = 0.0;    // p(z=0)
  double prob_select = 0.0;  // p(z=1)
  int selected = 0;
  Expr logits;
  std::vector<double> summary_state;  // o^s_i value at decision time
};

struct WordDecision {
  double prob_drop = 0.0;
  double prob_keep = 0.0;
  int kept = 0;
  Expr logits;
};

struct DecodeTrace {
  std::vector<SentenceDecision> sentences;
  std::vector<std::vector<WordDecision>> words;         // empty unless decoded
  std::vector<std::vector<double>> compressed_states;   // e(c_i) for decoded sentences
};

EncoderOutput encode(Graph& graph, ModelParams& params, const Document& doc);

// Sequential decision decoder. With a teacher, selection bits come from the
// labels; free-running otherwise (threshold 0.5).
DecodeTrace decode(Graph& graph, ModelParams& params, const EncoderOutput& enc,
                   const Document& doc, const OracleLabels* teacher);

struct LossValues {
  double sentence_loss = 0.0;
  double word_loss = 0.0;
  double total = 0.0;
  Expr total_expr;
};

// Class-weighted NLL of the observed labels; requires a teacher-forced trace.
LossValues loss(Graph& graph, const ModelConfig& config, const DecodeTrace& trace,
                const OracleLabels& gold, const std::string& doc_id);

// Thresholded selection over p(z=1) values; falls back to the argmax
// sentence when nothing clears 0.5.
std::vector<int> select_from_probabilities(const std::vector<double>& probs);

struct SummarizeResult {
  Summary summary;
  std::vector<double> sentence_probs;
  std::vector<std::vector<double>> word_probs;  // per decoded sentence, empty otherwise
  bool used_fallback = false;
};

SummarizeResult summarize(ModelParams& params, const Document& doc);

// Max relative error between analytic gradients and central finite
// differences over >= 50 sampled coordinates per tensor.
double grad_check(const Document& doc, const OracleLabels& gold, const ModelConfig& config,
                  double epsilon);

struct TrainLogEntry {
  int epoch = 0;
  int batch = 0;  // -1 for validation records
  double sentence_loss = 0.0;
  double word_loss = 0.0;
  double total = 0.0;
  bool validation = false;
};

struct TrainOptions {
  const std::vector<Document>* validation_docs = nullptr;
  const std::vector<OracleLabels>* validation_labels = nullptr;
};

struct TrainResult {
  std::vector<double> epoch_loss;  // mean per-document total loss
  std::vector<TrainLogEntry> log;
};

// Mini-batch Adam with teacher forcing; deterministic under config.seed.
TrainResult train(ModelParams& params, const std::vector<Document>& docs,
                  const std::vector<OracleLabels>& labels, const TrainOptions& options = {});

// Teacher-forced loss and thresholded-prediction accuracy over a corpus.
struct EvalStats {
  double sentence_loss = 0.0;
  double word_loss = 0.0;
  double total = 0.0;
  double sentence_accuracy = 0.0;
};
EvalStats teacher_forced_stats(ModelParams& params, const std::vector<Document>& docs,
                               const std::vector<OracleLabels>& labels);

// Versioned binary checkpoint holding the config, the vocabulary and every
// named tensor with explicit shapes; round-trips bit-exactly.
void save_model(const ModelParams& params, const std::string& path);
ModelParams load_model(const std::string& path);

class AdamOptimizer {
 public:
  AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8);

  void step(std::vector<Tensor*> tensors);

 private:
  double learning_rate_, beta1_, beta2_, epsilon_;
  long long steps_ = 0;
  std::unordered_map<Tensor*, std::pair<std::vector<double>, std::vector<double>>> moments_;
};

}  // namespace sumstate
