#include "sumstate/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sumstate/error.hpp"

namespace sumstate {

std::string mode_name(DecoderMode mode) {
  return mode == DecoderMode::Extractive ? "extractive" : "compressive";
}

DecoderMode mode_from_name(const std::string& name) {
  if (name == "extractive") return DecoderMode::Extractive;
  if (name == "compressive") return DecoderMode::Compressive;
  throw_invalid("unknown decoder mode '" + name + "' (extractive|compressive)");
}

std::string variant_name(StateVariant variant) {
  return variant == StateVariant::Lstm ? "lstm" : "averaging";
}

StateVariant variant_from_name(const std::string& name) {
  if (name == "lstm") return StateVariant::Lstm;
  if (name == "averaging") return StateVariant::Averaging;
  throw_invalid("unknown state variant '" + name + "' (lstm|averaging)");
}

void ModelConfig::validate() const {
  if (embed_dim < 1 || hidden_dim < 1) throw_invalid("model dimensions must be >= 1");
  if (lambda_s0 <= 0 || lambda_s1 <= 0 || lambda_w0 <= 0 || lambda_w1 <= 0) {
    throw_invalid("loss class weights must be > 0");
  }
  // learning_rate == 0 is allowed: it freezes the optimizer.
  if (learning_rate < 0) throw_invalid("learning rate must be >= 0");
  if (batch_size < 1) throw_invalid("batch size must be >= 1");
  if (epochs < 0) throw_invalid("epochs must be >= 0");
}

int ModelConfig::summary_state_dim() const {
  return state_variant == StateVariant::Lstm ? hidden_dim : 2 * hidden_dim;
}

int ModelConfig::sent_states_input_dim() const {
  return mode == DecoderMode::Extractive ? 2 * hidden_dim : hidden_dim;
}

Vocabulary Vocabulary::build(const std::vector<Document>& docs) {
  Vocabulary vocab;
  vocab.add("<unk>");
  for (const auto& doc : docs) {
    for (const auto& sent : doc.sentences) {
      for (const auto& tok : sent) vocab.add(tok);
    }
  }
  return vocab;
}

void Vocabulary::add(const std::string& word) {
  if (index.emplace(word, static_cast<int>(words.size())).second) words.push_back(word);
}

int Vocabulary::lookup(const std::string& word) const {
  auto it = index.find(word);
  return it == index.end() ? 0 : it->second;
}

LstmWeights::LstmWeights(const std::string& name, int input_dim, int hidden_dim)
    : weight(name + ".weight", 4 * hidden_dim, input_dim + hidden_dim),
      bias(name + ".bias", 4 * hidden_dim, 1),
      hidden(hidden_dim),
      input(input_dim) {}

ModelParams::ModelParams(const ModelConfig& cfg, Vocabulary vocabulary)
    : config(cfg), vocab(std::move(vocabulary)) {
  config.validate();
  if (vocab.size() == 0) throw_invalid("model requires a non-empty vocabulary");
  const int d = config.hidden_dim;
  const int e = config.embed_dim;
  const int o = config.summary_state_dim();

  embeddings = Tensor("embeddings", vocab.size(), e);
  word_encoder_fwd = LstmWeights("word_encoder_fwd", e, d);
  word_encoder_bwd = LstmWeights("word_encoder_bwd", e, d);
  sent_encoder_fwd = LstmWeights("sent_encoder_fwd", 2 * d, d);
  sent_encoder_bwd = LstmWeights("sent_encoder_bwd", 2 * d, d);
  sent_states = LstmWeights("sent_states", config.sent_states_input_dim(), d);
  word_states = LstmWeights("word_states", e, d);
  w_e = Tensor("w_e", d, 6 * d + o);
  b_s = Tensor("b_s", d, 1);
  w_z = Tensor("w_z", 2, d);
  x_z = Tensor("x_z", 2, 1);
  w_c = Tensor("w_c", d, (8 * d + e) + o + d);
  b_w = Tensor("b_w", d, 1);
  w_y = Tensor("w_y", 2, d);
  x_y = Tensor("x_y", 2, 1);
}

std::vector<Tensor*> ModelParams::tensors() {
  return {&embeddings,
          &word_encoder_fwd.weight, &word_encoder_fwd.bias,
          &word_encoder_bwd.weight, &word_encoder_bwd.bias,
          &sent_encoder_fwd.weight, &sent_encoder_fwd.bias,
          &sent_encoder_bwd.weight, &sent_encoder_bwd.bias,
          &sent_states.weight, &sent_states.bias,
          &word_states.weight, &word_states.bias,
          &w_e, &b_s, &w_z, &x_z, &w_c, &b_w, &w_y, &x_y};
}

std::vector<const Tensor*> ModelParams::tensors() const {
  auto mutable_list = const_cast<ModelParams*>(this)->tensors();
  return {mutable_list.begin(), mutable_list.end()};
}

namespace {

void set_forget_bias(LstmWeights& lstm, double value) {
  for (int r = lstm.hidden; r < 2 * lstm.hidden; ++r) lstm.bias.value[r] = value;
}

}  // namespace

void ModelParams::init_random() {
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> uniform(-0.1, 0.1);
  const std::vector<Tensor*> biases = {
      &word_encoder_fwd.bias, &word_encoder_bwd.bias, &sent_encoder_fwd.bias,
      &sent_encoder_bwd.bias, &sent_states.bias,      &word_states.bias,
      &b_s,                   &x_z,                   &b_w,
      &x_y};
  for (Tensor* t : tensors()) {
    const bool is_bias = std::find(biases.begin(), biases.end(), t) != biases.end();
    for (double& v : t->value) v = is_bias ? 0.0 : uniform(rng);
    t->zero_grad();
  }
  for (LstmWeights* lstm : {&word_encoder_fwd, &word_encoder_bwd, &sent_encoder_fwd,
                            &sent_encoder_bwd, &sent_states, &word_states}) {
    set_forget_bias(*lstm, 1.0);
  }
}

void ModelParams::init_gaussian(double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  for (Tensor* t : tensors()) {
    for (double& v : t->value) v = normal(rng);
    t->zero_grad();
  }
}

void ModelParams::zero_grad() {
  for (Tensor* t : tensors()) t->zero_grad();
}

namespace {

struct LstmState {
  Expr h, c;
};

LstmState lstm_initial(Graph& g, int hidden) { return {g.zeros(hidden), g.zeros(hidden)}; }

LstmState lstm_step(Graph& g, LstmWeights& w, Expr x, const LstmState& s) {
  const int h = w.hidden;
  Expr gates = g.affine(w.weight, w.bias, {x, s.h});
  Expr in_gate = g.sigmoid_of(g.slice(gates, 0, h));
  Expr forget_gate = g.sigmoid_of(g.slice(gates, h, h));
  Expr out_gate = g.sigmoid_of(g.slice(gates, 2 * h, h));
  Expr update = g.tanh_of(g.slice(gates, 3 * h, h));
  Expr cell = g.add(g.cmul(forget_gate, s.c), g.cmul(in_gate, update));
  Expr hidden = g.cmul(out_gate, g.tanh_of(cell));
  return {hidden, cell};
}

}  // namespace

EncoderOutput encode(Graph& g, ModelParams& params, const Document& doc) {
  const int d = params.config.hidden_dim;
  const int m = static_cast<int>(doc.sentences.size());
  if (m == 0) throw_invalid("encode: document '" + doc.id + "' has no sentences");

  EncoderOutput enc;
  enc.word_embed.resize(m);
  enc.word_hidden.resize(m);
  enc.sent_embedding.reserve(m);

  for (int i = 0; i < m; ++i) {
    const auto& sent = doc.sentences[i];
    const int n = static_cast<int>(sent.size());
    auto& embeds = enc.word_embed[i];
    embeds.reserve(n);
    for (const auto& tok : sent) {
      embeds.push_back(g.table_row(params.embeddings, params.vocab.lookup(tok)));
    }

    std::vector<Expr> fwd(n), bwd(n);
    LstmState state = lstm_initial(g, d);
    for (int j = 0; j < n; ++j) {
      state = lstm_step(g, params.word_encoder_fwd, embeds[j], state);
      fwd[j] = state.h;
    }
    state = lstm_initial(g, d);
    for (int j = n - 1; j >= 0; --j) {
      state = lstm_step(g, params.word_encoder_bwd, embeds[j], state);
      bwd[j] = state.h;
    }

    auto& hidden = enc.word_hidden[i];
    hidden.reserve(n);
    for (int j = 0; j < n; ++j) hidden.push_back(g.concat({fwd[j], bwd[j]}));
    enc.sent_embedding.push_back(g.concat({fwd[n - 1], bwd[0]}));
  }

  std::vector<Expr> sfwd(m), sbwd(m);
  LstmState state = lstm_initial(g, d);
  for (int i = 0; i < m; ++i) {
    state = lstm_step(g, params.sent_encoder_fwd, enc.sent_embedding[i], state);
    sfwd[i] = state.h;
  }
  state = lstm_initial(g, d);
  for (int i = m - 1; i >= 0; --i) {
    state = lstm_step(g, params.sent_encoder_bwd, enc.sent_embedding[i], state);
    sbwd[i] = state.h;
  }

  enc.sent_hidden.reserve(m);
  for (int i = 0; i < m; ++i) enc.sent_hidden.push_back(g.concat({sfwd[i], sbwd[i]}));
  enc.doc_embedding = g.concat({sfwd[m - 1], sbwd[0]});

  enc.d_sent.reserve(m);
  enc.d_word.resize(m);
  for (int i = 0; i < m; ++i) {
    enc.d_sent.push_back(
        g.concat({enc.doc_embedding, enc.sent_embedding[i], enc.sent_hidden[i]}));
    auto& dw = enc.d_word[i];
    const int n = static_cast<int>(doc.sentences[i].size());
    dw.reserve(n);
    for (int j = 0; j < n; ++j) {
      dw.push_back(g.concat({enc.doc_embedding, enc.sent_embedding[i], enc.word_embed[i][j],
                             enc.sent_hidden[i], enc.word_hidden[i][j]}));
    }
  }
  return enc;
}

namespace {

void check_teacher(const OracleLabels& teacher, const Document& doc, DecoderMode mode) {
  const std::size_t m = doc.sentences.size();
  if (teacher.z.size() != m || teacher.y.size() != m) {
    throw_invalid("teacher labels misaligned with document '" + doc.id + "' (" +
                  std::to_string(teacher.z.size()) + " labels for " + std::to_string(m) +
                  " sentences)");
  }
  if (mode == DecoderMode::Compressive) {
    for (std::size_t i = 0; i < m; ++i) {
      if (teacher.z[i] && teacher.y[i].size() != doc.sentences[i].size()) {
        throw_invalid("teacher word labels misaligned with document '" + doc.id +
                      "', sentence " + std::to_string(i));
      }
    }
  }
}

}  // namespace

DecodeTrace decode(Graph& g, ModelParams& params, const EncoderOutput& enc,
                   const Document& doc, const OracleLabels* teacher) {
  const ModelConfig& cfg = params.config;
  const int d = cfg.hidden_dim;
  const int m = static_cast<int>(doc.sentences.size());
  if (teacher) check_teacher(*teacher, doc, cfg.mode);

  DecodeTrace trace;
  trace.sentences.resize(m);
  trace.words.resize(m);
  trace.compressed_states.resize(m);

  LstmState sent_state = lstm_initial(g, d);
  Expr avg_state = g.zeros(2 * d);  // averaging variant accumulator

  for (int i = 0; i < m; ++i) {
    const Expr summary_state =
        cfg.state_variant == StateVariant::Lstm ? sent_state.h : avg_state;
    Expr projected = g.tanh_of(g.affine(params.w_e, params.b_s, {enc.d_sent[i], summary_state}));
    Expr logits = g.affine(params.w_z, params.x_z, {projected});
    const auto [p0, p1] = g.softmax_pair(logits);
    const int selected = teacher ? teacher->z[i] : (p1 > 0.5 ? 1 : 0);

    auto& decision = trace.sentences[i];
    decision.prob_skip = p0;
    decision.prob_select = p1;
    decision.selected = selected;
    decision.logits = logits;
    decision.summary_state = g.value(summary_state);

    if (cfg.state_variant == StateVariant::Averaging) {
      // Every sentence contributes its selection probability as weight.
      avg_state = g.add(avg_state, g.scale(enc.sent_embedding[i], g.prob_one(logits)));
    }

    if (!selected) continue;

    if (cfg.mode == DecoderMode::Compressive) {
      const int n = static_cast<int>(doc.sentences[i].size());
      LstmState word_state = lstm_initial(g, d);
      auto& words = trace.words[i];
      words.reserve(n);
      for (int j = 0; j < n; ++j) {
        Expr q = g.tanh_of(g.affine(params.w_c, params.b_w,
                                    {enc.d_word[i][j], summary_state, word_state.h}));
        Expr word_logits = g.affine(params.w_y, params.x_y, {q});
        const auto [q0, q1] = g.softmax_pair(word_logits);
        const int kept = teacher ? teacher->y[i][j] : (q1 > 0.5 ? 1 : 0);
        words.push_back(WordDecision{q0, q1, kept, word_logits});
        if (kept) {
          word_state = lstm_step(g, params.word_states, enc.word_embed[i][j], word_state);
        }
      }
      trace.compressed_states[i] = g.value(word_state.h);
      if (cfg.state_variant == StateVariant::Lstm) {
        sent_state = lstm_step(g, params.sent_states, word_state.h, sent_state);
      }
    } else if (cfg.state_variant == StateVariant::Lstm) {
      sent_state = lstm_step(g, params.sent_states, enc.sent_embedding[i], sent_state);
    }
  }
  return trace;
}

LossValues loss(Graph& g, const ModelConfig& cfg, const DecodeTrace& trace,
                const OracleLabels& gold, const std::string& doc_id) {
  const int m = static_cast<int>(trace.sentences.size());
  if (static_cast<int>(gold.z.size()) != m) {
    throw_invalid("loss: labels misaligned with document '" + doc_id + "'");
  }

  int count_selected = 0;
  for (int b : gold.z) count_selected += b;
  const int count_skipped = m - count_selected;

  std::vector<Expr> terms;
  std::vector<double> weights;
  for (int i = 0; i < m; ++i) {
    const int c = gold.z[i];
    // A class with zero members contributes no term (the whole class term
    // is taken to be zero), so the division below is always well defined.
    const double w = c ? cfg.lambda_s1 / count_selected : cfg.lambda_s0 / count_skipped;
    terms.push_back(g.nll_two_way(trace.sentences[i].logits, c));
    weights.push_back(w);
  }
  Expr sentence_expr = g.weighted_sum(terms, weights);

  Expr word_expr;
  if (cfg.mode == DecoderMode::Compressive) {
    std::vector<Expr> word_terms;
    std::vector<double> word_weights;
    for (int i = 0; i < m; ++i) {
      if (!gold.z[i]) continue;
      const auto& decisions = trace.words[i];
      if (decisions.size() != gold.y[i].size()) {
        throw_invalid("loss: word labels misaligned with document '" + doc_id +
                      "', sentence " + std::to_string(i));
      }
      int kept = 0;
      for (int b : gold.y[i]) kept += b;
      const int dropped = static_cast<int>(gold.y[i].size()) - kept;
      for (std::size_t j = 0; j < decisions.size(); ++j) {
        const int c = gold.y[i][j];
        const double w = c ? cfg.lambda_w1 / kept : cfg.lambda_w0 / dropped;
        word_terms.push_back(g.nll_two_way(decisions[j].logits, c));
        word_weights.push_back(w);
      }
    }
    word_expr = word_terms.empty() ? g.zeros(1) : g.weighted_sum(word_terms, word_weights);
  } else {
    word_expr = g.zeros(1);
  }

  LossValues values;
  values.total_expr = g.weighted_sum({sentence_expr, word_expr}, {1.0, 1.0});
  values.sentence_loss = g.scalar(sentence_expr);
  values.word_loss = g.scalar(word_expr);
  values.total = g.scalar(values.total_expr);
  if (!std::isfinite(values.total)) {
    throw_internal("non-finite loss on document '" + doc_id + "'");
  }
  return values;
}

std::vector<int> select_from_probabilities(const std::vector<double>& probs) {
  std::vector<int> bits(probs.size(), 0);
  bool any = false;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.5) {
      bits[i] = 1;
      any = true;
    }
  }
  if (!any && !probs.empty()) {
    // Fallback: the single highest-probability sentence, first index on ties.
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
      if (probs[i] > probs[best]) best = i;
    }
    bits[best] = 1;
  }
  return bits;
}

SummarizeResult summarize(ModelParams& params, const Document& doc) {
  Graph g;
  EncoderOutput enc = encode(g, params, doc);
  DecodeTrace trace = decode(g, params, enc, doc, nullptr);
  const int m = static_cast<int>(doc.sentences.size());

  SummarizeResult result;
  result.sentence_probs.reserve(m);
  for (const auto& s : trace.sentences) result.sentence_probs.push_back(s.prob_select);
  result.word_probs.resize(m);
  for (int i = 0; i < m; ++i) {
    for (const auto& w : trace.words[i]) result.word_probs[i].push_back(w.prob_keep);
  }

  bool any_selected = false;
  for (const auto& s : trace.sentences) any_selected |= (s.selected != 0);

  if (!any_selected) {
    // Nothing cleared the threshold: emit the argmax sentence whole.
    result.used_fallback = true;
    const auto bits = select_from_probabilities(result.sentence_probs);
    for (int i = 0; i < m; ++i) {
      if (!bits[i]) continue;
      SummarySentence s;
      s.sentence_index = i;
      for (std::size_t t = 0; t < doc.sentences[i].size(); ++t) {
        s.kept_tokens.push_back(static_cast<int>(t));
      }
      result.summary.sentences.push_back(std::move(s));
    }
    validate_summary(result.summary, doc);
    return result;
  }

  for (int i = 0; i < m; ++i) {
    if (!trace.sentences[i].selected) continue;
    SummarySentence s;
    s.sentence_index = i;
    if (params.config.mode == DecoderMode::Compressive) {
      for (std::size_t j = 0; j < trace.words[i].size(); ++j) {
        if (trace.words[i][j].kept) s.kept_tokens.push_back(static_cast<int>(j));
      }
    } else {
      for (std::size_t t = 0; t < doc.sentences[i].size(); ++t) {
        s.kept_tokens.push_back(static_cast<int>(t));
      }
    }
    // A selected sentence that keeps no words is dropped from the output.
    if (!s.kept_tokens.empty()) result.summary.sentences.push_back(std::move(s));
  }
  validate_summary(result.summary, doc);
  return result;
}

double grad_check(const Document& doc, const OracleLabels& gold, const ModelConfig& config,
                  double epsilon) {
  ModelConfig cfg = config;
  cfg.validate();
  ModelParams params(cfg, Vocabulary::build({doc}));
  params.init_gaussian(0.1, cfg.seed);

  auto forward_loss = [&]() {
    Graph g;
    EncoderOutput enc = encode(g, params, doc);
    DecodeTrace trace = decode(g, params, enc, doc, &gold);
    return loss(g, cfg, trace, gold, doc.id).total;
  };

  params.zero_grad();
  {
    Graph g;
    EncoderOutput enc = encode(g, params, doc);
    DecodeTrace trace = decode(g, params, enc, doc, &gold);
    LossValues l = loss(g, cfg, trace, gold, doc.id);
    g.backward(l.total_expr);
  }

  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  double max_rel = 0.0;
  for (Tensor* t : params.tensors()) {
    std::vector<std::size_t> coords(t->size());
    for (std::size_t k = 0; k < coords.size(); ++k) coords[k] = k;
    if (coords.size() > 50) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(50);
    }
    for (std::size_t idx : coords) {
      const double original = t->value[idx];
      t->value[idx] = original + epsilon;
      const double plus = forward_loss();
      t->value[idx] = original - epsilon;
      const double minus = forward_loss();
      t->value[idx] = original;
      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double analytic = t->grad[idx];
      const double rel = std::abs(analytic - numeric) /
                         std::max({1.0, std::abs(analytic), std::abs(numeric)});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace sumstate
