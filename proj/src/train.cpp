#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

#include "sumstate/error.hpp"
#include "sumstate/model.hpp"

namespace sumstate {

AdamOptimizer::AdamOptimizer(double learning_rate, double beta1, double beta2, double epsilon)
    : learning_rate_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

void AdamOptimizer::step(std::vector<Tensor*> tensors) {
  ++steps_;
  const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (Tensor* t : tensors) {
    auto& [m, v] = moments_[t];
    if (m.empty()) {
      m.assign(t->size(), 0.0);
      v.assign(t->size(), 0.0);
    }
    for (std::size_t k = 0; k < t->size(); ++k) {
      const double g = t->grad[k];
      m[k] = beta1_ * m[k] + (1.0 - beta1_) * g;
      v[k] = beta2_ * v[k] + (1.0 - beta2_) * g * g;
      const double m_hat = m[k] / bias1;
      const double v_hat = v[k] / bias2;
      t->value[k] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + epsilon_);
    }
  }
}

namespace {

struct DocPass {
  LossValues values;
  int correct_sentences = 0;
};

DocPass run_teacher_forced(ModelParams& params, const Document& doc, const OracleLabels& gold,
                           bool backprop, double seed_scale) {
  Graph g;
  EncoderOutput enc = encode(g, params, doc);
  DecodeTrace trace = decode(g, params, enc, doc, &gold);
  DocPass pass;
  pass.values = loss(g, params.config, trace, gold, doc.id);
  if (backprop) g.backward(pass.values.total_expr, seed_scale);
  for (std::size_t i = 0; i < trace.sentences.size(); ++i) {
    const int predicted = trace.sentences[i].prob_select > 0.5 ? 1 : 0;
    if (predicted == gold.z[i]) ++pass.correct_sentences;
  }
  return pass;
}

}  // namespace

TrainResult train(ModelParams& params, const std::vector<Document>& docs,
                  const std::vector<OracleLabels>& labels, const TrainOptions& options) {
  if (docs.size() != labels.size()) {
    throw_invalid("train: " + std::to_string(labels.size()) + " label records for " +
                  std::to_string(docs.size()) + " documents");
  }
  if (docs.empty()) throw_invalid("train: empty corpus");
  const ModelConfig& cfg = params.config;
  cfg.validate();
  if ((options.validation_docs == nullptr) != (options.validation_labels == nullptr)) {
    throw_invalid("train: validation corpus and labels must be given together");
  }

  AdamOptimizer optimizer(cfg.learning_rate);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_total = 0.0;
    int batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t count =
          std::min<std::size_t>(cfg.batch_size, order.size() - start);
      params.zero_grad();
      double batch_sentence = 0.0, batch_word = 0.0, batch_total = 0.0;
      for (std::size_t k = 0; k < count; ++k) {
        const std::size_t idx = order[start + k];
        // Gradients are averaged over the batch via the backward seed.
        DocPass pass = run_teacher_forced(params, docs[idx], labels[idx], true,
                                          1.0 / static_cast<double>(count));
        batch_sentence += pass.values.sentence_loss;
        batch_word += pass.values.word_loss;
        batch_total += pass.values.total;
      }
      optimizer.step(params.tensors());

      TrainLogEntry entry;
      entry.epoch = epoch;
      entry.batch = batch_index++;
      entry.sentence_loss = batch_sentence / static_cast<double>(count);
      entry.word_loss = batch_word / static_cast<double>(count);
      entry.total = batch_total / static_cast<double>(count);
      result.log.push_back(entry);
      epoch_total += batch_total;
    }
    result.epoch_loss.push_back(epoch_total / static_cast<double>(docs.size()));

    if (options.validation_docs) {
      EvalStats stats =
          teacher_forced_stats(params, *options.validation_docs, *options.validation_labels);
      TrainLogEntry entry;
      entry.epoch = epoch;
      entry.batch = -1;
      entry.sentence_loss = stats.sentence_loss;
      entry.word_loss = stats.word_loss;
      entry.total = stats.total;
      entry.validation = true;
      result.log.push_back(entry);
    }
  }
  return result;
}

EvalStats teacher_forced_stats(ModelParams& params, const std::vector<Document>& docs,
                               const std::vector<OracleLabels>& labels) {
  if (docs.size() != labels.size()) throw_invalid("stats: labels misaligned with corpus");
  if (docs.empty()) throw_invalid("stats: empty corpus");
  EvalStats stats;
  long long correct = 0, total_sentences = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    DocPass pass = run_teacher_forced(params, docs[i], labels[i], false, 1.0);
    stats.sentence_loss += pass.values.sentence_loss;
    stats.word_loss += pass.values.word_loss;
    stats.total += pass.values.total;
    correct += pass.correct_sentences;
    total_sentences += static_cast<long long>(docs[i].sentences.size());
  }
  stats.sentence_loss /= static_cast<double>(docs.size());
  stats.word_loss /= static_cast<double>(docs.size());
  stats.total /= static_cast<double>(docs.size());
  stats.sentence_accuracy = static_cast<double>(correct) / static_cast<double>(total_sentences);
  return stats;
}

namespace {

constexpr char kMagic[8] = {'S', 'S', 'C', 'K', 'P', 'T', '0', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in.good()) throw_parse("truncated checkpoint file: " + path);
  return value;
}

void write_string(std::ofstream& out, const std::string& s) {
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::ifstream& in, const std::string& path) {
  const auto len = read_pod<std::uint32_t>(in, path);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in.good()) throw_parse("truncated checkpoint file: " + path);
  return s;
}

}  // namespace

void save_model(const ModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw_io("cannot write checkpoint file: " + path);
  out.write(kMagic, sizeof(kMagic));

  const ModelConfig& cfg = params.config;
  write_pod<std::int32_t>(out, cfg.embed_dim);
  write_pod<std::int32_t>(out, cfg.hidden_dim);
  write_pod<double>(out, cfg.lambda_s0);
  write_pod<double>(out, cfg.lambda_s1);
  write_pod<double>(out, cfg.lambda_w0);
  write_pod<double>(out, cfg.lambda_w1);
  write_pod<double>(out, cfg.learning_rate);
  write_pod<std::int32_t>(out, cfg.batch_size);
  write_pod<std::int32_t>(out, cfg.epochs);
  write_pod<std::uint8_t>(out, cfg.mode == DecoderMode::Extractive ? 0 : 1);
  write_pod<std::uint8_t>(out, cfg.state_variant == StateVariant::Lstm ? 0 : 1);
  write_pod<std::uint64_t>(out, cfg.seed);

  write_pod<std::uint64_t>(out, params.vocab.size());
  for (const auto& word : params.vocab.words) write_string(out, word);

  const auto tensors = params.tensors();
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const Tensor* t : tensors) {
    write_string(out, t->name);
    write_pod<std::uint64_t>(out, t->rows);
    write_pod<std::uint64_t>(out, t->cols);
    out.write(reinterpret_cast<const char*>(t->value.data()),
              static_cast<std::streamsize>(t->size() * sizeof(double)));
  }
  if (!out.good()) throw_io("failed while writing checkpoint file: " + path);
}

ModelParams load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw_io("cannot open checkpoint file: " + path);
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in.good() || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw_parse("not a checkpoint file (bad magic): " + path);
  }

  ModelConfig cfg;
  cfg.embed_dim = read_pod<std::int32_t>(in, path);
  cfg.hidden_dim = read_pod<std::int32_t>(in, path);
  cfg.lambda_s0 = read_pod<double>(in, path);
  cfg.lambda_s1 = read_pod<double>(in, path);
  cfg.lambda_w0 = read_pod<double>(in, path);
  cfg.lambda_w1 = read_pod<double>(in, path);
  cfg.learning_rate = read_pod<double>(in, path);
  cfg.batch_size = read_pod<std::int32_t>(in, path);
  cfg.epochs = read_pod<std::int32_t>(in, path);
  cfg.mode = read_pod<std::uint8_t>(in, path) == 0 ? DecoderMode::Extractive
                                                   : DecoderMode::Compressive;
  cfg.state_variant =
      read_pod<std::uint8_t>(in, path) == 0 ? StateVariant::Lstm : StateVariant::Averaging;
  cfg.seed = read_pod<std::uint64_t>(in, path);

  Vocabulary vocab;
  const auto vocab_size = read_pod<std::uint64_t>(in, path);
  for (std::uint64_t i = 0; i < vocab_size; ++i) vocab.add(read_string(in, path));

  ModelParams params(cfg, std::move(vocab));
  const auto tensor_count = read_pod<std::uint32_t>(in, path);
  auto tensors = params.tensors();
  if (tensor_count != tensors.size()) {
    throw_parse("checkpoint tensor count mismatch in " + path);
  }
  for (Tensor* t : tensors) {
    const std::string name = read_string(in, path);
    const auto rows = read_pod<std::uint64_t>(in, path);
    const auto cols = read_pod<std::uint64_t>(in, path);
    if (name != t->name || rows != t->rows || cols != t->cols) {
      throw_parse("checkpoint tensor '" + name + "' does not match expected '" + t->name +
                  "' (" + std::to_string(t->rows) + "x" + std::to_string(t->cols) + ") in " +
                  path);
    }
    in.read(reinterpret_cast<char*>(t->value.data()),
            static_cast<std::streamsize>(t->size() * sizeof(double)));
    if (!in.good()) throw_parse("truncated checkpoint file: " + path);
  }
  return params;
}

}  // namespace sumstate
