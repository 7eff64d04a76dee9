#include "sumstate/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <unordered_map>

#include "sumstate/error.hpp"
#include "sumstate/parallel.hpp"
#include "sumstate/rouge.hpp"

namespace sumstate {

namespace {

double mean_r1_r2_rl(const std::vector<Sentence>& candidate,
                     const std::vector<Sentence>& reference) {
  const double r1 = rouge_n(candidate, reference, 1).f1;
  const double r2 = rouge_n(candidate, reference, 2).f1;
  const double rl = rouge_l(candidate, reference).f1;
  return (r1 + r2 + rl) / 3.0;
}

// true if `a` wins the tie against `b`: fewer sentences first, then the
// lexicographically smaller index sequence.
bool tie_wins(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

// Kept tokens of a sentence under a span-deletion mask (bit s = span s deleted).
Sentence apply_mask(const Sentence& sentence, const SentenceSpans& spans, std::uint32_t mask) {
  std::vector<char> drop(sentence.size(), 0);
  for (std::size_t s = 0; s < spans.size(); ++s) {
    if (mask & (1u << s)) {
      for (int t = spans[s].start; t < spans[s].end; ++t) drop[t] = 1;
    }
  }
  Sentence kept;
  kept.reserve(sentence.size());
  for (std::size_t t = 0; t < sentence.size(); ++t) {
    if (!drop[t]) kept.push_back(sentence[t]);
  }
  return kept;
}

struct Hypothesis {
  std::vector<int> indices;
  std::vector<std::uint32_t> masks;  // aligned to indices
  double score = 0.0;
  std::shared_ptr<OverlapState> state;
};

// Total order making oracle outputs deterministic: best score, fewer
// sentences, smallest index sequence, smallest deletion-mask sequence.
bool better_hypothesis(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.indices.size() != b.indices.size()) return a.indices.size() < b.indices.size();
  if (a.indices != b.indices) return a.indices < b.indices;
  return a.masks < b.masks;
}

}  // namespace

std::string objective_name(OracleObjective objective) {
  switch (objective) {
    case OracleObjective::MeanR1R2RL: return "extractive";
    case OracleObjective::AvgR1R2: return "compressive";
    case OracleObjective::Bow: return "bow";
  }
  throw_internal("unknown oracle objective");
}

OracleObjective objective_from_name(const std::string& name) {
  if (name == "extractive") return OracleObjective::MeanR1R2RL;
  if (name == "compressive") return OracleObjective::AvgR1R2;
  if (name == "bow") return OracleObjective::Bow;
  throw_invalid("unknown oracle objective '" + name + "' (extractive|compressive|bow)");
}

Summary labels_to_summary(const OracleLabels& labels) {
  Summary summary;
  for (std::size_t i = 0; i < labels.z.size(); ++i) {
    if (!labels.z[i]) continue;
    SummarySentence s;
    s.sentence_index = static_cast<int>(i);
    for (std::size_t t = 0; t < labels.y[i].size(); ++t) {
      if (labels.y[i][t]) s.kept_tokens.push_back(static_cast<int>(t));
    }
    if (!s.kept_tokens.empty()) summary.sentences.push_back(std::move(s));
  }
  return summary;
}

OracleLabels extractive_oracle(const Document& doc, int pool_size, int max_summary_sentences) {
  if (pool_size < 1) throw_invalid("extractive oracle requires pool size >= 1");
  if (max_summary_sentences < 1) throw_invalid("extractive oracle requires m >= 1");
  const int m_doc = static_cast<int>(doc.sentences.size());

  // Rank sentences by their individual mean F1 against the reference.
  std::vector<std::pair<double, int>> ranked(m_doc);
  for (int i = 0; i < m_doc; ++i) {
    ranked[i] = {mean_r1_r2_rl({doc.sentences[i]}, doc.reference), i};
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<int> pool;
  for (int i = 0; i < std::min(pool_size, m_doc); ++i) pool.push_back(ranked[i].second);
  std::sort(pool.begin(), pool.end());

  // Exhaustive search over subsets of the pool, sizes 1..m.
  const int max_size = std::min<int>(max_summary_sentences, static_cast<int>(pool.size()));
  std::vector<int> best_set;
  double best_score = -1.0;

  std::vector<int> chosen;
  auto score_chosen = [&]() {
    std::vector<Sentence> candidate;
    candidate.reserve(chosen.size());
    for (int i : chosen) candidate.push_back(doc.sentences[i]);
    const double score = mean_r1_r2_rl(candidate, doc.reference);
    if (score > best_score || (score == best_score && tie_wins(chosen, best_set))) {
      best_score = score;
      best_set = chosen;
    }
  };
  auto enumerate = [&](auto&& self, std::size_t next, int remaining) -> void {
    if (!chosen.empty()) score_chosen();
    if (remaining == 0) return;
    for (std::size_t k = next; k < pool.size(); ++k) {
      chosen.push_back(pool[k]);
      self(self, k + 1, remaining - 1);
      chosen.pop_back();
    }
  };
  enumerate(enumerate, 0, max_size);

  OracleLabels labels;
  labels.objective = OracleObjective::MeanR1R2RL;
  labels.score = best_score;
  labels.z.assign(m_doc, 0);
  labels.y.resize(m_doc);
  for (int i = 0; i < m_doc; ++i) labels.y[i].assign(doc.sentences[i].size(), 0);
  for (int i : best_set) {
    labels.z[i] = 1;
    labels.y[i].assign(doc.sentences[i].size(), 1);
  }
  return labels;
}

OracleLabels compressive_oracle(const Document& doc, const CompressionSpans& spans,
                                const CompressiveOracleOptions& options) {
  validate_spans(spans, doc);
  if (options.beam_width < 0) throw_invalid("compressive oracle beam width must be >= 0");
  if (options.max_sentences < 1) throw_invalid("compressive oracle requires max sentences >= 1");
  const int m_doc = static_cast<int>(doc.sentences.size());
  for (int i = 0; i < m_doc; ++i) {
    if (static_cast<int>(spans[i].size()) > options.max_spans_per_sentence) {
      throw_invalid("document '" + doc.id + "', sentence " + std::to_string(i) + ": " +
                    std::to_string(spans[i].size()) + " spans exceed the cap of " +
                    std::to_string(options.max_spans_per_sentence));
    }
  }

  std::vector<Hypothesis> beam;
  {
    Hypothesis root;
    root.state = std::make_shared<OverlapState>(doc.reference);
    root.score = root.state->score();
    beam.push_back(std::move(root));
  }

  for (int i = 0; i < m_doc; ++i) {
    // Deletion variants of sentence i, shared across hypotheses.
    const std::uint32_t num_masks = 1u << spans[i].size();
    std::vector<Sentence> variants(num_masks);
    for (std::uint32_t mask = 0; mask < num_masks; ++mask) {
      variants[mask] = apply_mask(doc.sentences[i], spans[i], mask);
    }

    std::vector<Hypothesis> next;
    next.reserve(beam.size() * (num_masks + 1));
    for (auto& hyp : beam) {
      // Skip the sentence.
      next.push_back(hyp);
      if (static_cast<int>(hyp.indices.size()) >= options.max_sentences) continue;
      // Or select one of its deletion variants. Children are scored via
      // add/remove on the parent's state; survivors get their own state
      // materialized after pruning.
      for (std::uint32_t mask = 0; mask < num_masks; ++mask) {
        const double score = hyp.state->add(variants[mask]);
        hyp.state->remove(variants[mask]);
        Hypothesis child;
        child.indices = hyp.indices;
        child.indices.push_back(i);
        child.masks = hyp.masks;
        child.masks.push_back(mask);
        child.score = score;
        child.state = hyp.state;  // parent state, replaced on survival
        next.push_back(std::move(child));
      }
    }

    std::sort(next.begin(), next.end(), better_hypothesis);
    if (options.beam_width > 0 && static_cast<int>(next.size()) > options.beam_width) {
      next.resize(options.beam_width);
    }
    for (auto& hyp : next) {
      if (!hyp.indices.empty() && hyp.indices.back() == i) {
        auto state = std::make_shared<OverlapState>(*hyp.state);
        state->add(variants[hyp.masks.back()]);
        hyp.state = std::move(state);
      }
    }
    beam = std::move(next);
  }

  const Hypothesis& best = beam.front();  // beam kept sorted by better_hypothesis

  OracleLabels labels;
  labels.objective = OracleObjective::AvgR1R2;
  labels.score = best.score;
  labels.z.assign(m_doc, 0);
  labels.y.resize(m_doc);
  for (int i = 0; i < m_doc; ++i) labels.y[i].assign(doc.sentences[i].size(), 0);
  for (std::size_t k = 0; k < best.indices.size(); ++k) {
    const int i = best.indices[k];
    labels.z[i] = 1;
    labels.y[i].assign(doc.sentences[i].size(), 1);
    for (std::size_t s = 0; s < spans[i].size(); ++s) {
      if (best.masks[k] & (1u << s)) {
        for (int t = spans[i][s].start; t < spans[i][s].end; ++t) labels.y[i][t] = 0;
      }
    }
  }
  return labels;
}

OracleLabels bow_oracle(const Document& doc) {
  std::unordered_map<std::string, int> budget;
  for (const auto& sent : doc.reference) {
    for (const auto& tok : sent) ++budget[normalize_token(tok)];
  }

  OracleLabels labels;
  labels.objective = OracleObjective::Bow;
  const int m_doc = static_cast<int>(doc.sentences.size());
  labels.z.assign(m_doc, 0);
  labels.y.resize(m_doc);
  for (int i = 0; i < m_doc; ++i) {
    const auto& sent = doc.sentences[i];
    labels.y[i].assign(sent.size(), 0);
    for (std::size_t t = 0; t < sent.size(); ++t) {
      auto it = budget.find(normalize_token(sent[t]));
      if (it != budget.end() && it->second > 0) {
        labels.y[i][t] = 1;
        --it->second;
      }
    }
    for (int bit : labels.y[i]) {
      if (bit) {
        labels.z[i] = 1;
        break;
      }
    }
    if (!labels.z[i]) labels.y[i].assign(sent.size(), 0);
  }

  const Summary summary = labels_to_summary(labels);
  const auto realized = realize_summary(summary, doc);
  labels.score = 0.5 * (rouge_n(realized, doc.reference, 1).f1 +
                        rouge_n(realized, doc.reference, 2).f1);
  return labels;
}

CompressionSpans heuristic_spans(const Document& doc) {
  static const std::vector<std::string> kConnectives = {"who", "which", "where", "when",
                                                        "according"};
  CompressionSpans spans;
  spans.reserve(doc.sentences.size());
  for (const auto& sent : doc.sentences) {
    const int n = static_cast<int>(sent.size());
    std::vector<char> used(n, 0);
    SentenceSpans out;

    auto try_mark = [&](int start, int end) {
      for (int t = start; t < end; ++t) {
        if (used[t]) return;
      }
      for (int t = start; t < end; ++t) used[t] = 1;
      out.push_back(Span{start, end});
    };

    // (a) parenthesized runs, parentheses included
    for (int t = 0; t < n; ++t) {
      if (sent[t] != "(") continue;
      for (int u = t + 1; u < n; ++u) {
        if (sent[u] == "(") break;  // nested open: give up on this run
        if (sent[u] == ")") {
          try_mark(t, u + 1);
          t = u;
          break;
        }
      }
    }

    // (b) paired commas introducing a connective clause, commas included
    for (int t = 0; t < n; ++t) {
      if (sent[t] != ",") continue;
      if (t + 1 >= n) break;
      const std::string next = normalize_token(sent[t + 1]);
      if (std::find(kConnectives.begin(), kConnectives.end(), next) == kConnectives.end()) {
        continue;
      }
      for (int u = t + 2; u < n; ++u) {
        if (sent[u] == ",") {
          try_mark(t, u + 1);
          t = u;
          break;
        }
      }
    }

    // (c) leading dateline ending in ")" within the first 6 tokens
    for (int t = 0; t < std::min(n, 6); ++t) {
      if (sent[t] == ")") {
        try_mark(0, t + 1);
        break;
      }
    }

    std::sort(out.begin(), out.end(),
              [](const Span& a, const Span& b) { return a.start < b.start; });
    spans.push_back(std::move(out));
  }
  return spans;
}

OracleRunResult run_oracle(const std::vector<Document>& corpus,
                           const OracleRunOptions& options) {
  OracleRunResult result;
  result.labels.resize(corpus.size());
  std::atomic<int> heuristic_docs{0};

  auto label_one = [&](std::size_t i) {
    const Document& doc = corpus[i];
    switch (options.objective) {
      case OracleObjective::MeanR1R2RL:
        result.labels[i] = extractive_oracle(doc, options.pool, options.max_select);
        break;
      case OracleObjective::AvgR1R2: {
        CompressiveOracleOptions opts;
        opts.beam_width = options.beam;
        opts.max_sentences = options.max_sentences;
        opts.max_spans_per_sentence = options.span_cap;
        if (doc.spans) {
          result.labels[i] = compressive_oracle(doc, *doc.spans, opts);
        } else {
          heuristic_docs.fetch_add(1);
          result.labels[i] = compressive_oracle(doc, heuristic_spans(doc), opts);
        }
        break;
      }
      case OracleObjective::Bow:
        result.labels[i] = bow_oracle(doc);
        break;
    }
  };

  parallel_for(corpus.size(), options.workers, label_one);

  for (const auto& l : result.labels) result.mean_score += l.score;
  if (!corpus.empty()) result.mean_score /= static_cast<double>(corpus.size());
  result.heuristic_span_docs = heuristic_docs.load();
  return result;
}

}  // namespace sumstate
