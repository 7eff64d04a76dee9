#include "sumstate/rouge.hpp"

#include <algorithm>
#include <cmath>

#include "sumstate/error.hpp"

namespace sumstate {

namespace {

constexpr char kBigramSeparator = '\x1f';

std::string bigram_key(const std::string& a, const std::string& b) {
  std::string key;
  key.reserve(a.size() + b.size() + 1);
  key += a;
  key += kBigramSeparator;
  key += b;
  return key;
}

using Counts = std::unordered_map<std::string, int>;

// Unigram and within-sentence bigram counts of a normalized text.
void count_grams(const std::vector<std::vector<std::string>>& sentences, Counts& unigrams,
                 Counts& bigrams, long long& unigram_total, long long& bigram_total) {
  for (const auto& sent : sentences) {
    for (std::size_t j = 0; j < sent.size(); ++j) {
      ++unigrams[sent[j]];
      ++unigram_total;
      if (j + 1 < sent.size()) {
        ++bigrams[bigram_key(sent[j], sent[j + 1])];
        ++bigram_total;
      }
    }
  }
}

long long clipped_matches(const Counts& candidate, const Counts& reference) {
  long long matched = 0;
  for (const auto& [gram, count] : candidate) {
    auto it = reference.find(gram);
    if (it != reference.end()) matched += std::min(count, it->second);
  }
  return matched;
}

}  // namespace

RougeScore make_rouge(long long matched, long long candidate_total, long long reference_total) {
  RougeScore score;
  if (candidate_total > 0) score.precision = static_cast<double>(matched) / candidate_total;
  if (reference_total > 0) score.recall = static_cast<double>(matched) / reference_total;
  if (candidate_total == 0 || reference_total == 0) return RougeScore{};
  if (score.precision + score.recall > 0) {
    score.f1 = 2.0 * score.precision * score.recall / (score.precision + score.recall);
  }
  return score;
}

std::string normalize_token(const std::string& token) {
  std::string out = token;
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> normalize(const Sentence& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(normalize_token(t));
  return out;
}

std::vector<std::vector<std::string>> normalize(const std::vector<Sentence>& sentences) {
  std::vector<std::vector<std::string>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(normalize(s));
  return out;
}

RougeScore rouge_n(const std::vector<Sentence>& candidate,
                   const std::vector<Sentence>& reference, int n) {
  if (n != 1 && n != 2) throw_invalid("rouge_n supports n in {1,2}");
  const auto cand = normalize(candidate);
  const auto ref = normalize(reference);

  Counts cand_uni, cand_bi, ref_uni, ref_bi;
  long long cand_uni_total = 0, cand_bi_total = 0, ref_uni_total = 0, ref_bi_total = 0;
  count_grams(cand, cand_uni, cand_bi, cand_uni_total, cand_bi_total);
  count_grams(ref, ref_uni, ref_bi, ref_uni_total, ref_bi_total);

  if (n == 1) {
    return make_rouge(clipped_matches(cand_uni, ref_uni), cand_uni_total, ref_uni_total);
  }
  return make_rouge(clipped_matches(cand_bi, ref_bi), cand_bi_total, ref_bi_total);
}

RougeScore rouge_n(const Sentence& candidate, const Sentence& reference, int n) {
  return rouge_n(std::vector<Sentence>{candidate}, std::vector<Sentence>{reference}, n);
}

RougeScore rouge_l(const std::vector<Sentence>& candidate,
                   const std::vector<Sentence>& reference) {
  std::vector<std::string> cand, ref;
  for (const auto& s : candidate)
    for (const auto& t : s) cand.push_back(normalize_token(t));
  for (const auto& s : reference)
    for (const auto& t : s) ref.push_back(normalize_token(t));

  const std::size_t m = cand.size();
  const std::size_t n = ref.size();
  if (m == 0 || n == 0) return RougeScore{};

  // Two-row LCS dynamic program.
  std::vector<long long> previous(n + 1, 0), current(n + 1, 0);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      if (cand[i - 1] == ref[j - 1]) {
        current[j] = previous[j - 1] + 1;
      } else {
        current[j] = std::max(previous[j], current[j - 1]);
      }
    }
    std::swap(previous, current);
  }
  return make_rouge(previous[n], static_cast<long long>(m), static_cast<long long>(n));
}

RougeScore rouge_l(const Sentence& candidate, const Sentence& reference) {
  return rouge_l(std::vector<Sentence>{candidate}, std::vector<Sentence>{reference});
}

OverlapState::OverlapState(const std::vector<Sentence>& reference) {
  const auto ref = normalize(reference);
  count_grams(ref, ref_unigrams_, ref_bigrams_, ref_unigram_total_, ref_bigram_total_);
}

void OverlapState::add_gram(Counts& cand, const Counts& ref, const std::string& g,
                            long long& total, long long& matched) {
  const int count = ++cand[g];
  ++total;
  auto it = ref.find(g);
  if (it != ref.end() && count <= it->second) ++matched;
}

void OverlapState::remove_gram(Counts& cand, const Counts& ref, const std::string& g,
                               long long& total, long long& matched) {
  auto cit = cand.find(g);
  if (cit == cand.end() || cit->second == 0) {
    throw_invalid("overlap_remove: removing n-gram that was never added: '" + g + "'");
  }
  auto it = ref.find(g);
  if (it != ref.end() && cit->second <= it->second) --matched;
  --total;
  if (--cit->second == 0) cand.erase(cit);
}

double OverlapState::add(const Sentence& tokens) {
  const auto norm = normalize(tokens);
  for (std::size_t j = 0; j < norm.size(); ++j) {
    add_gram(cand_unigrams_, ref_unigrams_, norm[j], cand_unigram_total_, matched_unigrams_);
    if (j + 1 < norm.size()) {
      add_gram(cand_bigrams_, ref_bigrams_, bigram_key(norm[j], norm[j + 1]),
               cand_bigram_total_, matched_bigrams_);
    }
  }
  return score();
}

void OverlapState::remove(const Sentence& tokens) {
  const auto norm = normalize(tokens);
  // Reverse order so the state retraces add exactly.
  for (std::size_t j = norm.size(); j-- > 0;) {
    if (j + 1 < norm.size()) {
      remove_gram(cand_bigrams_, ref_bigrams_, bigram_key(norm[j], norm[j + 1]),
                  cand_bigram_total_, matched_bigrams_);
    }
    remove_gram(cand_unigrams_, ref_unigrams_, norm[j], cand_unigram_total_, matched_unigrams_);
  }
}

RougeScore OverlapState::rouge1() const {
  return make_rouge(matched_unigrams_, cand_unigram_total_, ref_unigram_total_);
}

RougeScore OverlapState::rouge2() const {
  return make_rouge(matched_bigrams_, cand_bigram_total_, ref_bigram_total_);
}

double OverlapState::score() const { return 0.5 * (rouge1().f1 + rouge2().f1); }

bool OverlapState::operator==(const OverlapState& other) const {
  return ref_unigrams_ == other.ref_unigrams_ && ref_bigrams_ == other.ref_bigrams_ &&
         ref_unigram_total_ == other.ref_unigram_total_ &&
         ref_bigram_total_ == other.ref_bigram_total_ &&
         cand_unigrams_ == other.cand_unigrams_ && cand_bigrams_ == other.cand_bigrams_ &&
         cand_unigram_total_ == other.cand_unigram_total_ &&
         cand_bigram_total_ == other.cand_bigram_total_ &&
         matched_unigrams_ == other.matched_unigrams_ &&
         matched_bigrams_ == other.matched_bigrams_;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw_invalid("pearson: input lengths differ");
  const std::size_t n = xs.size();
  if (n < 2) throw_invalid("pearson: need at least 2 points");

  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);

  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw_invalid("pearson: correlation undefined for constant input");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace sumstate
