#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agora/domain.hpp"

namespace agora::metrics {

/// Lower-cased word tokens; every punctuation or symbol character is a token
/// of its own. Whitespace separates. Code points >= U+0080 outside the
/// punctuation blocks count as word characters.
std::vector<std::string> tokenize(std::string_view text);

/// 100 * BP * clipped unigram precision, BP = min(1, exp(1 - r/c)).
/// Empty candidate scores 0; empty reference throws MetricError.
double unigram_bleu(std::string_view candidate, std::string_view reference);

/// Longest common subsequence length over token sequences.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// 100 * LCS-based F1 (beta = 1). Empty reference throws MetricError.
double rouge_l(std::string_view candidate, std::string_view reference);

// --- embeddings ---------------------------------------------------------------

struct TokenEmbeddingMatrix {
  std::vector<std::string> tokens;
  std::vector<std::vector<double>> vectors;

  std::size_t dimension() const { return vectors.empty() ? 0 : vectors.front().size(); }
  /// Throws MetricError{backend} on size or dimension mismatch.
  void validate() const;
};

/// Token-embedding provider. Implementations must be safe for concurrent calls.
class TokenEmbedder {
 public:
  virtual ~TokenEmbedder() = default;
  virtual TokenEmbeddingMatrix embed(std::string_view text) = 0;
};

/// One-hot vectors over a fixed vocabulary, so the cosine of two tokens is 1
/// when they are equal and 0 otherwise. Tokens outside the vocabulary throw.
class IdentityEmbedder final : public TokenEmbedder {
 public:
  explicit IdentityEmbedder(std::vector<std::string> vocabulary);
  TokenEmbeddingMatrix embed(std::string_view text) override;

 private:
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Deterministic pseudo-random unit vectors seeded by a hash of each token.
class HashEmbedder final : public TokenEmbedder {
 public:
  explicit HashEmbedder(std::size_t dimension = 64, std::uint64_t seed = 0);
  TokenEmbeddingMatrix embed(std::string_view text) override;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

/// POST {"text": ...} -> {"tokens": [...], "vectors": [[...], ...]}.
class HttpEmbedder final : public TokenEmbedder {
 public:
  explicit HttpEmbedder(std::string url, int timeout_ms = 30000);
  TokenEmbeddingMatrix embed(std::string_view text) override;

 private:
  std::string origin_;
  std::string path_;
  int timeout_ms_;
};

/// Parses and validates an embedder HTTP response body.
TokenEmbeddingMatrix parse_embedding_response(const std::string& body);

struct BertScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Greedy-matching BERTScore over precomputed embeddings, scaled to 0..100,
/// without baseline rescaling.
BertScore bert_score(const TokenEmbeddingMatrix& candidate, const TokenEmbeddingMatrix& reference);

/// F1 component of bert_score. Embedder failures surface as
/// MetricError{backend}; an empty reference throws MetricError.
double bert_score_f1(std::string_view candidate, std::string_view reference, TokenEmbedder& embedder);

// --- aggregates -----------------------------------------------------------------

/// Computed in log space. Throws MetricError for empty input or any value <= 0.
double geometric_mean(std::span<const double> values);
/// n / sum(1/v). Throws MetricError for empty input or any value <= 0.
double harmonic_mean(std::span<const double> values);
double arithmetic_mean(std::span<const double> values);

struct MetricReport {
  double bleu = 0.0;
  double rouge_l = 0.0;
  double bert_score = 0.0;
  double gm = 0.0;
  double hm = 0.0;

  /// GM/HM of the three components; both are 0 when any component is 0.
  static MetricReport from_components(double bleu, double rouge_l, double bert_score);
};

Json to_json(const MetricReport& r);

struct PairScore {
  std::string case_id;
  double bleu = 0.0;
  double rouge_l = 0.0;
  double bert_score = 0.0;
};

struct CandidateReference {
  std::string case_id;
  std::string candidate;
  std::string reference;
};

struct CorpusReport {
  MetricReport corpus;
  std::vector<PairScore> pairs;
};

/// Per-pair metrics averaged over pairs, then GM/HM from the three averages.
CorpusReport corpus_report(std::span<const CandidateReference> pairs, TokenEmbedder& embedder);

Json to_json(const CorpusReport& r);
/// Columns: case_id,bleu,rouge_l,bert_score
std::string pairs_csv(const CorpusReport& r);

}  // namespace agora::metrics
