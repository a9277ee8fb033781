#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "agora/metrics.hpp"

namespace agora::metrics {

namespace {

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void require_reference(std::span<const std::string> ref) {
  if (ref.empty()) throw MetricError("reference must not be empty");
}

}  // namespace

double unigram_bleu(std::string_view candidate, std::string_view reference) {
  const auto ref = tokenize(reference);
  require_reference(ref);
  const auto cand = tokenize(candidate);
  if (cand.empty()) return 0.0;

  std::unordered_map<std::string_view, std::size_t> ref_counts;
  for (const auto& t : ref) ++ref_counts[t];
  std::unordered_map<std::string_view, std::size_t> cand_counts;
  for (const auto& t : cand) ++cand_counts[t];

  std::size_t clipped = 0;
  for (const auto& [tok, n] : cand_counts) {
    auto it = ref_counts.find(tok);
    if (it != ref_counts.end()) clipped += std::min(n, it->second);
  }
  const double c = static_cast<double>(cand.size());
  const double r = static_cast<double>(ref.size());
  const double precision = static_cast<double>(clipped) / c;
  const double bp = std::min(1.0, std::exp(1.0 - r / c));
  return 100.0 * bp * precision;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(std::string_view candidate, std::string_view reference) {
  const auto ref = tokenize(reference);
  require_reference(ref);
  const auto cand = tokenize(candidate);
  const auto lcs = lcs_length(cand, ref);
  if (lcs == 0) return 0.0;
  const double p = static_cast<double>(lcs) / static_cast<double>(cand.size());
  const double r = static_cast<double>(lcs) / static_cast<double>(ref.size());
  return 100.0 * 2.0 * p * r / (p + r);
}

// --- BERTScore ------------------------------------------------------------------

void TokenEmbeddingMatrix::validate() const {
  if (tokens.size() != vectors.size()) {
    throw MetricError("embedder returned " + std::to_string(tokens.size()) + " tokens but " +
                          std::to_string(vectors.size()) + " vectors",
                      MetricError::Kind::backend);
  }
  if (vectors.empty()) return;
  const std::size_t d = vectors.front().size();
  if (d == 0) throw MetricError("embedding dimension must be >= 1", MetricError::Kind::backend);
  for (const auto& v : vectors) {
    if (v.size() != d) throw MetricError("embedding dimensions are not uniform", MetricError::Kind::backend);
    for (double x : v) {
      if (!std::isfinite(x)) throw MetricError("embedding contains a non-finite value", MetricError::Kind::backend);
    }
  }
}

BertScore bert_score(const TokenEmbeddingMatrix& candidate, const TokenEmbeddingMatrix& reference) {
  candidate.validate();
  reference.validate();
  if (reference.vectors.empty()) throw MetricError("reference must not be empty");
  if (candidate.vectors.empty()) return {};
  if (candidate.dimension() != reference.dimension()) {
    throw MetricError("candidate and reference embeddings differ in dimension", MetricError::Kind::backend);
  }

  auto norms = [](const TokenEmbeddingMatrix& m) {
    std::vector<double> n;
    n.reserve(m.vectors.size());
    for (const auto& v : m.vectors) {
      double s = 0.0;
      for (double x : v) s += x * x;
      n.push_back(std::sqrt(s));
    }
    return n;
  };
  const auto cn = norms(candidate);
  const auto rn = norms(reference);
  const std::size_t nc = candidate.vectors.size(), nr = reference.vectors.size();

  std::vector<double> best_for_cand(nc, -1.0), best_for_ref(nr, -1.0);
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = 0; j < nr; ++j) {
      double cos = 0.0;
      if (cn[i] > 0.0 && rn[j] > 0.0) {
        double dot = 0.0;
        const auto& a = candidate.vectors[i];
        const auto& b = reference.vectors[j];
        for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
        cos = std::clamp(dot / (cn[i] * rn[j]), -1.0, 1.0);
      }
      best_for_cand[i] = std::max(best_for_cand[i], cos);
      best_for_ref[j] = std::max(best_for_ref[j], cos);
    }
  }
  BertScore s;
  for (double v : best_for_cand) s.precision += v;
  for (double v : best_for_ref) s.recall += v;
  s.precision /= static_cast<double>(nc);
  s.recall /= static_cast<double>(nr);
  s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  s.precision *= 100.0;
  s.recall *= 100.0;
  s.f1 *= 100.0;
  return s;
}

double bert_score_f1(std::string_view candidate, std::string_view reference, TokenEmbedder& embedder) {
  if (reference.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw MetricError("reference must not be empty");
  }
  TokenEmbeddingMatrix cand, ref;
  try {
    cand = embedder.embed(candidate);
    ref = embedder.embed(reference);
  } catch (const MetricError&) {
    throw;
  } catch (const std::exception& e) {
    throw MetricError(std::string("embedder failed: ") + e.what(), MetricError::Kind::backend);
  }
  return bert_score(cand, ref).f1;
}

// --- aggregates -------------------------------------------------------------------

namespace {

void require_positive(std::span<const double> values, const char* what) {
  if (values.empty()) throw MetricError(std::string(what) + " of an empty list");
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw MetricError(std::string(what) + " requires positive finite values, got " + std::to_string(v));
    }
  }
}

}  // namespace

double geometric_mean(std::span<const double> values) {
  require_positive(values, "geometric mean");
  double log_sum = 0.0;
  for (double v : values) log_sum += std::log(v);
  return std::exp(log_sum / static_cast<double>(values.size()));
}

double harmonic_mean(std::span<const double> values) {
  require_positive(values, "harmonic mean");
  double inv = 0.0;
  for (double v : values) inv += 1.0 / v;
  return static_cast<double>(values.size()) / inv;
}

double arithmetic_mean(std::span<const double> values) {
  if (values.empty()) throw MetricError("arithmetic mean of an empty list");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

MetricReport MetricReport::from_components(double bleu, double rouge, double bert) {
  MetricReport r{bleu, rouge, bert, 0.0, 0.0};
  const double v[] = {bleu, rouge, bert};
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) throw MetricError("metric components must be finite and non-negative");
  }
  if (bleu > 0.0 && rouge > 0.0 && bert > 0.0) {
    r.gm = geometric_mean(v);
    r.hm = harmonic_mean(v);
  }
  return r;
}

Json to_json(const MetricReport& r) {
  return Json{{"bleu", r.bleu}, {"rouge_l", r.rouge_l}, {"bert_score", r.bert_score}, {"gm", r.gm}, {"hm", r.hm}};
}

CorpusReport corpus_report(std::span<const CandidateReference> pairs, TokenEmbedder& embedder) {
  if (pairs.empty()) throw MetricError("corpus report needs at least one pair");
  CorpusReport out;
  double b = 0.0, r = 0.0, s = 0.0;
  for (const auto& p : pairs) {
    PairScore ps{p.case_id, unigram_bleu(p.candidate, p.reference), rouge_l(p.candidate, p.reference),
                 bert_score_f1(p.candidate, p.reference, embedder)};
    b += ps.bleu;
    r += ps.rouge_l;
    s += ps.bert_score;
    out.pairs.push_back(std::move(ps));
  }
  const double n = static_cast<double>(pairs.size());
  out.corpus = MetricReport::from_components(b / n, r / n, s / n);
  return out;
}

Json to_json(const CorpusReport& r) {
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"case_id", p.case_id}, {"bleu", p.bleu}, {"rouge_l", p.rouge_l}, {"bert_score", p.bert_score}});
  }
  return Json{{"corpus", to_json(r.corpus)}, {"n_pairs", r.pairs.size()}, {"pairs", std::move(pairs)}};
}

std::string pairs_csv(const CorpusReport& r) {
  std::string out = "case_id,bleu,rouge_l,bert_score\n";
  for (const auto& p : r.pairs) {
    std::string id = p.case_id;
    if (id.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : id) {
        if (c == '"') q += '"';
        q += c;
      }
      id = q + "\"";
    }
    out += id + "," + fixed4(p.bleu) + "," + fixed4(p.rouge_l) + "," + fixed4(p.bert_score) + "\n";
  }
  return out;
}

}  // namespace agora::metrics
