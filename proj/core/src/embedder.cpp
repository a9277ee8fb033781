#include <httplib.h>

#include <cmath>
#include <random>

#include "agora/hashing.hpp"
#include "agora/metrics.hpp"

namespace agora::metrics {

IdentityEmbedder::IdentityEmbedder(std::vector<std::string> vocabulary) {
  if (vocabulary.empty()) throw MetricError("identity embedder needs a non-empty vocabulary");
  for (auto& t : vocabulary) index_.emplace(std::move(t), index_.size());
}

TokenEmbeddingMatrix IdentityEmbedder::embed(std::string_view text) {
  TokenEmbeddingMatrix m;
  m.tokens = tokenize(text);
  m.vectors.reserve(m.tokens.size());
  for (const auto& t : m.tokens) {
    auto it = index_.find(t);
    if (it == index_.end()) throw MetricError("token '" + t + "' is outside the identity vocabulary");
    std::vector<double> v(index_.size(), 0.0);
    v[it->second] = 1.0;
    m.vectors.push_back(std::move(v));
  }
  return m;
}

HashEmbedder::HashEmbedder(std::size_t dimension, std::uint64_t seed) : dimension_(dimension), seed_(seed) {
  if (dimension_ == 0) throw MetricError("hash embedder dimension must be >= 1");
}

TokenEmbeddingMatrix HashEmbedder::embed(std::string_view text) {
  TokenEmbeddingMatrix m;
  m.tokens = tokenize(text);
  m.vectors.reserve(m.tokens.size());
  for (const auto& t : m.tokens) {
    std::mt19937_64 rng(sha256_u64(t + ":" + std::to_string(seed_)));
    std::vector<double> v(dimension_);
    double norm = 0.0;
    for (auto& x : v) {
      // uniform in [-1, 1) from the raw engine output, stable across standard libraries
      x = static_cast<double>(rng() >> 11) * (2.0 / 9007199254740992.0) - 1.0;
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (auto& x : v) x /= norm;
    }
    m.vectors.push_back(std::move(v));
  }
  return m;
}

HttpEmbedder::HttpEmbedder(std::string url, int timeout_ms) : timeout_ms_(timeout_ms) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("embedder URL must include a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = path_start == std::string::npos ? url : url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

TokenEmbeddingMatrix HttpEmbedder::embed(std::string_view text) {
  httplib::Client client(origin_);
  const auto secs = timeout_ms_ / 1000;
  const auto usecs = (timeout_ms_ % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  const Json body{{"text", std::string(text)}};
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    throw MetricError("embedder request failed: " + httplib::to_string(res.error()), MetricError::Kind::backend);
  }
  if (res->status != 200) {
    throw MetricError("embedder returned HTTP " + std::to_string(res->status), MetricError::Kind::backend);
  }
  return parse_embedding_response(res->body);
}

TokenEmbeddingMatrix parse_embedding_response(const std::string& body) {
  TokenEmbeddingMatrix m;
  try {
    const Json j = Json::parse(body);
    m.tokens = j.at("tokens").get<std::vector<std::string>>();
    m.vectors = j.at("vectors").get<std::vector<std::vector<double>>>();
  } catch (const Json::exception& e) {
    throw MetricError(std::string("malformed embedder response: ") + e.what(), MetricError::Kind::backend);
  }
  m.validate();
  return m;
}

}  // namespace agora::metrics
