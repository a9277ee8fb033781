#include <gtest/gtest.h>
#include <httplib.h>

#include <random>
#include <thread>

#include "agora/metrics.hpp"
#include "metric_oracles.hpp"

namespace agora::metrics {
namespace {

using Toks = std::vector<std::string>;

TEST(Tokenize, SplitsPunctuationAndLowercases) {
  EXPECT_EQ(tokenize("Hello, world!"), (Toks{"hello", ",", "world", "!"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("don't"), (Toks{"don", "'", "t"}));
  EXPECT_EQ(tokenize("  a\tb\nc "), (Toks{"a", "b", "c"}));
  EXPECT_EQ(tokenize("caf\xc3\xa9 ok"), (Toks{"caf\xc3\xa9", "ok"}));
}

TEST(Bleu, HandComputedOracles) {
  for (const auto& f : test::bleu_fixtures()) {
    EXPECT_NEAR(unigram_bleu(f.candidate, f.reference), f.expected, 1e-9) << f.candidate << " | " << f.reference;
  }
}

TEST(Bleu, EmptyReferenceThrows) { EXPECT_THROW(unigram_bleu("a", "  "), MetricError); }

TEST(RougeL, HandComputedOracles) {
  for (const auto& f : test::rouge_fixtures()) {
    EXPECT_NEAR(rouge_l(f.candidate, f.reference), f.expected, 1e-9) << f.candidate << " | " << f.reference;
  }
}

TEST(RougeL, EmptyReferenceThrows) { EXPECT_THROW(rouge_l("a", ""), MetricError); }

TEST(Lcs, MatchesSimpleCases) {
  const Toks a{"a", "b", "c", "b", "d", "a", "b"}, b{"b", "d", "c", "a", "b", "a"};
  EXPECT_EQ(lcs_length(a, b), 4u);
  EXPECT_EQ(lcs_length(a, {}), 0u);
}

TokenEmbeddingMatrix matrix(Toks tokens, std::vector<std::vector<double>> vectors) {
  return {std::move(tokens), std::move(vectors)};
}

TEST(BertScore, HandEnumeratedGreedyMatch) {
  const double s = 1.0 / std::sqrt(2.0);
  const auto cand = matrix({"c1", "c2"}, {{1, 0}, {0, 1}});
  const auto ref = matrix({"r1", "r2", "r3"}, {{1, 0}, {2, 0}, {s, s}});
  // row maxima: 1, s    column maxima: 1, 1, s
  const double p = (1 + s) / 2, r = (2 + s) / 3;
  const auto b = bert_score(cand, ref);
  EXPECT_NEAR(b.precision, 100 * p, 1e-9);
  EXPECT_NEAR(b.recall, 100 * r, 1e-9);
  EXPECT_NEAR(b.f1, 100 * 2 * p * r / (p + r), 1e-9);
  EXPECT_NEAR(b.f1, 87.72826104156522, 1e-9);
}

TEST(BertScore, IdentityEmbedderSelfMatch) {
  IdentityEmbedder e({"the", "cat", "sat", "mat"});
  EXPECT_DOUBLE_EQ(bert_score_f1("the cat sat", "the cat sat", e), 100.0);
  EXPECT_THROW(bert_score_f1("dog", "the", e), MetricError);
}

TEST(BertScore, ConstantEmbedderScoresHundred) {
  struct Constant final : TokenEmbedder {
    TokenEmbeddingMatrix embed(std::string_view text) override {
      TokenEmbeddingMatrix m;
      m.tokens = tokenize(text);
      m.vectors.assign(m.tokens.size(), {0.6, 0.8});
      return m;
    }
  } e;
  EXPECT_NEAR(bert_score_f1("one two", "three four five", e), 100.0, 1e-9);
}

TEST(BertScore, SmallExhaustiveAgainstOracle) {
  const Toks vocab{"a", "b", "c"};
  IdentityEmbedder e(vocab);
  const auto seqs = test::all_sequences(vocab, 3);
  for (const auto& c : seqs) {
    for (const auto& r : seqs) {
      if (r.empty()) continue;
      ASSERT_NEAR(bert_score_f1(test::join_tokens(c), test::join_tokens(r), e),
                  test::brute_force_identity_bertscore(c, r, vocab), 1e-9);
    }
  }
}

TEST(BertScore, EmbedderFailureIsBackendError) {
  struct Broken final : TokenEmbedder {
    TokenEmbeddingMatrix embed(std::string_view) override { throw std::runtime_error("down"); }
  } e;
  try {
    bert_score_f1("a", "b", e);
    FAIL();
  } catch (const MetricError& err) {
    EXPECT_EQ(err.kind(), MetricError::Kind::backend);
  }
}

TEST(BertScore, MismatchedMatrixIsBackendError) {
  TokenEmbeddingMatrix m = matrix({"a", "b"}, {{1, 0}});
  try {
    m.validate();
    FAIL();
  } catch (const MetricError& err) {
    EXPECT_EQ(err.kind(), MetricError::Kind::backend);
  }
}

TEST(HashEmbedder, DeterministicUnitVectors) {
  HashEmbedder a(16, 3), b(16, 3);
  const auto m1 = a.embed("hello there hello");
  const auto m2 = b.embed("hello there hello");
  ASSERT_EQ(m1.vectors.size(), 3u);
  EXPECT_EQ(m1.vectors, m2.vectors);
  EXPECT_EQ(m1.vectors[0], m1.vectors[2]);
  double n = 0;
  for (double x : m1.vectors[1]) n += x * x;
  EXPECT_NEAR(n, 1.0, 1e-12);
}

TEST(HttpEmbedder, ParsesResponseAndReportsFailures) {
  const auto m = parse_embedding_response(R"({"tokens":["a","b"],"vectors":[[1,0],[0,1]]})");
  EXPECT_EQ(m.dimension(), 2u);
  EXPECT_THROW(parse_embedding_response(R"({"tokens":["a"],"vectors":[]})"), MetricError);
  EXPECT_THROW(parse_embedding_response("nope"), MetricError);

  httplib::Server server;
  server.Post("/embed", [](const httplib::Request& req, httplib::Response& res) {
    const Json in = Json::parse(req.body);
    Json out{{"tokens", Json::array()}, {"vectors", Json::array()}};
    for (const auto& t : tokenize(in.at("text").get<std::string>())) {
      out["tokens"].push_back(t);
      out["vectors"].push_back({1.0, 0.0});
    }
    res.set_content(out.dump(), "application/json");
  });
  server.Post("/fail", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const std::string base = "http://127.0.0.1:" + std::to_string(port);
  HttpEmbedder ok(base + "/embed");
  EXPECT_NEAR(bert_score_f1("x y", "z", ok), 100.0, 1e-9);
  HttpEmbedder bad(base + "/fail");
  try {
    bert_score_f1("x", "y", bad);
    ADD_FAILURE();
  } catch (const MetricError& e) {
    EXPECT_EQ(e.kind(), MetricError::Kind::backend);
  }
  server.stop();
  t.join();
}

TEST(Means, PublishedTriples) {
  const std::vector<double> a{24.52, 15.86, 94.79};
  EXPECT_NEAR(geometric_mean(a), 33.28, 0.01);
  EXPECT_NEAR(harmonic_mean(a), 26.23, 0.01);
  const std::vector<double> b{26.50, 15.73, 94.80};
  EXPECT_NEAR(geometric_mean(b), 34.06, 0.01);
  const std::vector<double> same{7.5, 7.5, 7.5};
  EXPECT_NEAR(geometric_mean(same), 7.5, 1e-12);
  EXPECT_NEAR(harmonic_mean(same), 7.5, 1e-12);
}

TEST(Means, RejectNonPositive) {
  const std::vector<double> zero{1.0, 0.0}, neg{1.0, -2.0}, empty{};
  EXPECT_THROW(geometric_mean(zero), MetricError);
  EXPECT_THROW(harmonic_mean(neg), MetricError);
  EXPECT_THROW(geometric_mean(empty), MetricError);
}

TEST(Means, AmGmHmOrdering) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(1e-3, 100.0);
  for (int i = 0; i < 2000; ++i) {
    const std::vector<double> v{d(rng), d(rng), d(rng)};
    const double am = arithmetic_mean(v), gm = geometric_mean(v), hm = harmonic_mean(v);
    ASSERT_GE(am + 1e-9, gm);
    ASSERT_GE(gm + 1e-9, hm);
  }
}

TEST(Report, ZeroComponentZeroesMeans) {
  const auto r = MetricReport::from_components(0.0, 10.0, 90.0);
  EXPECT_EQ(r.gm, 0.0);
  EXPECT_EQ(r.hm, 0.0);
}

TEST(Report, CorpusAveragesPairsThenAggregates) {
  IdentityEmbedder e({"the", "cat", "sat", "ate"});
  const std::vector<CandidateReference> pairs{{"1", "the cat sat", "the cat"}, {"2", "the cat", "the cat"}};
  const auto r = corpus_report(pairs, e);
  ASSERT_EQ(r.pairs.size(), 2u);
  EXPECT_NEAR(r.corpus.bleu, (200.0 / 3.0 + 100.0) / 2, 1e-9);
  const std::vector<double> comps{r.corpus.bleu, r.corpus.rouge_l, r.corpus.bert_score};
  EXPECT_NEAR(r.corpus.gm, geometric_mean(comps), 1e-9);
  EXPECT_NE(pairs_csv(r).find("case_id,bleu,rouge_l,bert_score"), std::string::npos);
  EXPECT_EQ(to_json(r).at("n_pairs"), 2);
}

}  // namespace
}  // namespace agora::metrics
