#include <gtest/gtest.h>

#include <random>

#include "agora/domain.hpp"
#include "test_support.hpp"

namespace agora {
namespace {

using A = Attribute;

TEST(CanonicalOrder, SortsMixedSet) {
  EXPECT_EQ(canonical_agent_order({A::Solution, A::Reframing}), (std::vector<A>{A::Reframing, A::Solution}));
}

TEST(CanonicalOrder, KeepsUniformMultiset) {
  EXPECT_EQ(canonical_agent_order({A::Regard, A::Regard, A::Regard}), (std::vector<A>{A::Regard, A::Regard, A::Regard}));
}

TEST(CanonicalOrder, FullSetUnchanged) {
  EXPECT_EQ(canonical_agent_order({A::Reframing, A::Regard, A::Solution}),
            (std::vector<A>{A::Reframing, A::Regard, A::Solution}));
}

TEST(CanonicalOrder, DuplicatesStayAdjacent) {
  EXPECT_EQ(canonical_agent_order({A::Solution, A::Regard, A::Solution, A::Reframing}),
            (std::vector<A>{A::Reframing, A::Regard, A::Solution, A::Solution}));
}

TEST(CanonicalOrder, EmptyIsConfigError) { EXPECT_THROW(canonical_agent_order({}), ConfigError); }

TEST(Attribute, ParsesKeysAndDisplayNames) {
  EXPECT_EQ(parse_attribute("regard"), A::Regard);
  EXPECT_EQ(parse_attribute("Solution-Focused"), A::Solution);
  EXPECT_EQ(parse_attribute("REFRAMING"), A::Reframing);
  EXPECT_THROW(parse_attribute("empathy"), ConfigError);
}

TEST(AttributeScores, RejectsOutOfRange) {
  EXPECT_NO_THROW(AttributeScores(1.0, 3.0, 2.5));
  EXPECT_THROW(AttributeScores(0.99, 2, 2), ConfigError);
  EXPECT_THROW(AttributeScores(2, 3.01, 2), ConfigError);
  EXPECT_THROW(AttributeScores(2, 2, std::nan("")), ConfigError);
}

TEST(AttributeScores, RandomVectorsRespectBounds) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(0.0, 4.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = d(rng), b = d(rng), c = d(rng);
    const bool in = a >= 1 && a <= 3 && b >= 1 && b <= 3 && c >= 1 && c <= 3;
    if (in) {
      const AttributeScores s(a, b, c);
      for (double v : s.values()) {
        EXPECT_GE(v, 1.0);
        EXPECT_LE(v, 3.0);
      }
    } else {
      EXPECT_THROW(AttributeScores(a, b, c), ConfigError);
    }
  }
}

TEST(UserCase, PostCountRule) {
  auto c = test::sample_case("x", 3);
  EXPECT_NO_THROW(c.validate());
  c.posts.push_back("fourth");
  EXPECT_THROW(c.validate(), ConfigError);
  c.posts.clear();
  EXPECT_THROW(c.validate(), ConfigError);
  c.posts = {""};
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(UserCase, LabelsRequireReference) {
  auto c = test::sample_case();
  c.expert_response.reset();
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(UserCase, RoundTripKeepsUnknownFields) {
  const Json j = Json::parse(R"({"id":"a","posts":["p1","p2"],"expert_response":"r",
    "attribute_labels":{"reframing":2,"regard":3,"solution":1},"source":"tt","topic":"work"})");
  const UserCase c = user_case_from_json(j);
  EXPECT_EQ(c.attribute_labels, AttributeScores(2, 3, 1));
  EXPECT_EQ(c.extra.at("topic"), "work");
  EXPECT_EQ(Json(c), j);
  EXPECT_EQ(user_case_from_json(Json(c)), c);
}

TEST(Transcript, RoundTripAndCompleteness) {
  DebateTranscript t;
  t.turn_count = 2;
  for (int r = 1; r <= 2; ++r) {
    for (A a : kAllAttributes) t.turns.push_back({r, a, "turn " + std::to_string(r)});
  }
  EXPECT_TRUE(t.is_complete(kAllAttributes));
  EXPECT_EQ(transcript_from_json(Json(t)), t);
  std::swap(t.turns[0], t.turns[1]);
  EXPECT_FALSE(t.is_complete(kAllAttributes));
}

TEST(Persona, RoundTripAndValidation) {
  CounselorPersona p{"A warm counselor.", {{A::Reframing, 1}, {A::Regard, 3}, {A::Solution, 2}}};
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(persona_from_json(Json(p)), p);
  p.influence[A::Regard] = 4;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(MethodConfig, CallsPerCase) {
  EXPECT_EQ(test::method_config(Method::SA).calls_per_case(), 1);
  EXPECT_EQ(test::method_config(Method::SAA).calls_per_case(), 1);
  EXPECT_EQ(test::method_config(Method::MAA).calls_per_case(), 5);
  EXPECT_EQ(test::method_config(Method::MentalAgora, {A::Regard, A::Solution}, 3).calls_per_case(), 8);
}

TEST(MethodConfig, ValidatesTurns) {
  auto cfg = test::method_config(Method::MentalAgora, {kAllAttributes.begin(), kAllAttributes.end()}, 0);
  try {
    cfg.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "turns must be ≥ 1");
  }
}

TEST(MethodConfig, RoundTripAndStableHash) {
  auto cfg = test::method_config(Method::MentalAgora, {A::Solution, A::Solution, A::Solution}, 3);
  cfg.stage3_model = "other";
  const auto back = method_config_from_json(Json(cfg));
  EXPECT_EQ(back, cfg);
  EXPECT_EQ(back.hash(), cfg.hash());
  auto changed = cfg;
  changed.debate_turns = 2;
  EXPECT_NE(changed.hash(), cfg.hash());
}

TEST(MethodConfig, SaHasNoActiveAttributes) {
  EXPECT_TRUE(test::method_config(Method::SA).active_attributes().empty());
  EXPECT_EQ(test::method_config(Method::MentalAgora, {A::Regard, A::Regard, A::Regard}).active_attributes(),
            std::vector<A>{A::Regard});
}

TEST(GeneratedResponse, RoundTrip) {
  GeneratedResponse r;
  r.case_id = "c1";
  r.text = "reply";
  r.method = test::method_config(Method::MAA);
  r.persona = CounselorPersona{"p", {{A::Reframing, 2}, {A::Regard, 2}, {A::Solution, 2}}};
  r.transcript = DebateTranscript{{{1, A::Reframing, "x"}}, 1};
  r.stage2_raw = "{}";
  r.provenance = {"2024-01-01T00:00:00Z", "h", "mock", "s"};
  EXPECT_EQ(generated_response_from_json(Json(r)), r);
}

}  // namespace
}  // namespace agora
