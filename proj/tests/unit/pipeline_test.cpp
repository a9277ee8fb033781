#include <gtest/gtest.h>

#include "agora/pipeline.hpp"
#include "test_support.hpp"

namespace agora::pipeline {
namespace {

using A = Attribute;
using gateway::MockRule;
using gateway::MockScript;

const std::vector<A> kAll{kAllAttributes.begin(), kAllAttributes.end()};

MockScript script_with(std::vector<MockRule> rules, std::uint64_t seed = 5) {
  MockScript s = MockScript::seeded(seed);
  s.rules = std::move(rules);
  return s;
}

MockRule reply_rule(std::string contains, std::vector<std::string> replies,
                    gateway::MatchScope scope = gateway::MatchScope::any) {
  MockRule r;
  r.contains = std::move(contains);
  r.scope = scope;
  r.replies = std::move(replies);
  return r;
}

TEST(Debate, RoundsAndPrefixHistory) {
  test::MockEnv env;
  const auto c = test::sample_case();
  const auto t = run_debate(c, std::vector<A>{A::Solution, A::Reframing, A::Regard}, 2, env.services(), "mock-model",
                            Sampling{});
  ASSERT_EQ(t.turns.size(), 6u);
  EXPECT_TRUE(t.is_complete(kAll));
  const auto log = env.backend->call_log();
  ASSERT_EQ(log.size(), 6u);
  for (std::size_t k = 0; k < log.size(); ++k) {
    const auto& turn = t.turns[k];
    EXPECT_EQ(turn.round_index, static_cast<int>(k / 3) + 1);
    EXPECT_EQ(turn.agent, kAll[k % 3]);
    EXPECT_EQ(test::system_text(log[k]), env.prompts.role(turn.agent).role_text);
    DebateTranscript prefix;
    prefix.turns.assign(t.turns.begin(), t.turns.begin() + static_cast<long>(k));
    EXPECT_NE(test::last_user(log[k]).find(prompts::serialize_history(prefix)), std::string::npos) << k;
    if (k + 1 < log.size()) {
      EXPECT_EQ(test::last_user(log[k]).find(t.turns[k].text), std::string::npos) << k;
    }
  }
}

TEST(Debate, RejectsZeroTurns) {
  test::MockEnv env;
  try {
    run_debate(test::sample_case(), kAll, 0, env.services(), "m", Sampling{});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "turns must be ≥ 1");
  }
  EXPECT_EQ(env.backend->call_count(), 0u);
}

TEST(Debate, FailureKeepsPartialTranscript) {
  MockRule fail;
  fail.contains = "Solution-Focused";
  fail.scope = gateway::MatchScope::last_user;
  fail.fail_with = GatewayError::Kind::request;
  test::MockEnv env(script_with({fail}));
  try {
    run_debate(test::sample_case(), kAll, 2, env.services(), "m", Sampling{});
    FAIL();
  } catch (const CaseFailure& e) {
    EXPECT_EQ(e.partial().at("stage"), "debate");
    EXPECT_EQ(e.partial().at("transcript").at("turns").size(), 2u);
  }
}

TEST(Methods, GatewayCallCounts) {
  struct Case {
    Method m;
    std::vector<A> agents;
    int turns;
  };
  const std::vector<Case> cases{{Method::SA, {}, 1},
                                {Method::SAA, kAll, 1},
                                {Method::MAA, kAll, 1},
                                {Method::MentalAgora, kAll, 1},
                                {Method::MentalAgora, kAll, 2},
                                {Method::MentalAgora, kAll, 3},
                                {Method::MentalAgora, {A::Regard}, 2},
                                {Method::MentalAgora, {A::Regard, A::Regard, A::Regard}, 2},
                                {Method::MAA, {A::Solution, A::Reframing}, 1}};
  for (const auto& k : cases) {
    test::MockEnv env;
    auto cfg = test::method_config(k.m, k.agents.empty() ? kAll : k.agents, k.turns);
    if (k.m == Method::SA) cfg.agents.clear();
    const auto r = run_method(test::sample_case(), cfg, env.services());
    EXPECT_FALSE(r.text.empty());
    EXPECT_EQ(static_cast<int>(env.backend->call_count()), cfg.calls_per_case())
        << key(k.m) << " turns=" << k.turns;
  }
}

TEST(Methods, MaaAgentsSeeNoOtherAgentText) {
  test::MockEnv env;
  const auto r = run_method(test::sample_case(), test::method_config(Method::MAA), env.services());
  const auto log = env.backend->call_log();
  ASSERT_EQ(log.size(), 5u);
  ASSERT_TRUE(r.transcript.has_value());
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NE(test::last_user(log[i]).find(prompts::kNoDiscussion), std::string::npos);
    for (const auto& turn : r.transcript->turns) {
      EXPECT_EQ(test::last_user(log[i]).find(turn.text), std::string::npos);
    }
  }
  EXPECT_NE(test::last_user(log[3]).find(r.transcript->turns[2].text), std::string::npos);
}

TEST(Methods, SaaSystemNamesOnlyActiveAttributes) {
  test::MockEnv env;
  run_method(test::sample_case(), test::method_config(Method::SAA, {A::Regard}), env.services());
  const auto sys = test::system_text(env.backend->call_log().at(0));
  EXPECT_NE(sys.find(env.prompts.attribute_description(A::Regard)), std::string::npos);
  EXPECT_EQ(sys.find(env.prompts.attribute_description(A::Solution)), std::string::npos);
}

TEST(Methods, ResponseSystemPromptIsPersona) {
  test::MockEnv env;
  const auto r = run_method(test::sample_case(), test::method_config(Method::MentalAgora), env.services());
  ASSERT_TRUE(r.persona.has_value());
  const auto log = env.backend->call_log();
  EXPECT_NE(test::system_text(log.back()).find(r.persona->persona_text), std::string::npos);
  EXPECT_EQ(r.persona->influence.size(), 3u);
}

TEST(Stage2, AcceptsFencedOutput) {
  const std::string raw = "```json\n{\"reframing\": 2, \"regard\": 3, \"solution\": 1, \"persona_text\": \"p\"}\n```";
  const auto r = parse_stage2_output(raw, kAll, {});
  EXPECT_EQ(r.step, ParseStep::fence_stripped);
  EXPECT_EQ(r.persona.influence.at(A::Regard), 3);
}

TEST(Stage2, RepairsOnceThenFails) {
  int calls = 0;
  auto good = [&](const RepairRequest&) {
    ++calls;
    return std::string(R"({"regard": 2, "persona_text": "fixed"})");
  };
  const std::vector<A> active{A::Regard};
  const auto r = parse_stage2_output(R"({"regard": 5, "persona_text": "x"})", active, good);
  EXPECT_EQ(r.step, ParseStep::repaired);
  EXPECT_EQ(r.persona.persona_text, "fixed");
  EXPECT_EQ(calls, 1);

  auto bad = [](const RepairRequest&) { return std::string("no"); };
  try {
    parse_stage2_output("prose only", active, bad);
    FAIL();
  } catch (const Stage2ParseError& e) {
    EXPECT_EQ(e.raw(), "prose only");
  }
}

TEST(Stage2, MissingActiveAttributeIsSchemaError) {
  EXPECT_THROW(persona_from_stage2_json(Json{{"regard", 2}, {"persona_text", "p"}}, kAll), SchemaError);
  EXPECT_THROW(persona_from_stage2_json(Json{{"regard", 2}, {"persona_text", " "}}, std::vector<A>{A::Regard}),
               SchemaError);
}

TEST(Stage2, UnrepairableOutputFailsCaseWithRaw) {
  test::MockEnv env(script_with({reply_rule("rejected because", {"still prose"}),
                                 reply_rule("persona_text", {"I cannot produce JSON."}, gateway::MatchScope::last_user)}));
  const auto cfg = test::method_config(Method::MentalAgora, kAll, 1);
  try {
    run_method(test::sample_case(), cfg, env.services());
    FAIL();
  } catch (const CaseFailure& e) {
    EXPECT_EQ(e.partial().at("stage"), "counselor");
    EXPECT_EQ(e.partial().at("transcript").at("turns").size(), 3u);
  }
}

TEST(Batch, ResumeSkipsCompletedCases) {
  test::TempDir dir;
  std::vector<UserCase> cases{test::sample_case("a"), test::sample_case("b"), test::sample_case("c")};
  MockRule fail;
  fail.contains = "for b.";
  fail.fail_with = GatewayError::Kind::request;
  fail.fail_times = 1;
  fail.replies = {"A steady reply for b."};
  test::MockEnv env(script_with({fail}));
  const auto cfg = test::method_config(Method::SA);
  BatchOptions opts{dir / "run", "", 1};

  auto first = run_batch(cases, "mem", cfg, env.services(), opts);
  EXPECT_EQ(first.manifest.count(CaseState::ok), 2u);
  EXPECT_EQ(first.manifest.count(CaseState::failed), 1u);
  EXPECT_FALSE(first.manifest.status.at("b").reason.empty());
  const auto calls_after_first = env.backend->call_count();

  auto second = run_batch(cases, "mem", cfg, env.services(), opts);
  EXPECT_TRUE(second.all_ok());
  EXPECT_EQ(second.executed, 1u);
  EXPECT_EQ(second.skipped, 2u);
  EXPECT_EQ(env.backend->call_count(), calls_after_first + 1);

  const auto archive = load_run_archive(dir / "run");
  EXPECT_EQ(archive.responses.size(), 3u);
  EXPECT_TRUE(archive.manifest.is_finished());
}

TEST(Batch, ParallelMatchesSerial) {
  std::vector<UserCase> cases;
  for (int i = 0; i < 8; ++i) cases.push_back(test::sample_case("case-" + std::to_string(i)));
  const auto cfg = test::method_config(Method::MentalAgora, kAll, 1);
  std::map<std::string, std::string> texts[2];
  for (int p : {1, 4}) {
    test::TempDir dir;
    test::MockEnv env;
    run_batch(cases, "mem", cfg, env.services(), BatchOptions{dir / "run", "r", p});
    for (const auto& [id, r] : load_run_archive(dir / "run").responses) texts[p == 4][id] = r.text;
  }
  EXPECT_EQ(texts[0].size(), 8u);
  EXPECT_EQ(texts[0], texts[1]);
}

TEST(Batch, DatasetParseErrorBeforeAnyCall) {
  test::TempDir dir;
  test::write_file(dir / "bad.jsonl", "{\"id\": \"a\", \"posts\": [\"p\"]}\nnot json\n");
  test::MockEnv env;
  EXPECT_THROW(run_batch(dir / "bad.jsonl", test::method_config(Method::SA), env.services(),
                         BatchOptions{dir / "run", "", 1}),
               LoadError);
  EXPECT_EQ(env.backend->call_count(), 0u);
}

TEST(Archive, RejectsNonRunDirectory) {
  test::TempDir dir;
  EXPECT_THROW(load_run_archive(dir.path()), ConfigError);
}

}  // namespace
}  // namespace agora::pipeline
