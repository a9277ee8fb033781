#include <gtest/gtest.h>

#include "agora/structured_output.hpp"

namespace agora {
namespace {

const JsonValidator kNeedsX = [](const Json& j) { require_int_in_range(j, "x", 1, 3); };

TEST(StripFences, RemovesJsonFence) {
  EXPECT_EQ(strip_code_fences("```json\n{\"x\": 1}\n```"), "{\"x\": 1}");
  EXPECT_EQ(strip_code_fences("Here you go:\n```\n{\"x\": 2}\n```\nThanks"), "{\"x\": 2}");
  EXPECT_EQ(strip_code_fences("  {\"x\": 3}  "), "{\"x\": 3}");
}

TEST(ParseStructured, StrictFirst) {
  auto r = parse_structured(R"({"x": 2})", "{}", kNeedsX, {});
  ASSERT_TRUE(std::holds_alternative<StructuredResult>(r));
  EXPECT_EQ(std::get<StructuredResult>(r).step, ParseStep::strict);
}

TEST(ParseStructured, FenceStripped) {
  auto r = parse_structured("```json\n{\"x\": 2}\n```", "{}", kNeedsX, {});
  ASSERT_TRUE(std::holds_alternative<StructuredResult>(r));
  EXPECT_EQ(std::get<StructuredResult>(r).step, ParseStep::fence_stripped);
}

TEST(ParseStructured, RepairCalledOnceWithProblem) {
  int calls = 0;
  RepairRequest seen;
  auto repair = [&](const RepairRequest& req) {
    ++calls;
    seen = req;
    return std::string(R"({"x": 1})");
  };
  auto r = parse_structured(R"({"x": 9})", "{\"x\": <integer 1-3>}", kNeedsX, repair);
  ASSERT_TRUE(std::holds_alternative<StructuredResult>(r));
  const auto& ok = std::get<StructuredResult>(r);
  EXPECT_EQ(ok.step, ParseStep::repaired);
  EXPECT_EQ(ok.value.at("x"), 1);
  EXPECT_EQ(calls, 1);
  EXPECT_NE(seen.problem.find("outside"), std::string::npos);
  EXPECT_EQ(seen.raw, R"({"x": 9})");
}

TEST(ParseStructured, FailsAfterOneBadRepair) {
  int calls = 0;
  auto repair = [&](const RepairRequest&) {
    ++calls;
    return std::string("still not json");
  };
  auto r = parse_structured("nope", "{}", kNeedsX, repair);
  EXPECT_TRUE(std::holds_alternative<std::string>(r));
  EXPECT_EQ(calls, 1);
}

TEST(ParseStructured, ThrowingRepairBecomesReason) {
  auto repair = [](const RepairRequest&) -> std::string { throw GatewayError(GatewayError::Kind::transport, "down"); };
  auto r = parse_structured("nope", "{}", kNeedsX, repair);
  ASSERT_TRUE(std::holds_alternative<std::string>(r));
  EXPECT_NE(std::get<std::string>(r).find("down"), std::string::npos);
}

TEST(ParseStructured, OrThrowCarriesRaw) {
  try {
    parse_structured_or_throw<Stage2ParseError>("garbage", "{}", kNeedsX, {});
    FAIL();
  } catch (const Stage2ParseError& e) {
    EXPECT_EQ(e.raw(), "garbage");
  }
}

TEST(RequireInt, RejectsNonIntegers) {
  EXPECT_EQ(require_int_in_range(Json{{"x", 2}}, "x", 1, 3), 2);
  EXPECT_THROW(require_int_in_range(Json{{"x", 2.5}}, "x", 1, 3), SchemaError);
  EXPECT_THROW(require_int_in_range(Json{{"x", "2"}}, "x", 1, 3), SchemaError);
  EXPECT_THROW(require_int_in_range(Json{{"y", 2}}, "x", 1, 3), SchemaError);
  EXPECT_THROW(require_int_in_range(Json{{"x", 0}}, "x", 1, 3), SchemaError);
}

}  // namespace
}  // namespace agora
