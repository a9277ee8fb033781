#include "agora/structured_output.hpp"

namespace agora {

std::string_view to_string(ParseStep s) noexcept {
  switch (s) {
    case ParseStep::strict: return "strict";
    case ParseStep::fence_stripped: return "fence_stripped";
    case ParseStep::repaired: return "repaired";
  }
  return "?";
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Parses and validates; returns the failure reason on rejection.
std::variant<Json, std::string> accept(std::string_view text, const JsonValidator& validate) {
  auto parsed = parse_json_strict(text);
  if (!parsed) return std::string("output is not valid JSON");
  try {
    validate(*parsed);
  } catch (const SchemaError& e) {
    return std::string(e.what());
  }
  return std::move(*parsed);
}

}  // namespace

std::string strip_code_fences(std::string_view raw) {
  std::string_view s = trim(raw);
  const auto open = s.find("```");
  if (open == std::string_view::npos) return std::string(s);
  auto body_start = s.find('\n', open + 3);
  if (body_start == std::string_view::npos) return std::string(s);
  ++body_start;
  const auto close = s.find("```", body_start);
  const auto body = close == std::string_view::npos ? s.substr(body_start) : s.substr(body_start, close - body_start);
  return std::string(trim(body));
}

std::optional<Json> parse_json_strict(std::string_view raw) {
  Json j = Json::parse(raw.begin(), raw.end(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

std::variant<StructuredResult, std::string> parse_structured(const std::string& raw, const std::string& schema,
                                                             const JsonValidator& validate,
                                                             const RepairFn& repair) {
  auto first = accept(raw, validate);
  if (auto* v = std::get_if<Json>(&first)) return StructuredResult{std::move(*v), ParseStep::strict, raw, {}};
  std::string problem = std::get<std::string>(first);

  const std::string stripped = strip_code_fences(raw);
  if (stripped != raw) {
    auto second = accept(stripped, validate);
    if (auto* v = std::get_if<Json>(&second)) {
      return StructuredResult{std::move(*v), ParseStep::fence_stripped, raw, {}};
    }
    problem = std::get<std::string>(second);
  }

  if (!repair) return "unparseable output: " + problem;

  std::string repaired;
  try {
    repaired = repair(RepairRequest{schema, problem, raw});
  } catch (const std::exception& e) {
    return "unparseable output (" + problem + "); repair completion failed: " + e.what();
  }
  auto third = accept(repaired, validate);
  if (std::holds_alternative<std::string>(third)) third = accept(strip_code_fences(repaired), validate);
  if (auto* v = std::get_if<Json>(&third)) {
    return StructuredResult{std::move(*v), ParseStep::repaired, raw, repaired};
  }
  return "unparseable output after repair: " + std::get<std::string>(third);
}

int require_int_in_range(const Json& j, const std::string& field, int lo, int hi) {
  if (!j.is_object()) throw SchemaError("expected a JSON object");
  auto it = j.find(field);
  if (it == j.end()) throw SchemaError("missing field '" + field + "'");
  if (!it->is_number_integer()) throw SchemaError("field '" + field + "' must be an integer");
  const auto v = it->get<long long>();
  if (v < lo || v > hi) {
    throw SchemaError("field '" + field + "' = " + std::to_string(v) + " is outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

}  // namespace agora
