#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "agora/domain.hpp"

namespace agora {

/// Which step of the parse pipeline produced the accepted value.
enum class ParseStep { strict, fence_stripped, repaired };

std::string_view to_string(ParseStep s) noexcept;

struct RepairRequest {
  std::string schema;   ///< JSON skeleton the output must follow
  std::string problem;  ///< why the previous output was rejected
  std::string raw;      ///< the rejected output
};

/// Issues one repair completion and returns its raw text.
using RepairFn = std::function<std::string(const RepairRequest&)>;

/// Throws SchemaError describing why a parsed value is unacceptable.
using JsonValidator = std::function<void(const Json&)>;

struct StructuredResult {
  Json value;
  ParseStep step = ParseStep::strict;
  std::string raw;
  std::optional<std::string> repaired_raw;
};

/// Removes one surrounding markdown code fence (```json ... ```), if any,
/// and trims surrounding whitespace.
std::string strip_code_fences(std::string_view raw);

/// Strict JSON parse; nullopt on syntax error.
std::optional<Json> parse_json_strict(std::string_view raw);

/// The parse pipeline for model output that must be JSON:
///   1. strict parse, 2. code-fence stripping, 3. one repair completion
///   (when `repair` is set), 4. failure.
/// A value is accepted only if `validate` passes on it. Returns the failure
/// reason instead of throwing so callers can raise their own error type.
std::variant<StructuredResult, std::string> parse_structured(const std::string& raw, const std::string& schema,
                                                             const JsonValidator& validate,
                                                             const RepairFn& repair);

template <class Err>
StructuredResult parse_structured_or_throw(const std::string& raw, const std::string& schema,
                                           const JsonValidator& validate, const RepairFn& repair) {
  auto out = parse_structured(raw, schema, validate, repair);
  if (auto* reason = std::get_if<std::string>(&out)) throw Err(*reason, raw);
  return std::get<StructuredResult>(std::move(out));
}

/// Requires j[field] to be a JSON integer in [lo, hi]; throws SchemaError.
int require_int_in_range(const Json& j, const std::string& field, int lo, int hi);

}  // namespace agora
