#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "agora/error.hpp"

namespace agora {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Attributes
// ---------------------------------------------------------------------------

/// The three counseling strategies. Declaration order is the canonical agent
/// order used for every round of debate.
enum class Attribute : std::uint8_t { Reframing = 0, Regard = 1, Solution = 2 };

inline constexpr std::array<Attribute, 3> kAllAttributes = {
    Attribute::Reframing, Attribute::Regard, Attribute::Solution};

/// Short machine key: "reframing", "regard", "solution".
std::string_view key(Attribute a) noexcept;
/// Human-readable name used inside prompts ("Unconditional Positive Regard").
std::string_view display_name(Attribute a) noexcept;
/// Accepts the machine key or the display name, case-insensitively.
Attribute parse_attribute(std::string_view text);

/// Sorts into canonical order, keeping multiset duplicates adjacent.
/// Throws ConfigError on empty input.
std::vector<Attribute> canonical_agent_order(std::vector<Attribute> attrs);

/// Distinct attributes of a (possibly uniform) agent multiset, canonical order.
std::vector<Attribute> distinct_attributes(std::span<const Attribute> agents);

// ---------------------------------------------------------------------------
// Score vectors
// ---------------------------------------------------------------------------

inline constexpr double kMinAttributeScore = 1.0;
inline constexpr double kMaxAttributeScore = 3.0;

/// One score per attribute, each in [1, 3].
class AttributeScores {
 public:
  /// Throws ConfigError if any component is outside [1, 3] or not finite.
  AttributeScores(double reframing, double regard, double solution);

  double reframing() const noexcept { return values_[0]; }
  double regard() const noexcept { return values_[1]; }
  double solution() const noexcept { return values_[2]; }
  double operator[](Attribute a) const noexcept { return values_[static_cast<std::size_t>(a)]; }
  const std::array<double, 3>& values() const noexcept { return values_; }

  bool is_integral() const noexcept;

  friend bool operator==(const AttributeScores&, const AttributeScores&) = default;

 private:
  std::array<double, 3> values_;
};

void to_json(Json& j, const AttributeScores& s);
AttributeScores attribute_scores_from_json(const Json& j);

// ---------------------------------------------------------------------------
// Cases, transcripts, personas
// ---------------------------------------------------------------------------

struct UserCase {
  std::string id;
  std::vector<std::string> posts;
  std::optional<std::string> expert_response;
  std::optional<AttributeScores> attribute_labels;
  std::string source;
  /// Fields not in the schema, kept for write-through.
  Json extra = Json::object();

  /// Throws ConfigError when the 1..3 non-empty posts rule or the
  /// labels-require-reference rule is broken.
  void validate() const;

  friend bool operator==(const UserCase&, const UserCase&) = default;
};

void to_json(Json& j, const UserCase& c);
UserCase user_case_from_json(const Json& j);

struct DebateTurn {
  int round_index = 1;
  Attribute agent = Attribute::Reframing;
  std::string text;

  friend bool operator==(const DebateTurn&, const DebateTurn&) = default;
};

struct DebateTranscript {
  std::vector<DebateTurn> turns;
  int turn_count = 0;

  bool empty() const noexcept { return turns.empty(); }
  /// True when the transcript has turn_count full rounds over `agents`
  /// (already in canonical order) with every round in that order.
  bool is_complete(std::span<const Attribute> agents) const;

  friend bool operator==(const DebateTranscript&, const DebateTranscript&) = default;
};

void to_json(Json& j, const DebateTurn& t);
void to_json(Json& j, const DebateTranscript& t);
DebateTranscript transcript_from_json(const Json& j);

/// Stage-2 output. Influence holds one integer in {1,2,3} per attribute the
/// counselor was asked to weigh (all three unless an ablation removed some).
struct CounselorPersona {
  std::string persona_text;
  std::map<Attribute, int> influence;

  void validate() const;
  std::optional<int> influence_of(Attribute a) const;

  friend bool operator==(const CounselorPersona&, const CounselorPersona&) = default;
};

void to_json(Json& j, const CounselorPersona& p);
CounselorPersona persona_from_json(const Json& j);

// ---------------------------------------------------------------------------
// Method configuration
// ---------------------------------------------------------------------------

enum class Method : std::uint8_t { SA, SAA, MAA, MentalAgora };

std::string_view key(Method m) noexcept;  // "sa", "saa", "maa", "mentalagora"
std::string_view display_name(Method m) noexcept;
Method parse_method(std::string_view text);

inline constexpr int kDefaultDebateTurns = 2;
inline constexpr double kGenerationTemperature = 0.7;
inline constexpr double kEvaluationTemperature = 0.0;

struct Sampling {
  double temperature = kGenerationTemperature;
  int max_tokens = 1024;
  std::optional<std::int64_t> seed;

  friend bool operator==(const Sampling&, const Sampling&) = default;
};

struct MethodConfig {
  Method method = Method::MentalAgora;
  /// Agent multiset. Removal ablations use two distinct attributes, uniform
  /// ablations three copies of one attribute.
  std::vector<Attribute> agents{kAllAttributes.begin(), kAllAttributes.end()};
  int debate_turns = kDefaultDebateTurns;
  std::string model_id;
  Sampling sampling;
  std::optional<std::string> stage2_model;
  std::optional<std::string> stage3_model;

  /// Throws ConfigError.
  void validate() const;
  /// Agents in canonical order.
  std::vector<Attribute> ordered_agents() const;
  std::vector<Attribute> active_attributes() const;
  /// Gateway calls this configuration issues per case when every
  /// completion parses on the first attempt.
  int calls_per_case() const;
  /// Stable hex digest of the canonical JSON form.
  std::string hash() const;

  friend bool operator==(const MethodConfig&, const MethodConfig&) = default;
};

void to_json(Json& j, const MethodConfig& c);
MethodConfig method_config_from_json(const Json& j);

// ---------------------------------------------------------------------------
// Generated responses
// ---------------------------------------------------------------------------

struct Provenance {
  std::string timestamp;
  std::string config_hash;
  std::string model_fingerprint;
  /// Digest of the final system message (stage-3 persona prompt, or the
  /// single-call prompt for SA/SAA).
  std::string system_prompt_hash;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct GeneratedResponse {
  std::string case_id;
  std::string text;
  MethodConfig method;
  std::optional<CounselorPersona> persona;
  std::optional<DebateTranscript> transcript;
  std::optional<std::string> stage2_raw;
  Provenance provenance;

  friend bool operator==(const GeneratedResponse&, const GeneratedResponse&) = default;
};

void to_json(Json& j, const GeneratedResponse& r);
GeneratedResponse generated_response_from_json(const Json& j);

/// Current UTC time as ISO-8601 with second precision.
std::string utc_timestamp();

}  // namespace agora
