#include "agora/domain.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>

#include "agora/hashing.hpp"

namespace agora {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

const Json& require(const Json& j, const char* field) {
  if (!j.is_object()) throw SchemaError("expected a JSON object");
  auto it = j.find(field);
  if (it == j.end()) throw SchemaError(std::string("missing field '") + field + "'");
  return *it;
}

std::string require_string(const Json& j, const char* field) {
  const Json& v = require(j, field);
  if (!v.is_string()) throw SchemaError(std::string("field '") + field + "' must be a string");
  return v.get<std::string>();
}

double require_number(const Json& j, const char* field) {
  const Json& v = require(j, field);
  if (!v.is_number()) throw SchemaError(std::string("field '") + field + "' must be a number");
  return v.get<double>();
}

void put_score(Json& j, const char* field, double v) {
  if (std::floor(v) == v) {
    j[field] = static_cast<int>(v);
  } else {
    j[field] = v;
  }
}

}  // namespace

const char* to_string(GatewayError::Kind kind) noexcept {
  switch (kind) {
    case GatewayError::Kind::transport: return "transport";
    case GatewayError::Kind::request: return "request";
    case GatewayError::Kind::protocol: return "protocol";
  }
  return "unknown";
}

std::string_view key(Attribute a) noexcept {
  switch (a) {
    case Attribute::Reframing: return "reframing";
    case Attribute::Regard: return "regard";
    case Attribute::Solution: return "solution";
  }
  return "?";
}

std::string_view display_name(Attribute a) noexcept {
  switch (a) {
    case Attribute::Reframing: return "Reframing";
    case Attribute::Regard: return "Unconditional Positive Regard";
    case Attribute::Solution: return "Solution-Focused";
  }
  return "?";
}

Attribute parse_attribute(std::string_view text) {
  const std::string t = lower(text);
  for (Attribute a : kAllAttributes) {
    if (t == key(a) || t == lower(display_name(a))) return a;
  }
  if (t == "unconditional_positive_regard" || t == "solution_focused" || t == "solution-focused") {
    return t[0] == 'u' ? Attribute::Regard : Attribute::Solution;
  }
  throw ConfigError("unknown attribute '" + std::string(text) + "'");
}

std::vector<Attribute> canonical_agent_order(std::vector<Attribute> attrs) {
  if (attrs.empty()) throw ConfigError("agent set must not be empty");
  std::stable_sort(attrs.begin(), attrs.end());
  return attrs;
}

std::vector<Attribute> distinct_attributes(std::span<const Attribute> agents) {
  std::vector<Attribute> out(agents.begin(), agents.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// --- AttributeScores --------------------------------------------------------

AttributeScores::AttributeScores(double reframing, double regard, double solution)
    : values_{reframing, regard, solution} {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v < kMinAttributeScore || v > kMaxAttributeScore) {
      throw ConfigError("attribute score for " + std::string(key(kAllAttributes[i])) + " = " +
                        std::to_string(v) + " is outside [1, 3]");
    }
  }
}

bool AttributeScores::is_integral() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::floor(v) == v; });
}

void to_json(Json& j, const AttributeScores& s) {
  j = Json::object();
  put_score(j, "reframing", s.reframing());
  put_score(j, "regard", s.regard());
  put_score(j, "solution", s.solution());
}

AttributeScores attribute_scores_from_json(const Json& j) {
  try {
    return AttributeScores(require_number(j, "reframing"), require_number(j, "regard"),
                           require_number(j, "solution"));
  } catch (const ConfigError& e) {
    throw SchemaError(e.what());
  }
}

// --- UserCase ---------------------------------------------------------------

void UserCase::validate() const {
  if (id.empty()) throw ConfigError("case id must not be empty");
  if (posts.empty() || posts.size() > 3) {
    throw ConfigError("case '" + id + "' has " + std::to_string(posts.size()) +
                      " posts; expected 1 to 3");
  }
  for (std::size_t i = 0; i < posts.size(); ++i) {
    if (posts[i].empty()) {
      throw ConfigError("case '" + id + "' post " + std::to_string(i + 1) + " is empty");
    }
  }
  if (attribute_labels && !expert_response) {
    throw ConfigError("case '" + id + "' has attribute labels but no expert response");
  }
}

void to_json(Json& j, const UserCase& c) {
  j = c.extra.is_object() ? c.extra : Json::object();
  j["id"] = c.id;
  j["posts"] = c.posts;
  if (c.expert_response) j["expert_response"] = *c.expert_response;
  else j.erase("expert_response");
  if (c.attribute_labels) j["attribute_labels"] = *c.attribute_labels;
  else j.erase("attribute_labels");
  j["source"] = c.source;
}

UserCase user_case_from_json(const Json& j) {
  static constexpr std::array<std::string_view, 5> kKnown = {
      "id", "posts", "expert_response", "attribute_labels", "source"};
  UserCase c;
  const Json& id = require(j, "id");
  if (id.is_string()) c.id = id.get<std::string>();
  else if (id.is_number_integer()) c.id = std::to_string(id.get<long long>());
  else throw SchemaError("field 'id' must be a string");

  const Json& posts = require(j, "posts");
  if (!posts.is_array()) throw SchemaError("field 'posts' must be an array");
  for (const Json& p : posts) {
    if (!p.is_string()) throw SchemaError("every post must be a string");
    c.posts.push_back(p.get<std::string>());
  }
  if (auto it = j.find("expert_response"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError("field 'expert_response' must be a string");
    c.expert_response = it->get<std::string>();
  }
  if (auto it = j.find("attribute_labels"); it != j.end() && !it->is_null()) {
    c.attribute_labels = attribute_scores_from_json(*it);
  }
  if (auto it = j.find("source"); it != j.end() && it->is_string()) c.source = it->get<std::string>();
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(kKnown.begin(), kKnown.end(), it.key()) == kKnown.end()) c.extra[it.key()] = *it;
  }
  return c;
}

// --- transcripts --------------------------------------------------------------

bool DebateTranscript::is_complete(std::span<const Attribute> agents) const {
  if (agents.empty()) return turns.empty() && turn_count == 0;
  if (turns.size() != static_cast<std::size_t>(turn_count) * agents.size()) return false;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    const auto round = static_cast<int>(i / agents.size()) + 1;
    if (turns[i].round_index != round || turns[i].agent != agents[i % agents.size()]) return false;
    if (turns[i].text.empty()) return false;
  }
  return true;
}

void to_json(Json& j, const DebateTurn& t) {
  j = Json{{"round", t.round_index}, {"agent", key(t.agent)}, {"text", t.text}};
}

void to_json(Json& j, const DebateTranscript& t) {
  j = Json::object();
  j["turn_count"] = t.turn_count;
  j["turns"] = Json::array();
  for (const auto& turn : t.turns) j["turns"].push_back(turn);
}

DebateTranscript transcript_from_json(const Json& j) {
  DebateTranscript t;
  const Json& n = require(j, "turn_count");
  if (!n.is_number_integer() || n.get<int>() < 0) throw SchemaError("turn_count must be >= 0");
  t.turn_count = n.get<int>();
  const Json& turns = require(j, "turns");
  if (!turns.is_array()) throw SchemaError("field 'turns' must be an array");
  for (const Json& tj : turns) {
    DebateTurn turn;
    const Json& r = require(tj, "round");
    if (!r.is_number_integer() || r.get<int>() < 1) throw SchemaError("round must be >= 1");
    turn.round_index = r.get<int>();
    if (turn.round_index > std::max(t.turn_count, 1)) throw SchemaError("round exceeds turn_count");
    try {
      turn.agent = parse_attribute(require_string(tj, "agent"));
    } catch (const ConfigError& e) {
      throw SchemaError(e.what());
    }
    turn.text = require_string(tj, "text");
    t.turns.push_back(std::move(turn));
  }
  return t;
}

// --- persona ------------------------------------------------------------------

void CounselorPersona::validate() const {
  if (persona_text.empty()) throw ConfigError("persona_text must not be empty");
  if (influence.empty()) throw ConfigError("persona must carry at least one influence score");
  for (const auto& [a, v] : influence) {
    if (v < 1 || v > 3) {
      throw ConfigError("influence for " + std::string(key(a)) + " = " + std::to_string(v) +
                        " is outside {1,2,3}");
    }
  }
}

std::optional<int> CounselorPersona::influence_of(Attribute a) const {
  auto it = influence.find(a);
  if (it == influence.end()) return std::nullopt;
  return it->second;
}

void to_json(Json& j, const CounselorPersona& p) {
  Json inf = Json::object();
  for (const auto& [a, v] : p.influence) inf[std::string(key(a))] = v;
  j = Json{{"persona_text", p.persona_text}, {"influence", std::move(inf)}};
}

CounselorPersona persona_from_json(const Json& j) {
  CounselorPersona p;
  p.persona_text = require_string(j, "persona_text");
  const Json& inf = require(j, "influence");
  if (!inf.is_object()) throw SchemaError("field 'influence' must be an object");
  for (auto it = inf.begin(); it != inf.end(); ++it) {
    if (!it->is_number_integer()) throw SchemaError("influence scores must be integers");
    try {
      p.influence[parse_attribute(it.key())] = it->get<int>();
    } catch (const ConfigError& e) {
      throw SchemaError(e.what());
    }
  }
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw SchemaError(e.what());
  }
  return p;
}

// --- methods ------------------------------------------------------------------

std::string_view key(Method m) noexcept {
  switch (m) {
    case Method::SA: return "sa";
    case Method::SAA: return "saa";
    case Method::MAA: return "maa";
    case Method::MentalAgora: return "mentalagora";
  }
  return "?";
}

std::string_view display_name(Method m) noexcept {
  switch (m) {
    case Method::SA: return "SA";
    case Method::SAA: return "SAA";
    case Method::MAA: return "MAA";
    case Method::MentalAgora: return "MentalAgora";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  const std::string t = lower(text);
  for (Method m : {Method::SA, Method::SAA, Method::MAA, Method::MentalAgora}) {
    if (t == key(m)) return m;
  }
  throw ConfigError("unknown method '" + std::string(text) + "' (expected sa|saa|maa|mentalagora)");
}

void MethodConfig::validate() const {
  if (method != Method::SA && agents.empty()) {
    throw ConfigError(std::string(display_name(method)) + " requires at least one attribute");
  }
  if (agents.size() > 3) throw ConfigError("at most three agents are supported");
  if (method == Method::MentalAgora && debate_turns < 1) throw ConfigError("turns must be ≥ 1");
  if (!(sampling.temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  if (sampling.max_tokens <= 0) throw ConfigError("max_tokens must be > 0");
}

std::vector<Attribute> MethodConfig::ordered_agents() const { return canonical_agent_order(agents); }

std::vector<Attribute> MethodConfig::active_attributes() const {
  if (method == Method::SA) return {};
  return distinct_attributes(agents);
}

int MethodConfig::calls_per_case() const {
  switch (method) {
    case Method::SA:
    case Method::SAA: return 1;
    case Method::MAA: return static_cast<int>(agents.size()) + 2;
    case Method::MentalAgora: return debate_turns * static_cast<int>(agents.size()) + 2;
  }
  return 0;
}

std::string MethodConfig::hash() const { return sha256_hex(Json(*this).dump()); }

void to_json(Json& j, const MethodConfig& c) {
  j = Json::object();
  j["method"] = key(c.method);
  j["agents"] = Json::array();
  for (Attribute a : c.agents) j["agents"].push_back(key(a));
  j["debate_turns"] = c.debate_turns;
  j["model_id"] = c.model_id;
  Json s{{"temperature", c.sampling.temperature}, {"max_tokens", c.sampling.max_tokens}};
  if (c.sampling.seed) s["seed"] = *c.sampling.seed;
  j["sampling"] = std::move(s);
  if (c.stage2_model) j["stage2_model"] = *c.stage2_model;
  if (c.stage3_model) j["stage3_model"] = *c.stage3_model;
}

MethodConfig method_config_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("method config must be a JSON object");
  MethodConfig c;
  try {
    if (auto it = j.find("method"); it != j.end()) c.method = parse_method(it->get<std::string>());
    auto agents = j.find("agents");
    if (agents == j.end()) agents = j.find("attributes");
    if (agents != j.end()) {
      c.agents.clear();
      for (const Json& a : *agents) c.agents.push_back(parse_attribute(a.get<std::string>()));
    }
    if (auto it = j.find("debate_turns"); it != j.end()) c.debate_turns = it->get<int>();
    if (auto it = j.find("model_id"); it != j.end()) c.model_id = it->get<std::string>();
    if (auto it = j.find("sampling"); it != j.end()) {
      if (auto t = it->find("temperature"); t != it->end()) c.sampling.temperature = t->get<double>();
      if (auto t = it->find("max_tokens"); t != it->end()) c.sampling.max_tokens = t->get<int>();
      if (auto t = it->find("seed"); t != it->end() && !t->is_null()) c.sampling.seed = t->get<std::int64_t>();
    }
    if (auto it = j.find("stage2_model"); it != j.end() && !it->is_null()) c.stage2_model = it->get<std::string>();
    if (auto it = j.find("stage3_model"); it != j.end() && !it->is_null()) c.stage3_model = it->get<std::string>();
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("method config: ") + e.what());
  }
  return c;
}

// --- responses ----------------------------------------------------------------

void to_json(Json& j, const GeneratedResponse& r) {
  j = Json::object();
  j["case_id"] = r.case_id;
  j["text"] = r.text;
  j["method"] = r.method;
  if (r.persona) j["persona"] = *r.persona;
  if (r.transcript) j["transcript"] = *r.transcript;
  if (r.stage2_raw) j["stage2_raw"] = *r.stage2_raw;
  j["provenance"] = Json{{"timestamp", r.provenance.timestamp},
                         {"config_hash", r.provenance.config_hash},
                         {"model_fingerprint", r.provenance.model_fingerprint},
                         {"system_prompt_hash", r.provenance.system_prompt_hash}};
}

GeneratedResponse generated_response_from_json(const Json& j) {
  GeneratedResponse r;
  r.case_id = require_string(j, "case_id");
  r.text = require_string(j, "text");
  r.method = method_config_from_json(require(j, "method"));
  if (auto it = j.find("persona"); it != j.end() && !it->is_null()) r.persona = persona_from_json(*it);
  if (auto it = j.find("transcript"); it != j.end() && !it->is_null()) {
    r.transcript = transcript_from_json(*it);
  }
  if (auto it = j.find("stage2_raw"); it != j.end() && it->is_string()) r.stage2_raw = it->get<std::string>();
  const Json& p = require(j, "provenance");
  r.provenance.timestamp = require_string(p, "timestamp");
  r.provenance.config_hash = require_string(p, "config_hash");
  r.provenance.model_fingerprint = require_string(p, "model_fingerprint");
  if (auto it = p.find("system_prompt_hash"); it != p.end() && it->is_string()) {
    r.provenance.system_prompt_hash = it->get<std::string>();
  }
  return r;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace agora
