#include "agora/pipeline.hpp"

#include "agora/hashing.hpp"

namespace agora::pipeline {

using gateway::ChatRequest;
using gateway::ResponseFormat;

namespace {

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

std::string complete_text(const Services& services, const ChatRequest& req) {
  auto resp = services.gateway.complete(req);
  if (resp.finish_reason == gateway::FinishReason::error) throw PipelineError("completion finished with an error");
  if (blank(resp.text)) throw PipelineError("empty completion");
  return resp.text;
}

std::string describe(const std::exception& e) {
  if (const auto* g = dynamic_cast<const GatewayError*>(&e)) {
    return std::string("gateway ") + to_string(g->kind()) + " error: " + g->what();
  }
  return e.what();
}

}  // namespace

ChatRequest make_request(prompts::Messages messages, const std::string& model, const Sampling& sampling,
                         ResponseFormat format) {
  ChatRequest req;
  req.model_id = model;
  req.messages = std::move(messages);
  req.temperature = sampling.temperature;
  req.max_tokens = sampling.max_tokens;
  req.seed = sampling.seed;
  req.response_format = format;
  return req;
}

RepairFn make_repair_fn(const Services& services, const std::string& model, std::optional<std::int64_t> seed) {
  return [services, model, seed](const RepairRequest& r) {
    Sampling s{kEvaluationTemperature, 1024, seed};
    auto req = make_request(prompts::repair_prompt(services.prompts, r), model, s, ResponseFormat::json_object);
    return services.gateway.complete(req).text;
  };
}

// --- stage 1 ------------------------------------------------------------------

DebateTranscript run_debate(const UserCase& c, std::span<const Attribute> agents, int rounds,
                            const Services& services, const std::string& model, const Sampling& sampling) {
  if (rounds < 1) throw ConfigError("turns must be ≥ 1");
  if (agents.empty()) throw ConfigError("debate needs at least one agent");
  const std::vector<Attribute> order = canonical_agent_order({agents.begin(), agents.end()});

  DebateTranscript history;
  history.turn_count = rounds;
  for (int round = 1; round <= rounds; ++round) {
    for (Attribute agent : order) {
      try {
        const auto messages = prompts::agent_turn_prompt(services.prompts, services.prompts.role(agent), c, history);
        history.turns.push_back({round, agent, complete_text(services, make_request(messages, model, sampling))});
      } catch (const std::exception& e) {
        throw CaseFailure("debate round " + std::to_string(round) + " (" + std::string(key(agent)) +
                              "): " + describe(e),
                          Json{{"stage", "debate"}, {"transcript", history}});
      }
    }
  }
  return history;
}

DebateTranscript run_independent_agents(const UserCase& c, std::span<const Attribute> agents,
                                        const Services& services, const std::string& model,
                                        const Sampling& sampling) {
  if (agents.empty()) throw ConfigError("at least one agent is required");
  const std::vector<Attribute> order = canonical_agent_order({agents.begin(), agents.end()});
  const DebateTranscript empty;
  DebateTranscript out;
  out.turn_count = 1;
  for (Attribute agent : order) {
    try {
      const auto messages = prompts::agent_turn_prompt(services.prompts, services.prompts.role(agent), c, empty);
      out.turns.push_back({1, agent, complete_text(services, make_request(messages, model, sampling))});
    } catch (const std::exception& e) {
      throw CaseFailure("independent agent (" + std::string(key(agent)) + "): " + describe(e),
                        Json{{"stage", "independent_agents"}, {"transcript", out}});
    }
  }
  return out;
}

// --- stage 2 ------------------------------------------------------------------

CounselorPersona persona_from_stage2_json(const Json& j, std::span<const Attribute> active) {
  if (!j.is_object()) throw SchemaError("stage-2 output must be a JSON object");
  CounselorPersona p;
  for (Attribute a : active) p.influence[a] = require_int_in_range(j, std::string(key(a)), 1, 3);
  auto text = j.find("persona_text");
  if (text == j.end()) throw SchemaError("missing field 'persona_text'");
  if (!text->is_string()) throw SchemaError("field 'persona_text' must be a string");
  p.persona_text = text->get<std::string>();
  if (blank(p.persona_text)) throw SchemaError("field 'persona_text' is empty");
  return p;
}

Stage2Result parse_stage2_output(const std::string& raw, std::span<const Attribute> active, const RepairFn& repair) {
  const std::vector<Attribute> attrs = distinct_attributes(active);
  if (attrs.empty()) throw ConfigError("stage 2 needs at least one attribute");
  auto validate = [&attrs](const Json& j) { (void)persona_from_stage2_json(j, attrs); };
  auto result = parse_structured_or_throw<Stage2ParseError>(raw, prompts::counselor_schema(attrs), validate, repair);
  return Stage2Result{persona_from_stage2_json(result.value, attrs), raw, result.step, result.repaired_raw};
}

Stage2Result create_counselor(const UserCase& c, const DebateTranscript& transcript,
                              std::span<const Attribute> active, const Services& services,
                              const std::string& model, const Sampling& sampling) {
  const std::vector<Attribute> attrs = distinct_attributes(active);
  const auto messages = prompts::counselor_creation_prompt(services.prompts, c, transcript, attrs);
  const auto resp = services.gateway.complete(make_request(messages, model, sampling, ResponseFormat::json_object));
  return parse_stage2_output(resp.text, attrs, make_repair_fn(services, model, sampling.seed));
}

// --- stage 3 ------------------------------------------------------------------

GeneratedResponse generate_response(const UserCase& c, const CounselorPersona& persona,
                                    const DebateTranscript& transcript, const Services& services,
                                    const MethodConfig& cfg) {
  const auto messages = prompts::response_generation_prompt(services.prompts, persona, c, transcript);
  const std::string model = cfg.stage3_model.value_or(cfg.model_id);
  GeneratedResponse out;
  out.case_id = c.id;
  out.text = complete_text(services, make_request(messages, model, cfg.sampling));
  out.method = cfg;
  out.persona = persona;
  out.transcript = transcript;
  out.provenance = Provenance{utc_timestamp(), cfg.hash(), services.gateway.fingerprint() + "|" + model,
                              sha256_hex(messages.front().content)};
  return out;
}

GeneratedResponse run_method(const UserCase& c, const MethodConfig& cfg, const Services& services) {
  cfg.validate();
  c.validate();

  if (cfg.method == Method::SA || cfg.method == Method::SAA) {
    const auto messages = cfg.method == Method::SA
                              ? prompts::single_agent_prompt(services.prompts, c)
                              : prompts::single_agent_attributes_prompt(services.prompts, c, cfg.active_attributes());
    GeneratedResponse out;
    out.case_id = c.id;
    try {
      out.text = complete_text(services, make_request(messages, cfg.model_id, cfg.sampling));
    } catch (const std::exception& e) {
      throw CaseFailure(describe(e), Json{{"stage", "single"}});
    }
    out.method = cfg;
    out.provenance = Provenance{utc_timestamp(), cfg.hash(), services.gateway.fingerprint() + "|" + cfg.model_id,
                                sha256_hex(messages.front().content)};
    return out;
  }

  const auto agents = cfg.ordered_agents();
  const DebateTranscript transcript =
      cfg.method == Method::MAA
          ? run_independent_agents(c, agents, services, cfg.model_id, cfg.sampling)
          : run_debate(c, agents, cfg.debate_turns, services, cfg.model_id, cfg.sampling);

  Stage2Result stage2{};
  try {
    stage2 = create_counselor(c, transcript, cfg.active_attributes(), services,
                              cfg.stage2_model.value_or(cfg.model_id), cfg.sampling);
  } catch (const Stage2ParseError& e) {
    throw CaseFailure(std::string("stage 2: ") + e.what(),
                      Json{{"stage", "counselor"}, {"transcript", transcript}, {"stage2_raw", e.raw()}});
  } catch (const std::exception& e) {
    throw CaseFailure("stage 2: " + describe(e), Json{{"stage", "counselor"}, {"transcript", transcript}});
  }

  try {
    GeneratedResponse out = generate_response(c, stage2.persona, transcript, services, cfg);
    out.stage2_raw = stage2.raw;
    return out;
  } catch (const std::exception& e) {
    throw CaseFailure(describe(e), Json{{"stage", "response"},
                                        {"transcript", transcript},
                                        {"persona", stage2.persona},
                                        {"stage2_raw", stage2.raw}});
  }
}

}  // namespace agora::pipeline
