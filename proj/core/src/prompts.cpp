#include "agora/prompts.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "agora/hashing.hpp"

#ifndef AGORA_DEFAULT_PROMPT_DIR
#define AGORA_DEFAULT_PROMPT_DIR "assets/prompts"
#endif

namespace agora::prompts {

namespace fs = std::filesystem;
using gateway::ChatMessage;
using gateway::Role;

namespace {

bool slot_start(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }
bool slot_char(char c) { return slot_start(c) || (c >= '0' && c <= '9'); }

/// Length of the placeholder starting at text[i] == '{', or 0.
std::size_t placeholder_at(std::string_view text, std::size_t i) {
  if (text[i] != '{' || i + 1 >= text.size() || !slot_start(text[i + 1])) return 0;
  std::size_t j = i + 1;
  while (j < text.size() && slot_char(text[j])) ++j;
  if (j < text.size() && text[j] == '}') return j - i + 1;
  return 0;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw TemplateError("cannot read template file " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

const char* role_template(Attribute a) {
  switch (a) {
    case Attribute::Reframing: return "role_reframing";
    case Attribute::Regard: return "role_regard";
    case Attribute::Solution: return "role_solution";
  }
  return "";
}

const char* description_template(Attribute a) {
  switch (a) {
    case Attribute::Reframing: return "attribute_reframing";
    case Attribute::Regard: return "attribute_regard";
    case Attribute::Solution: return "attribute_solution";
  }
  return "";
}

constexpr std::string_view kRequiredTemplates[] = {
    "role_reframing", "role_regard", "role_solution", "attribute_reframing", "attribute_regard",
    "attribute_solution", "debate_turn", "counselor_system", "counselor_creation", "response_system",
    "response_generation", "sa_system", "sa_response", "saa_system", "repair_system", "repair",
    "judge_system", "judge_likert", "judge_ranking", "scorer_system", "scorer"};

Messages system_user(std::string system, std::string user) {
  return {ChatMessage{Role::system, std::move(system)}, ChatMessage{Role::user, std::move(user)}};
}

}  // namespace

std::vector<std::string> placeholders(std::string_view text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (const auto len = placeholder_at(text, i)) {
      std::string name(text.substr(i + 1, len - 2));
      if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
      i += len - 1;
    }
  }
  return out;
}

PromptTemplate PromptTemplate::from_text(std::string name, std::string text) {
  PromptTemplate t{std::move(name), std::move(text), {}};
  for (auto& s : placeholders(t.text)) t.required_slots.insert(std::move(s));
  return t;
}

std::string render(const PromptTemplate& tpl, const Bindings& bindings) {
  std::vector<std::string> missing;
  for (const auto& slot : tpl.required_slots) {
    if (!bindings.contains(slot)) missing.push_back(slot);
  }
  if (!missing.empty()) {
    std::string msg = "template '" + tpl.name + "' has unbound slot(s):";
    for (const auto& m : missing) msg += " " + m;
    throw TemplateError(msg, missing);
  }

  const std::string_view text = tpl.text;
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (const auto len = placeholder_at(text, i)) {
      const std::string_view name = text.substr(i + 1, len - 2);
      auto it = bindings.find(name);
      if (it == bindings.end()) {
        // Not declared as required; the manifest check prevents this for
        // loaded templates.
        throw TemplateError("template '" + tpl.name + "' has unbound slot(s): " + std::string(name),
                            {std::string(name)});
      }
      out += it->second;
      i += len - 1;
    } else {
      out.push_back(text[i]);
    }
  }
  if (out.empty()) throw TemplateError("template '" + tpl.name + "' rendered to an empty string");
  return out;
}

// --- library ------------------------------------------------------------------

fs::path PromptLibrary::default_dir() {
  if (const char* env = std::getenv("AGORA_PROMPT_DIR"); env && *env) return env;
  return AGORA_DEFAULT_PROMPT_DIR;
}

PromptLibrary PromptLibrary::load(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw TemplateError("cannot open prompt manifest " + manifest_path.string());
  Json manifest;
  try {
    manifest = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw TemplateError("prompt manifest " + manifest_path.string() + ": " + e.what());
  }

  PromptLibrary lib;
  lib.version_ = manifest.value("version", std::string("unversioned"));
  const auto templates = manifest.find("templates");
  if (templates == manifest.end() || !templates->is_object()) {
    throw TemplateError("prompt manifest has no 'templates' object");
  }
  for (auto it = templates->begin(); it != templates->end(); ++it) {
    const Json& entry = it.value();
    PromptTemplate t;
    t.name = it.key();
    t.text = read_file(dir / entry.value("file", it.key() + ".txt"));
    for (const Json& s : entry.value("required_slots", Json::array())) t.required_slots.insert(s.get<std::string>());
    for (const auto& used : placeholders(t.text)) {
      if (!t.required_slots.contains(used)) {
        throw TemplateError("template '" + t.name + "' uses slot {" + used + "} not listed in the manifest");
      }
    }
    for (const auto& declared : t.required_slots) {
      const auto used = placeholders(t.text);
      if (std::find(used.begin(), used.end(), declared) == used.end()) {
        throw TemplateError("template '" + t.name + "' declares slot '" + declared + "' that its text never uses");
      }
    }
    lib.templates_.emplace(t.name, std::move(t));
  }
  for (std::string_view name : kRequiredTemplates) {
    if (!lib.contains(name)) throw TemplateError("prompt library is missing template '" + std::string(name) + "'");
  }
  return lib;
}

const PromptTemplate& PromptLibrary::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw TemplateError("unknown template '" + std::string(name) + "'");
  return it->second;
}

bool PromptLibrary::contains(std::string_view name) const { return templates_.find(name) != templates_.end(); }

AgentRole PromptLibrary::role(Attribute a) const { return AgentRole{a, get(role_template(a)).text}; }

std::string PromptLibrary::attribute_description(Attribute a) const { return get(description_template(a)).text; }

std::map<std::string, std::string> PromptLibrary::versions() const {
  std::map<std::string, std::string> out;
  for (const auto& [name, t] : templates_) out[name] = sha256_hex(t.text).substr(0, 12);
  return out;
}

// --- serialization --------------------------------------------------------------

std::string serialize_posts(const UserCase& c) {
  if (c.posts.empty()) throw ConfigError("case '" + c.id + "' has no posts");
  std::string out;
  for (std::size_t i = 0; i < c.posts.size(); ++i) {
    if (i) out += "\n\n";
    out += "Post " + std::to_string(i + 1) + ":\n" + c.posts[i];
  }
  return out;
}

std::string serialize_turn(const DebateTurn& t) {
  return "[Round " + std::to_string(t.round_index) + "] [" + std::string(display_name(t.agent)) +
         " Counselor]: " + t.text;
}

std::string serialize_history(const DebateTranscript& t) {
  if (t.turns.empty()) return std::string(kNoDiscussion);
  std::string out;
  for (std::size_t i = 0; i < t.turns.size(); ++i) {
    if (i) out += '\n';
    out += serialize_turn(t.turns[i]);
  }
  return out;
}

// --- schemas ------------------------------------------------------------------

std::string counselor_schema(std::span<const Attribute> active) {
  std::string s = "{";
  for (Attribute a : active) s += "\"" + std::string(key(a)) + "\": <integer 1-3>, ";
  s += "\"persona_text\": \"<text>\"}";
  return s;
}

std::string judge_likert_schema() {
  return "{\"understanding\": <integer 1-5>, \"relevance\": <integer 1-5>, \"professionalism\": <integer 1-5>, "
         "\"customization\": <integer 1-5>, \"satisfaction\": <integer 1-5>}";
}

std::string judge_ranking_schema(std::span<const std::string> labels) {
  std::string list;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) list += ", ";
    list += labels[i];
  }
  return "{\"ranking\": \"<permutation of " + list + ">\"}";
}

std::string scorer_schema() {
  return "{\"reframing\": <number 1-3>, \"regard\": <number 1-3>, \"solution\": <number 1-3>}";
}

// --- stage prompts ----------------------------------------------------------------

Messages agent_turn_prompt(const PromptLibrary& lib, const AgentRole& role, const UserCase& c,
                           const DebateTranscript& history) {
  const std::string user = render(lib.get("debate_turn"), {{"attribute_name", std::string(display_name(role.attribute))},
                                                           {"user_posts", serialize_posts(c)},
                                                           {"debate_history", serialize_history(history)}});
  return system_user(role.role_text, user);
}

Messages counselor_creation_prompt(const PromptLibrary& lib, const UserCase& c, const DebateTranscript& history,
                                   std::span<const Attribute> active) {
  if (active.empty()) throw ConfigError("counselor creation needs at least one attribute");
  const std::string posts = serialize_posts(c);
  std::string list;
  for (Attribute a : active) {
    if (!list.empty()) list += '\n';
    list += "- " + std::string(key(a)) + ": " + lib.attribute_description(a);
  }
  const std::string user = render(lib.get("counselor_creation"), {{"user_posts", posts},
                                                                  {"debate_history", serialize_history(history)},
                                                                  {"attribute_list", list},
                                                                  {"output_schema", counselor_schema(active)}});
  return system_user(lib.get("counselor_system").text, user);
}

std::string render_influence(const CounselorPersona& persona) {
  std::string out;
  for (const auto& [a, v] : persona.influence) {
    if (!out.empty()) out += '\n';
    out += "- " + std::string(display_name(a)) + ": " + std::to_string(v);
  }
  return out;
}

Messages response_generation_prompt(const PromptLibrary& lib, const CounselorPersona& persona, const UserCase& c,
                                    const DebateTranscript& history) {
  persona.validate();
  const std::string system =
      render(lib.get("response_system"), {{"persona", persona.persona_text}, {"influence_scores", render_influence(persona)}});
  const std::string user = render(lib.get("response_generation"),
                                  {{"user_posts", serialize_posts(c)}, {"debate_history", serialize_history(history)}});
  return system_user(system, user);
}

Messages single_agent_prompt(const PromptLibrary& lib, const UserCase& c) {
  return system_user(lib.get("sa_system").text, render(lib.get("sa_response"), {{"user_posts", serialize_posts(c)}}));
}

Messages single_agent_attributes_prompt(const PromptLibrary& lib, const UserCase& c,
                                        std::span<const Attribute> active) {
  std::string descriptions;
  for (Attribute a : active) {
    if (!descriptions.empty()) descriptions += '\n';
    descriptions += "- " + lib.attribute_description(a);
  }
  return system_user(render(lib.get("saa_system"), {{"attribute_descriptions", descriptions}}),
                     render(lib.get("sa_response"), {{"user_posts", serialize_posts(c)}}));
}

Messages repair_prompt(const PromptLibrary& lib, const RepairRequest& req) {
  return system_user(lib.get("repair_system").text,
                     render(lib.get("repair"), {{"problem", req.problem},
                                                {"raw_output", req.raw.empty() ? std::string("(empty)") : req.raw},
                                                {"output_schema", req.schema}}));
}

Messages judge_likert_prompt(const PromptLibrary& lib, const UserCase& c, const std::string& response,
                             bool include_reference) {
  std::string reference;
  if (include_reference && c.expert_response) {
    reference = "\nFor reference, a response written by a mental health expert:\n" + *c.expert_response + "\n";
  }
  return system_user(lib.get("judge_system").text,
                     render(lib.get("judge_likert"), {{"user_posts", serialize_posts(c)},
                                                      {"reference_block", reference},
                                                      {"response", response},
                                                      {"output_schema", judge_likert_schema()}}));
}

Messages judge_ranking_prompt(const PromptLibrary& lib, const UserCase& c,
                              std::span<const std::pair<std::string, std::string>> presented) {
  std::string block;
  std::vector<std::string> labels;
  for (const auto& [label, text] : presented) {
    if (!block.empty()) block += "\n\n";
    block += "Response " + label + ":\n" + text;
    labels.push_back(label);
  }
  return system_user(lib.get("judge_system").text,
                     render(lib.get("judge_ranking"), {{"user_posts", serialize_posts(c)},
                                                       {"responses", block},
                                                       {"output_schema", judge_ranking_schema(labels)}}));
}

Messages scorer_prompt(const PromptLibrary& lib, const std::string& response) {
  return system_user(lib.get("scorer_system").text,
                     render(lib.get("scorer"), {{"response", response}, {"output_schema", scorer_schema()}}));
}

}  // namespace agora::prompts
