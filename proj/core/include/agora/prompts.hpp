#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agora/domain.hpp"
#include "agora/gateway.hpp"
#include "agora/structured_output.hpp"

namespace agora::prompts {

using Bindings = std::map<std::string, std::string, std::less<>>;
using Messages = std::vector<gateway::ChatMessage>;

/// Template text with `{slot}` placeholders. A slot name is
/// `[a-z_][a-z0-9_]*`; any other brace sequence is literal text.
struct PromptTemplate {
  std::string name;
  std::string text;
  std::set<std::string> required_slots;

  /// Derives required_slots from the text.
  static PromptTemplate from_text(std::string name, std::string text);
};

/// Distinct placeholder names in order of first appearance.
std::vector<std::string> placeholders(std::string_view text);

/// Single left-to-right pass; bound values are inserted verbatim and never
/// re-scanned. Throws TemplateError listing every unbound slot.
std::string render(const PromptTemplate& tpl, const Bindings& bindings);

struct AgentRole {
  Attribute attribute;
  std::string role_text;
};

/// Templates loaded from `<dir>/manifest.json`, which maps each template
/// name to its file and required_slots.
class PromptLibrary {
 public:
  /// Throws TemplateError when the manifest and the template texts disagree
  /// or a required template is missing.
  static PromptLibrary load(const std::filesystem::path& dir);
  /// $AGORA_PROMPT_DIR, else the installed/source asset directory.
  static std::filesystem::path default_dir();
  static PromptLibrary load_default() { return load(default_dir()); }

  const PromptTemplate& get(std::string_view name) const;
  bool contains(std::string_view name) const;
  AgentRole role(Attribute a) const;
  std::string attribute_description(Attribute a) const;

  const std::string& version() const noexcept { return version_; }
  /// Template name -> short content digest; recorded in run manifests.
  std::map<std::string, std::string> versions() const;

 private:
  std::string version_;
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

// --- serialization shared by every stage --------------------------------------

/// "Post 1:\n<text>" blocks in dataset order, separated by a blank line.
std::string serialize_posts(const UserCase& c);
/// "[Round i] [<Attribute> Counselor]: <text>" per turn.
std::string serialize_turn(const DebateTurn& t);
/// Newline-separated turns, or kNoDiscussion when empty.
std::string serialize_history(const DebateTranscript& t);

inline constexpr std::string_view kNoDiscussion = "(no prior discussion)";

// --- output schemas -----------------------------------------------------------

std::string counselor_schema(std::span<const Attribute> active);
std::string judge_likert_schema();
std::string judge_ranking_schema(std::span<const std::string> labels);
std::string scorer_schema();

// --- stage prompts --------------------------------------------------------------

Messages agent_turn_prompt(const PromptLibrary& lib, const AgentRole& role, const UserCase& c,
                           const DebateTranscript& history);

/// `active` lists the attributes the counselor must score (canonical order).
Messages counselor_creation_prompt(const PromptLibrary& lib, const UserCase& c, const DebateTranscript& history,
                                   std::span<const Attribute> active);

/// "- <Attribute>: <score>" lines in canonical order.
std::string render_influence(const CounselorPersona& persona);

Messages response_generation_prompt(const PromptLibrary& lib, const CounselorPersona& persona, const UserCase& c,
                                    const DebateTranscript& history);

Messages single_agent_prompt(const PromptLibrary& lib, const UserCase& c);
Messages single_agent_attributes_prompt(const PromptLibrary& lib, const UserCase& c,
                                        std::span<const Attribute> active);

Messages repair_prompt(const PromptLibrary& lib, const RepairRequest& req);

Messages judge_likert_prompt(const PromptLibrary& lib, const UserCase& c, const std::string& response,
                             bool include_reference);

/// `presented` holds (blinded label, response text) in presentation order.
Messages judge_ranking_prompt(const PromptLibrary& lib, const UserCase& c,
                              std::span<const std::pair<std::string, std::string>> presented);

Messages scorer_prompt(const PromptLibrary& lib, const std::string& response);

}  // namespace agora::prompts
