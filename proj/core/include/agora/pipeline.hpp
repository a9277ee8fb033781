#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agora/domain.hpp"
#include "agora/gateway.hpp"
#include "agora/prompts.hpp"
#include "agora/structured_output.hpp"

namespace agora::pipeline {

/// What every stage needs to talk to a model.
struct Services {
  gateway::Gateway& gateway;
  const prompts::PromptLibrary& prompts;
};

/// A case failed part-way; `partial` holds whatever was produced before the
/// failure (transcript, raw stage-2 output) for diagnosis.
class CaseFailure : public PipelineError {
 public:
  CaseFailure(const std::string& what, Json partial) : PipelineError(what), partial_(std::move(partial)) {}
  const Json& partial() const noexcept { return partial_; }

 private:
  Json partial_;
};

gateway::ChatRequest make_request(prompts::Messages messages, const std::string& model, const Sampling& sampling,
                                  gateway::ResponseFormat format = gateway::ResponseFormat::free_text);

/// Repair completions run at temperature 0 in JSON mode.
RepairFn make_repair_fn(const Services& services, const std::string& model, std::optional<std::int64_t> seed = {});

// --- stage 1 ------------------------------------------------------------------

/// Strategic debate. For each of `rounds` rounds, every agent (canonical
/// order) sees the posts plus the full history so far and its reply is
/// appended immediately. Throws CaseFailure with the partial transcript.
DebateTranscript run_debate(const UserCase& c, std::span<const Attribute> agents, int rounds,
                            const Services& services, const std::string& model, const Sampling& sampling);

/// One independent reply per agent with an empty history, assembled into a
/// single-round transcript.
DebateTranscript run_independent_agents(const UserCase& c, std::span<const Attribute> agents,
                                        const Services& services, const std::string& model,
                                        const Sampling& sampling);

// --- stage 2 ------------------------------------------------------------------

struct Stage2Result {
  CounselorPersona persona;
  std::string raw;
  ParseStep step = ParseStep::strict;
  std::optional<std::string> repaired_raw;
};

/// Validates a parsed stage-2 object: an integer in 1..3 for every active
/// attribute and a non-empty persona_text. Throws SchemaError.
CounselorPersona persona_from_stage2_json(const Json& j, std::span<const Attribute> active);

/// Stage-2 parse pipeline over raw model text. Throws Stage2ParseError.
Stage2Result parse_stage2_output(const std::string& raw, std::span<const Attribute> active, const RepairFn& repair);

Stage2Result create_counselor(const UserCase& c, const DebateTranscript& transcript,
                              std::span<const Attribute> active, const Services& services,
                              const std::string& model, const Sampling& sampling);

// --- stage 3 ------------------------------------------------------------------

GeneratedResponse generate_response(const UserCase& c, const CounselorPersona& persona,
                                    const DebateTranscript& transcript, const Services& services,
                                    const MethodConfig& cfg);

/// Runs one case under any method configuration. Throws CaseFailure.
GeneratedResponse run_method(const UserCase& c, const MethodConfig& cfg, const Services& services);

// --- batches ------------------------------------------------------------------

enum class CaseState { pending, ok, failed };

struct CaseStatus {
  CaseState state = CaseState::pending;
  std::string reason;
};

struct RunManifest {
  std::string run_id;
  MethodConfig config;
  std::string dataset_path;
  std::string started;
  std::optional<std::string> finished;
  std::map<std::string, CaseStatus> status;
  std::string template_version;
  std::map<std::string, std::string> template_versions;
  std::string gateway_fingerprint;

  std::size_t count(CaseState s) const;
  bool is_finished() const { return finished.has_value(); }
};

Json to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);

struct BatchOptions {
  std::filesystem::path run_dir;
  std::string run_id;  ///< defaults to run_dir's file name
  int parallelism = 1;
};

struct BatchResult {
  RunManifest manifest;
  std::size_t executed = 0;
  std::size_t skipped = 0;

  bool all_ok() const { return manifest.count(CaseState::ok) == manifest.status.size(); }
};

/// File name used for a case id inside `cases/`.
std::string case_file_stem(const std::string& case_id);

/// Runs every case not already marked ok in an existing manifest under
/// `opts.run_dir`. Failures are recorded per case; the batch continues.
BatchResult run_batch(const std::vector<UserCase>& cases, const std::string& dataset_path, const MethodConfig& cfg,
                      const Services& services, const BatchOptions& opts);

/// Loads the dataset first; a parse error aborts before any model call.
BatchResult run_batch(const std::filesystem::path& dataset, const MethodConfig& cfg, const Services& services,
                      const BatchOptions& opts);

struct RunArchive {
  RunManifest manifest;
  std::map<std::string, GeneratedResponse> responses;  ///< ok cases only
};

/// Throws ConfigError when the directory is not a run archive.
RunArchive load_run_archive(const std::filesystem::path& run_dir);

/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace agora::pipeline
