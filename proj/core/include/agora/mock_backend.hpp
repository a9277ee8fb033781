#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "agora/gateway.hpp"

namespace agora::gateway {

/// Which part of a request a scripted rule inspects.
enum class MatchScope { any, system, last_user };

struct MockRule {
  /// Substring that must occur in the inspected text. Empty matches all.
  std::string contains;
  MatchScope scope = MatchScope::any;
  /// Replies returned on successive matches; the last one repeats.
  std::vector<std::string> replies;
  /// Instead of replying, fail with this error kind.
  std::optional<GatewayError::Kind> fail_with;
  /// Number of leading matches that fail before replies start (0 = never;
  /// -1 = always when fail_with is set).
  int fail_times = -1;
};

/// Canned replies keyed by matcher, and/or a seeded template generator.
/// Rules are tried in order; the generator only answers requests no rule
/// matched.
struct MockScript {
  std::vector<MockRule> rules;
  bool generator = false;
  std::uint64_t seed = 0;
  /// Free-text replies become "system-hash:<sha256 of the system message>".
  bool echo_system_hash = false;

  static MockScript seeded(std::uint64_t seed);
  /// JSON form: {"seed": 7, "generator": true, "echo_system_hash": false,
  ///             "rules": [{"contains": "...", "scope": "any|system|last_user",
  ///                        "replies": ["..."], "fail_with": "transport",
  ///                        "fail_times": 1}]}
  static MockScript from_json(const Json& j);
  static MockScript load(const std::filesystem::path& path);
};

/// Deterministic completion for `req` under `script`; throws MockError when
/// nothing answers the request.
ChatResponse mock_complete(const ChatRequest& req, const MockScript& script);

/// Generator output for a request; exposed for tests. JSON-format requests
/// are answered by filling the last JSON skeleton in the final user message,
/// whose values use the placeholder grammar
///   <integer L-H>  <number L-H>  <text>  <permutation of A, B, C>
std::string generate_mock_text(const ChatRequest& req, std::uint64_t seed);

/// Backend wrapper around mock_complete that records every request it sees.
class MockBackend final : public ChatBackend {
 public:
  explicit MockBackend(MockScript script);

  ChatResponse send(const ChatRequest& req) override;
  std::string fingerprint() const override;

  std::vector<ChatRequest> call_log() const;
  std::size_t call_count() const;
  void clear_log();

 private:
  MockScript script_;
  mutable std::mutex mu_;
  std::vector<ChatRequest> log_;
  std::vector<int> rule_hits_;
};

}  // namespace agora::gateway
