#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "agora/domain.hpp"

namespace agora::gateway {

enum class Role { system, user, assistant };
enum class ResponseFormat { free_text, json_object };
enum class FinishReason { stop, length, error };

std::string_view to_string(Role r) noexcept;
std::string_view to_string(ResponseFormat f) noexcept;
std::string_view to_string(FinishReason f) noexcept;

struct ChatMessage {
  Role role = Role::user;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
  std::string model_id;
  std::vector<ChatMessage> messages;
  double temperature = kGenerationTemperature;
  int max_tokens = 1024;
  std::optional<std::int64_t> seed;
  ResponseFormat response_format = ResponseFormat::free_text;

  /// Throws ConfigError unless messages is non-empty and starts with a
  /// system or user message.
  void validate() const;

  friend bool operator==(const ChatRequest&, const ChatRequest&) = default;
};

struct Usage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct ChatResponse {
  std::string text;
  FinishReason finish_reason = FinishReason::stop;
  Usage usage;
  bool cached = false;
};

Json to_json(const ChatRequest& req);
ChatRequest chat_request_from_json(const Json& j);
Json to_json(const ChatResponse& resp);
ChatResponse chat_response_from_json(const Json& j);

/// Content hash over (model_id, messages, temperature, max_tokens, seed,
/// response_format). Serialized with sorted keys, so field order never matters.
std::string cache_key(const ChatRequest& req);

struct BackendConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  int timeout_ms = 60000;
  int max_retries = 3;
  int retry_backoff_ms = 500;
  double rate_limit_rps = 0.0;  ///< <= 0 disables rate limiting
  std::optional<std::filesystem::path> cache_dir;

  void validate() const;
};

/// Fills unset fields from AGORA_API_KEY, AGORA_BASE_URL and AGORA_CACHE_DIR.
/// Values already present in `cfg` win over the environment.
BackendConfig apply_environment(BackendConfig cfg, bool api_key_set, bool base_url_set,
                                bool cache_dir_set);

// ---------------------------------------------------------------------------
// Backends
// ---------------------------------------------------------------------------

/// One attempt at a completion. Implementations throw GatewayError; a
/// retryable error is one the gateway may try again.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse send(const ChatRequest& req) = 0;
  /// Identifies the backend in run provenance.
  virtual std::string fingerprint() const = 0;
};

/// OpenAI-compatible `/chat/completions` over HTTP(S).
class HttpBackend final : public ChatBackend {
 public:
  explicit HttpBackend(BackendConfig cfg);
  ~HttpBackend() override;

  ChatResponse send(const ChatRequest& req) override;
  std::string fingerprint() const override;

  /// Number of HTTP requests put on the wire so far.
  std::uint64_t attempts() const noexcept { return attempts_.load(); }

 private:
  BackendConfig cfg_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::atomic<std::uint64_t> attempts_{0};
};

/// Builds the request body and parses the response body of the
/// chat-completions protocol. Exposed for tests.
Json openai_request_body(const ChatRequest& req);
ChatResponse parse_openai_response(const std::string& body);

// ---------------------------------------------------------------------------
// Cache and rate limiting
// ---------------------------------------------------------------------------

/// Content-addressed on-disk cache: `<dir>/<first-2-hex>/<digest>.json`
/// holding {request, response, timestamp}. Entries are written to a
/// temporary file and renamed into place.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<ChatResponse> load(const std::string& key) const;
  void store(const std::string& key, const ChatRequest& req, const ChatResponse& resp) const;
  std::filesystem::path path_for(const std::string& key) const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

/// Token bucket with a capacity of one burst token.
class RateLimiter {
 public:
  explicit RateLimiter(double rps);
  void acquire();

 private:
  using Clock = std::chrono::steady_clock;
  double rps_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mu_;
};

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

struct GatewayOptions {
  int max_retries = 3;
  int retry_backoff_ms = 500;
  double rate_limit_rps = 0.0;
  std::optional<std::filesystem::path> cache_dir;

  static GatewayOptions from(const BackendConfig& cfg);
};

struct GatewayStats {
  std::uint64_t calls = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t backend_attempts = 0;
};

/// The single entry point for model calls: cache lookup, rate limiting,
/// retries with exponential backoff, cache write. Safe for concurrent use.
class Gateway {
 public:
  Gateway(std::shared_ptr<ChatBackend> backend, GatewayOptions opts);

  ChatResponse complete(const ChatRequest& req);

  std::string fingerprint() const { return backend_->fingerprint(); }
  GatewayStats stats() const;
  ChatBackend& backend() noexcept { return *backend_; }

 private:
  std::shared_ptr<ChatBackend> backend_;
  GatewayOptions opts_;
  std::optional<ResponseCache> cache_;
  std::optional<RateLimiter> limiter_;
  std::atomic<std::uint64_t> calls_{0};
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> attempts_{0};
};

/// Convenience: HTTP backend + gateway from one config.
std::shared_ptr<Gateway> make_http_gateway(const BackendConfig& cfg);

}  // namespace agora::gateway
