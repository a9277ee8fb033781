#include "agora/gateway.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include "agora/hashing.hpp"

namespace agora::gateway {

std::string_view to_string(Role r) noexcept {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

std::string_view to_string(ResponseFormat f) noexcept {
  return f == ResponseFormat::json_object ? "json_object" : "free_text";
}

std::string_view to_string(FinishReason f) noexcept {
  switch (f) {
    case FinishReason::stop: return "stop";
    case FinishReason::length: return "length";
    case FinishReason::error: return "error";
  }
  return "error";
}

namespace {

Role parse_role(const std::string& s) {
  if (s == "system") return Role::system;
  if (s == "assistant") return Role::assistant;
  if (s == "user") return Role::user;
  throw SchemaError("unknown chat role '" + s + "'");
}

FinishReason parse_finish(const std::string& s) {
  if (s == "stop") return FinishReason::stop;
  if (s == "length") return FinishReason::length;
  return FinishReason::error;
}

}  // namespace

void ChatRequest::validate() const {
  if (messages.empty()) throw ConfigError("chat request has no messages");
  if (messages.front().role == Role::assistant) {
    throw ConfigError("first chat message must be a system or user message");
  }
  if (max_tokens <= 0) throw ConfigError("max_tokens must be > 0");
}

Json to_json(const ChatRequest& req) {
  Json msgs = Json::array();
  for (const auto& m : req.messages) msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  Json j{{"model_id", req.model_id},
         {"messages", std::move(msgs)},
         {"temperature", req.temperature},
         {"max_tokens", req.max_tokens},
         {"response_format", to_string(req.response_format)}};
  j["seed"] = req.seed ? Json(*req.seed) : Json(nullptr);
  return j;
}

ChatRequest chat_request_from_json(const Json& j) {
  try {
    ChatRequest req;
    req.model_id = j.at("model_id").get<std::string>();
    for (const Json& m : j.at("messages")) {
      req.messages.push_back({parse_role(m.at("role").get<std::string>()), m.at("content").get<std::string>()});
    }
    req.temperature = j.at("temperature").get<double>();
    req.max_tokens = j.at("max_tokens").get<int>();
    if (auto it = j.find("seed"); it != j.end() && !it->is_null()) req.seed = it->get<std::int64_t>();
    req.response_format = j.value("response_format", "free_text") == "json_object"
                              ? ResponseFormat::json_object
                              : ResponseFormat::free_text;
    return req;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("chat request: ") + e.what());
  }
}

Json to_json(const ChatResponse& resp) {
  return Json{{"text", resp.text},
              {"finish_reason", to_string(resp.finish_reason)},
              {"usage",
               {{"prompt_tokens", resp.usage.prompt_tokens},
                {"completion_tokens", resp.usage.completion_tokens}}}};
}

ChatResponse chat_response_from_json(const Json& j) {
  try {
    ChatResponse r;
    r.text = j.at("text").get<std::string>();
    r.finish_reason = parse_finish(j.value("finish_reason", "stop"));
    if (auto it = j.find("usage"); it != j.end()) {
      r.usage.prompt_tokens = it->value("prompt_tokens", 0);
      r.usage.completion_tokens = it->value("completion_tokens", 0);
    }
    return r;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("chat response: ") + e.what());
  }
}

std::string cache_key(const ChatRequest& req) { return sha256_hex(to_json(req).dump()); }

void BackendConfig::validate() const {
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (timeout_ms <= 0) throw ConfigError("timeout_ms must be > 0");
  if (retry_backoff_ms < 0) throw ConfigError("retry_backoff_ms must be >= 0");
  if (base_url.empty()) throw ConfigError("base_url must not be empty");
}

BackendConfig apply_environment(BackendConfig cfg, bool api_key_set, bool base_url_set,
                                bool cache_dir_set) {
  if (!api_key_set) {
    if (const char* v = std::getenv("AGORA_API_KEY"); v && *v) cfg.api_key = v;
  }
  if (!base_url_set) {
    if (const char* v = std::getenv("AGORA_BASE_URL"); v && *v) cfg.base_url = v;
  }
  if (!cache_dir_set) {
    if (const char* v = std::getenv("AGORA_CACHE_DIR"); v && *v) cfg.cache_dir = v;
  }
  return cfg;
}

// --- rate limiter -------------------------------------------------------------

RateLimiter::RateLimiter(double rps) : rps_(rps), tokens_(1.0), last_(Clock::now()) {}

void RateLimiter::acquire() {
  if (rps_ <= 0) return;
  std::unique_lock lock(mu_);
  for (;;) {
    const auto now = Clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_).count();
    tokens_ = std::min(1.0, tokens_ + elapsed * rps_);
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const auto wait = std::chrono::duration<double>((1.0 - tokens_) / rps_);
    // Sleeping under the lock serializes waiters, which is what a shared
    // bucket wants anyway.
    std::this_thread::sleep_for(wait);
  }
}

// --- gateway ------------------------------------------------------------------

GatewayOptions GatewayOptions::from(const BackendConfig& cfg) {
  return GatewayOptions{cfg.max_retries, cfg.retry_backoff_ms, cfg.rate_limit_rps, cfg.cache_dir};
}

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, GatewayOptions opts)
    : backend_(std::move(backend)), opts_(std::move(opts)) {
  if (!backend_) throw ConfigError("gateway requires a backend");
  if (opts_.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (opts_.cache_dir) cache_.emplace(*opts_.cache_dir);
  if (opts_.rate_limit_rps > 0) limiter_.emplace(opts_.rate_limit_rps);
}

ChatResponse Gateway::complete(const ChatRequest& req) {
  req.validate();
  ++calls_;
  std::string key;
  if (cache_) {
    key = cache_key(req);
    if (auto hit = cache_->load(key)) {
      ++hits_;
      hit->cached = true;
      return *hit;
    }
  }

  for (int attempt = 0;; ++attempt) {
    if (limiter_) limiter_->acquire();
    ++attempts_;
    try {
      ChatResponse resp = backend_->send(req);
      resp.cached = false;
      if (cache_ && resp.finish_reason != FinishReason::error) cache_->store(key, req, resp);
      return resp;
    } catch (const GatewayError& e) {
      if (!e.retryable()) throw;
      if (attempt >= opts_.max_retries) {
        throw GatewayError(GatewayError::Kind::transport,
                           "giving up after " + std::to_string(attempt + 1) + " attempt(s): " + e.what(),
                           e.http_status(), false);
      }
    }
    const double delay = opts_.retry_backoff_ms * std::pow(2.0, attempt);
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay));
  }
}

GatewayStats Gateway::stats() const { return {calls_.load(), hits_.load(), attempts_.load()}; }

std::shared_ptr<Gateway> make_http_gateway(const BackendConfig& cfg) {
  cfg.validate();
  return std::make_shared<Gateway>(std::make_shared<HttpBackend>(cfg), GatewayOptions::from(cfg));
}

}  // namespace agora::gateway
