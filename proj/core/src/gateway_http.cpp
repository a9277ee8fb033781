#include <httplib.h>

#include "agora/gateway.hpp"

namespace agora::gateway {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // "/v1" or ""
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base_url must include a scheme: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme: " + scheme);
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  if (path_start == std::string::npos) {
    out.origin = url;
  } else {
    out.origin = url.substr(0, path_start);
    out.path = url.substr(path_start);
  }
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

}  // namespace

Json openai_request_body(const ChatRequest& req) {
  Json msgs = Json::array();
  for (const auto& m : req.messages) msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  Json body{{"model", req.model_id},
            {"messages", std::move(msgs)},
            {"temperature", req.temperature},
            {"max_tokens", req.max_tokens},
            {"stream", false}};
  if (req.seed) body["seed"] = *req.seed;
  if (req.response_format == ResponseFormat::json_object) body["response_format"] = {{"type", "json_object"}};
  return body;
}

ChatResponse parse_openai_response(const std::string& body) {
  Json j;
  try {
    j = Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw GatewayError(GatewayError::Kind::protocol, std::string("response is not JSON: ") + e.what());
  }
  try {
    const Json& choices = j.at("choices");
    if (!choices.is_array() || choices.empty()) {
      throw GatewayError(GatewayError::Kind::protocol, "response has no choices");
    }
    const Json& choice = choices.front();
    const Json& content = choice.at("message").at("content");
    ChatResponse r;
    r.text = content.is_null() ? std::string() : content.get<std::string>();
    const std::string reason = choice.value("finish_reason", std::string("stop"));
    r.finish_reason = reason == "length" ? FinishReason::length
                      : reason == "stop" ? FinishReason::stop
                                         : FinishReason::error;
    if (reason == "tool_calls" || reason == "content_filter") r.finish_reason = FinishReason::error;
    if (auto it = j.find("usage"); it != j.end() && it->is_object()) {
      r.usage.prompt_tokens = it->value("prompt_tokens", 0);
      r.usage.completion_tokens = it->value("completion_tokens", 0);
    }
    return r;
  } catch (const Json::exception& e) {
    throw GatewayError(GatewayError::Kind::protocol, std::string("malformed completion payload: ") + e.what());
  }
}

HttpBackend::HttpBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const SplitUrl u = split_url(cfg_.base_url);
  scheme_host_port_ = u.origin;
  path_prefix_ = u.path;
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::fingerprint() const { return "openai-compatible:" + cfg_.base_url; }

ChatResponse HttpBackend::send(const ChatRequest& req) {
  // httplib::Client is not safe for concurrent requests, so each call gets one.
  httplib::Client client(scheme_host_port_);
  const auto timeout = std::chrono::milliseconds(cfg_.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  ++attempts_;
  const std::string body = openai_request_body(req).dump();
  auto res = client.Post(path_prefix_ + "/chat/completions", headers, body, "application/json");
  if (!res) {
    throw GatewayError(GatewayError::Kind::transport,
                       "request to " + cfg_.base_url + " failed: " + httplib::to_string(res.error()), 0,
                       true);
  }
  const int status = res->status;
  if (status == 429 || status >= 500) {
    throw GatewayError(GatewayError::Kind::transport, "HTTP " + std::to_string(status) + " from provider",
                       status, true);
  }
  if (status >= 400) {
    throw GatewayError(GatewayError::Kind::request,
                       "HTTP " + std::to_string(status) + " from provider: " + res->body.substr(0, 500), status,
                       false);
  }
  if (status < 200 || status >= 300) {
    throw GatewayError(GatewayError::Kind::protocol, "unexpected HTTP status " + std::to_string(status), status);
  }
  return parse_openai_response(res->body);
}

}  // namespace agora::gateway
