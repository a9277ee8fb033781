#include "agora/mock_backend.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <random>
#include <regex>

#include "agora/hashing.hpp"

namespace agora::gateway {

namespace {

constexpr std::array<std::string_view, 12> kOpenings = {
    "It sounds like you have been carrying a lot",
    "Thank you for sharing something so personal",
    "I hear how exhausting this has been for you",
    "What you are feeling makes sense given everything you describe",
    "It takes courage to put these worries into words",
    "You are clearly trying hard to understand yourself",
    "Many people in your situation feel the same way",
    "Your feelings are valid and worth paying attention to",
    "It is understandable that this weighs on you",
    "I can tell how much this matters to you",
    "You deserve support while you work through this",
    "Noticing these patterns is already an important step",
};

constexpr std::array<std::string_view, 12> kMiddles = {
    "try to notice the thoughts that appear right before the anxiety grows",
    "consider what a good friend would say to you in this moment",
    "one small goal for this week could be a short conversation with someone you trust",
    "it may help to write down what went well each day, however small",
    "remember that one difficult moment does not define who you are",
    "you could look back at times when you handled something similar",
    "breathing slowly for a minute can calm the body before a hard situation",
    "it is okay to move at your own pace and to set gentle limits",
    "talking with a counselor could give you space to explore this further",
    "the way you see yourself may be harsher than how others see you",
    "small routines like a regular walk can give your days more stability",
    "your strengths show in how carefully you reflect on this",
};

constexpr std::array<std::string_view, 6> kClosings = {
    "You do not have to face this alone.",
    "Be patient and kind with yourself as you try this.",
    "Every small step counts, and you are already taking one.",
    "I believe you can find a way forward that fits you.",
    "Please reach out for support whenever you need it.",
    "Take care of yourself, you matter.",
};

std::string scope_text(const ChatRequest& req, MatchScope scope) {
  std::string out;
  switch (scope) {
    case MatchScope::any:
      for (const auto& m : req.messages) {
        out += m.content;
        out += '\n';
      }
      break;
    case MatchScope::system:
      for (const auto& m : req.messages) {
        if (m.role == Role::system) out += m.content;
      }
      break;
    case MatchScope::last_user:
      for (auto it = req.messages.rbegin(); it != req.messages.rend(); ++it) {
        if (it->role == Role::user) {
          out = it->content;
          break;
        }
      }
      break;
  }
  return out;
}

std::string sentence(std::mt19937_64& rng) {
  std::string s(kOpenings[rng() % kOpenings.size()]);
  s += ", and ";
  s += kMiddles[rng() % kMiddles.size()];
  s += '.';
  return s;
}

std::string paragraph(std::mt19937_64& rng) {
  const int n = 2 + static_cast<int>(rng() % 3);
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += sentence(rng);
  }
  out += ' ';
  out += kClosings[rng() % kClosings.size()];
  return out;
}

/// Last top-level {...} span in `text` that contains a '<' placeholder.
std::optional<std::string> last_skeleton(const std::string& text) {
  std::optional<std::string> found;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '{') {
      if (depth++ == 0) start = i;
    } else if (text[i] == '}' && depth > 0) {
      if (--depth == 0) {
        std::string span = text.substr(start, i - start + 1);
        if (span.find('<') != std::string::npos) found = std::move(span);
      }
    }
  }
  return found;
}

std::vector<std::string> split_labels(const std::string& list) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : list) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

Json fill_placeholder(const std::string& spec, std::mt19937_64& rng) {
  std::smatch m;
  static const std::regex kInt(R"(integer\s+(-?\d+)\s*-\s*(-?\d+))");
  static const std::regex kNum(R"(number\s+(-?\d+(?:\.\d+)?)\s*-\s*(-?\d+(?:\.\d+)?))");
  static const std::regex kPerm(R"(permutation of\s+(.+))");
  if (std::regex_search(spec, m, kInt)) {
    const long lo = std::stol(m[1]), hi = std::stol(m[2]);
    return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  if (std::regex_search(spec, m, kNum)) {
    const double lo = std::stod(m[1]), hi = std::stod(m[2]);
    const auto steps = static_cast<std::uint64_t>((hi - lo) * 100.0 + 0.5);
    return lo + static_cast<double>(rng() % (steps + 1)) / 100.0;
  }
  if (std::regex_search(spec, m, kPerm)) {
    auto labels = split_labels(m[1]);
    for (std::size_t i = labels.size(); i > 1; --i) std::swap(labels[i - 1], labels[rng() % i]);
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (i) out += " > ";
      out += labels[i];
    }
    return out;
  }
  return paragraph(rng);
}

ChatResponse make_response(std::string text, const ChatRequest& req) {
  ChatResponse r;
  r.text = std::move(text);
  std::size_t prompt_chars = 0;
  for (const auto& m : req.messages) prompt_chars += m.content.size();
  r.usage.prompt_tokens = static_cast<int>(prompt_chars / 4);
  r.usage.completion_tokens = static_cast<int>(r.text.size() / 4);
  return r;
}

ChatResponse answer(const ChatRequest& req, const MockScript& script, std::vector<int>* hits) {
  for (std::size_t i = 0; i < script.rules.size(); ++i) {
    const MockRule& rule = script.rules[i];
    if (!rule.contains.empty() && scope_text(req, rule.scope).find(rule.contains) == std::string::npos) continue;
    const int n = hits ? ++(*hits)[i] : 1;
    if (rule.fail_with && (rule.fail_times < 0 || n <= rule.fail_times)) {
      const bool transport = *rule.fail_with == GatewayError::Kind::transport;
      throw GatewayError(*rule.fail_with, "scripted mock failure", transport ? 503 : 400, transport);
    }
    if (rule.replies.empty()) return make_response("", req);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(n - 1), rule.replies.size() - 1);
    return make_response(rule.replies[idx], req);
  }
  if (script.echo_system_hash && req.response_format == ResponseFormat::free_text) {
    return make_response("system-hash:" + sha256_hex(scope_text(req, MatchScope::system)), req);
  }
  if (script.generator) return make_response(generate_mock_text(req, script.seed), req);
  const std::string last = scope_text(req, MatchScope::last_user);
  throw MockError("no mock script entry matches request: " + last.substr(0, 80));
}

}  // namespace

MockScript MockScript::seeded(std::uint64_t seed) {
  MockScript s;
  s.generator = true;
  s.seed = seed;
  return s;
}

MockScript MockScript::from_json(const Json& j) {
  MockScript s;
  try {
    s.generator = j.value("generator", false);
    s.seed = j.value("seed", std::uint64_t{0});
    s.echo_system_hash = j.value("echo_system_hash", false);
    if (auto it = j.find("rules"); it != j.end()) {
      for (const Json& r : *it) {
        MockRule rule;
        rule.contains = r.value("contains", std::string());
        const std::string scope = r.value("scope", std::string("any"));
        rule.scope = scope == "system" ? MatchScope::system
                     : scope == "last_user" ? MatchScope::last_user
                                            : MatchScope::any;
        if (auto rep = r.find("replies"); rep != r.end()) {
          for (const Json& x : *rep) rule.replies.push_back(x.is_string() ? x.get<std::string>() : x.dump());
        }
        if (auto rep = r.find("reply"); rep != r.end()) {
          rule.replies.push_back(rep->is_string() ? rep->get<std::string>() : rep->dump());
        }
        if (auto f = r.find("fail_with"); f != r.end()) {
          const std::string k = f->get<std::string>();
          rule.fail_with = k == "request" ? GatewayError::Kind::request
                           : k == "protocol" ? GatewayError::Kind::protocol
                                             : GatewayError::Kind::transport;
        }
        rule.fail_times = r.value("fail_times", -1);
        s.rules.push_back(std::move(rule));
      }
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("mock script: ") + e.what());
  }
  return s;
}

MockScript MockScript::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mock script " + path.string());
  try {
    return from_json(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw ConfigError("mock script " + path.string() + ": " + e.what());
  }
}

std::string generate_mock_text(const ChatRequest& req, std::uint64_t seed) {
  std::mt19937_64 rng(sha256_u64(cache_key(req) + ":" + std::to_string(seed)));
  if (req.response_format == ResponseFormat::json_object) {
    if (auto skeleton = last_skeleton(scope_text(req, MatchScope::last_user))) {
      static const std::regex kField(R"re("([A-Za-z_][A-Za-z0-9_]*)"\s*:\s*"?<([^>]*)>"?)re");
      Json out = Json::object();
      for (auto it = std::sregex_iterator(skeleton->begin(), skeleton->end(), kField); it != std::sregex_iterator();
           ++it) {
        out[(*it)[1].str()] = fill_placeholder((*it)[2].str(), rng);
      }
      if (!out.empty()) return out.dump();
    }
    return Json{{"text", paragraph(rng)}}.dump();
  }
  return paragraph(rng);
}

ChatResponse mock_complete(const ChatRequest& req, const MockScript& script) {
  req.validate();
  return answer(req, script, nullptr);
}

MockBackend::MockBackend(MockScript script)
    : script_(std::move(script)), rule_hits_(script_.rules.size(), 0) {}

ChatResponse MockBackend::send(const ChatRequest& req) {
  std::lock_guard lock(mu_);
  log_.push_back(req);
  return answer(req, script_, &rule_hits_);
}

std::string MockBackend::fingerprint() const {
  return "mock:seed=" + std::to_string(script_.seed) + (script_.rules.empty() ? "" : ":scripted");
}

std::vector<ChatRequest> MockBackend::call_log() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::size_t MockBackend::call_count() const {
  std::lock_guard lock(mu_);
  return log_.size();
}

void MockBackend::clear_log() {
  std::lock_guard lock(mu_);
  log_.clear();
}

}  // namespace agora::gateway
