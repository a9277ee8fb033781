#include "context.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace agora::cli {

namespace {

std::string normalize_key(std::string k) {
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

template <class T>
T typed(const Json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const Json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type: " + v.dump());
  }
}

}  // namespace

Context::Context(const GlobalFlags& flags, std::ostream& out_, std::ostream& err_) : out(out_), err(err_) {
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    if (!in) throw ConfigError("cannot open config file " + flags.config);
    Json raw;
    try {
      raw = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError("config file " + flags.config + ": " + e.what());
    }
    if (!raw.is_object()) throw ConfigError("config file must hold a JSON object");
    for (auto& [k, v] : raw.items()) config_[normalize_key(k)] = v;
  }

  verbose = flags.verbose || bool_setting(false, "verbose");
  dry_run = flags.dry_run || bool_setting(false, "dry_run");
  parallelism = int_setting(flags.parallelism_set, flags.parallelism, "parallelism", 1);
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (flags.seed_set) {
    seed = flags.seed;
  } else if (auto v = config_value("seed")) {
    seed = typed<std::int64_t>(*v, "seed");
  }

  const std::string script = string_setting(flags.mock_script_set, flags.mock_script, "mock_script");
  if (!script.empty()) mock_script_ = script;
  mock = flags.mock || bool_setting(false, "mock") || mock_script_.has_value();

  const std::string pdir = string_setting(flags.prompts_dir_set, flags.prompts_dir, "prompts_dir");
  if (!pdir.empty()) prompts_dir_ = pdir;

  // flags > config file > environment
  gateway::BackendConfig b;
  bool base_url_set = flags.base_url_set;
  if (base_url_set) {
    b.base_url = flags.base_url;
  } else if (auto v = config_value("base_url")) {
    b.base_url = typed<std::string>(*v, "base_url");
    base_url_set = true;
  }
  bool api_key_set = false;
  if (auto v = config_value("api_key")) {
    b.api_key = typed<std::string>(*v, "api_key");
    api_key_set = true;
  }
  bool cache_set = flags.cache_dir_set;
  if (cache_set) {
    b.cache_dir = flags.cache_dir;
  } else if (auto v = config_value("cache_dir")) {
    b.cache_dir = typed<std::string>(*v, "cache_dir");
    cache_set = true;
  }
  b.timeout_ms = int_setting(false, 0, "timeout_ms", b.timeout_ms);
  b.max_retries = int_setting(false, 0, "max_retries", b.max_retries);
  b.retry_backoff_ms = int_setting(false, 0, "retry_backoff_ms", b.retry_backoff_ms);
  b.rate_limit_rps = double_setting(false, 0, "rate_limit_rps", b.rate_limit_rps);
  backend_ = gateway::apply_environment(std::move(b), api_key_set, base_url_set, cache_set);
  backend_.validate();
}

std::optional<Json> Context::config_value(const std::string& key) const {
  auto it = config_.find(normalize_key(key));
  if (it == config_.end() || it->is_null()) return std::nullopt;
  return std::optional<Json>(std::in_place, *it);
}

std::string Context::string_setting(bool flag_set, const std::string& flag_value, const std::string& key,
                                    const std::string& fallback) const {
  if (flag_set) return flag_value;
  if (auto v = config_value(key)) return typed<std::string>(*v, key);
  return fallback;
}

int Context::int_setting(bool flag_set, int flag_value, const std::string& key, int fallback) const {
  if (flag_set) return flag_value;
  if (auto v = config_value(key)) return typed<int>(*v, key);
  return fallback;
}

double Context::double_setting(bool flag_set, double flag_value, const std::string& key, double fallback) const {
  if (flag_set) return flag_value;
  if (auto v = config_value(key)) return typed<double>(*v, key);
  return fallback;
}

bool Context::bool_setting(bool flag_set, const std::string& key) const {
  if (flag_set) return true;
  if (auto v = config_value(key)) return typed<bool>(*v, key);
  return false;
}

std::string Context::model(bool flag_set, const std::string& flag_value, const std::string& role_key) const {
  if (flag_set && !flag_value.empty()) return flag_value;
  if (auto v = config_value(role_key)) return typed<std::string>(*v, role_key);
  if (auto v = config_value("model")) return typed<std::string>(*v, "model");
  if (mock) return "mock-model";
  throw ConfigError("no model given: pass --model or set \"model\" in the config file");
}

const prompts::PromptLibrary& Context::prompts() {
  if (!prompts_) {
    prompts_ = std::make_unique<prompts::PromptLibrary>(
        prompts::PromptLibrary::load(prompts_dir_ ? *prompts_dir_ : prompts::PromptLibrary::default_dir()));
  }
  return *prompts_;
}

gateway::Gateway& Context::gateway() {
  if (!gateway_) {
    std::shared_ptr<gateway::ChatBackend> backend;
    if (mock) {
      auto script = mock_script_ ? gateway::MockScript::load(*mock_script_)
                                 : gateway::MockScript::seeded(static_cast<std::uint64_t>(seed.value_or(0)));
      backend = std::make_shared<gateway::MockBackend>(std::move(script));
    } else {
      backend = std::make_shared<gateway::HttpBackend>(backend_);
    }
    gateway_ = std::make_unique<gateway::Gateway>(std::move(backend), gateway::GatewayOptions::from(backend_));
  }
  return *gateway_;
}

void Context::report_stats() {
  if (!verbose || !gateway_) return;
  const auto s = gateway_->stats();
  err << "gateway: " << s.calls << " call(s), " << s.cache_hits << " cache hit(s), " << s.backend_attempts
      << " backend attempt(s) [" << gateway_->fingerprint() << "]\n";
}

std::vector<UserCase> load_cases(Context& ctx, const fs::path& dataset) {
  auto loaded = datasets::load_native(dataset);
  for (const auto& w : loaded.warnings) ctx.err << "warning: " << w << "\n";
  return std::move(loaded.cases);
}

long long CallPlan::total() const {
  long long t = 0;
  for (const auto& [what, n] : items) t += n;
  return t;
}

void CallPlan::print(std::ostream& out) const {
  for (const auto& [what, n] : items) out << "dry run: " << what << ": " << n << " gateway call(s)\n";
  out << "dry run: planned gateway calls: " << total() << " (none sent)\n";
}

void print_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string cell = c < cells.size() ? cells[c] : std::string();
      const std::string pad(width[c] - std::min(width[c], cell.size()), ' ');
      if (c) s += "  ";
      s += c == 0 ? cell + pad : pad + cell;
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    out << s << "\n";
  };
  line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out << std::string(total + 2 * (width.size() - 1), '-') << "\n";
  for (const auto& r : rows) line(r);
}

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  pipeline::write_file_atomic(path, content);
}

}  // namespace agora::cli
