#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "agora/datasets.hpp"
#include "agora/gateway.hpp"
#include "agora/mock_backend.hpp"
#include "agora/pipeline.hpp"
#include "agora/prompts.hpp"

namespace agora::cli {

namespace fs = std::filesystem;

/// Global flags as typed on the command line; `*_set` tells whether the
/// flag was given, so config-file values can fill the gaps.
struct GlobalFlags {
  std::string config;
  std::string cache_dir;
  int parallelism = 1;
  std::int64_t seed = 0;
  bool verbose = false;
  bool mock = false;
  std::string mock_script;
  bool dry_run = false;
  std::string prompts_dir;
  std::string base_url;

  bool cache_dir_set = false;
  bool parallelism_set = false;
  bool seed_set = false;
  bool mock_script_set = false;
  bool prompts_dir_set = false;
  bool base_url_set = false;
};

/// Resolved settings (flags > config file > environment) plus lazily built
/// services shared by the subcommands.
class Context {
 public:
  Context(const GlobalFlags& flags, std::ostream& out, std::ostream& err);

  std::ostream& out;
  std::ostream& err;

  bool verbose = false;
  bool mock = false;
  bool dry_run = false;
  int parallelism = 1;
  std::optional<std::int64_t> seed;

  /// Config-file value for `key`; '-' and '_' are interchangeable.
  std::optional<Json> config_value(const std::string& key) const;

  std::string string_setting(bool flag_set, const std::string& flag_value, const std::string& key,
                             const std::string& fallback = {}) const;
  int int_setting(bool flag_set, int flag_value, const std::string& key, int fallback) const;
  double double_setting(bool flag_set, double flag_value, const std::string& key, double fallback) const;
  bool bool_setting(bool flag_set, const std::string& key) const;

  /// Model for a role: the flag, then `role_key` and "model" in the config,
  /// then "mock-model" under --mock. Throws ConfigError when none is set.
  std::string model(bool flag_set, const std::string& flag_value, const std::string& role_key = "model") const;

  const prompts::PromptLibrary& prompts();
  gateway::Gateway& gateway();
  pipeline::Services services() { return {gateway(), prompts()}; }

  /// Gateway call statistics on stderr when --verbose.
  void report_stats();

 private:
  Json config_ = Json::object();
  gateway::BackendConfig backend_;
  std::optional<fs::path> mock_script_;
  std::optional<fs::path> prompts_dir_;
  std::unique_ptr<prompts::PromptLibrary> prompts_;
  std::unique_ptr<gateway::Gateway> gateway_;
};

std::vector<UserCase> load_cases(Context& ctx, const fs::path& dataset);

/// Prints "dry run: ..." lines and the total.
struct CallPlan {
  std::vector<std::pair<std::string, long long>> items;
  void add(const std::string& what, long long calls) { items.emplace_back(what, calls); }
  long long total() const;
  void print(std::ostream& out) const;
};

/// Left-aligned first column, right-aligned rest.
void print_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

std::string fmt(double v, int digits = 2);
void write_text(const fs::path& path, const std::string& content);

}  // namespace agora::cli
