#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "agora/datasets.hpp"
#include "agora/hashing.hpp"
#include "agora/pipeline.hpp"

namespace agora::pipeline {

namespace fs = std::filesystem;

namespace {

std::string_view to_string(CaseState s) {
  switch (s) {
    case CaseState::pending: return "pending";
    case CaseState::ok: return "ok";
    case CaseState::failed: return "failed";
  }
  return "pending";
}

CaseState parse_state(const std::string& s) {
  if (s == "ok") return CaseState::ok;
  if (s == "failed") return CaseState::failed;
  return CaseState::pending;
}

Json read_json_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open " + p.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& content) {
  static std::atomic<std::uint64_t> counter{0};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id() << '.' << counter.fetch_add(1);
  const fs::path tmp = path.string() + suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::size_t RunManifest::count(CaseState s) const {
  return static_cast<std::size_t>(
      std::count_if(status.begin(), status.end(), [s](const auto& kv) { return kv.second.state == s; }));
}

Json to_json(const RunManifest& m) {
  Json status = Json::object();
  for (const auto& [id, st] : m.status) {
    Json e{{"state", to_string(st.state)}};
    if (!st.reason.empty()) e["reason"] = st.reason;
    status[id] = std::move(e);
  }
  Json j{{"run_id", m.run_id},
         {"config", m.config},
         {"config_hash", m.config.hash()},
         {"dataset_path", m.dataset_path},
         {"started", m.started},
         {"finished", m.finished ? Json(*m.finished) : Json(nullptr)},
         {"status", std::move(status)},
         {"counts",
          {{"ok", m.count(CaseState::ok)}, {"failed", m.count(CaseState::failed)}, {"pending", m.count(CaseState::pending)}}},
         {"template_version", m.template_version},
         {"template_versions", m.template_versions},
         {"gateway_fingerprint", m.gateway_fingerprint}};
  return j;
}

RunManifest manifest_from_json(const Json& j) {
  try {
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.config = method_config_from_json(j.at("config"));
    m.dataset_path = j.value("dataset_path", std::string());
    m.started = j.value("started", std::string());
    if (auto it = j.find("finished"); it != j.end() && it->is_string()) m.finished = it->get<std::string>();
    for (auto it = j.at("status").begin(); it != j.at("status").end(); ++it) {
      m.status[it.key()] = CaseStatus{parse_state(it->value("state", "pending")), it->value("reason", "")};
    }
    m.template_version = j.value("template_version", std::string());
    if (auto it = j.find("template_versions"); it != j.end()) {
      m.template_versions = it->get<std::map<std::string, std::string>>();
    }
    m.gateway_fingerprint = j.value("gateway_fingerprint", std::string());
    return m;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("run manifest: ") + e.what());
  }
}

std::string case_file_stem(const std::string& case_id) {
  std::string out;
  bool changed = case_id.empty();
  for (char c : case_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    out.push_back(ok ? c : '_');
    changed |= !ok;
  }
  if (out == "." || out == "..") changed = true;
  if (changed) out += "-" + sha256_hex(case_id).substr(0, 8);
  return out;
}

BatchResult run_batch(const std::vector<UserCase>& cases, const std::string& dataset_path, const MethodConfig& cfg,
                      const Services& services, const BatchOptions& opts) {
  cfg.validate();
  if (opts.parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (opts.run_dir.empty()) throw ConfigError("run directory must be set");

  const fs::path cases_dir = opts.run_dir / "cases";
  const fs::path manifest_path = opts.run_dir / "manifest.json";
  fs::create_directories(cases_dir);

  RunManifest manifest;
  std::map<std::string, CaseStatus> previous;
  if (fs::exists(manifest_path)) {
    RunManifest old = manifest_from_json(read_json_file(manifest_path));
    if (old.config.hash() != cfg.hash()) {
      throw ConfigError("run directory " + opts.run_dir.string() +
                        " holds a run with a different configuration; use a new --out directory");
    }
    previous = std::move(old.status);
    manifest.started = old.started;
  }
  manifest.run_id = !opts.run_id.empty() ? opts.run_id : opts.run_dir.filename().string();
  manifest.config = cfg;
  manifest.dataset_path = dataset_path;
  if (manifest.started.empty()) manifest.started = utc_timestamp();
  manifest.template_version = services.prompts.version();
  manifest.template_versions = services.prompts.versions();
  manifest.gateway_fingerprint = services.gateway.fingerprint();

  std::vector<const UserCase*> todo;
  BatchResult result;
  for (const auto& c : cases) {
    auto it = previous.find(c.id);
    const bool done = it != previous.end() && it->second.state == CaseState::ok &&
                      fs::exists(cases_dir / (case_file_stem(c.id) + ".json"));
    if (done) {
      manifest.status[c.id] = it->second;
      ++result.skipped;
    } else {
      manifest.status[c.id] = CaseStatus{};
      todo.push_back(&c);
    }
  }

  std::mutex manifest_mu;
  auto flush_manifest = [&] { write_file_atomic(manifest_path, to_json(manifest).dump(2) + "\n"); };
  flush_manifest();

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      const UserCase& c = *todo[i];
      const std::string stem = case_file_stem(c.id);
      CaseStatus st;
      try {
        const GeneratedResponse r = run_method(c, cfg, services);
        write_file_atomic(cases_dir / (stem + ".json"), Json(r).dump(2) + "\n");
        fs::remove(cases_dir / (stem + ".failed.json"));
        st.state = CaseState::ok;
      } catch (const CaseFailure& e) {
        st = CaseStatus{CaseState::failed, e.what()};
        Json diag = e.partial();
        diag["case_id"] = c.id;
        diag["reason"] = e.what();
        write_file_atomic(cases_dir / (stem + ".failed.json"), diag.dump(2) + "\n");
      } catch (const std::exception& e) {
        st = CaseStatus{CaseState::failed, e.what()};
      }
      std::lock_guard lock(manifest_mu);
      manifest.status[c.id] = st;
      flush_manifest();
    }
  };

  {
    const int n = std::min<int>(opts.parallelism, std::max<std::size_t>(todo.size(), 1));
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }

  result.executed = todo.size();
  manifest.finished = utc_timestamp();
  flush_manifest();
  result.manifest = std::move(manifest);
  return result;
}

BatchResult run_batch(const fs::path& dataset, const MethodConfig& cfg, const Services& services,
                      const BatchOptions& opts) {
  const auto loaded = datasets::load_native(dataset);
  return run_batch(loaded.cases, dataset.string(), cfg, services, opts);
}

RunArchive load_run_archive(const fs::path& run_dir) {
  const fs::path manifest_path = run_dir / "manifest.json";
  if (!fs::is_directory(run_dir) || !fs::exists(manifest_path)) {
    throw ConfigError("not a run directory (no manifest.json): " + run_dir.string());
  }
  RunArchive archive;
  archive.manifest = manifest_from_json(read_json_file(manifest_path));
  for (const auto& [id, st] : archive.manifest.status) {
    if (st.state != CaseState::ok) continue;
    const fs::path p = run_dir / "cases" / (case_file_stem(id) + ".json");
    archive.responses.emplace(id, generated_response_from_json(read_json_file(p)));
  }
  return archive;
}

}  // namespace agora::pipeline
