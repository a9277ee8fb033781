#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "agora/gateway.hpp"

namespace agora::gateway {

namespace fs = std::filesystem;

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

fs::path ResponseCache::path_for(const std::string& key) const {
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<ChatResponse> ResponseCache::load(const std::string& key) const {
  const fs::path p = path_for(key);
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    const Json j = Json::parse(in);
    return chat_response_from_json(j.at("response"));
  } catch (const std::exception&) {
    // A corrupt entry is treated as a miss and overwritten on the next store.
    return std::nullopt;
  }
}

void ResponseCache::store(const std::string& key, const ChatRequest& req, const ChatResponse& resp) const {
  static std::atomic<std::uint64_t> counter{0};
  const fs::path target = path_for(key);
  fs::create_directories(target.parent_path());

  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id() << '.' << counter.fetch_add(1);
  const fs::path tmp = target.string() + suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write cache entry " + tmp.string());
    const Json entry{{"request", to_json(req)}, {"response", to_json(resp)}, {"timestamp", utc_timestamp()}};
    out << entry.dump(2) << '\n';
    if (!out) throw Error("cannot write cache entry " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace agora::gateway
