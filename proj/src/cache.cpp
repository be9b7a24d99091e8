#include "laudit/cache.hpp"

#include "laudit/errors.hpp"
#include "laudit/hashing.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace laudit::gateway {

std::string cache_key(std::string_view backend_kind, std::string_view model_id, std::string_view op,
                      const nlohmann::json& args) {
    // nlohmann::json objects keep keys sorted, so dump() is canonical.
    nlohmann::json record = {
        {"kind", backend_kind}, {"model_id", model_id}, {"op", op}, {"args", args}};
    return sha256_hex(record.dump());
}

std::optional<nlohmann::json> MemoryCache::get(const std::string& key) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return std::optional<nlohmann::json>(std::in_place, it->second);
}

void MemoryCache::put(const std::string& key, const nlohmann::json& value) {
    std::unique_lock lock(mutex_);
    entries_.insert_or_assign(key, value);
}

std::size_t MemoryCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

DiskCache::DiskCache(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
}

std::filesystem::path DiskCache::path_for(const std::string& key) const {
    return root_ / key.substr(0, 2) / (key + ".json");
}

std::optional<nlohmann::json> DiskCache::get(const std::string& key) const {
    if (auto hit = memory_.get(key)) return hit;
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        auto record = nlohmann::json::parse(buf.str());
        if (!record.contains("value")) return std::nullopt;
        memory_.put(key, record["value"]);
        return record["value"];
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;  // torn or foreign file: treat as a miss
    }
}

void DiskCache::put(const std::string& key, const nlohmann::json& value) {
    memory_.put(key, value);
    const auto target = path_for(key);
    std::filesystem::create_directories(target.parent_path());
    static std::atomic<std::uint64_t> counter{0};
    std::ostringstream tmp_name;
    tmp_name << key << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.' << counter++;
    const auto tmp = target.parent_path() / tmp_name.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write cache record " + tmp.string());
        out << nlohmann::json{{"key", key}, {"value", value}}.dump();
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace laudit::gateway
