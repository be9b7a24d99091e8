#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

namespace laudit::gateway {

/// Content-addressed store of backend responses.
///
/// Keys are SHA-256 digests over the canonical JSON of
/// {kind, model_id, op, args}; see cache_key().
class ResponseCache {
public:
    virtual ~ResponseCache() = default;
    virtual std::optional<nlohmann::json> get(const std::string& key) const = 0;
    virtual void put(const std::string& key, const nlohmann::json& value) = 0;
};

std::string cache_key(std::string_view backend_kind, std::string_view model_id, std::string_view op,
                      const nlohmann::json& args);

class MemoryCache final : public ResponseCache {
public:
    std::optional<nlohmann::json> get(const std::string& key) const override;
    void put(const std::string& key, const nlohmann::json& value) override;
    std::size_t size() const;

private:
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, nlohmann::json> entries_;
};

/// One JSON record per key under `root/<first two hex digits>/<key>.json`.
/// Writes go to a temporary file and are renamed into place, so readers
/// never observe a partial record. An in-memory layer fronts the disk.
class DiskCache final : public ResponseCache {
public:
    explicit DiskCache(std::filesystem::path root);

    std::optional<nlohmann::json> get(const std::string& key) const override;
    void put(const std::string& key, const nlohmann::json& value) override;
    const std::filesystem::path& root() const noexcept { return root_; }

private:
    std::filesystem::path path_for(const std::string& key) const;

    std::filesystem::path root_;
    mutable MemoryCache memory_;
};

}  // namespace laudit::gateway
