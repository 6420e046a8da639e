#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skyex/analytics.hpp"
#include "skyex/dataset.hpp"
#include "skyex/error.hpp"
#include "skyex/ingest.hpp"
#include "skyex/registry.hpp"
#include "skyex/skyline.hpp"

namespace skyex {

using ojson = nlohmann::ordered_json;

/// Serialized body: compact JSON plus a trailing newline. Every endpoint and
/// CLI subcommand goes through this so their bytes agree.
std::string to_body(const ojson& j);

ojson error_json(const Error& e);
int http_status(ErrorCode code);

/// An immutable dataset with its full-space skyline and attribute statistics.
/// Body builders are pure functions of the snapshot and their arguments; the
/// projection is cached per (seed, focus) since it is the only slow one.
class Snapshot {
public:
    explicit Snapshot(Dataset data, std::size_t bins = default_histogram_bins);

    const Dataset& data() const noexcept { return data_; }
    const SkylineResult& skyline() const noexcept { return skyline_; }
    const AttributeStats& stats() const noexcept { return stats_; }
    const std::string& hash() const noexcept { return data_.hash(); }

    ojson skyline_body() const;
    ojson detail_body(std::string_view id) const;
    ojson compare_body(const std::vector<std::string>& ids) const;
    std::string projection_body(std::uint64_t seed, const std::optional<std::string>& focus = std::nullopt) const;
    ojson distribution_body(std::string_view attribute, std::size_t bins) const;
    ojson search_body(std::string_view query) const;
    ojson subspace_body(const std::vector<std::string>& attributes) const;

private:
    std::size_t skyline_row(std::string_view id) const;

    Dataset data_;
    SkylineResult skyline_;
    AttributeStats stats_;
    mutable std::mutex projection_mutex_;
    mutable std::map<std::pair<std::uint64_t, std::string>, std::string> projections_;
};

struct Request {
    std::string method;
    std::string path;
    std::multimap<std::string, std::string> query;
    std::string body;
};

struct Response {
    int status = 200;
    std::string body;
};

inline constexpr std::uint64_t default_projection_seed = 42;

/// Transport-independent HTTP JSON API. The httplib server in the CLI only
/// forwards requests here.
class Service {
public:
    explicit Service(std::filesystem::path registry_dir);

    Response handle(const Request& req);

    /// Stores CSV and schema under the registry directory and registers them.
    DatasetDescriptor upload(const std::string& id, const std::string& name, std::string_view csv,
                             const nlohmann::json& schema);
    std::shared_ptr<const Snapshot> refine(const std::string& dataset_id, const QueryConfig& cfg);
    std::shared_ptr<const Snapshot> snapshot(const std::string& hash) const;
    Registry& registry() noexcept { return registry_; }

private:
    std::string route(const Request& req);
    std::shared_ptr<const Snapshot> register_snapshot(Dataset data);
    const Dataset& base_dataset(const std::string& dataset_id);

    Registry registry_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<const Snapshot>> snapshots_;
    std::map<std::string, std::shared_ptr<const Dataset>> bases_;
};

}  // namespace skyex
