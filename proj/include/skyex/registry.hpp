#pragma once

#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace skyex {

struct DatasetDescriptor {
    std::string id;
    std::string name;
    std::filesystem::path csv_path;
    std::filesystem::path schema_path;
    std::size_t row_count = 0;
    std::size_t attr_count = 0;

    friend bool operator==(const DatasetDescriptor&, const DatasetDescriptor&) = default;
};

nlohmann::ordered_json descriptor_to_json(const DatasetDescriptor& d);
DatasetDescriptor descriptor_from_json(const nlohmann::json& j);

/// Dataset index persisted as `index.json` inside a directory. All writers
/// go through one mutex; the file is replaced atomically on every add.
class Registry {
public:
    explicit Registry(std::filesystem::path dir);

    const std::filesystem::path& dir() const noexcept { return dir_; }
    std::vector<DatasetDescriptor> list() const;
    std::optional<DatasetDescriptor> find(const std::string& id) const;
    /// Throws conflict when the id is taken.
    std::vector<DatasetDescriptor> add(const DatasetDescriptor& d);

private:
    std::vector<DatasetDescriptor> read_index() const;
    void write_index(const std::vector<DatasetDescriptor>& all) const;

    std::filesystem::path dir_;
    mutable std::mutex mutex_;
};

}  // namespace skyex
