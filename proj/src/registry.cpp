#include "skyex/registry.hpp"

#include <fstream>

#include "skyex/error.hpp"
#include "skyex/ingest.hpp"

namespace skyex {

using nlohmann::json;

nlohmann::ordered_json descriptor_to_json(const DatasetDescriptor& d) {
    return {{"id", d.id},
            {"name", d.name},
            {"csvPath", d.csv_path.string()},
            {"schemaPath", d.schema_path.string()},
            {"rowCount", d.row_count},
            {"attrCount", d.attr_count}};
}

DatasetDescriptor descriptor_from_json(const json& j) {
    try {
        DatasetDescriptor d;
        d.id = j.at("id").get<std::string>();
        d.name = j.at("name").get<std::string>();
        d.csv_path = j.at("csvPath").get<std::string>();
        d.schema_path = j.at("schemaPath").get<std::string>();
        d.row_count = j.at("rowCount").get<std::size_t>();
        d.attr_count = j.at("attrCount").get<std::size_t>();
        return d;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("malformed dataset descriptor: ") + e.what());
    }
}

Registry::Registry(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::vector<DatasetDescriptor> Registry::read_index() const {
    const auto path = dir_ / "index.json";
    if (!std::filesystem::exists(path)) return {};
    const json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_array()) throw Error(ErrorCode::parse_error, "registry index is corrupt");
    std::vector<DatasetDescriptor> out;
    for (const auto& d : j) out.push_back(descriptor_from_json(d));
    return out;
}

void Registry::write_index(const std::vector<DatasetDescriptor>& all) const {
    auto j = nlohmann::ordered_json::array();
    for (const auto& d : all) j.push_back(descriptor_to_json(d));
    const auto tmp = dir_ / "index.json.tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << j.dump(2) << '\n';
        if (!out) throw Error(ErrorCode::conflict, "cannot write registry index");
    }
    std::filesystem::rename(tmp, dir_ / "index.json");
}

std::vector<DatasetDescriptor> Registry::list() const {
    std::lock_guard lock(mutex_);
    return read_index();
}

std::optional<DatasetDescriptor> Registry::find(const std::string& id) const {
    for (auto& d : list())
        if (d.id == id) return d;
    return std::nullopt;
}

std::vector<DatasetDescriptor> Registry::add(const DatasetDescriptor& d) {
    std::lock_guard lock(mutex_);
    auto all = read_index();
    for (const auto& existing : all)
        if (existing.id == d.id) throw Error(ErrorCode::conflict, "dataset id '" + d.id + "' already registered");
    all.push_back(d);
    write_index(all);
    return all;
}

}  // namespace skyex
