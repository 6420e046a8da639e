#include "skyex/service.hpp"

#include <charconv>
#include <fstream>
#include <regex>

namespace skyex {

using nlohmann::json;

namespace {

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        const auto end = path.find('/', start);
        const auto part = path.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        if (!part.empty()) parts.emplace_back(part);
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return parts;
}

std::optional<std::string> param(const Request& req, const std::string& key) {
    const auto it = req.query.find(key);
    if (it == req.query.end()) return std::nullopt;
    return it->second;
}

template <typename T>
T parse_unsigned(const std::string& text, const char* what) {
    T v{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size())
        throw Error(ErrorCode::parse_error, std::string("query parameter '") + what + "' must be a non-negative integer");
    return v;
}

json parse_body(const std::string& body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::parse_error, "request body is not valid JSON");
    return j;
}

std::vector<std::string> string_array(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_array())
        throw Error(ErrorCode::parse_error, std::string("request body needs an array '") + key + "'");
    std::vector<std::string> out;
    for (const auto& v : j[key]) {
        if (!v.is_string()) throw Error(ErrorCode::parse_error, std::string("'") + key + "' must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(ErrorCode::conflict, "cannot write '" + path.string() + "'");
}

[[noreturn]] void no_route(const Request& req) {
    throw Error(ErrorCode::not_found, "no route for " + req.method + " " + req.path);
}

}  // namespace

Service::Service(std::filesystem::path registry_dir) : registry_(std::move(registry_dir)) {}

Response Service::handle(const Request& req) {
    try {
        return {200, route(req)};
    } catch (const Error& e) {
        return {http_status(e.code()), to_body(error_json(e))};
    } catch (const json::exception& e) {
        const Error err(ErrorCode::parse_error, std::string("malformed JSON: ") + e.what());
        return {http_status(err.code()), to_body(error_json(err))};
    } catch (const std::exception& e) {
        const Error err(ErrorCode::contract_violation, std::string("internal error: ") + e.what());
        return {500, to_body(error_json(err))};
    }
}

std::string Service::route(const Request& req) {
    const auto parts = split_path(req.path);
    const bool get = req.method == "GET";
    const bool post = req.method == "POST";

    if (parts.size() == 1 && parts[0] == "datasets") {
        if (get) {
            ojson list = ojson::array();
            for (const auto& d : registry_.list()) list.push_back(descriptor_to_json(d));
            return to_body(list);
        }
        if (post) {
            const auto body = parse_body(req.body);
            if (!body.is_object() || !body.contains("id") || !body["id"].is_string() || !body.contains("csv") ||
                !body["csv"].is_string() || !body.contains("schema"))
                throw Error(ErrorCode::parse_error, "upload needs string 'id', string 'csv' and object 'schema'");
            const auto id = body["id"].get<std::string>();
            const auto name = body.contains("name") && body["name"].is_string() ? body["name"].get<std::string>() : id;
            return to_body(ojson(descriptor_to_json(upload(id, name, body["csv"].get<std::string>(), body["schema"]))));
        }
        no_route(req);
    }

    if (parts.size() == 3 && parts[0] == "datasets" && parts[2] == "refine" && post) {
        const auto cfg = req.body.empty() ? QueryConfig{} : parse_query_config(parse_body(req.body));
        const auto snap = refine(parts[1], cfg);
        ojson j;
        j["datasetId"] = parts[1];
        j["snapshotHash"] = snap->hash();
        j["skylineSize"] = snap->skyline().skyline.size();
        const auto body = snap->skyline_body();
        j["skylineIds"] = body["skylineIds"];
        j["dominatingScore"] = body["dominatingScore"];
        return to_body(j);
    }

    if (parts.size() >= 3 && parts[0] == "snapshots") {
        const auto snap = snapshot(parts[1]);
        const auto& op = parts[2];
        if (parts.size() == 3 && op == "skyline" && get) return to_body(snap->skyline_body());
        if (parts.size() == 3 && op == "projection" && get) {
            const auto seed = param(req, "seed");
            return snap->projection_body(seed ? parse_unsigned<std::uint64_t>(*seed, "seed") : default_projection_seed,
                                         param(req, "focus"));
        }
        if (parts.size() == 5 && op == "points" && parts[4] == "detail" && get)
            return to_body(snap->detail_body(parts[3]));
        if (parts.size() == 3 && op == "compare" && post)
            return to_body(snap->compare_body(string_array(parse_body(req.body), "ids")));
        if (parts.size() == 3 && op == "search" && get) {
            const auto q = param(req, "q");
            if (!q) throw Error(ErrorCode::parse_error, "search needs query parameter 'q'");
            return to_body(snap->search_body(*q));
        }
        if (parts.size() == 5 && op == "attributes" && parts[4] == "distribution" && get) {
            const auto bins = param(req, "bins");
            return to_body(snap->distribution_body(
                parts[3], bins ? parse_unsigned<std::size_t>(*bins, "bins") : default_histogram_bins));
        }
        if (parts.size() == 3 && op == "subspace" && post)
            return to_body(snap->subspace_body(string_array(parse_body(req.body), "attributes")));
    }
    no_route(req);
}

DatasetDescriptor Service::upload(const std::string& id, const std::string& name, std::string_view csv,
                                  const json& schema_json) {
    static const std::regex safe_id("[A-Za-z0-9_.-]+");
    if (!std::regex_match(id, safe_id) || id == "." || id == "..")
        throw Error(ErrorCode::config_error, "dataset id must match [A-Za-z0-9_.-]+");
    if (registry_.find(id)) throw Error(ErrorCode::conflict, "dataset id '" + id + "' already registered");

    const auto schema = parse_schema(schema_json);
    const auto data = load_csv_text(csv, schema);

    const auto dir = registry_.dir() / id;
    std::filesystem::create_directories(dir);
    DatasetDescriptor d{id, name, dir / "data.csv", dir / "schema.json", data.size(), data.dimension_count()};
    write_text(d.csv_path, csv);
    write_text(d.schema_path, schema_to_json(schema).dump(2));
    registry_.add(d);
    return d;
}

std::shared_ptr<const Snapshot> Service::register_snapshot(Dataset data) {
    {
        std::shared_lock lock(mutex_);
        if (const auto it = snapshots_.find(data.hash()); it != snapshots_.end()) return it->second;
    }
    auto snap = std::make_shared<const Snapshot>(std::move(data));
    std::unique_lock lock(mutex_);
    return snapshots_.emplace(snap->hash(), snap).first->second;
}

const Dataset& Service::base_dataset(const std::string& dataset_id) {
    {
        std::shared_lock lock(mutex_);
        if (const auto it = bases_.find(dataset_id); it != bases_.end()) return *it->second;
    }
    const auto d = registry_.find(dataset_id);
    if (!d) throw Error(ErrorCode::not_found, "unknown dataset '" + dataset_id + "'");
    auto data = std::make_shared<const Dataset>(load_csv(d->csv_path, d->schema_path));
    std::unique_lock lock(mutex_);
    return *bases_.emplace(dataset_id, std::move(data)).first->second;
}

std::shared_ptr<const Snapshot> Service::refine(const std::string& dataset_id, const QueryConfig& cfg) {
    return register_snapshot(apply_query_config(base_dataset(dataset_id), cfg));
}

std::shared_ptr<const Snapshot> Service::snapshot(const std::string& hash) const {
    std::shared_lock lock(mutex_);
    const auto it = snapshots_.find(hash);
    if (it == snapshots_.end()) throw Error(ErrorCode::not_found, "unknown snapshot '" + hash + "'");
    return it->second;
}

}  // namespace skyex
