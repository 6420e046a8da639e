// Batch and server entry point. Every subcommand prints exactly the body the
// matching HTTP endpoint returns.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "skyex/http.hpp"
#include "skyex/ingest.hpp"
#include "skyex/service.hpp"

namespace {

using skyex::ojson;

struct Common {
    std::string csv;
    std::string schema;
    std::string config;
    std::uint64_t seed = skyex::default_projection_seed;
    std::string out = "json";
    std::string out_file;
};

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

std::string num(const ojson& v) { return v.dump(); }

// CSV renderings of the JSON bodies, one table per subcommand.
std::string skyline_csv(const ojson& j) {
    std::string out = "id,dominating_score\n";
    for (const auto& id : j["skylineIds"])
        out += csv_escape(id.get<std::string>()) + "," + num(j["dominatingScore"][id.get<std::string>()]) + "\n";
    return out;
}

std::string detail_csv(const ojson& j) {
    std::string out = "subspace\n";
    for (const auto& sub : j["minimalDecisive"]) {
        std::string joined;
        for (const auto& a : sub) joined += (joined.empty() ? "" : ";") + a.get<std::string>();
        out += csv_escape(joined) + "\n";
    }
    return out;
}

std::string compare_csv(const ojson& j) {
    std::string out = "members,exclusive,count,point_ids\n";
    for (const auto& c : j["cells"]) {
        std::string members, points;
        for (const auto& m : c["members"]) members += (members.empty() ? "" : ";") + m.get<std::string>();
        for (const auto& p : c["pointIds"]) points += (points.empty() ? "" : ";") + p.get<std::string>();
        out += csv_escape(members) + "," + (c["exclusive"].get<bool>() ? "true" : "false") + "," +
               std::to_string(c["pointIds"].size()) + "," + csv_escape(points) + "\n";
    }
    return out;
}

std::string projection_csv(const ojson& j) {
    std::string out = "id,x,y,inner_score\n";
    for (std::size_t k = 0; k < j["coords"].size(); ++k) {
        const auto& c = j["coords"][k];
        out += csv_escape(c["id"].get<std::string>()) + "," + num(c["x"]) + "," + num(c["y"]) + "," +
               num(j["glyphs"][k]["innerScore"]) + "\n";
    }
    return out;
}

std::string distribution_csv(const ojson& j) {
    std::string out = "bin,lo,hi,count\n";
    const double lo = j["lo"].get<double>(), hi = j["hi"].get<double>();
    const auto bins = j["counts"].size();
    for (std::size_t b = 0; b < bins; ++b) {
        const double width = (hi - lo) / static_cast<double>(bins);
        out += std::to_string(b) + "," + num(lo + width * static_cast<double>(b)) + "," +
               num(b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1)) + "," + num(j["counts"][b]) + "\n";
    }
    return out;
}

std::string ids_csv(const ojson& j, const char* key) {
    std::string out = "id\n";
    for (const auto& id : j[key]) out += csv_escape(id.get<std::string>()) + "\n";
    return out;
}

skyex::Snapshot load_snapshot(const Common& c) {
    auto data = skyex::load_csv(c.csv, c.schema);
    if (!c.config.empty()) {
        const auto j = nlohmann::json::parse(skyex::read_file(c.config), nullptr, false);
        if (j.is_discarded()) throw skyex::Error(skyex::ErrorCode::parse_error, "query config is not valid JSON");
        data = skyex::apply_query_config(data, skyex::parse_query_config(j));
    }
    return skyex::Snapshot(std::move(data));
}

void emit(const Common& c, const std::string& json_body, const std::string& csv_body) {
    const std::string& text = c.out == "csv" ? csv_body : json_body;
    if (c.out_file.empty()) {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(c.out_file, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw skyex::Error(skyex::ErrorCode::conflict, "cannot write '" + c.out_file + "'");
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--csv", c.csv, "Data CSV file")->required();
    sub->add_option("--schema", c.schema, "Schema JSON file")->required();
    sub->add_option("--config", c.config, "Query config JSON file");
    sub->add_option("--seed", c.seed, "Projection seed");
    sub->add_option("--out", c.out, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out-file", c.out_file, "Write output here instead of standard output");
}

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : std::move(fallback);
}

int serve(const std::string& registry_dir, const std::string& host, int port, const std::string& static_dir) {
    skyex::Service service(registry_dir);
    httplib::Server server;
    if (!skyex::mount_static(server, static_dir)) {
        std::cerr << "static directory not found: " << static_dir << "\n";
        return 1;
    }
    skyex::mount_api(server, service);
    std::cerr << "listening on " << host << ":" << port << " (registry " << registry_dir << ")\n";
    return server.listen(host, port) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Skyline analytics: skylines, decisive subspaces, comparisons and projections"};
    app.require_subcommand(1);

    Common c;
    std::string id, attribute, query;
    std::vector<std::string> ids, attributes;
    std::size_t bins = skyex::default_histogram_bins;
    std::optional<std::string> focus;

    auto* sky = app.add_subcommand("skyline", "Full-space skyline with dominating scores");
    add_common(sky, c);
    auto* dec = app.add_subcommand("decisive", "Detail of one skyline point, including minimal decisive subspaces");
    add_common(dec, c);
    dec->add_option("id", id, "Skyline point id")->required();
    auto* cmp = app.add_subcommand("compare", "Domination partition of 2 to 4 skyline points");
    add_common(cmp, c);
    cmp->add_option("ids", ids, "Skyline point ids")->required();
    auto* prj = app.add_subcommand("project", "t-SNE layout and glyph payloads of the skyline");
    add_common(prj, c);
    prj->add_option("--focus", focus, "Skyline point to compare every glyph against");
    auto* dst = app.add_subcommand("distribution", "Value histogram of one attribute");
    add_common(dst, c);
    dst->add_option("attribute", attribute, "Attribute name")->required();
    dst->add_option("--bins", bins, "Number of bins")->check(CLI::PositiveNumber);
    auto* src = app.add_subcommand("search", "Find a point by id or label");
    add_common(src, c);
    src->add_option("query", query, "Id or label")->required();
    auto* sub = app.add_subcommand("subspace", "Skyline of a subspace");
    add_common(sub, c);
    sub->add_option("attributes", attributes, "Attribute names")->required();

    std::string registry_dir = env_or("SKYEX_REGISTRY", "registry");
    std::string host = env_or("SKYEX_HOST", "127.0.0.1");
    std::string static_dir = env_or("SKYEX_STATIC_DIR", "");
    int port = std::atoi(env_or("SKYEX_PORT", "8080").c_str());
    auto* srv = app.add_subcommand("serve", "Run the HTTP JSON service");
    srv->add_option("--registry", registry_dir, "Registry directory (env SKYEX_REGISTRY)");
    srv->add_option("--host", host, "Bind address (env SKYEX_HOST)");
    srv->add_option("--port", port, "Port (env SKYEX_PORT)");
    srv->add_option("--static", static_dir, "Directory served at / (env SKYEX_STATIC_DIR)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (srv->parsed()) return serve(registry_dir, host, port, static_dir);

        const auto snap = load_snapshot(c);
        if (sky->parsed()) {
            const auto j = snap.skyline_body();
            emit(c, skyex::to_body(j), skyline_csv(j));
        } else if (dec->parsed()) {
            const auto j = snap.detail_body(id);
            emit(c, skyex::to_body(j), detail_csv(j));
        } else if (cmp->parsed()) {
            const auto j = snap.compare_body(ids);
            emit(c, skyex::to_body(j), compare_csv(j));
        } else if (prj->parsed()) {
            const auto body = snap.projection_body(c.seed, focus);
            emit(c, body, projection_csv(ojson::parse(body)));
        } else if (dst->parsed()) {
            const auto j = snap.distribution_body(attribute, bins);
            emit(c, skyex::to_body(j), distribution_csv(j));
        } else if (src->parsed()) {
            const auto j = snap.search_body(query);
            std::string csv = "kind,id,dominators\n" + j["kind"].get<std::string>() + "," +
                              csv_escape(j["id"].get<std::string>()) + ",";
            std::string doms;
            for (const auto& d : j["dominators"]) doms += (doms.empty() ? "" : ";") + d.get<std::string>();
            emit(c, skyex::to_body(j), csv + csv_escape(doms) + "\n");
        } else if (sub->parsed()) {
            const auto j = snap.subspace_body(attributes);
            emit(c, skyex::to_body(j), ids_csv(j, "skylineIds"));
        }
    } catch (const skyex::Error& e) {
        std::cerr << skyex::to_body(skyex::error_json(e));
        return 2;
    } catch (const std::exception& e) {
        std::cerr << skyex::to_body(skyex::error_json(
            skyex::Error(skyex::ErrorCode::contract_violation, std::string("internal error: ") + e.what())));
        return 3;
    }
    return 0;
}
