// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when any
// criterion fails; SKIPPED criteria do not count as failures.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "process.hpp"
#include "skyex/analytics.hpp"
#include "skyex/http.hpp"
#include "skyex/ingest.hpp"
#include "skyex/projection.hpp"
#include "skyex/service.hpp"
#include "skyex/subspace.hpp"

using namespace skyex;
using nlohmann::json;

namespace {

enum class Verdict { pass, fail, skipped };

struct Outcome {
    Verdict verdict;
    std::string detail;
};

Outcome pass(std::string d) { return {Verdict::pass, std::move(d)}; }
Outcome fail(std::string d) { return {Verdict::fail, std::move(d)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int precision = 2) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(precision);
    os << v;
    return os.str();
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() / ("skyex_accept_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

/// A real HTTP server on an ephemeral port, running the service in-process.
struct LiveServer {
    TempDir dir;
    Service service{dir.path / "registry"};
    httplib::Server server;
    std::thread worker;
    int port = 0;

    LiveServer() {
        mount_api(server, service);
        port = server.bind_to_any_port("127.0.0.1");
        worker = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~LiveServer() {
        server.stop();
        worker.join();
    }
    httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

std::vector<oracle::Rows> random_datasets(std::size_t count, std::size_t max_n, std::size_t max_m, std::uint64_t seed,
                                          std::vector<oracle::Distribution>* dists = nullptr) {
    std::mt19937_64 rng(seed);
    std::vector<oracle::Rows> out;
    for (std::size_t t = 0; t < count; ++t) {
        const auto dist = static_cast<oracle::Distribution>(t % 3);
        const std::size_t n = 1 + rng() % max_n, m = 1 + rng() % max_m;
        out.push_back(oracle::generate(dist, n, m, rng, t % 4 == 3 ? 5 : 0));
        if (dists) dists->push_back(dist);
    }
    return out;
}

// The skyline trials are shared by the equivalence and completeness criteria.
struct SkylineTrials {
    std::vector<oracle::Rows> rows;
    std::vector<SkylineResult> results;
    double seconds = 0.0;
};

SkylineTrials run_skyline_trials() {
    SkylineTrials t;
    t.rows = random_datasets(200, 300, 6, 20240601);
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& rows : t.rows) t.results.push_back(compute_skyline(oracle::make_dataset(rows)));
    t.seconds = seconds_since(t0);
    return t;
}

Outcome skyline_equivalence(const SkylineTrials& t) {
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t points = 0;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const auto& rows = t.rows[k];
        const auto ref = oracle::brute_skyline(rows, oracle::all_dims(rows.front().size()));
        const auto& res = t.results[k];
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (res.is_skyline(r) != ref.member[r]) return fail("membership differs in trial " + std::to_string(k));
            if (res.dominators[r] != ref.dominators[r]) return fail("dominators differ in trial " + std::to_string(k));
            if (ref.member[r] && res.score(r) != ref.score[r]) return fail("score differs in trial " + std::to_string(k));
        }
        points += rows.size();
    }
    const double total = t.seconds + seconds_since(t0);
    if (total >= 30.0) return fail("took " + fmt(total) + " s");
    return pass("200 datasets, " + std::to_string(points) + " points, membership/score/dominators exact, " +
                fmt(total) + " s");
}

Outcome completeness(const SkylineTrials& t) {
    std::size_t dominated = 0;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        for (std::size_t r = 0; r < t.rows[k].size(); ++r) {
            if (t.results[k].is_skyline(r)) continue;
            ++dominated;
            if (t.results[k].dominators[r].empty())
                return fail("dominated point without skyline dominator in trial " + std::to_string(k));
        }
    }
    return pass(std::to_string(dominated) + " dominated points, each with >= 1 skyline dominator");
}

Outcome decisive_equivalence() {
    const auto datasets = random_datasets(50, 50, 5, 777);
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t points = 0;
    for (std::size_t k = 0; k < datasets.size(); ++k) {
        const auto& rows = datasets[k];
        const std::size_t m = rows.front().size();
        const auto data = oracle::make_dataset(rows);
        const auto sky = compute_skyline(data);
        for (auto p : sky.skyline) {
            ++points;
            const MembershipMap map(data, p);
            const auto set = decisive_subspaces(map, data);
            std::vector<std::uint32_t> got;
            for (auto s : set.minimal) got.push_back(s.mask());
            std::sort(got.begin(), got.end());
            if (got != oracle::brute_minimal_decisive(rows, p, m))
                return fail("minimal set differs in trial " + std::to_string(k));
            const std::uint32_t full = (1u << m) - 1;
            for (std::uint32_t b = 1; b <= full; ++b) {
                const bool decisive = is_decisive(map, Subspace(b));
                if (decisive != oracle::brute_is_decisive(rows, p, m, b))
                    return fail("decisiveness differs in trial " + std::to_string(k));
                if (!decisive) continue;
                for (std::uint32_t sup = b; sup <= full; sup = (sup + 1) | b)
                    if (!is_decisive(map, Subspace(sup))) return fail("upward closure broken");
            }
            for (auto s : set.minimal)
                for (auto d : s.dims()) {
                    const auto smaller = s.mask() & ~(1u << d);
                    if (smaller && is_decisive(map, Subspace(smaller))) return fail("non-minimal subspace reported");
                }
        }
    }
    const double secs = seconds_since(t0);
    if (secs >= 60.0) return fail("took " + fmt(secs) + " s");
    return pass("50 datasets, " + std::to_string(points) + " skyline points, lattice brute force matched, " +
                fmt(secs) + " s");
}

Outcome delta_properties() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> scale(0.001, 1000.0), shift(-1e4, 1e4);
    double worst_anti = 0.0, worst_affine = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t m = 2 + rng() % 4;
        const auto rows = oracle::generate(static_cast<oracle::Distribution>(t % 3), 20 + rng() % 80, m, rng,
                                           t % 5 == 0 ? 6 : 0);
        std::vector<Direction> dirs(m);
        for (auto& d : dirs) d = rng() % 2 ? Direction::maximize : Direction::minimize;
        auto moved = rows;
        std::vector<double> a(m), b(m);
        for (std::size_t d = 0; d < m; ++d) a[d] = scale(rng), b[d] = shift(rng);
        for (auto& r : moved)
            for (std::size_t d = 0; d < m; ++d) r[d] = a[d] * r[d] + b[d];

        const auto x = oracle::make_dataset(rows, dirs), y = oracle::make_dataset(moved, dirs);
        const auto sx = compute_skyline(x), sy = compute_skyline(y);
        if (sx.skyline != sy.skyline) return fail("skyline membership changed in transform " + std::to_string(t));
        const auto stx = attribute_stats(x, sx), sty = attribute_stats(y, sy);
        for (auto i : sx.skyline) {
            for (auto k : sx.skyline)
                for (std::size_t l = 0; l < m; ++l)
                    worst_anti = std::max(worst_anti, std::abs(standardized_diff(x, stx, i, k, l) +
                                                               standardized_diff(x, stx, k, i, l)));
            const auto dx = diff_matrix(x, stx, i), dy = diff_matrix(y, sty, i);
            if (dx.ranks != dy.ranks) return fail("ranks changed in transform " + std::to_string(t));
            for (std::size_t c = 0; c < dx.columns.size(); ++c)
                for (std::size_t l = 0; l < m; ++l) {
                    worst_affine = std::max(worst_affine, std::abs(dx.delta(c, l) - dy.delta(c, l)));
                    worst_affine = std::max(worst_affine, std::abs(dx.summary(l, c) - dy.summary(l, c)));
                }
        }
    }
    std::ostringstream detail;
    detail << "max |d(a,b)+d(b,a)| = " << worst_anti << ", max affine drift = " << worst_affine
           << " over 100 transforms; ranks and membership exact";
    if (worst_anti >= 1e-12) return fail(detail.str());
    if (worst_affine > 1e-9) return fail(detail.str());
    return pass(detail.str());
}

Outcome partition_laws() {
    std::mt19937_64 rng(9001);
    int instances = 0, attempts = 0;
    while (instances < 100 && attempts < 1000) {
        ++attempts;
        const std::size_t k = 2 + instances % 3;
        const auto rows = oracle::generate(static_cast<oracle::Distribution>(attempts % 3), 30 + rng() % 271,
                                           2 + rng() % 3, rng, attempts % 2 ? 8 : 0);
        const auto data = oracle::make_dataset(rows);
        const auto sky = compute_skyline(data);
        if (sky.skyline.size() < k) continue;
        ++instances;
        auto pool = sky.skyline;
        std::shuffle(pool.begin(), pool.end(), rng);
        const std::vector<std::size_t> sel(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
        const auto part = domination_partition(data, sky, sel);

        const auto dims = oracle::all_dims(rows.front().size());
        const auto ref = oracle::brute_skyline(rows, dims);
        std::vector<std::set<std::size_t>> dominated(k);
        std::set<std::size_t> all;
        for (std::size_t t = 0; t < k; ++t)
            for (std::size_t q = 0; q < rows.size(); ++q)
                if (!ref.member[q] && oracle::dom(rows[sel[t]], rows[q], dims)) {
                    dominated[t].insert(q);
                    all.insert(q);
                }
        if (part.cells.size() != (1u << k) - 1) return fail("wrong number of cells");
        std::set<std::size_t> seen;
        std::vector<std::size_t> sums(k, 0);
        for (const auto& [key, members] : part.cells)
            for (auto q : members) {
                if (!seen.insert(q).second) return fail("cells overlap");
                for (std::size_t t = 0; t < k; ++t) {
                    const bool in_key = (key >> t) & 1U;
                    if (dominated[t].count(q) != static_cast<std::size_t>(in_key)) return fail("cell key mismatch");
                    sums[t] += in_key;
                }
            }
        if (seen != all || part.union_size != all.size()) return fail("union differs from union of dominated sets");
        for (std::size_t t = 0; t < k; ++t)
            if (sums[t] != ref.score[sel[t]]) return fail("per-point sum differs from dominating score");
    }
    if (instances < 100) return fail("only " + std::to_string(instances) + " instances generated");

    // p=(5,1) dominates only points that q=(4,4) also dominates.
    const auto c = oracle::make_dataset({{5, 1}, {4, 4}, {3, 1}, {1, 3}, {2, 0}});
    const auto cs = compute_skyline(c);
    const std::vector<std::size_t> pq{0, 1};
    const auto cp = domination_partition(c, cs, pq);
    std::set<std::size_t> dp, dq;
    for (std::size_t r = 0; r < 5; ++r) {
        if (cs.is_skyline(r)) continue;
        if (dominates(c.row(0), c.row(r), c.all_dimensions())) dp.insert(r);
        if (dominates(c.row(1), c.row(r), c.all_dimensions())) dq.insert(r);
    }
    const bool contained = std::includes(dq.begin(), dq.end(), dp.begin(), dp.end()) && !dp.empty();
    if (!contained || !cp.cell(0b01).empty()) return fail("containment case: exclusive cell of p is not empty");
    return pass("100 instances with |S| in {2,3,4}: disjoint, union exact, sums equal scores; containment case "
                "gives an empty exclusive cell");
}

Outcome embedding() {
    std::mt19937_64 rng(31337);
    std::normal_distribution<double> noise(0.0, 1.0);
    Matrix pts(100, 5);
    std::vector<int> label(100);
    for (std::size_t i = 0; i < 100; ++i) {
        label[i] = static_cast<int>(i % 3);
        for (std::size_t d = 0; d < 5; ++d) pts(i, d) = noise(rng) + (d == i % 3 ? 20.0 : 0.0);
    }
    const auto dist = distance_matrix(pts);
    const auto cfg = EmbeddingConfig::defaults_for(100);
    const auto a = tsne_embed(dist, cfg), b = tsne_embed(dist, cfg);
    if (a.coords != b.coords) return fail("same seed gave different coordinates");

    int pure = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        std::vector<std::pair<double, std::size_t>> nn;
        for (std::size_t j = 0; j < 100; ++j)
            if (j != i) nn.push_back({std::hypot(a.coords[i][0] - a.coords[j][0], a.coords[i][1] - a.coords[j][1]), j});
        std::partial_sort(nn.begin(), nn.begin() + 5, nn.end());
        int same = 0;
        for (int t = 0; t < 5; ++t) same += label[nn[t].second] == label[i];
        pure += same >= 3;
    }

    const auto big_rows = oracle::generate(oracle::Distribution::anticorrelated, 150, 6, rng);
    Matrix big(150, 6);
    for (std::size_t r = 0; r < 150; ++r)
        for (std::size_t d = 0; d < 6; ++d) big(r, d) = big_rows[r][d];
    const auto t0 = std::chrono::steady_clock::now();
    const auto e = tsne_embed(distance_matrix(standardize(big)), EmbeddingConfig::defaults_for(150));
    const double secs = seconds_since(t0);

    bool finite = true;
    for (const auto* emb : {&a, &e})
        for (const auto& c : emb->coords) finite = finite && std::isfinite(c[0]) && std::isfinite(c[1]);

    const std::string detail = "deterministic, k-NN purity " + std::to_string(pure) + "%, finite=" +
                               (finite ? "yes" : "no") + ", 150 points in " + fmt(secs) + " s";
    if (pure < 80 || !finite || secs >= 30.0) return fail(detail);
    return pass(detail);
}

Outcome refinement_witness() {
    LiveServer live;
    auto client = live.client();
    // x ties y on a and b and loses only on c.
    const json upload{{"id", "witness"},
                      {"csv", "id,a,b,c\ny,5,5,9\nx,5,5,1\nz,1,9,1\n"},
                      {"schema", json::parse(R"({"idColumn": "id", "attributes": [
                          {"name": "a", "direction": "max"}, {"name": "b", "direction": "max"},
                          {"name": "c", "direction": "max"}]})")}};
    auto res = client.Post("/datasets", upload.dump(), "application/json");
    if (!res || res->status != 200) return fail("upload failed");
    res = client.Post("/datasets/witness/refine", "{}", "application/json");
    if (!res || res->status != 200) return fail("base refine failed");
    const auto before = json::parse(res->body)["skylineIds"];
    res = client.Post("/datasets/witness/refine", R"({"excludedAttributes": ["c"]})", "application/json");
    if (!res || res->status != 200) return fail("refine failed: " + (res ? res->body : std::string("no response")));
    const auto after = json::parse(res->body)["skylineIds"];

    const auto oracle_after = oracle::brute_skyline({{5, 5}, {5, 5}, {1, 9}}, {0, 1});
    json expected = json::array();
    for (std::size_t r = 0; r < 3; ++r)
        if (oracle_after.member[r]) expected.push_back(std::string(1, "yxz"[r]));

    const bool promoted = std::find(before.begin(), before.end(), "x") == before.end() &&
                          std::find(after.begin(), after.end(), "x") != after.end();
    const std::string detail = "skyline " + before.dump() + " -> " + after.dump() + " via POST /refine";
    if (!promoted || after != expected) return fail(detail);
    return pass(detail);
}

Outcome api_cli_parity() {
    const std::string cli = SKYEX_CLI_PATH;
    const std::filesystem::path data = SKYEX_DATA_DIR;
    LiveServer live;
    auto client = live.client();
    const json upload{{"id", "toy"},
                      {"csv", read_file(data / "toy.csv")},
                      {"schema", json::parse(read_file(data / "toy.json"))}};
    auto res = client.Post("/datasets", upload.dump(), "application/json");
    if (!res || res->status != 200) return fail("upload failed");
    res = client.Post("/datasets/toy/refine", "{}", "application/json");
    if (!res || res->status != 200) return fail("refine failed");
    const std::string base = "/snapshots/" + json::parse(res->body)["snapshotHash"].get<std::string>();

    auto run_cli = [&](std::vector<std::string> args) {
        std::vector<std::string> full{cli};
        full.insert(full.end(), args.begin(), args.end());
        full.insert(full.end(), {"--csv", (data / "toy.csv").string(), "--schema", (data / "toy.json").string()});
        return testproc::run(full).out;
    };
    struct Case {
        std::string name;
        std::function<httplib::Result()> http;
        std::vector<std::string> args;
    };
    const std::vector<Case> cases{
        {"skyline", [&] { return client.Get(base + "/skyline"); }, {"skyline"}},
        {"detail", [&] { return client.Get(base + "/points/j/detail"); }, {"decisive", "j"}},
        {"compare", [&] { return client.Post(base + "/compare", R"({"ids":["b","i","j"]})", "application/json"); },
         {"compare", "b", "i", "j"}},
        {"projection", [&] { return client.Get(base + "/projection?seed=11"); }, {"project", "--seed", "11"}},
    };
    std::string matched;
    for (const auto& c : cases) {
        const auto r = c.http();
        if (!r || r->status != 200) return fail(c.name + ": endpoint failed");
        const auto out = run_cli(c.args);
        if (out.empty() || out != r->body) return fail(c.name + ": bytes differ");
        matched += (matched.empty() ? "" : ", ") + c.name + " (" + std::to_string(out.size()) + " B)";
    }
    return pass("byte-identical: " + matched);
}

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

Outcome reproduction() {
    const auto nba_csv = env("SKYEX_NBA_CSV"), nba_schema = env("SKYEX_NBA_SCHEMA");
    const auto city_csv = env("SKYEX_NUMBEO_CSV"), city_schema = env("SKYEX_NUMBEO_SCHEMA");
    if (!(nba_csv && nba_schema) && !(city_csv && city_schema))
        return {Verdict::skipped,
                "set SKYEX_NBA_CSV/SKYEX_NBA_SCHEMA and/or SKYEX_NUMBEO_CSV/SKYEX_NUMBEO_SCHEMA[/SKYEX_NUMBEO_CONFIG]"};
    std::string detail;
    bool ok = true;
    if (nba_csv && nba_schema) {
        const Snapshot snap(load_csv(*nba_csv, *nba_schema));
        const auto hit = search_point(snap.data(), snap.skyline(), env("SKYEX_NBA_PLAYER").value_or("Lamar Odom"));
        const auto phi = snap.skyline().is_skyline(hit.row) ? snap.skyline().score(hit.row) : 0;
        ok = ok && phi == 183;
        detail += "NBA: " + std::to_string(snap.data().size()) + " players, phi = " + std::to_string(phi) +
                  " (expected 183)";
    }
    if (city_csv && city_schema) {
        auto data = load_csv(*city_csv, *city_schema);
        if (const auto cfg = env("SKYEX_NUMBEO_CONFIG"))
            data = apply_query_config(data, parse_query_config(json::parse(read_file(*cfg))));
        const auto size = compute_skyline(data).skyline.size();
        ok = ok && size == 62;
        detail += std::string(detail.empty() ? "" : "; ") + "Numbeo: " + std::to_string(size) +
                  " skyline cities (expected 62)";
    }
    return {ok ? Verdict::pass : Verdict::fail, detail};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](const std::string& name, const std::function<Outcome()>& check) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = fail(std::string("threw: ") + e.what());
        }
        const char* tag = o.verdict == Verdict::pass ? "PASS" : o.verdict == Verdict::fail ? "FAIL" : "SKIPPED";
        failures += o.verdict == Verdict::fail;
        std::cout << tag << "  " << name << ": " << o.detail << std::endl;
    };

    const auto trials = run_skyline_trials();
    report("skyline oracle equivalence", [&] { return skyline_equivalence(trials); });
    report("completeness invariant", [&] { return completeness(trials); });
    report("decisive subspace equivalence", decisive_equivalence);
    report("standardized difference properties", delta_properties);
    report("domination partition laws", partition_laws);
    report("embedding", embedding);
    report("refinement witness", refinement_witness);
    report("API/CLI parity", api_cli_parity);
    report("dataset reproduction (optional)", reproduction);
    return failures == 0 ? 0 : 1;
}
