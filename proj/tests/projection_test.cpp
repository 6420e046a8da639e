#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "skyex/error.hpp"
#include "skyex/projection.hpp"

using namespace skyex;

namespace {

Matrix to_matrix(const oracle::Rows& rows) {
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
}

double dist2(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::not_found;
}

}  // namespace

TEST_CASE("standardize") {
    auto z = standardize(to_matrix({{1, 4, 1}, {3, 4, 2}}));
    CHECK(z(0, 0) == doctest::Approx(-1.0));
    CHECK(z(1, 0) == doctest::Approx(1.0));
    CHECK(z(0, 1) == 0.0);
    CHECK(z(1, 1) == 0.0);

    z = standardize(to_matrix({{1}, {2}, {3}}));
    CHECK(z(0, 0) == doctest::Approx(-1.2247).epsilon(1e-4));
    CHECK(z(1, 0) == doctest::Approx(0.0));
    CHECK(z(2, 0) == doctest::Approx(1.2247).epsilon(1e-4));

    CHECK(code_of([] { standardize(to_matrix({{1, 2}})); }) == ErrorCode::contract_violation);

    std::mt19937_64 rng(1);
    const auto rows = oracle::generate(oracle::Distribution::independent, 50, 4, rng);
    z = standardize(to_matrix(rows));
    for (std::size_t c = 0; c < 4; ++c) {
        double sum = 0, ss = 0;
        for (std::size_t r = 0; r < 50; ++r) sum += z(r, c), ss += z(r, c) * z(r, c);
        CHECK(std::abs(sum / 50) < 1e-12);
        CHECK(ss / 50 == doctest::Approx(1.0));
    }
}

TEST_CASE("distance matrix") {
    const auto d = distance_matrix(to_matrix({{0, 0}, {3, 4}, {0, 0}}));
    CHECK(d(0, 1) == 5.0);
    CHECK(d(0, 2) == 0.0);

    std::mt19937_64 rng(2);
    const auto rows = oracle::generate(oracle::Distribution::independent, 40, 5, rng);
    const auto e = distance_matrix(to_matrix(rows));
    for (std::size_t i = 0; i < 40; ++i) {
        CHECK(e(i, i) == 0.0);
        for (std::size_t j = 0; j < 40; ++j) {
            CHECK(e(i, j) == e(j, i));
            for (std::size_t k = 0; k < 40; k += 7) CHECK(e(i, j) <= e(i, k) + e(k, j) + 1e-12);
        }
    }
}

TEST_CASE("embedding config defaults") {
    CHECK(EmbeddingConfig::defaults_for(100).perplexity == 30.0);
    CHECK(EmbeddingConfig::defaults_for(31).perplexity == 10.0);
    CHECK(EmbeddingConfig::defaults_for(3).perplexity == 1.0);
    const auto cfg = EmbeddingConfig::defaults_for(50, 7);
    CHECK(cfg.seed == 7);
    CHECK(cfg.iterations == 1000);
    CHECK(cfg.learning_rate == 200.0);
}

TEST_CASE("tsne rejects bad input") {
    const auto d2 = distance_matrix(to_matrix({{0, 0}, {1, 1}}));
    CHECK(code_of([&] { tsne_embed(d2, EmbeddingConfig::defaults_for(2)); }) == ErrorCode::contract_violation);
    const auto d5 = distance_matrix(to_matrix({{0}, {1}, {2}, {3}, {4}}));
    EmbeddingConfig cfg = EmbeddingConfig::defaults_for(5);
    cfg.perplexity = 5;
    CHECK(code_of([&] { tsne_embed(d5, cfg); }) == ErrorCode::config_error);
    cfg.perplexity = 1;
    cfg.learning_rate = 0;
    CHECK(code_of([&] { tsne_embed(d5, cfg); }) == ErrorCode::config_error);
}

TEST_CASE("tsne determinism and finiteness") {
    std::mt19937_64 rng(4);
    const auto rows = oracle::generate(oracle::Distribution::anticorrelated, 40, 4, rng);
    const auto d = distance_matrix(standardize(to_matrix(rows)));
    auto cfg = EmbeddingConfig::defaults_for(40);
    cfg.iterations = 400;
    const auto a = tsne_embed(d, cfg), b = tsne_embed(d, cfg);
    CHECK(a.coords == b.coords);
    CHECK(a.kl_divergence == b.kl_divergence);
    for (const auto& c : a.coords) CHECK((std::isfinite(c[0]) && std::isfinite(c[1])));
    cfg.seed = 43;
    CHECK(tsne_embed(d, cfg).coords != a.coords);

    const auto tiny = tsne_embed(distance_matrix(to_matrix({{0}, {1}, {5}})), EmbeddingConfig::defaults_for(3));
    for (const auto& c : tiny.coords) CHECK((std::isfinite(c[0]) && std::isfinite(c[1])));
}

TEST_CASE("tsne separates clusters") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 1.0);
    oracle::Rows rows;
    std::vector<int> cluster;
    for (int i = 0; i < 100; ++i) {
        const int c = i % 3;
        std::vector<double> p(5);
        for (std::size_t d = 0; d < 5; ++d) p[d] = noise(rng) + (d == static_cast<std::size_t>(c) ? 20.0 : 0.0);
        rows.push_back(p);
        cluster.push_back(c);
    }
    auto cfg = EmbeddingConfig::defaults_for(100);
    cfg.record_kl = true;
    const auto emb = tsne_embed(distance_matrix(to_matrix(rows)), cfg);

    int pure = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        std::vector<std::pair<double, std::size_t>> nn;
        for (std::size_t j = 0; j < 100; ++j)
            if (j != i) nn.push_back({dist2(emb.coords[i], emb.coords[j]), j});
        std::partial_sort(nn.begin(), nn.begin() + 5, nn.end());
        int same = 0;
        for (int t = 0; t < 5; ++t) same += cluster[nn[t].second] == cluster[i];
        pure += same >= 3;
    }
    CHECK(pure >= 80);

    REQUIRE(emb.kl_trace.size() == cfg.iterations);
    for (std::size_t it = cfg.iterations - 100; it < cfg.iterations; ++it)
        CHECK(emb.kl_trace[it] <= emb.kl_trace[it - 1] + 1e-3);
    CHECK(emb.kl_divergence <= emb.kl_trace.back() + 1e-3);
}

TEST_CASE("duplicated rows embed close together") {
    std::mt19937_64 rng(12);
    auto rows = oracle::generate(oracle::Distribution::independent, 30, 4, rng);
    rows.push_back(rows[3]);
    rows.push_back(rows[17]);
    const auto emb = tsne_embed(distance_matrix(to_matrix(rows)), EmbeddingConfig::defaults_for(rows.size()));
    std::vector<double> all;
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j) all.push_back(dist2(emb.coords[i], emb.coords[j]));
    std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(all.size() / 2), all.end());
    const double median = all[all.size() / 2];
    CHECK(dist2(emb.coords[3], emb.coords[30]) < median);
    CHECK(dist2(emb.coords[17], emb.coords[31]) < median);
}

TEST_CASE("embed skyline") {
    std::mt19937_64 rng(6);
    const auto data = oracle::make_dataset(oracle::generate(oracle::Distribution::anticorrelated, 60, 3, rng));
    const auto sky = compute_skyline(data);
    const auto emb = embed_skyline(data, sky, EmbeddingConfig::defaults_for(sky.skyline.size()));
    CHECK(emb.coords.size() == sky.skyline.size());
}

TEST_CASE("glyph payload") {
    const auto five = oracle::five_point_example();
    const auto fsky = compute_skyline(five);
    const auto glyphs = glyph_payload(five, fsky);
    REQUIRE(glyphs.size() == 3);
    // b has the largest score
    CHECK(glyphs[0].row == five.index_of("b"));
    CHECK(glyphs[0].inner_score == 1.0);
    CHECK(glyphs[1].inner_score == 0.5);
    CHECK(glyphs[0].sectors[0] == doctest::Approx(0.2));
    CHECK(glyphs[0].sectors[1] == 1.0);
    CHECK_FALSE(glyphs[0].focus.has_value());

    const auto mid = oracle::make_dataset({{5, 5}, {10, 0}, {0, 10}});
    const auto mg = glyph_payload(mid, compute_skyline(mid));
    CHECK(mg[0].sectors[0] == 0.5);
    for (const auto& g : mg) CHECK(g.inner_score == 0.0);

    const auto flat = oracle::make_dataset({{1, 3}, {2, 3}, {3, 3}});
    const auto fg = glyph_payload(flat, compute_skyline(flat));
    REQUIRE(fg.size() == 1);
    CHECK(fg[0].sectors == std::vector<double>{1.0, 1.0});
    CHECK(fg[0].inner_score == 1.0);

    const auto focused = glyph_payload(five, fsky, five.index_of("j"));
    for (const auto& g : focused) {
        REQUIRE(g.focus.has_value());
        for (std::size_t d = 0; d < 2; ++d) {
            const double a = five.canonical(g.row, d), b = five.canonical(five.index_of("j"), d);
            const auto expect = a > b ? FocusSign::higher : a < b ? FocusSign::lower : FocusSign::equal;
            CHECK((*g.focus)[d] == expect);
        }
        for (double s : g.sectors) CHECK((s >= 0.0 && s <= 1.0));
    }
    CHECK((*focused[2].focus)[0] == FocusSign::equal);

    const auto mins = oracle::make_dataset({{0, 1}, {10, 2}}, {Direction::minimize, Direction::maximize});
    const auto mm = glyph_payload(mins, compute_skyline(mins));
    CHECK(mm[0].sectors[0] == 1.0);
    CHECK(mm[1].sectors[0] == 0.0);

    CHECK(code_of([&] { glyph_payload(five, fsky, five.index_of("a")); }) == ErrorCode::contract_violation);
}
