// Brute-force reference implementations and data generators used by the unit
// and acceptance suites. Nothing here calls into the library's algorithms;
// only the Dataset container is shared.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "skyex/dataset.hpp"

namespace oracle {

using Rows = std::vector<std::vector<double>>;

/// p ≻ q over `dims` written as two separate quantifiers.
inline bool dom(const std::vector<double>& p, const std::vector<double>& q, const std::vector<std::size_t>& dims) {
    const bool all_ge = std::all_of(dims.begin(), dims.end(), [&](std::size_t d) { return p[d] >= q[d]; });
    const bool any_gt = std::any_of(dims.begin(), dims.end(), [&](std::size_t d) { return p[d] > q[d]; });
    return all_ge && any_gt;
}

inline std::vector<std::size_t> mask_dims(std::uint32_t mask) {
    std::vector<std::size_t> out;
    for (std::size_t d = 0; d < 32; ++d)
        if ((mask >> d) & 1U) out.push_back(d);
    return out;
}

inline std::vector<std::size_t> all_dims(std::size_t m) {
    std::vector<std::size_t> out(m);
    for (std::size_t d = 0; d < m; ++d) out[d] = d;
    return out;
}

struct Sky {
    std::vector<bool> member;
    std::vector<std::size_t> score;                    // per row, 0 for non-members
    std::vector<std::vector<std::size_t>> dominators;  // per row, skyline dominators in row order
};

/// O(n²m) all-pairs skyline straight from the definitions.
inline Sky brute_skyline(const Rows& rows, const std::vector<std::size_t>& dims) {
    const std::size_t n = rows.size();
    Sky s{std::vector<bool>(n, true), std::vector<std::size_t>(n, 0), std::vector<std::vector<std::size_t>>(n)};
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t p = 0; p < n; ++p)
            if (p != q && dom(rows[p], rows[q], dims)) s.member[q] = false;
    for (std::size_t q = 0; q < n; ++q) {
        if (s.member[q]) continue;
        for (std::size_t p = 0; p < n; ++p) {
            if (s.member[p] && dom(rows[p], rows[q], dims)) {
                s.dominators[q].push_back(p);
                ++s.score[p];
            }
        }
    }
    return s;
}

inline std::vector<std::size_t> brute_subspace_skyline(const Rows& rows, std::uint32_t mask) {
    const auto s = brute_skyline(rows, mask_dims(mask));
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (s.member[r]) out.push_back(r);
    return out;
}

/// Minimal decisive subspaces by checking every (B, B') pair of the lattice
/// and then every proper subset for minimality. Returned in ascending mask order.
inline std::vector<std::uint32_t> brute_minimal_decisive(const Rows& rows, std::size_t p, std::size_t m) {
    const std::uint32_t full = (std::uint32_t{1} << m) - 1;
    std::vector<bool> member(full + 1, false);
    for (std::uint32_t b = 1; b <= full; ++b) {
        const auto sky = brute_subspace_skyline(rows, b);
        member[b] = std::find(sky.begin(), sky.end(), p) != sky.end();
    }
    std::vector<bool> decisive(full + 1, false);
    for (std::uint32_t b = 1; b <= full; ++b) {
        bool ok = true;
        for (std::uint32_t sup = 1; sup <= full && ok; ++sup)
            if ((b & ~sup) == 0 && !member[sup]) ok = false;
        decisive[b] = ok;
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t b = 1; b <= full; ++b) {
        if (!decisive[b]) continue;
        bool minimal = true;
        for (std::uint32_t c = 1; c <= full && minimal; ++c)
            if (c != b && (c & ~b) == 0 && decisive[c]) minimal = false;
        if (minimal) out.push_back(b);
    }
    return out;
}

/// Whether mask `b` satisfies the decisiveness quantifier for row p.
inline bool brute_is_decisive(const Rows& rows, std::size_t p, std::size_t m, std::uint32_t b) {
    const std::uint32_t full = (std::uint32_t{1} << m) - 1;
    for (std::uint32_t sup = 1; sup <= full; ++sup) {
        if ((b & ~sup) != 0) continue;
        const auto sky = brute_subspace_skyline(rows, sup);
        if (std::find(sky.begin(), sky.end(), p) == sky.end()) return false;
    }
    return true;
}

enum class Distribution { independent, correlated, anticorrelated };

inline const char* name(Distribution d) {
    switch (d) {
        case Distribution::independent: return "independent";
        case Distribution::correlated: return "correlated";
        case Distribution::anticorrelated: return "anticorrelated";
    }
    return "?";
}

/// Standard skyline benchmark shapes. With `levels` > 0 values are rounded to
/// that many grid steps so ties and duplicates occur.
inline Rows generate(Distribution dist, std::size_t n, std::size_t m, std::mt19937_64& rng, int levels = 0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.05);
    Rows rows(n, std::vector<double>(m));
    for (auto& row : rows) {
        switch (dist) {
            case Distribution::independent:
                for (auto& v : row) v = u(rng);
                break;
            case Distribution::correlated: {
                const double base = u(rng);
                for (auto& v : row) v = std::clamp(base + noise(rng), 0.0, 1.0);
                break;
            }
            case Distribution::anticorrelated: {
                // near the hyperplane Σ v = m/2
                std::vector<double> w(m);
                double sum = 0.0;
                for (auto& x : w) sum += (x = u(rng) + 1e-9);
                const double plane = 0.5 + noise(rng);
                for (std::size_t d = 0; d < m; ++d)
                    row[d] = std::clamp(w[d] / sum * static_cast<double>(m) * plane, 0.0, 1.0);
                break;
            }
        }
        if (levels > 0)
            for (auto& v : row) v = std::round(v * levels) / levels;
    }
    return rows;
}

inline std::string row_id(std::size_t r) { return "p" + std::to_string(r); }

/// Dataset whose raw values are `rows`; `directions` defaults to all maximize.
inline skyex::Dataset make_dataset(const Rows& rows, std::vector<skyex::Direction> directions = {}) {
    const std::size_t m = rows.empty() ? directions.size() : rows.front().size();
    if (directions.empty()) directions.assign(m, skyex::Direction::maximize);
    std::vector<skyex::Attribute> schema;
    for (std::size_t d = 0; d < m; ++d)
        schema.push_back({"attr" + std::to_string(d), skyex::AttributeKind::numeric, directions[d], true});
    std::vector<skyex::DataPoint> points;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        skyex::DataPoint p{row_id(r), "Point " + std::to_string(r), {}};
        for (double v : rows[r]) p.values.emplace_back(v);
        points.push_back(std::move(p));
    }
    return skyex::Dataset(std::move(schema), std::move(points));
}

/// The five-point city example: a=(1,5), b=(2,6), c=(1,1), i=(6,2), j=(4,4).
inline skyex::Dataset five_point_example() {
    std::vector<skyex::Attribute> schema{{"attr0", skyex::AttributeKind::numeric, skyex::Direction::maximize, true},
                                         {"attr1", skyex::AttributeKind::numeric, skyex::Direction::maximize, true}};
    std::vector<skyex::DataPoint> points;
    const std::vector<std::pair<std::string, std::pair<double, double>>> rows{
        {"a", {1, 5}}, {"b", {2, 6}}, {"c", {1, 1}}, {"i", {6, 2}}, {"j", {4, 4}}};
    for (const auto& [id, v] : rows) points.push_back({id, id, {v.first, v.second}});
    return skyex::Dataset(std::move(schema), std::move(points));
}

}  // namespace oracle
