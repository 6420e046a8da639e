#include "skyex/skyline.hpp"

#include <algorithm>

#include "skyex/error.hpp"

namespace skyex {

bool dominates(std::span<const double> p, std::span<const double> q, std::span<const std::size_t> dims) {
    require(!dims.empty(), "dominance needs at least one dimension");
    bool strictly_better = false;
    for (auto d : dims) {
        if (p[d] < q[d]) return false;
        if (p[d] > q[d]) strictly_better = true;
    }
    return strictly_better;
}

std::size_t SkylineResult::position(std::size_t row) const {
    if (row >= membership.size() || !membership[row]) contract_violation("point is not a skyline member");
    return static_cast<std::size_t>(std::lower_bound(skyline.begin(), skyline.end(), row) - skyline.begin());
}

std::vector<std::size_t> skyline_rows(const Dataset& data, std::span<const std::size_t> dims) {
    require(!dims.empty(), "skyline needs at least one dimension");
    for (auto d : dims) require(d < data.dimension_count(), "dimension index out of range");

    std::vector<std::size_t> window;
    for (std::size_t r = 0; r < data.size(); ++r) {
        const auto p = data.row(r);
        bool dominated = false;
        auto keep = window.begin();
        for (auto it = window.begin(); it != window.end(); ++it) {
            const auto w = data.row(*it);
            if (!dominated && dominates(w, p, dims)) {
                dominated = true;
            }
            // Once p is dominated it cannot dominate anything left in the
            // window (transitivity would make the dominator dominate a peer).
            if (!dominated && dominates(p, w, dims)) continue;
            *keep++ = *it;
        }
        window.erase(keep, window.end());
        if (!dominated) window.push_back(r);
    }
    std::sort(window.begin(), window.end());
    return window;
}

SkylineResult compute_skyline(const Dataset& data, std::span<const std::size_t> dims) {
    if (data.size() == 0) contract_violation("cannot compute the skyline of an empty dataset");

    SkylineResult res;
    res.dims.assign(dims.begin(), dims.end());
    res.skyline = skyline_rows(data, dims);
    res.membership.assign(data.size(), 0);
    for (auto r : res.skyline) res.membership[r] = 1;
    res.dominating_score.assign(res.skyline.size(), 0);
    res.dominators.assign(data.size(), {});

    for (std::size_t q = 0; q < data.size(); ++q) {
        if (res.membership[q]) continue;
        for (std::size_t k = 0; k < res.skyline.size(); ++k) {
            if (dominates(data.row(res.skyline[k]), data.row(q), dims)) {
                res.dominators[q].push_back(res.skyline[k]);
                ++res.dominating_score[k];
            }
        }
    }
    return res;
}

SkylineResult compute_skyline(const Dataset& data) {
    const auto dims = data.all_dimensions();
    return compute_skyline(data, dims);
}

std::vector<std::size_t> dominated_set(const Dataset& data, const SkylineResult& result, std::size_t p) {
    result.position(p);
    std::vector<std::size_t> out;
    for (std::size_t q = 0; q < data.size(); ++q) {
        if (result.is_skyline(q)) continue;
        if (dominates(data.row(p), data.row(q), result.dims)) out.push_back(q);
    }
    return out;
}

std::vector<std::string> dominated_set(const Dataset& data, std::string_view p_id, std::span<const std::size_t> dims) {
    const auto p = data.index_of(p_id);
    const auto result = compute_skyline(data, dims);
    return ids_of(data, dominated_set(data, result, p));
}

std::vector<std::string> dominators_of(const Dataset& data, std::string_view q_id, std::span<const std::size_t> dims) {
    const auto q = data.index_of(q_id);
    const auto result = compute_skyline(data, dims);
    return ids_of(data, result.dominators[q]);
}

std::vector<std::string> ids_of(const Dataset& data, std::span<const std::size_t> rows) {
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(data.point(r).id);
    return out;
}

}  // namespace skyex
