#include "skyex/analytics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "skyex/error.hpp"

namespace skyex {

Histogram value_distribution(const Dataset& data, std::size_t dim, std::size_t bins,
                             std::span<const std::size_t> skyline) {
    require(bins >= 1, "histogram needs at least one bin");
    require(dim < data.dimension_count(), "dimension index out of range");

    Histogram h;
    for (auto r : skyline) h.skyline_ticks.push_back(data.raw(r, dim));
    if (data.size() == 0) {
        h.counts.assign(bins, 0);
        return h;
    }

    h.lo = h.hi = data.raw(0, dim);
    for (std::size_t r = 1; r < data.size(); ++r) {
        h.lo = std::min(h.lo, data.raw(r, dim));
        h.hi = std::max(h.hi, data.raw(r, dim));
    }
    if (!(h.hi > h.lo)) {
        h.counts.assign(1, data.size());
        return h;
    }

    h.counts.assign(bins, 0);
    const double width = h.hi - h.lo;
    for (std::size_t r = 0; r < data.size(); ++r) {
        const double t = (data.raw(r, dim) - h.lo) / width * static_cast<double>(bins);
        const auto bin = std::min(bins - 1, static_cast<std::size_t>(std::max(0.0, std::floor(t))));
        ++h.counts[bin];
    }
    return h;
}

bool AttributeStats::covers(std::size_t row) const {
    return std::binary_search(skyline.begin(), skyline.end(), row);
}

AttributeStats attribute_stats(const Dataset& data, const SkylineResult& result, std::size_t bins) {
    AttributeStats stats;
    stats.skyline = result.skyline;
    const std::size_t m = data.dimension_count();
    const auto n = static_cast<double>(stats.skyline.size());
    stats.mean.assign(m, 0.0);
    stats.stddev.assign(m, 0.0);
    for (std::size_t d = 0; d < m; ++d) {
        if (!stats.skyline.empty()) {
            double sum = 0.0;
            for (auto r : stats.skyline) sum += data.canonical(r, d);
            const double mean = sum / n;
            double ss = 0.0;
            for (auto r : stats.skyline) {
                const double dev = data.canonical(r, d) - mean;
                ss += dev * dev;
            }
            stats.mean[d] = mean;
            stats.stddev[d] = std::sqrt(ss / n);
        }
        stats.histograms.push_back(value_distribution(data, d, bins, stats.skyline));
    }
    return stats;
}

double standardized_diff(const Dataset& data, const AttributeStats& stats, std::size_t i, std::size_t k,
                         std::size_t dim) {
    require(stats.covers(i) && stats.covers(k), "standardized difference needs two skyline points");
    require(dim < stats.stddev.size(), "dimension index out of range");
    const double sigma = stats.stddev[dim];
    if (sigma == 0.0) return 0.0;
    return (data.canonical(i, dim) - data.canonical(k, dim)) / sigma;
}

std::vector<std::size_t> attribute_ranking(const Dataset& data, std::span<const std::size_t> rows, std::size_t dim) {
    require(dim < data.dimension_count(), "dimension index out of range");
    std::vector<double> values;
    values.reserve(rows.size());
    for (auto r : rows) values.push_back(data.canonical(r, dim));
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());

    std::vector<std::size_t> ranks;
    ranks.reserve(rows.size());
    for (double v : values) {
        // 1 + number of strictly greater values
        const auto better = std::lower_bound(sorted.begin(), sorted.end(), v, std::greater<>()) - sorted.begin();
        ranks.push_back(static_cast<std::size_t>(better) + 1);
    }
    return ranks;
}

std::size_t DiffMatrix::column_of(std::size_t row) const {
    const auto it = std::find(columns.begin(), columns.end(), row);
    if (it == columns.end()) contract_violation("point is not a column of this difference matrix");
    return static_cast<std::size_t>(it - columns.begin());
}

DiffMatrix diff_matrix(const Dataset& data, const AttributeStats& stats, std::size_t anchor) {
    require(stats.covers(anchor), "difference matrix anchor must be a skyline point");
    const std::size_t m = data.dimension_count();

    DiffMatrix diff;
    diff.anchor = anchor;
    diff.columns = stats.skyline;
    diff.delta = Matrix(diff.columns.size(), m);
    for (std::size_t c = 0; c < diff.columns.size(); ++c)
        for (std::size_t l = 0; l < m; ++l) diff.delta(c, l) = standardized_diff(data, stats, diff.columns[c], anchor, l);

    diff.summary = Matrix(m, diff.columns.size());
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t c = 0; c < diff.columns.size(); ++c)
            diff.summary(j, c) = summary_diff(diff, anchor, diff.columns[c], j);

    for (std::size_t l = 0; l < m; ++l) diff.ranks.push_back(attribute_ranking(data, diff.columns, l));
    return diff;
}

double summary_diff(const DiffMatrix& diff, std::size_t i, std::size_t k, std::size_t excluded) {
    require(i == diff.anchor, "summary difference must be taken from the matrix anchor");
    require(excluded < diff.delta.cols(), "excluded dimension out of range");
    const auto c = diff.column_of(k);
    double sum = 0.0;
    for (std::size_t l = 0; l < diff.delta.cols(); ++l) {
        if (l == excluded) continue;
        sum -= diff.delta(c, l);  // δ_l(anchor, k) = −δ_l(k, anchor)
    }
    return sum;
}

const std::vector<std::size_t>& DominationPartition::cell(std::uint32_t key) const {
    const auto it = cells.find(key);
    if (it == cells.end()) throw Error(ErrorCode::not_found, "no partition cell with key " + std::to_string(key));
    return it->second;
}

DominationPartition domination_partition(const Dataset& data, const SkylineResult& result,
                                         std::span<const std::size_t> selected) {
    if (selected.size() < 2 || selected.size() > max_comparison_size)
        contract_violation("comparison needs between 2 and 4 skyline points, got " + std::to_string(selected.size()));
    if (std::set<std::size_t>(selected.begin(), selected.end()).size() != selected.size())
        contract_violation("comparison selection contains duplicates");

    DominationPartition part;
    part.selected.assign(selected.begin(), selected.end());
    for (auto s : selected) part.scores.push_back(result.score(s));  // throws for non-members

    const std::uint32_t keys = std::uint32_t{1} << selected.size();
    for (std::uint32_t key = 1; key < keys; ++key) part.cells[key];

    for (std::size_t q = 0; q < data.size(); ++q) {
        if (result.is_skyline(q)) continue;
        std::uint32_t key = 0;
        for (std::size_t t = 0; t < selected.size(); ++t)
            if (dominates(data.row(selected[t]), data.row(q), result.dims)) key |= std::uint32_t{1} << t;
        if (key != 0) {
            part.cells[key].push_back(q);
            ++part.union_size;
        }
    }
    return part;
}

std::vector<std::vector<double>> exclusive_dominated_details(const Dataset& data, const DominationPartition& part,
                                                             std::uint32_t key) {
    std::vector<std::vector<double>> out;
    for (auto r : part.cell(key)) {
        std::vector<double> raw(data.dimension_count());
        for (std::size_t d = 0; d < raw.size(); ++d) raw[d] = data.raw(r, d);
        out.push_back(std::move(raw));
    }
    return out;
}

std::vector<bool> brush_filter(const Dataset& data, std::span<const std::size_t> rows,
                               const std::map<std::size_t, BrushRange>& ranges) {
    for (const auto& [dim, range] : ranges) {
        require(dim < data.dimension_count(), "brushed dimension out of range");
        require(range.lo <= range.hi, "brush range has lo > hi");
    }
    std::vector<bool> pass;
    pass.reserve(rows.size());
    for (auto r : rows) {
        bool ok = true;
        for (const auto& [dim, range] : ranges) {
            const double v = data.raw(r, dim);
            if (v < range.lo || v > range.hi) {
                ok = false;
                break;
            }
        }
        pass.push_back(ok);
    }
    return pass;
}

namespace {

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
               return std::tolower(x) == std::tolower(y);
           });
}

}  // namespace

SearchResult search_point(const Dataset& data, const SkylineResult& result, std::string_view query) {
    auto row = data.find(query);
    if (!row) {
        std::vector<std::size_t> matches;
        for (std::size_t r = 0; r < data.size(); ++r)
            if (iequals(data.point(r).label, query)) matches.push_back(r);
        if (matches.empty()) throw Error(ErrorCode::not_found, "no point matches '" + std::string(query) + "'");
        if (matches.size() > 1) {
            std::string msg = "label '" + std::string(query) + "' is ambiguous; candidates:";
            for (auto r : matches) msg += " " + data.point(r).id;
            throw Error(ErrorCode::conflict, msg);
        }
        row = matches.front();
    }
    if (result.is_skyline(*row)) return {SearchResult::Kind::skyline, *row, {}};
    return {SearchResult::Kind::dominated, *row, result.dominators[*row]};
}

}  // namespace skyex
