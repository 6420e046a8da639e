#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "skyex/dataset.hpp"
#include "skyex/matrix.hpp"
#include "skyex/skyline.hpp"

namespace skyex {

inline constexpr std::size_t default_histogram_bins = 40;

/// Uniform-bin histogram over the raw values of every point.
struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::size_t> counts;
    std::vector<double> skyline_ticks;  // raw values of skyline points, skyline order
};

/// Histogram of raw values for dimension `dim`. The maximum lands in the last
/// bin; a constant column yields a single bin holding every point.
Histogram value_distribution(const Dataset& data, std::size_t dim, std::size_t bins,
                             std::span<const std::size_t> skyline = {});

/// Per-dimension statistics over a fixed skyline.
struct AttributeStats {
    std::vector<std::size_t> skyline;  // rows the statistics were taken over
    std::vector<double> mean;          // canonical mean over skyline, per dimension
    std::vector<double> stddev;        // population standard deviation over skyline
    std::vector<Histogram> histograms;

    bool covers(std::size_t row) const;
};

AttributeStats attribute_stats(const Dataset& data, const SkylineResult& result,
                               std::size_t bins = default_histogram_bins);

/// (p_i − p_k) / σ on canonical values of dimension `dim`; 0 when σ is 0.
/// Throws contract_violation when either row is not covered by `stats`.
double standardized_diff(const Dataset& data, const AttributeStats& stats, std::size_t i, std::size_t k,
                         std::size_t dim);

/// Competition ranks (1 = highest canonical value, ties share, next rank skips)
/// of `rows` on `dim`, aligned with `rows`.
std::vector<std::size_t> attribute_ranking(const Dataset& data, std::span<const std::size_t> rows, std::size_t dim);

/// Differences of one anchor against every skyline point.
///
/// delta(k, l) holds δ_l(p_k, anchor), i.e. column point minus anchor, which is
/// the orientation of the expansion matrix. summary(j, k) holds Δ(anchor, p_k)
/// with dimension j left out, the orientation of the diverging bars.
struct DiffMatrix {
    std::size_t anchor = 0;
    std::vector<std::size_t> columns;  // skyline rows, skyline order (anchor included)
    Matrix delta;                      // columns.size() × dimensions
    Matrix summary;                    // dimensions × columns.size()
    std::vector<std::vector<std::size_t>> ranks;  // per dimension, aligned with columns

    std::size_t column_of(std::size_t row) const;
};

DiffMatrix diff_matrix(const Dataset& data, const AttributeStats& stats, std::size_t anchor);

/// Δ(i, k) without dimension `excluded`. `i` must be the anchor of `diff`.
double summary_diff(const DiffMatrix& diff, std::size_t i, std::size_t k, std::size_t excluded);

/// Cells keyed by a bitmask over `selected`: bit t set means selected[t]
/// dominates every point of the cell and no unset member dominates any of them.
struct DominationPartition {
    std::vector<std::size_t> selected;
    std::map<std::uint32_t, std::vector<std::size_t>> cells;  // one entry per non-empty key, possibly empty list
    std::size_t union_size = 0;
    std::vector<std::size_t> scores;  // φ, aligned with selected

    const std::vector<std::size_t>& cell(std::uint32_t key) const;
};

inline constexpr std::size_t max_comparison_size = 4;

DominationPartition domination_partition(const Dataset& data, const SkylineResult& result,
                                         std::span<const std::size_t> selected);

/// Raw value vectors (one per dimension) of the points in cell `key`.
std::vector<std::vector<double>> exclusive_dominated_details(const Dataset& data, const DominationPartition& part,
                                                             std::uint32_t key);

struct BrushRange {
    double lo;
    double hi;
};

/// Pass flag per row: raw value inside [lo, hi] for every brushed dimension.
std::vector<bool> brush_filter(const Dataset& data, std::span<const std::size_t> rows,
                               const std::map<std::size_t, BrushRange>& ranges);

struct SearchResult {
    enum class Kind { skyline, dominated } kind;
    std::size_t row;
    std::vector<std::size_t> dominators;  // empty for skyline hits
};

/// Exact id first, then case-insensitive label. Throws not_found, or conflict
/// listing the candidates when several labels match.
SearchResult search_point(const Dataset& data, const SkylineResult& result, std::string_view query);

}  // namespace skyex
