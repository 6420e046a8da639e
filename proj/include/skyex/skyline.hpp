#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "skyex/dataset.hpp"

namespace skyex {

/// p ≻ q on `dims`: at least as good everywhere and strictly better somewhere.
/// Values are canonical (higher is better). Throws contract_violation on empty dims.
bool dominates(std::span<const double> p, std::span<const double> q, std::span<const std::size_t> dims);

/// All rows are indices into the dataset the result was computed from.
struct SkylineResult {
    std::vector<std::size_t> dims;                     // dimensions the skyline was taken over
    std::vector<std::size_t> skyline;                  // skyline rows, input order
    std::vector<std::size_t> dominating_score;         // φ, aligned with `skyline`
    std::vector<std::vector<std::size_t>> dominators;  // per row; skyline rows dominating it

    bool is_skyline(std::size_t row) const { return membership.at(row) != 0; }
    /// Position of `row` within `skyline`; throws contract_violation if not a member.
    std::size_t position(std::size_t row) const;
    std::size_t score(std::size_t row) const { return dominating_score[position(row)]; }

    std::vector<char> membership;                      // per row, 1 for skyline members
};

/// Rows of the skyline over `dims` via block-nested-loop: input-order scan
/// with an unbounded candidate window.
std::vector<std::size_t> skyline_rows(const Dataset& data, std::span<const std::size_t> dims);

SkylineResult compute_skyline(const Dataset& data, std::span<const std::size_t> dims);
SkylineResult compute_skyline(const Dataset& data);

/// Non-skyline rows dominated by skyline row `p`.
std::vector<std::size_t> dominated_set(const Dataset& data, const SkylineResult& result, std::size_t p);
std::vector<std::string> dominated_set(const Dataset& data, std::string_view p_id, std::span<const std::size_t> dims);

/// Skyline rows dominating `q`; empty iff q is in the skyline.
std::vector<std::string> dominators_of(const Dataset& data, std::string_view q_id, std::span<const std::size_t> dims);

std::vector<std::string> ids_of(const Dataset& data, std::span<const std::size_t> rows);

}  // namespace skyex
