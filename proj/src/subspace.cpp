#include "skyex/subspace.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <utility>

#include "skyex/error.hpp"
#include "skyex/skyline.hpp"

namespace skyex {

Subspace::Subspace(std::uint32_t mask) : mask_(mask) {
    require(mask != 0, "a subspace must contain at least one dimension");
}

Subspace Subspace::full(std::size_t dimension_count) {
    require(dimension_count >= 1 && dimension_count <= 32, "dimension count out of range");
    return Subspace(dimension_count == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << dimension_count) - 1);
}

Subspace Subspace::of(const std::vector<std::size_t>& dims) {
    std::uint32_t mask = 0;
    for (auto d : dims) {
        require(d < 32, "dimension index out of range");
        mask |= std::uint32_t{1} << d;
    }
    return Subspace(mask);
}

std::size_t Subspace::size() const noexcept { return static_cast<std::size_t>(std::popcount(mask_)); }

std::vector<std::size_t> Subspace::dims() const {
    std::vector<std::size_t> out;
    for (std::uint32_t m = mask_; m != 0; m &= m - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
    return out;
}

bool operator<(Subspace a, Subspace b) {
    if (a.size() != b.size()) return a.size() < b.size();
    const auto da = a.dims();
    const auto db = b.dims();
    return std::lexicographical_compare(da.begin(), da.end(), db.begin(), db.end());
}

std::vector<std::size_t> subspace_skyline(const Dataset& data, Subspace sub) {
    const auto dims = sub.dims();
    require(dims.back() < data.dimension_count(), "subspace references a dimension outside the dataset");
    return skyline_rows(data, dims);
}

MembershipMap::MembershipMap(const Dataset& data, std::size_t row) : row_(row), dims_(data.dimension_count()) {
    if (dims_ > max_lattice_dimensions)
        throw Error(ErrorCode::capacity, "attribute lattice too large: " + std::to_string(dims_) + " dimensions (max " +
                                             std::to_string(max_lattice_dimensions) + ")");
    require(dims_ >= 1, "dataset has no included numeric attributes");
    require(row < data.size(), "row out of range");

    // q dominates p on B  <=>  B ⊆ at_least(q) and B ∩ better(q) ≠ ∅
    std::set<std::pair<std::uint32_t, std::uint32_t>> relations;
    const auto p = data.row(row);
    for (std::size_t r = 0; r < data.size(); ++r) {
        if (r == row) continue;
        const auto q = data.row(r);
        std::uint32_t at_least = 0, better = 0;
        for (std::size_t d = 0; d < dims_; ++d) {
            if (q[d] >= p[d]) at_least |= std::uint32_t{1} << d;
            if (q[d] > p[d]) better |= std::uint32_t{1} << d;
        }
        if (better != 0) relations.emplace(at_least, better);
    }

    in_skyline_.assign(std::size_t{1} << dims_, 0);
    for (std::uint32_t b = 1; b <= full_mask(); ++b) {
        bool dominated = false;
        for (const auto& [at_least, better] : relations) {
            if ((b & ~at_least) == 0 && (b & better) != 0) {
                dominated = true;
                break;
            }
        }
        in_skyline_[b] = dominated ? 0 : 1;
    }
}

std::vector<std::pair<Subspace, bool>> MembershipMap::entries() const {
    std::vector<std::pair<Subspace, bool>> out;
    out.reserve(full_mask());
    for (std::uint32_t b = 1; b <= full_mask(); ++b) out.emplace_back(Subspace(b), in_skyline_[b] != 0);
    return out;
}

bool is_decisive(const MembershipMap& membership, Subspace sub) {
    const std::uint32_t full = membership.full_mask();
    require(sub.is_subset_of(Subspace(full)), "subspace references a dimension outside the dataset");
    const std::uint32_t rest = full & ~sub.mask();
    // every superset B' = sub ∪ s for s ⊆ rest
    for (std::uint32_t s = rest;; s = (s - 1) & rest) {
        if (!membership.member(Subspace(sub.mask() | s))) return false;
        if (s == 0) break;
    }
    return true;
}

DecisiveSubspaceSet decisive_subspaces(const MembershipMap& membership, const Dataset& data) {
    const std::uint32_t full = membership.full_mask();
    if (!membership.member(Subspace(full))) contract_violation("point is not in the full-space skyline");

    std::vector<char> decisive(std::size_t{full} + 1, 0);
    for (std::uint32_t b = 1; b <= full; ++b) decisive[b] = is_decisive(membership, Subspace(b)) ? 1 : 0;

    DecisiveSubspaceSet out;
    out.point_id = data.point(membership.row()).id;
    for (std::uint32_t b = 1; b <= full; ++b) {
        if (!decisive[b]) continue;
        bool minimal = true;
        // Upward closure makes checking the immediate subsets sufficient.
        for (std::uint32_t m = b; m != 0 && minimal; m &= m - 1) {
            const std::uint32_t smaller = b & ~(m & -m);
            if (smaller != 0 && decisive[smaller]) minimal = false;
        }
        if (minimal) out.minimal.emplace_back(b);
    }
    std::sort(out.minimal.begin(), out.minimal.end());
    return out;
}

DecisiveSubspaceSet decisive_subspaces(const Dataset& data, std::size_t row) {
    return decisive_subspaces(MembershipMap(data, row), data);
}

}  // namespace skyex
