#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "skyex/dataset.hpp"

namespace skyex {

/// Largest attribute count the lattice routines accept (2^16 - 1 subspaces).
inline constexpr std::size_t max_lattice_dimensions = 16;

/// Non-empty set of canonical dimensions, stored as a bitmask.
class Subspace {
public:
    /// Throws contract_violation when mask is zero.
    explicit Subspace(std::uint32_t mask);
    static Subspace full(std::size_t dimension_count);
    static Subspace of(const std::vector<std::size_t>& dims);

    std::uint32_t mask() const noexcept { return mask_; }
    std::size_t size() const noexcept;
    bool contains(std::size_t dim) const noexcept { return (mask_ >> dim) & 1U; }
    bool is_subset_of(Subspace other) const noexcept { return (mask_ & ~other.mask_) == 0; }
    std::vector<std::size_t> dims() const;

    friend bool operator==(Subspace, Subspace) = default;
    /// Ascending cardinality, then lexicographic order of the sorted dimension lists.
    friend bool operator<(Subspace a, Subspace b);

private:
    std::uint32_t mask_;
};

/// Rows whose projection onto `sub` is not dominated by any other projection.
std::vector<std::size_t> subspace_skyline(const Dataset& data, Subspace sub);

/// Subspace-skyline membership of one point over the whole attribute lattice.
class MembershipMap {
public:
    /// Throws capacity when the dataset has more than max_lattice_dimensions dimensions.
    MembershipMap(const Dataset& data, std::size_t row);

    std::size_t row() const noexcept { return row_; }
    std::size_t dimension_count() const noexcept { return dims_; }
    std::uint32_t full_mask() const noexcept { return (std::uint32_t{1} << dims_) - 1; }
    bool member(Subspace sub) const { return in_skyline_.at(sub.mask()) != 0; }
    /// Entries for every non-empty subspace, ascending mask order.
    std::vector<std::pair<Subspace, bool>> entries() const;

private:
    std::size_t row_;
    std::size_t dims_;
    std::vector<char> in_skyline_;  // indexed by mask; slot 0 unused
};

struct DecisiveSubspaceSet {
    std::string point_id;
    std::vector<Subspace> minimal;  // sorted by Subspace::operator<
};

/// Inclusion-minimal decisive subspaces of a full-space skyline point.
/// Throws contract_violation when the point is not in the full-space skyline.
DecisiveSubspaceSet decisive_subspaces(const Dataset& data, std::size_t row);
DecisiveSubspaceSet decisive_subspaces(const MembershipMap& membership, const Dataset& data);

/// Literal test: membership holds for every B' with sub ⊆ B' ⊆ D.
bool is_decisive(const MembershipMap& membership, Subspace sub);

}  // namespace skyex
