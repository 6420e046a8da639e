#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "skyex/matrix.hpp"

namespace skyex {

enum class AttributeKind { numeric, categorical };
enum class Direction { maximize, minimize };

struct Attribute {
    std::string name;
    AttributeKind kind = AttributeKind::numeric;
    Direction direction = Direction::maximize;  // ignored for categorical attributes
    bool included = true;

    /// True when the attribute takes part in dominance (numeric and included).
    bool is_dimension() const noexcept { return kind == AttributeKind::numeric && included; }

    friend bool operator==(const Attribute&, const Attribute&) = default;
};

using Cell = std::variant<double, std::string>;

struct DataPoint {
    std::string id;
    std::string label;
    std::vector<Cell> values;  // one per schema attribute
};

/// Negates minimize columns so that higher is better everywhere.
/// `raw` must have one column per dimension attribute of `schema`, in schema order.
Matrix unify_directions(const Matrix& raw, std::span<const Attribute> schema);

/// Immutable snapshot of a table of points together with its canonical
/// (direction-unified) matrix over the included numeric attributes.
///
/// "Dimension" below always means a column of the canonical matrix; use
/// dimension_attribute() to map it back to the schema.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<Attribute> schema, std::vector<DataPoint> points);

    const std::vector<Attribute>& schema() const noexcept { return schema_; }
    const std::vector<DataPoint>& points() const noexcept { return points_; }
    const DataPoint& point(std::size_t row) const { return points_.at(row); }

    std::size_t size() const noexcept { return points_.size(); }
    std::size_t dimension_count() const noexcept { return dims_.size(); }

    const Matrix& canonical() const noexcept { return canonical_; }
    std::span<const double> row(std::size_t r) const { return canonical_.row(r); }
    double canonical(std::size_t r, std::size_t dim) const { return canonical_(r, dim); }
    /// Value in the attribute's own direction, as it appeared in the input.
    double raw(std::size_t r, std::size_t dim) const;

    const Attribute& dimension(std::size_t dim) const { return schema_.at(dims_.at(dim)); }
    std::size_t dimension_attribute(std::size_t dim) const { return dims_.at(dim); }
    std::vector<std::string> dimension_names() const;
    std::optional<std::size_t> find_dimension(std::string_view name) const;
    /// Like find_dimension but throws not_found.
    std::size_t dimension_index(std::string_view name) const;
    std::optional<std::size_t> find_attribute(std::string_view name) const;

    std::optional<std::size_t> find(std::string_view id) const;
    /// Row of `id`; throws not_found.
    std::size_t index_of(std::string_view id) const;

    /// 0..dimension_count()-1
    std::vector<std::size_t> all_dimensions() const;

    /// Hex content hash over schema, ids, labels and every cell.
    const std::string& hash() const noexcept { return hash_; }

private:
    std::vector<Attribute> schema_;
    std::vector<DataPoint> points_;
    std::vector<std::size_t> dims_;
    std::unordered_map<std::string, std::size_t> index_;
    Matrix canonical_;
    std::string hash_;
};

}  // namespace skyex
