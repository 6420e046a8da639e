#include "skyex/dataset.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>

#include "skyex/error.hpp"

namespace skyex {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::not_found: return "not_found";
        case ErrorCode::conflict: return "conflict";
        case ErrorCode::contract_violation: return "contract_violation";
        case ErrorCode::parse_error: return "parse_error";
        case ErrorCode::config_error: return "config_error";
        case ErrorCode::capacity: return "capacity";
    }
    return "unknown";
}

namespace {

// FNV-1a, 64 bit.
class Fnv1a {
public:
    void bytes(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001b3ULL;
        }
    }
    void str(std::string_view s) {
        const std::uint64_t len = s.size();
        bytes(&len, sizeof len);
        bytes(s.data(), s.size());
    }
    void num(double v) {
        if (v == 0.0) v = 0.0;  // fold -0.0
        const auto bits = std::bit_cast<std::uint64_t>(v);
        bytes(&bits, sizeof bits);
    }
    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
        return buf;
    }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace

Matrix unify_directions(const Matrix& raw, std::span<const Attribute> schema) {
    std::vector<const Attribute*> dims;
    for (const auto& a : schema)
        if (a.is_dimension()) dims.push_back(&a);
    if (raw.cols() != dims.size())
        contract_violation("matrix has " + std::to_string(raw.cols()) + " columns but schema has " +
                           std::to_string(dims.size()) + " included numeric attributes");

    Matrix out(raw.rows(), raw.cols());
    for (std::size_t r = 0; r < raw.rows(); ++r) {
        for (std::size_t c = 0; c < raw.cols(); ++c) {
            const double v = raw(r, c);
            if (!std::isfinite(v))
                throw Error(ErrorCode::parse_error,
                            "non-finite value at row " + std::to_string(r) + ", column '" + dims[c]->name + "'",
                            {r, c, dims[c]->name});
            out(r, c) = dims[c]->direction == Direction::minimize ? -v : v;
        }
    }
    return out;
}

Dataset::Dataset(std::vector<Attribute> schema, std::vector<DataPoint> points)
    : schema_(std::move(schema)), points_(std::move(points)) {
    std::set<std::string_view> names;
    for (std::size_t a = 0; a < schema_.size(); ++a) {
        if (!names.insert(schema_[a].name).second)
            throw Error(ErrorCode::config_error, "duplicate attribute name '" + schema_[a].name + "'",
                        {std::nullopt, a, schema_[a].name});
        if (schema_[a].is_dimension()) dims_.push_back(a);
    }

    std::vector<std::string> duplicates;
    Matrix raw(points_.size(), dims_.size());
    for (std::size_t r = 0; r < points_.size(); ++r) {
        const auto& p = points_[r];
        if (!index_.emplace(p.id, r).second) duplicates.push_back(p.id);
        if (p.values.size() != schema_.size())
            throw Error(ErrorCode::parse_error,
                        "point '" + p.id + "' has " + std::to_string(p.values.size()) + " cells, expected " +
                            std::to_string(schema_.size()),
                        {r});
        for (std::size_t a = 0; a < schema_.size(); ++a) {
            const bool numeric = schema_[a].kind == AttributeKind::numeric;
            const auto* v = std::get_if<double>(&p.values[a]);
            if (numeric && !v)
                throw Error(ErrorCode::parse_error, "non-numeric cell in numeric attribute '" + schema_[a].name + "'",
                            {r, a, schema_[a].name});
            if (!numeric && v)
                throw Error(ErrorCode::parse_error, "numeric cell in categorical attribute '" + schema_[a].name + "'",
                            {r, a, schema_[a].name});
            if (v && !std::isfinite(*v))
                throw Error(ErrorCode::parse_error,
                            "non-finite value at row " + std::to_string(r) + ", attribute '" + schema_[a].name + "'",
                            {r, a, schema_[a].name});
        }
        for (std::size_t d = 0; d < dims_.size(); ++d) raw(r, d) = std::get<double>(p.values[dims_[d]]);
    }
    if (!duplicates.empty()) {
        std::string msg = "duplicate point ids:";
        for (const auto& id : duplicates) msg += " " + id;
        throw Error(ErrorCode::conflict, msg);
    }

    canonical_ = unify_directions(raw, schema_);

    Fnv1a h;
    h.num(static_cast<double>(schema_.size()));
    for (const auto& a : schema_) {
        h.str(a.name);
        h.num(static_cast<double>(a.kind));
        h.num(static_cast<double>(a.direction));
        h.num(a.included ? 1.0 : 0.0);
    }
    h.num(static_cast<double>(points_.size()));
    for (const auto& p : points_) {
        h.str(p.id);
        h.str(p.label);
        for (const auto& c : p.values) {
            if (const auto* v = std::get_if<double>(&c))
                h.num(*v);
            else
                h.str(std::get<std::string>(c));
        }
    }
    hash_ = h.hex();
}

double Dataset::raw(std::size_t r, std::size_t dim) const {
    return std::get<double>(points_.at(r).values.at(dims_.at(dim)));
}

std::vector<std::string> Dataset::dimension_names() const {
    std::vector<std::string> out;
    out.reserve(dims_.size());
    for (auto a : dims_) out.push_back(schema_[a].name);
    return out;
}

std::optional<std::size_t> Dataset::find_dimension(std::string_view name) const {
    for (std::size_t d = 0; d < dims_.size(); ++d)
        if (schema_[dims_[d]].name == name) return d;
    return std::nullopt;
}

std::size_t Dataset::dimension_index(std::string_view name) const {
    if (auto d = find_dimension(name)) return *d;
    throw Error(ErrorCode::not_found, "no included numeric attribute named '" + std::string(name) + "'",
                {std::nullopt, std::nullopt, std::string(name)});
}

std::optional<std::size_t> Dataset::find_attribute(std::string_view name) const {
    for (std::size_t a = 0; a < schema_.size(); ++a)
        if (schema_[a].name == name) return a;
    return std::nullopt;
}

std::optional<std::size_t> Dataset::find(std::string_view id) const {
    if (auto it = index_.find(std::string(id)); it != index_.end()) return it->second;
    return std::nullopt;
}

std::size_t Dataset::index_of(std::string_view id) const {
    if (auto r = find(id)) return *r;
    throw Error(ErrorCode::not_found, "unknown point id '" + std::string(id) + "'");
}

std::vector<std::size_t> Dataset::all_dimensions() const {
    std::vector<std::size_t> out(dims_.size());
    for (std::size_t d = 0; d < out.size(); ++d) out[d] = d;
    return out;
}

}  // namespace skyex
