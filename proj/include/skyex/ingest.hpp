#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skyex/dataset.hpp"

namespace skyex {

/// Sidecar describing how to read a CSV file.
struct Schema {
    std::string id_column;
    std::optional<std::string> label_column;  // defaults to the id
    std::vector<Attribute> attributes;
};

/// Throws config_error on any structural problem.
Schema parse_schema(const nlohmann::json& j);
Schema parse_schema_text(std::string_view text);
nlohmann::json schema_to_json(const Schema& schema);

/// RFC 4180 style: comma separated, double-quoted fields with "" escapes,
/// CRLF or LF line ends. A UTF-8 byte order mark is skipped.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Errors carry 1-based CSV coordinates: the header is record 1.
Dataset load_csv_text(std::string_view csv, const Schema& schema);
Dataset load_csv(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path);

std::string read_file(const std::filesystem::path& path);

/// Inverse of load_csv_text for snapshots: header is id, label, then every
/// schema attribute. Numbers are written at round-trip precision.
std::string dataset_to_csv(const Dataset& data);
/// Schema matching dataset_to_csv output (id column "id", label column "label").
Schema snapshot_schema(const Dataset& data);

struct NumericPredicate {
    enum class Op { at_least, at_most, between };
    std::string attribute;
    Op op = Op::at_least;
    double lo = 0.0;  // bound for at_least, lower bound for between
    double hi = 0.0;  // bound for at_most, upper bound for between
};

struct CategoricalPredicate {
    enum class Op { equals, not_equals, in, not_in };
    std::string attribute;
    Op op = Op::equals;
    std::vector<std::string> tokens;
};

struct QueryConfig {
    std::vector<std::string> excluded_attributes;
    std::vector<NumericPredicate> numeric_predicates;
    std::vector<CategoricalPredicate> categorical_predicates;
    std::vector<std::string> excluded_point_ids;
};

QueryConfig parse_query_config(const nlohmann::json& j);
nlohmann::json query_config_to_json(const QueryConfig& cfg);

/// New snapshot with excluded attributes dropped from the dimensions and every
/// excluded or predicate-failing point removed. Throws config_error for
/// references to unknown attributes or points, and when no dimension remains.
Dataset apply_query_config(const Dataset& data, const QueryConfig& cfg);

}  // namespace skyex
