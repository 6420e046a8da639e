#include "skyex/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "skyex/error.hpp"

namespace skyex {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg, std::optional<std::string> attribute = std::nullopt) {
    throw Error(ErrorCode::config_error, msg, {std::nullopt, std::nullopt, std::move(attribute)});
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view what) {
    if (!j.is_object()) config_error(std::string(what) + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            config_error("unknown key '" + key + "' in " + std::string(what));
    }
}

std::string get_string(const json& j, const char* key, std::string_view what) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string()) config_error(std::string(what) + " needs a string '" + key + "'");
    return it->get<std::string>();
}

std::vector<std::string> get_strings(const json& j, const char* key, std::string_view what) {
    const auto it = j.find(key);
    if (it == j.end()) return {};
    if (!it->is_array()) config_error(std::string(what) + ": '" + key + "' must be an array of strings");
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string()) config_error(std::string(what) + ": '" + key + "' must be an array of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string quote_csv(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

Schema parse_schema(const json& j) {
    check_keys(j, {"idColumn", "labelColumn", "attributes"}, "schema");
    Schema s;
    s.id_column = get_string(j, "idColumn", "schema");
    if (j.contains("labelColumn")) s.label_column = get_string(j, "labelColumn", "schema");

    const auto it = j.find("attributes");
    if (it == j.end() || !it->is_array()) config_error("schema needs an 'attributes' array");
    std::set<std::string> names;
    for (const auto& a : *it) {
        check_keys(a, {"name", "kind", "direction", "included"}, "schema attribute");
        Attribute attr;
        attr.name = get_string(a, "name", "schema attribute");
        if (!names.insert(attr.name).second) config_error("duplicate attribute '" + attr.name + "'", attr.name);
        if (attr.name == s.id_column) config_error("the id column cannot also be an attribute", attr.name);

        const std::string kind = a.contains("kind") ? get_string(a, "kind", "schema attribute") : "numeric";
        if (kind == "numeric")
            attr.kind = AttributeKind::numeric;
        else if (kind == "categorical")
            attr.kind = AttributeKind::categorical;
        else
            config_error("attribute '" + attr.name + "': kind must be 'numeric' or 'categorical'", attr.name);

        if (attr.kind == AttributeKind::numeric) {
            if (!a.contains("direction"))
                config_error("numeric attribute '" + attr.name + "' needs a direction", attr.name);
            const auto dir = get_string(a, "direction", "schema attribute");
            if (dir == "max")
                attr.direction = Direction::maximize;
            else if (dir == "min")
                attr.direction = Direction::minimize;
            else
                config_error("attribute '" + attr.name + "': direction must be 'max' or 'min'", attr.name);
        } else if (a.contains("direction")) {
            config_error("categorical attribute '" + attr.name + "' cannot have a direction", attr.name);
        }

        if (a.contains("included")) {
            if (!a["included"].is_boolean()) config_error("attribute '" + attr.name + "': included must be boolean");
            attr.included = a["included"].get<bool>();
        }
        s.attributes.push_back(std::move(attr));
    }
    return s;
}

Schema parse_schema_text(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) config_error("schema is not valid JSON");
    return parse_schema(j);
}

json schema_to_json(const Schema& schema) {
    json attrs = json::array();
    for (const auto& a : schema.attributes) {
        json o;
        o["name"] = a.name;
        o["kind"] = a.kind == AttributeKind::numeric ? "numeric" : "categorical";
        if (a.kind == AttributeKind::numeric) o["direction"] = a.direction == Direction::maximize ? "max" : "min";
        o["included"] = a.included;
        attrs.push_back(std::move(o));
    }
    json j;
    j["idColumn"] = schema.id_column;
    if (schema.label_column) j["labelColumn"] = *schema.label_column;
    j["attributes"] = std::move(attrs);
    return j;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t record = 1;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        // skip blank lines
        if (!(row.size() == 1 && row.front().empty())) rows.push_back(std::move(row));
        row.clear();
        ++record;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started && !trim(field).empty())
                    throw Error(ErrorCode::parse_error, "unexpected quote inside an unquoted field",
                                {record, row.size() + 1});
                field.clear();
                quoted = true;
                field_started = true;
                break;
            case ',': end_field(); break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                end_row();
                break;
            case '\n': end_row(); break;
            default:
                field += c;
                field_started = true;
        }
    }
    if (quoted) throw Error(ErrorCode::parse_error, "unterminated quoted field", {record, row.size() + 1});
    if (field_started || !row.empty()) end_row();
    return rows;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::not_found, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Dataset load_csv_text(std::string_view csv, const Schema& schema) {
    const auto rows = parse_csv(csv);
    if (rows.empty()) throw Error(ErrorCode::parse_error, "CSV file has no header row", {1});
    const auto& header = rows.front();

    std::map<std::string, std::size_t> column_of;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name(trim(header[c]));
        if (!column_of.emplace(name, c).second)
            throw Error(ErrorCode::parse_error, "duplicate CSV header '" + name + "'", {1, c + 1, name});
    }
    auto column = [&](const std::string& name) {
        const auto it = column_of.find(name);
        if (it == column_of.end()) config_error("schema references missing CSV column '" + name + "'", name);
        return it->second;
    };

    const std::size_t id_col = column(schema.id_column);
    const std::size_t label_col = schema.label_column ? column(*schema.label_column) : id_col;
    std::vector<std::size_t> attr_cols;
    for (const auto& a : schema.attributes) attr_cols.push_back(column(a.name));

    std::vector<DataPoint> points;
    std::map<std::string, std::vector<std::size_t>> id_records;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        const std::size_t record = r + 1;
        if (cells.size() != header.size())
            throw Error(ErrorCode::parse_error,
                        "record " + std::to_string(record) + " has " + std::to_string(cells.size()) +
                            " fields, header has " + std::to_string(header.size()),
                        {record});

        DataPoint p;
        p.id = std::string(trim(cells[id_col]));
        if (p.id.empty()) throw Error(ErrorCode::parse_error, "empty id", {record, id_col + 1, schema.id_column});
        p.label = std::string(trim(cells[label_col]));
        id_records[p.id].push_back(record);

        for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
            const auto& attr = schema.attributes[a];
            const std::string_view cell = cells[attr_cols[a]];
            if (attr.kind == AttributeKind::numeric) {
                const auto v = parse_number(cell);
                if (!v)
                    throw Error(ErrorCode::parse_error,
                                "record " + std::to_string(record) + ", column '" + attr.name +
                                    "': not a finite number: '" + std::string(cell) + "'",
                                {record, attr_cols[a] + 1, attr.name});
                p.values.emplace_back(*v);
            } else {
                p.values.emplace_back(std::string(trim(cell)));
            }
        }
        points.push_back(std::move(p));
    }

    std::string dupes;
    for (const auto& [id, records] : id_records) {
        if (records.size() < 2) continue;
        dupes += " " + id + " (records";
        for (auto rec : records) dupes += " " + std::to_string(rec);
        dupes += ")";
    }
    if (!dupes.empty()) throw Error(ErrorCode::conflict, "duplicate point ids:" + dupes);

    bool any_dimension = false;
    for (const auto& a : schema.attributes) any_dimension = any_dimension || a.is_dimension();
    if (!any_dimension) config_error("schema has no included numeric attribute");

    return Dataset(schema.attributes, std::move(points));
}

Dataset load_csv(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path) {
    const auto schema = parse_schema_text(read_file(schema_path));
    return load_csv_text(read_file(csv_path), schema);
}

std::string dataset_to_csv(const Dataset& data) {
    std::string out = "id,label";
    for (const auto& a : data.schema()) out += "," + quote_csv(a.name);
    out += "\n";
    for (const auto& p : data.points()) {
        out += quote_csv(p.id) + "," + quote_csv(p.label);
        for (const auto& c : p.values) {
            out += ",";
            if (const auto* v = std::get_if<double>(&c))
                out += format_number(*v);
            else
                out += quote_csv(std::get<std::string>(c));
        }
        out += "\n";
    }
    return out;
}

Schema snapshot_schema(const Dataset& data) {
    return Schema{"id", "label", data.schema()};
}

QueryConfig parse_query_config(const json& j) {
    check_keys(j, {"excludedAttributes", "numericPredicates", "categoricalPredicates", "excludedPointIds"},
               "query config");
    QueryConfig cfg;
    cfg.excluded_attributes = get_strings(j, "excludedAttributes", "query config");
    cfg.excluded_point_ids = get_strings(j, "excludedPointIds", "query config");

    if (const auto it = j.find("numericPredicates"); it != j.end()) {
        if (!it->is_array()) config_error("'numericPredicates' must be an array");
        for (const auto& p : *it) {
            check_keys(p, {"attribute", "op", "bounds"}, "numeric predicate");
            NumericPredicate np;
            np.attribute = get_string(p, "attribute", "numeric predicate");
            const auto op = get_string(p, "op", "numeric predicate");
            const auto b = p.find("bounds");
            std::vector<double> bounds;
            if (b != p.end() && b->is_array())
                for (const auto& v : *b)
                    if (v.is_number()) bounds.push_back(v.get<double>());
            const std::size_t want = op == "between" ? 2 : 1;
            if (b == p.end() || !b->is_array() || b->size() != want || bounds.size() != want)
                config_error("numeric predicate on '" + np.attribute + "' needs " + std::to_string(want) +
                                 " numeric bound(s)",
                             np.attribute);
            if (op == "ge" || op == ">=") {
                np.op = NumericPredicate::Op::at_least;
                np.lo = bounds[0];
            } else if (op == "le" || op == "<=") {
                np.op = NumericPredicate::Op::at_most;
                np.hi = bounds[0];
            } else if (op == "between") {
                np.op = NumericPredicate::Op::between;
                np.lo = bounds[0];
                np.hi = bounds[1];
                if (np.lo > np.hi) config_error("between predicate on '" + np.attribute + "' has lo > hi");
            } else {
                config_error("unknown numeric predicate op '" + op + "'", np.attribute);
            }
            cfg.numeric_predicates.push_back(std::move(np));
        }
    }

    if (const auto it = j.find("categoricalPredicates"); it != j.end()) {
        if (!it->is_array()) config_error("'categoricalPredicates' must be an array");
        for (const auto& p : *it) {
            check_keys(p, {"attribute", "op", "tokens"}, "categorical predicate");
            CategoricalPredicate cp;
            cp.attribute = get_string(p, "attribute", "categorical predicate");
            const auto op = get_string(p, "op", "categorical predicate");
            cp.tokens = get_strings(p, "tokens", "categorical predicate");
            if (op == "equals")
                cp.op = CategoricalPredicate::Op::equals;
            else if (op == "not_equals")
                cp.op = CategoricalPredicate::Op::not_equals;
            else if (op == "in")
                cp.op = CategoricalPredicate::Op::in;
            else if (op == "not_in")
                cp.op = CategoricalPredicate::Op::not_in;
            else
                config_error("unknown categorical predicate op '" + op + "'", cp.attribute);
            const bool single = cp.op == CategoricalPredicate::Op::equals || cp.op == CategoricalPredicate::Op::not_equals;
            if (single ? cp.tokens.size() != 1 : cp.tokens.empty())
                config_error("categorical predicate on '" + cp.attribute + "' has the wrong number of tokens",
                             cp.attribute);
            cfg.categorical_predicates.push_back(std::move(cp));
        }
    }
    return cfg;
}

json query_config_to_json(const QueryConfig& cfg) {
    json j;
    j["excludedAttributes"] = cfg.excluded_attributes;
    json nps = json::array();
    for (const auto& p : cfg.numeric_predicates) {
        json o;
        o["attribute"] = p.attribute;
        switch (p.op) {
            case NumericPredicate::Op::at_least:
                o["op"] = "ge";
                o["bounds"] = {p.lo};
                break;
            case NumericPredicate::Op::at_most:
                o["op"] = "le";
                o["bounds"] = {p.hi};
                break;
            case NumericPredicate::Op::between:
                o["op"] = "between";
                o["bounds"] = {p.lo, p.hi};
                break;
        }
        nps.push_back(std::move(o));
    }
    j["numericPredicates"] = std::move(nps);
    json cps = json::array();
    static constexpr const char* names[] = {"equals", "not_equals", "in", "not_in"};
    for (const auto& p : cfg.categorical_predicates)
        cps.push_back({{"attribute", p.attribute}, {"op", names[static_cast<int>(p.op)]}, {"tokens", p.tokens}});
    j["categoricalPredicates"] = std::move(cps);
    j["excludedPointIds"] = cfg.excluded_point_ids;
    return j;
}

Dataset apply_query_config(const Dataset& data, const QueryConfig& cfg) {
    auto schema = data.schema();
    auto attribute = [&](const std::string& name) {
        const auto a = data.find_attribute(name);
        if (!a) config_error("query config references unknown attribute '" + name + "'", name);
        return *a;
    };

    for (const auto& name : cfg.excluded_attributes) schema[attribute(name)].included = false;
    if (std::none_of(schema.begin(), schema.end(), [](const Attribute& a) { return a.is_dimension(); }))
        config_error("query config leaves no included numeric attribute");

    std::vector<std::size_t> numeric_cols, categorical_cols;
    for (const auto& p : cfg.numeric_predicates) {
        const auto a = attribute(p.attribute);
        if (schema[a].kind != AttributeKind::numeric)
            config_error("numeric predicate on categorical attribute '" + p.attribute + "'", p.attribute);
        numeric_cols.push_back(a);
    }
    for (const auto& p : cfg.categorical_predicates) {
        const auto a = attribute(p.attribute);
        if (schema[a].kind != AttributeKind::categorical)
            config_error("categorical predicate on numeric attribute '" + p.attribute + "'", p.attribute);
        categorical_cols.push_back(a);
    }
    std::set<std::string> excluded_ids;
    for (const auto& id : cfg.excluded_point_ids) {
        if (!data.find(id)) config_error("query config excludes unknown point '" + id + "'");
        excluded_ids.insert(id);
    }

    std::vector<DataPoint> kept;
    for (const auto& p : data.points()) {
        if (excluded_ids.contains(p.id)) continue;
        bool pass = true;
        for (std::size_t i = 0; i < cfg.numeric_predicates.size() && pass; ++i) {
            const auto& pred = cfg.numeric_predicates[i];
            const double v = std::get<double>(p.values[numeric_cols[i]]);
            switch (pred.op) {
                case NumericPredicate::Op::at_least: pass = v >= pred.lo; break;
                case NumericPredicate::Op::at_most: pass = v <= pred.hi; break;
                case NumericPredicate::Op::between: pass = v >= pred.lo && v <= pred.hi; break;
            }
        }
        for (std::size_t i = 0; i < cfg.categorical_predicates.size() && pass; ++i) {
            const auto& pred = cfg.categorical_predicates[i];
            const auto& token = std::get<std::string>(p.values[categorical_cols[i]]);
            const bool listed = std::find(pred.tokens.begin(), pred.tokens.end(), token) != pred.tokens.end();
            switch (pred.op) {
                case CategoricalPredicate::Op::equals:
                case CategoricalPredicate::Op::in: pass = listed; break;
                case CategoricalPredicate::Op::not_equals:
                case CategoricalPredicate::Op::not_in: pass = !listed; break;
            }
        }
        if (pass) kept.push_back(p);
    }
    return Dataset(std::move(schema), std::move(kept));
}

}  // namespace skyex
