#include <algorithm>
#include <bit>

#include "skyex/projection.hpp"
#include "skyex/service.hpp"
#include "skyex/subspace.hpp"

namespace skyex {

std::string to_body(const ojson& j) { return j.dump() + "\n"; }

ojson error_json(const Error& e) {
    ojson err;
    err["code"] = std::string(to_string(e.code()));
    err["message"] = e.what();
    const auto& loc = e.location();
    if (loc.row || loc.column || loc.attribute) {
        ojson l = ojson::object();
        if (loc.row) l["row"] = *loc.row;
        if (loc.column) l["column"] = *loc.column;
        if (loc.attribute) l["attribute"] = *loc.attribute;
        err["location"] = std::move(l);
    }
    return {{"error", std::move(err)}};
}

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::not_found: return 404;
        case ErrorCode::conflict: return 409;
        case ErrorCode::contract_violation: return 400;
        case ErrorCode::parse_error:
        case ErrorCode::config_error:
        case ErrorCode::capacity: return 422;
    }
    return 500;
}

namespace {

ojson id_list(const Dataset& data, std::span<const std::size_t> rows) {
    ojson out = ojson::array();
    for (auto r : rows) out.push_back(data.point(r).id);
    return out;
}

const char* focus_name(FocusSign s) {
    switch (s) {
        case FocusSign::higher: return "higher";
        case FocusSign::equal: return "equal";
        case FocusSign::lower: return "lower";
    }
    return "equal";
}

}  // namespace

Snapshot::Snapshot(Dataset data, std::size_t bins)
    : data_(std::move(data)), skyline_(compute_skyline(data_)), stats_(attribute_stats(data_, skyline_, bins)) {}

std::size_t Snapshot::skyline_row(std::string_view id) const {
    const auto row = data_.index_of(id);
    if (!skyline_.is_skyline(row)) contract_violation("point '" + std::string(id) + "' is not a skyline member");
    return row;
}

ojson Snapshot::skyline_body() const {
    ojson j;
    j["dimensions"] = data_.dimension_names();
    j["pointCount"] = data_.size();
    j["skylineIds"] = id_list(data_, skyline_.skyline);
    ojson scores = ojson::object();
    for (std::size_t k = 0; k < skyline_.skyline.size(); ++k)
        scores[data_.point(skyline_.skyline[k]).id] = skyline_.dominating_score[k];
    j["dominatingScore"] = std::move(scores);
    ojson dominators = ojson::object();
    for (std::size_t r = 0; r < data_.size(); ++r)
        if (!skyline_.is_skyline(r)) dominators[data_.point(r).id] = id_list(data_, skyline_.dominators[r]);
    j["dominatorsOf"] = std::move(dominators);
    return j;
}

ojson Snapshot::detail_body(std::string_view id) const {
    const auto row = skyline_row(id);
    const auto names = data_.dimension_names();
    const auto diff = diff_matrix(data_, stats_, row);
    const auto decisive = decisive_subspaces(data_, row);
    const auto column = diff.column_of(row);

    ojson j;
    j["id"] = data_.point(row).id;
    j["label"] = data_.point(row).label;
    j["dimensions"] = names;
    j["dominatingScore"] = skyline_.score(row);

    ojson values = ojson::object(), ranks = ojson::object();
    for (std::size_t d = 0; d < names.size(); ++d) {
        values[names[d]] = data_.raw(row, d);
        ranks[names[d]] = diff.ranks[d][column];
    }
    j["values"] = std::move(values);
    j["ranks"] = std::move(ranks);

    ojson dj;
    dj["anchorId"] = data_.point(row).id;
    dj["columns"] = id_list(data_, diff.columns);
    ojson delta = ojson::array();
    for (std::size_t c = 0; c < diff.columns.size(); ++c) {
        const auto r = diff.delta.row(c);
        delta.push_back(std::vector<double>(r.begin(), r.end()));
    }
    dj["delta"] = std::move(delta);
    ojson summary = ojson::array();
    for (std::size_t d = 0; d < names.size(); ++d) {
        const auto r = diff.summary.row(d);
        summary.push_back(std::vector<double>(r.begin(), r.end()));
    }
    dj["summary"] = std::move(summary);
    dj["ranks"] = diff.ranks;
    j["diff"] = std::move(dj);

    ojson minimal = ojson::array();
    for (const auto& sub : decisive.minimal) {
        ojson attrs = ojson::array();
        for (auto d : sub.dims()) attrs.push_back(names[d]);
        minimal.push_back(std::move(attrs));
    }
    j["minimalDecisive"] = std::move(minimal);
    return j;
}

ojson Snapshot::compare_body(const std::vector<std::string>& ids) const {
    if (ids.size() < 2 || ids.size() > max_comparison_size)
        contract_violation("comparison needs between 2 and 4 skyline points, got " + std::to_string(ids.size()));
    std::vector<std::size_t> rows;
    for (const auto& id : ids) rows.push_back(skyline_row(id));
    const auto part = domination_partition(data_, skyline_, rows);
    const auto glyphs = glyph_payload(data_, skyline_);

    ojson j;
    j["dimensions"] = data_.dimension_names();
    j["selected"] = id_list(data_, part.selected);
    j["dominatingScore"] = part.scores;
    j["unionSize"] = part.union_size;

    ojson cells = ojson::array();
    for (const auto& [key, points] : part.cells) {
        std::vector<std::size_t> members;
        for (std::size_t t = 0; t < part.selected.size(); ++t)
            if ((key >> t) & 1U) members.push_back(part.selected[t]);
        ojson c;
        c["key"] = key;
        c["members"] = id_list(data_, members);
        c["exclusive"] = std::popcount(key) == 1;
        c["pointIds"] = id_list(data_, points);
        c["details"] = exclusive_dominated_details(data_, part, key);
        cells.push_back(std::move(c));
    }
    j["cells"] = std::move(cells);

    ojson radar = ojson::array();
    for (auto r : part.selected) {
        const auto k = skyline_.position(r);
        ojson rj;
        rj["id"] = data_.point(r).id;
        rj["label"] = data_.point(r).label;
        std::vector<double> values;
        std::vector<std::size_t> ranks;
        for (std::size_t d = 0; d < data_.dimension_count(); ++d) {
            values.push_back(data_.raw(r, d));
            ranks.push_back(attribute_ranking(data_, skyline_.skyline, d)[k]);
        }
        rj["values"] = values;
        rj["normalized"] = glyphs[k].sectors;
        rj["ranks"] = ranks;
        rj["dominatingScore"] = skyline_.dominating_score[k];
        radar.push_back(std::move(rj));
    }
    j["radar"] = std::move(radar);
    return j;
}

std::string Snapshot::projection_body(std::uint64_t seed, const std::optional<std::string>& focus) const {
    const auto key = std::make_pair(seed, focus.value_or(std::string("\x01")));
    {
        std::lock_guard lock(projection_mutex_);
        if (const auto it = projections_.find(key); it != projections_.end()) return it->second;
    }

    std::optional<std::size_t> focus_row;
    if (focus) focus_row = skyline_row(*focus);
    const auto cfg = EmbeddingConfig::defaults_for(skyline_.skyline.size(), seed);
    const auto embedding = embed_skyline(data_, skyline_, cfg);
    const auto glyphs = glyph_payload(data_, skyline_, focus_row);

    ojson j;
    j["seed"] = seed;
    j["perplexity"] = cfg.perplexity;
    j["iterations"] = cfg.iterations;
    j["learningRate"] = cfg.learning_rate;
    j["dimensions"] = data_.dimension_names();
    j["focusId"] = focus ? ojson(*focus) : ojson(nullptr);
    ojson coords = ojson::array();
    for (std::size_t k = 0; k < skyline_.skyline.size(); ++k)
        coords.push_back({{"id", data_.point(skyline_.skyline[k]).id},
                          {"x", embedding.coords[k][0]},
                          {"y", embedding.coords[k][1]}});
    j["coords"] = std::move(coords);
    j["klDivergence"] = embedding.kl_divergence;

    ojson gj = ojson::array();
    for (std::size_t k = 0; k < glyphs.size(); ++k) {
        ojson g;
        g["id"] = data_.point(glyphs[k].row).id;
        g["sectors"] = glyphs[k].sectors;
        g["innerScore"] = glyphs[k].inner_score;
        g["dominatingScore"] = skyline_.dominating_score[k];
        if (glyphs[k].focus) {
            ojson signs = ojson::array();
            for (auto s : *glyphs[k].focus) signs.push_back(focus_name(s));
            g["focus"] = std::move(signs);
        }
        gj.push_back(std::move(g));
    }
    j["glyphs"] = std::move(gj);

    auto body = to_body(j);
    std::lock_guard lock(projection_mutex_);
    return projections_.emplace(key, std::move(body)).first->second;
}

ojson Snapshot::distribution_body(std::string_view attribute, std::size_t bins) const {
    const auto dim = data_.dimension_index(attribute);
    const auto h = value_distribution(data_, dim, bins, skyline_.skyline);
    ojson j;
    j["attribute"] = std::string(attribute);
    j["lo"] = h.lo;
    j["hi"] = h.hi;
    j["bins"] = h.counts.size();
    j["counts"] = h.counts;
    j["skylineTicks"] = h.skyline_ticks;
    return j;
}

ojson Snapshot::search_body(std::string_view query) const {
    const auto hit = search_point(data_, skyline_, query);
    ojson j;
    j["query"] = std::string(query);
    j["kind"] = hit.kind == SearchResult::Kind::skyline ? "skyline" : "dominated";
    j["id"] = data_.point(hit.row).id;
    j["label"] = data_.point(hit.row).label;
    j["dominators"] = id_list(data_, hit.dominators);
    return j;
}

ojson Snapshot::subspace_body(const std::vector<std::string>& attributes) const {
    std::vector<std::size_t> dims;
    for (const auto& a : attributes) dims.push_back(data_.dimension_index(a));
    if (dims.empty()) contract_violation("subspace needs at least one attribute");
    const auto rows = subspace_skyline(data_, Subspace::of(dims));
    ojson j;
    j["attributes"] = attributes;
    j["skylineIds"] = id_list(data_, rows);
    return j;
}

}  // namespace skyex
