#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "skyex/analytics.hpp"
#include "skyex/ingest.hpp"
#include "skyex/projection.hpp"
#include "skyex/service.hpp"
#include "skyex/subspace.hpp"

namespace py = pybind11;
using namespace skyex;

namespace {

std::vector<double> row_of(const Dataset& d, std::size_t r) {
    const auto row = d.row(r);
    return {row.begin(), row.end()};
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        require(rows[r].size() == cols, "rows must all have the same length");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

py::dict skyline_dict(const Dataset& d, const SkylineResult& res) {
    py::dict scores, dominators;
    for (std::size_t k = 0; k < res.skyline.size(); ++k) scores[py::str(d.point(res.skyline[k]).id)] = res.dominating_score[k];
    for (std::size_t r = 0; r < d.size(); ++r)
        if (!res.is_skyline(r)) dominators[py::str(d.point(r).id)] = ids_of(d, res.dominators[r]);
    py::dict out;
    out["skyline_ids"] = ids_of(d, res.skyline);
    out["dominating_score"] = scores;
    out["dominators_of"] = dominators;
    return out;
}

std::vector<std::size_t> dims_by_name(const Dataset& d, const std::optional<std::vector<std::string>>& names) {
    if (!names) return d.all_dimensions();
    std::vector<std::size_t> dims;
    for (const auto& n : *names) dims.push_back(d.dimension_index(n));
    return dims;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Skyline analytics core";

    // Raised with args (code, message), code being one of the API error codes.
    static py::exception<Error> error(m, "SkyexError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetObject(error.ptr(), py::make_tuple(std::string(to_string(e.code())), e.what()).ptr());
        }
    });

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("ids", [](const Dataset& d) {
            std::vector<std::string> ids;
            for (const auto& p : d.points()) ids.push_back(p.id);
            return ids;
        })
        .def_property_readonly("labels", [](const Dataset& d) {
            std::vector<std::string> out;
            for (const auto& p : d.points()) out.push_back(p.label);
            return out;
        })
        .def_property_readonly("dimensions", &Dataset::dimension_names)
        .def_property_readonly("hash", &Dataset::hash)
        .def("canonical", [](const Dataset& d) {
            std::vector<std::vector<double>> out;
            for (std::size_t r = 0; r < d.size(); ++r) out.push_back(row_of(d, r));
            return out;
        })
        .def("__len__", &Dataset::size);

    m.def("load_csv", [](const std::string& csv, const std::string& schema) { return load_csv(csv, schema); },
          py::arg("csv_path"), py::arg("schema_path"));
    m.def("load_csv_text",
          [](const std::string& csv, const std::string& schema) { return load_csv_text(csv, parse_schema_text(schema)); },
          py::arg("csv"), py::arg("schema_json"));
    m.def("apply_query_config",
          [](const Dataset& d, const std::string& cfg) {
              return apply_query_config(d, parse_query_config(nlohmann::json::parse(cfg)));
          },
          py::arg("dataset"), py::arg("config_json"));

    m.def("dominates",
          [](const std::vector<double>& p, const std::vector<double>& q, const std::vector<std::size_t>& dims) {
              require(p.size() == q.size(), "rows must have the same length");
              for (auto d : dims) require(d < p.size(), "dimension index out of range");
              return dominates(p, q, dims);
          },
          py::arg("p"), py::arg("q"), py::arg("dims"));

    m.def("compute_skyline",
          [](const Dataset& d, const std::optional<std::vector<std::string>>& attributes) {
              return skyline_dict(d, compute_skyline(d, dims_by_name(d, attributes)));
          },
          py::arg("dataset"), py::arg("attributes") = py::none());

    m.def("decisive_subspaces",
          [](const Dataset& d, const std::string& id) {
              const auto names = d.dimension_names();
              std::vector<std::vector<std::string>> out;
              for (const auto& sub : decisive_subspaces(d, d.index_of(id)).minimal) {
                  std::vector<std::string> attrs;
                  for (auto dim : sub.dims()) attrs.push_back(names[dim]);
                  out.push_back(std::move(attrs));
              }
              return out;
          },
          py::arg("dataset"), py::arg("id"));

    m.def("partition",
          [](const Dataset& d, const std::vector<std::string>& ids) {
              const auto sky = compute_skyline(d);
              std::vector<std::size_t> rows;
              for (const auto& id : ids) rows.push_back(d.index_of(id));
              const auto part = domination_partition(d, sky, rows);
              py::dict cells;
              for (const auto& [key, members] : part.cells) cells[py::int_(key)] = ids_of(d, members);
              py::dict out;
              out["cells"] = cells;
              out["union_size"] = part.union_size;
              out["dominating_score"] = part.scores;
              return out;
          },
          py::arg("dataset"), py::arg("ids"));

    m.def("standardize", [](const std::vector<std::vector<double>>& rows) {
        const auto z = standardize(to_matrix(rows));
        std::vector<std::vector<double>> out(z.rows());
        for (std::size_t r = 0; r < z.rows(); ++r) out[r].assign(z.row(r).begin(), z.row(r).end());
        return out;
    });

    m.def("tsne",
          [](const std::vector<std::vector<double>>& points, std::optional<double> perplexity, std::size_t iterations,
             double learning_rate, std::uint64_t seed) {
              auto cfg = EmbeddingConfig::defaults_for(points.size(), seed);
              if (perplexity) cfg.perplexity = *perplexity;
              cfg.iterations = iterations;
              cfg.learning_rate = learning_rate;
              const auto emb = tsne_embed(distance_matrix(to_matrix(points)), cfg);
              py::dict out;
              out["coords"] = emb.coords;
              out["kl_divergence"] = emb.kl_divergence;
              return out;
          },
          py::arg("points"), py::arg("perplexity") = py::none(), py::arg("iterations") = 1000,
          py::arg("learning_rate") = 200.0, py::arg("seed") = 42);

    // Body builders return the exact bytes the HTTP endpoints serve.
    py::class_<Snapshot, std::shared_ptr<Snapshot>>(m, "Snapshot")
        .def(py::init([](const Dataset& d) { return std::make_shared<Snapshot>(d); }))
        .def_property_readonly("hash", &Snapshot::hash)
        .def("skyline_body", [](const Snapshot& s) { return to_body(s.skyline_body()); })
        .def("detail_body", [](const Snapshot& s, const std::string& id) { return to_body(s.detail_body(id)); })
        .def("compare_body",
             [](const Snapshot& s, const std::vector<std::string>& ids) { return to_body(s.compare_body(ids)); })
        .def("projection_body",
             [](const Snapshot& s, std::uint64_t seed, const std::optional<std::string>& focus) {
                 return s.projection_body(seed, focus);
             },
             py::arg("seed") = default_projection_seed, py::arg("focus") = py::none())
        .def("distribution_body",
             [](const Snapshot& s, const std::string& attr, std::size_t bins) {
                 return to_body(s.distribution_body(attr, bins));
             },
             py::arg("attribute"), py::arg("bins") = default_histogram_bins)
        .def("search_body", [](const Snapshot& s, const std::string& q) { return to_body(s.search_body(q)); })
        .def("subspace_body",
             [](const Snapshot& s, const std::vector<std::string>& attrs) { return to_body(s.subspace_body(attrs)); });
}
