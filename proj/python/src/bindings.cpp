#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hsbm/gwtree.hpp"
#include "hsbm/hypergraph.hpp"
#include "hsbm/io.hpp"
#include "hsbm/localstats.hpp"
#include "hsbm/model.hpp"
#include "hsbm/saw.hpp"
#include "hsbm/spectral.hpp"

namespace py = pybind11;
using namespace hsbm;

namespace {

SpinAssignment to_spins(const std::vector<int>& raw) {
    std::vector<std::int8_t> s(raw.begin(), raw.end());
    return SpinAssignment(std::move(s));
}

std::vector<int> from_spins(const SpinAssignment& s) {
    return {s.values().begin(), s.values().end()};
}

py::tuple triplet_arrays(const CountMatrix& m) {
    const auto trips = m.triplets();
    py::array_t<std::uint32_t> rows(static_cast<py::ssize_t>(trips.size()));
    py::array_t<std::uint32_t> cols(static_cast<py::ssize_t>(trips.size()));
    py::array_t<std::int64_t> vals(static_cast<py::ssize_t>(trips.size()));
    auto r = rows.mutable_unchecked<1>();
    auto c = cols.mutable_unchecked<1>();
    auto v = vals.mutable_unchecked<1>();
    for (std::size_t k = 0; k < trips.size(); ++k) {
        const auto i = static_cast<py::ssize_t>(k);
        r(i) = trips[k].row;
        c(i) = trips[k].col;
        v(i) = trips[k].value;
    }
    return py::make_tuple(rows, cols, vals);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Self-avoiding-walk spectral detection on hypergraph stochastic block models";

    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](std::uint32_t n, std::uint32_t d, double a, double b, std::uint64_t seed) {
                 ModelParams p{n, d, a, b, seed};
                 validate(p);
                 return p;
             }),
             py::arg("n"), py::arg("d"), py::arg("a"), py::arg("b"), py::arg("seed") = 0)
        .def_readwrite("n", &ModelParams::n)
        .def_readwrite("d", &ModelParams::d)
        .def_readwrite("a", &ModelParams::a)
        .def_readwrite("b", &ModelParams::b)
        .def_readwrite("seed", &ModelParams::seed)
        .def("__repr__", [](const ModelParams& p) {
            return "ModelParams(n=" + std::to_string(p.n) + ", d=" + std::to_string(p.d) + ", a=" +
                   format_double(p.a) + ", b=" + format_double(p.b) + ", seed=" + std::to_string(p.seed) + ")";
        });

    m.def("derive_rates", [](const ModelParams& p) {
        const DerivedRates r = derive_rates(p);
        py::dict out;
        out["alpha"] = r.alpha;
        out["beta"] = r.beta;
        out["kappa"] = r.kappa;
        out["p_n"] = r.p_n;
        out["q_n"] = r.q_n;
        out["var_delta_inf"] = r.var_delta_inf ? py::cast(*r.var_delta_inf) : py::none();
        out["e_delta_inf_sq"] = r.e_delta_inf_sq ? py::cast(*r.e_delta_inf_sq) : py::none();
        return out;
    });
    m.def("recommended_depth", py::overload_cast<const ModelParams&, double>(&recommended_depth), py::arg("params"),
          py::arg("c_fraction") = kDefaultDepthFraction);
    m.def("type_probabilities", &type_probabilities, py::arg("d"), py::arg("a"), py::arg("b"));

    py::class_<Hypergraph>(m, "Hypergraph")
        .def(py::init<std::uint32_t, std::uint32_t, const std::vector<std::vector<Vertex>>&>(), py::arg("n"),
             py::arg("d"), py::arg("edges"))
        .def_property_readonly("n", &Hypergraph::n)
        .def_property_readonly("d", &Hypergraph::d)
        .def_property_readonly("num_edges", &Hypergraph::num_edges)
        .def("edges", &Hypergraph::edge_list)
        .def("contains", [](const Hypergraph& h, const std::vector<Vertex>& s) { return h.contains(s); })
        .def("__eq__", [](const Hypergraph& x, const Hypergraph& y) { return x == y; });

    m.def(
        "sample_hsbm",
        [](const ModelParams& p) {
            LabeledHypergraph lh = sample_hsbm(p);
            return py::make_tuple(std::move(lh.graph), from_spins(lh.spins));
        },
        py::arg("params"), "Returns (hypergraph, spins).");

    m.def(
        "saw_matrix", [](const Hypergraph& h, unsigned l) { return triplet_arrays(saw_matrix(h, l)); },
        py::arg("h"), py::arg("l"), "Upper-triangle triplets (rows, cols, counts) of B^(l).");
    m.def(
        "saw_matrix_dense",
        [](const Hypergraph& h, unsigned l) {
            const CountMatrix b = saw_matrix(h, l);
            const auto n = static_cast<py::ssize_t>(b.size());
            py::array_t<std::int64_t> out({n, n});
            auto o = out.mutable_unchecked<2>();
            for (py::ssize_t i = 0; i < n; ++i) {
                for (py::ssize_t j = 0; j < n; ++j) o(i, j) = 0;
            }
            for (const auto& t : b.triplets()) {
                o(t.row, t.col) = t.value;
                o(t.col, t.row) = t.value;
            }
            return out;
        },
        py::arg("h"), py::arg("l"));
    m.def(
        "adjacency_triplets", [](const Hypergraph& h) { return triplet_arrays(adjacency_matrix(h)); },
        py::arg("h"));
    m.def("circuit_count", &circuit_count, py::arg("h"), py::arg("k"));

    m.def(
        "detect",
        [](const Hypergraph& h, unsigned l, double t, std::optional<std::vector<int>> truth, std::uint64_t seed) {
            DetectOptions opt;
            opt.l = l;
            opt.t = t;
            opt.eigen.seed = seed;
            std::optional<SpinAssignment> spins;
            if (truth) spins = to_spins(*truth);
            const DetectionResult r = detect(h, opt, spins ? &*spins : nullptr);
            py::dict out;
            std::vector<double> values;
            std::vector<std::vector<double>> vectors;
            for (const auto& p : r.eigenpairs) {
                values.push_back(p.value);
                vectors.push_back(p.vector);
            }
            out["l"] = r.l;
            out["labels"] = from_spins(r.labels);
            out["eigenvalues"] = values;
            out["eigenvectors"] = vectors;
            out["converged"] = r.converged;
            out["overlap"] = r.overlap ? py::cast(*r.overlap) : py::none();
            out["alignment_s"] = r.alignment_s;
            out["alignment_d"] = r.alignment_d ? py::cast(*r.alignment_d) : py::none();
            return out;
        },
        py::arg("h"), py::arg("l"), py::arg("t") = 0.0, py::arg("truth") = py::none(), py::arg("seed") = 1);

    m.def(
        "bfs_profile",
        [](const Hypergraph& h, const std::vector<int>& spins, Vertex i, unsigned l) {
            const NeighborhoodProfile p = bfs_profile(h, to_spins(spins), i, l);
            py::dict out;
            out["S"] = p.S;
            out["D"] = p.D;
            out["U_plus"] = p.U_plus;
            out["U_minus"] = p.U_minus;
            out["cycle_count"] = p.cycle_count;
            out["tangled"] = p.tangled;
            return out;
        },
        py::arg("h"), py::arg("spins"), py::arg("i"), py::arg("l"));
    m.def(
        "thresholding_statistic",
        [](const Hypergraph& h, const std::vector<int>& spins, double beta, unsigned l) {
            const SdVectors sd = sd_vectors(h, to_spins(spins), l);
            return thresholding_statistic(sd.D, beta, l);
        },
        py::arg("h"), py::arg("spins"), py::arg("beta"), py::arg("l"));

    m.def(
        "martingale_stats",
        [](double a, double b, std::uint32_t d, unsigned depth, std::size_t samples, std::uint64_t seed) {
            GWConfig cfg;
            cfg.a = a;
            cfg.b = b;
            cfg.d = d;
            cfg.depth = depth;
            cfg.seed = seed;
            const MartingaleStats st = martingale_stats(cfg, samples);
            py::list rows;
            for (const auto& r : st.rows) {
                py::dict row;
                row["t"] = r.t;
                row["mean_M"] = r.mean_M;
                row["se_M"] = r.se_M;
                row["var_M"] = r.var_M;
                row["var_M_exact"] = r.var_M_exact;
                row["mean_Delta"] = r.mean_Delta;
                row["se_Delta"] = r.se_Delta;
                row["var_Delta"] = r.var_Delta;
                row["var_Delta_exact"] = r.var_Delta_exact ? py::cast(*r.var_Delta_exact) : py::none();
                rows.append(row);
            }
            py::dict out;
            out["rows"] = rows;
            out["est_E_delta_inf_sq"] = st.est_E_delta_inf_sq;
            out["se_E_delta_inf_sq"] = st.se_E_delta_inf_sq;
            return out;
        },
        py::arg("a"), py::arg("b"), py::arg("d") = 3, py::arg("depth") = 10, py::arg("samples") = 100000,
        py::arg("seed") = 0);
    m.def("binom_pois_tv", &binom_pois_tv, py::arg("m"), py::arg("n"), py::arg("c"));
    m.def(
        "canonical_form_of_neighborhood",
        [](const Hypergraph& h, const std::vector<int>& spins, Vertex i, unsigned depth,
           bool normalize_root) -> std::optional<std::string> {
            const auto tree = neighborhood_tree(h, to_spins(spins), i, depth, normalize_root);
            if (!tree) return std::nullopt;
            return canonical_form(*tree);
        },
        py::arg("h"), py::arg("spins"), py::arg("i"), py::arg("depth"), py::arg("normalize_root") = false);

    m.def(
        "hypergraph_to_json",
        [](const Hypergraph& h, std::optional<std::vector<int>> spins) {
            std::optional<SpinAssignment> s;
            if (spins) s = to_spins(*spins);
            return hypergraph_to_json(h, s ? &*s : nullptr);
        },
        py::arg("h"), py::arg("spins") = py::none());
    m.def(
        "hypergraph_from_json",
        [](const std::string& text) {
            HypergraphFile f = hypergraph_from_json(text);
            return py::make_tuple(std::move(f.graph), f.spins ? py::cast(from_spins(*f.spins)) : py::none());
        },
        py::arg("text"), "Returns (hypergraph, spins or None).");
}
