#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qica/cli.hpp"
#include "qica/covering_array.hpp"
#include "qica/errors.hpp"
#include "qica/graph.hpp"
#include "qica/partition.hpp"
#include "qica/spectra.hpp"

namespace py = pybind11;
using namespace qica;

namespace {

py::int_ to_py(const mpz_class& z) { return py::int_(py::str(z.get_str())); }

py::object to_py(const mpq_class& q) {
    if (q.get_den() == 1) return to_py(q.get_num());
    return py::module_::import("fractions").attr("Fraction")(to_py(q.get_num()), to_py(q.get_den()));
}

mpz_class from_py(const py::int_& v) { return mpz_class(py::str(v).cast<std::string>()); }

PartitionFilter filter_from(const std::string& name, int min_size) {
    if (name == "all") return PartitionFilter::all();
    if (name == "uniform") return PartitionFilter::uniform();
    if (name == "almost-uniform") return PartitionFilter::almost_uniform();
    if (name == "min-size") return PartitionFilter::min_class_size(min_size);
    throw ParameterError("filter must be all, uniform, almost-uniform or min-size");
}

GraphSpec spec_from(const std::string& family, int n, int k, const std::string& relation, const std::string& type, int t,
                    bool uniform) {
    static const std::map<std::string, GraphFamily> fam{{"qi", GraphFamily::QI},         {"uqi", GraphFamily::UQI},
                                                        {"auqi", GraphFamily::AUQI},     {"kneser", GraphFamily::Kneser},
                                                        {"complete", GraphFamily::Complete}, {"relation", GraphFamily::Relation}};
    static const std::map<std::string, SetRelation> rel{{"incomparable", SetRelation::Incomparable},
                                                        {"comparable", SetRelation::Comparable},
                                                        {"disjoint", SetRelation::Disjoint},
                                                        {"intersecting", SetRelation::Intersecting},
                                                        {"partial", SetRelation::PartialIntersecting}};
    auto f = fam.find(family);
    auto r = rel.find(relation);
    if (f == fam.end()) throw ParameterError("unknown graph family '" + family + "'");
    if (r == rel.end()) throw ParameterError("unknown relation '" + relation + "'");
    if (type != "forall" && type != "exists") throw ParameterError("type must be forall or exists");
    GraphSpec s;
    s.family = f->second;
    s.n = n;
    s.k = k;
    s.relation = r->second;
    s.type = type == "forall" ? RelationType::ForAll : RelationType::Exists;
    s.t = t;
    s.uniform = uniform;
    return s;
}

py::list spectrum_list(const Spectrum& s) {
    py::list out;
    for (const auto& e : s.entries) out.append(py::make_tuple(e.value.to_string(), e.multiplicity, e.value.exact()));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Covering arrays, qualitative independence graphs and meet-table spectra";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);
    py::register_exception<StructureError>(m, "StructureError", PyExc_RuntimeError);
    py::register_exception<ArithmeticError>(m, "ArithmeticError", PyExc_ArithmeticError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    // Partitions
    m.def(
        "count_partitions",
        [](int n, int k, const std::string& filter, int min_size) { return to_py(count_partitions(n, k, filter_from(filter, min_size))); },
        py::arg("n"), py::arg("k"), py::arg("filter") = "all", py::arg("min_size") = 1);
    m.def(
        "enumerate_partitions",
        [](int n, int k, const std::string& filter, int min_size) {
            std::vector<std::vector<std::vector<int>>> out;
            for (const auto& p : enumerate_partitions(n, k, filter_from(filter, min_size))) out.push_back(p.classes());
            return out;
        },
        py::arg("n"), py::arg("k"), py::arg("filter") = "all", py::arg("min_size") = 1,
        "0-indexed class lists in lexicographic order");
    m.def(
        "is_qualitatively_independent",
        [](const std::string& p, const std::string& q) { return is_qualitatively_independent(Partition::parse(p), Partition::parse(q)); },
        py::arg("p"), py::arg("q"));
    m.def(
        "baranyai_factorization",
        [](int n, int c) {
            std::vector<std::string> out;
            for (const auto& p : baranyai_factorization(n, c).factors) out.push_back(p.to_string());
            return out;
        },
        py::arg("n"), py::arg("c"));

    // Covering arrays
    m.def(
        "construct_finite_field_ca", [](int k) { return construct_finite_field_ca(k).rows(); }, py::arg("k"));
    m.def(
        "verify_ca",
        [](const std::vector<std::vector<int>>& rows, int k) { return verify(CoveringArray::from_rows(k, rows)).valid; },
        py::arg("rows"), py::arg("k"));
    m.def(
        "expand_starter", [](const std::vector<int>& v, int k) { return expand_starter({k, v}).rows(); }, py::arg("v"),
        py::arg("k"));
    m.def(
        "verify_starter", [](const std::vector<int>& v, int k) { return verify_starter({k, v}).valid; }, py::arg("v"),
        py::arg("k"));
    m.def(
        "search_starter",
        [](int k, int r, const std::string& mode, std::uint64_t seed, long budget) -> py::object {
            const auto res = search_starter(k, r, mode == "hillclimb" ? StarterSearchMode::HillClimb : StarterSearchMode::Exhaustive,
                                            seed, budget);
            if (res.outcome == SearchOutcome::Unknown) throw ResourceError("starter search budget exhausted");
            if (!res.starter) return py::none();
            return py::cast(res.starter->v);
        },
        py::arg("k"), py::arg("r"), py::arg("mode") = "exhaustive", py::arg("seed") = 1, py::arg("budget") = 2'000'000'000L,
        "Starter entries, or None when none exists");
    m.def("binary_can", &binary_can, py::arg("r"));
    m.def(
        "ca_to_mols", [](const std::vector<std::vector<int>>& rows, int k) { return ca_to_mols(CoveringArray::from_rows(k, rows)).squares; },
        py::arg("rows"), py::arg("k"));

    // Graphs
    m.def(
        "build_graph",
        [](const std::string& family, int n, int k, const std::string& relation, const std::string& type, int t, bool uniform) {
            const Graph g = build_graph(spec_from(family, n, k, relation, type, t, uniform));
            py::dict d;
            d["name"] = g.name();
            d["vertices"] = g.size();
            d["edges"] = g.edge_count();
            std::vector<std::string> labels;
            for (const auto& p : g.labels()) labels.push_back(p.to_string());
            d["labels"] = labels;
            return d;
        },
        py::arg("family"), py::arg("n"), py::arg("k"), py::arg("relation") = "intersecting", py::arg("type") = "forall",
        py::arg("t") = 1, py::arg("uniform") = true);
    m.def(
        "max_clique",
        [](const std::string& family, int n, int k, long budget) {
            CliqueOptions opt;
            opt.budget = budget;
            const auto res = max_clique(build_graph(spec_from(family, n, k, "intersecting", "forall", 1, true)), opt);
            return py::make_tuple(res.vertices, res.exact);
        },
        py::arg("family"), py::arg("n"), py::arg("k"), py::arg("budget") = 50'000'000L);
    m.def(
        "chromatic_number",
        [](const std::string& family, int n, int k, long budget) {
            const auto res = chromatic_number(build_graph(spec_from(family, n, k, "intersecting", "forall", 1, true)), budget);
            return py::make_tuple(res.upper, res.exact, res.coloring);
        },
        py::arg("family"), py::arg("n"), py::arg("k"), py::arg("budget") = 20'000'000L);
    m.def("qi2_chain_coloring", &qi2_chain_coloring, py::arg("n"));

    // Spectra
    m.def(
        "spectrum", [](int n, int k, int jobs) { return spectrum_list(spectrum(n, k, QuotientRelation::qi(), jobs)); }, py::arg("n"),
        py::arg("k"), py::arg("jobs") = 1, "(eigenvalue, multiplicity, exact) in decreasing order");
    m.def(
        "kneser_spectrum", [](int n, int r) { return spectrum_list(kneser_spectrum(n, r)); }, py::arg("n"), py::arg("r"));
    m.def(
        "char_poly",
        [](const Matrix& mat) {
            py::list out;
            for (const auto& c : char_poly(mat).c) out.append(to_py(c));
            return out;
        },
        py::arg("matrix"), "Coefficients of det(xI - M), constant term first");
    m.def(
        "meet_table",
        [](const std::string& p, const std::string& q) {
            const auto t = meet_table(Partition::parse(p), Partition::parse(q));
            std::vector<std::vector<int>> rows(t.k, std::vector<int>(t.k));
            for (int i = 0; i < t.k; ++i)
                for (int j = 0; j < t.k; ++j) rows[i][j] = t.at(i, j);
            return rows;
        },
        py::arg("p"), py::arg("q"));
    m.def(
        "meet_classes",
        [](int n, int k) {
            const auto mcp = equitable_partition(n, k);
            py::list out;
            for (const auto& c : mcp.classes) out.append(py::make_tuple(c.table.to_string(), c.representative.to_string(), c.size));
            return out;
        },
        py::arg("n"), py::arg("k"));
    m.def(
        "modified_eigenmatrix",
        [](int n, int k, int jobs) {
            const auto e = modified_eigenmatrix(n, k, jobs);
            py::list rows;
            for (std::size_t r = 0; r < e.values.size(); ++r) {
                std::vector<std::string> vals;
                for (const auto& v : e.values[r]) vals.push_back(v.to_string());
                rows.append(py::make_tuple(e.multiplicities[r], vals));
            }
            py::dict d;
            d["columns"] = e.column_names;
            d["rows"] = rows;
            d["exact"] = e.exact;
            d["commuting"] = e.commuting;
            return d;
        },
        py::arg("n"), py::arg("k"), py::arg("jobs") = 1);
    m.def(
        "check_association_scheme",
        [](int n, int k, const std::string& mode, int samples, std::uint64_t seed, int jobs) {
            SchemeOptions o;
            o.mode = mode == "sampled" ? SchemeMode::Sampled : SchemeMode::Full;
            o.samples = samples;
            o.seed = seed;
            o.jobs = jobs;
            const auto v = check_association_scheme(n, k, o);
            py::dict d;
            d["symmetric"] = v.symmetric;
            d["scheme"] = v.scheme;
            d["classes"] = v.classes;
            d["pairs_checked"] = v.pairs_checked;
            d["reason"] = v.reason;
            if (v.counterexample)
                d["counterexample"] = py::make_tuple(v.counterexample->first.to_string(), v.counterexample->second.to_string());
            return d;
        },
        py::arg("n"), py::arg("k"), py::arg("mode") = "full", py::arg("samples") = 20, py::arg("seed") = 1, py::arg("jobs") = 1);
    m.def(
        "ratio_bounds",
        [](const py::int_& v, const py::int_& d, const py::int_& tau) {
            const auto r = ratio_bounds(from_py(v), from_py(d), mpq_class(from_py(tau)));
            return py::make_tuple(to_py(r.alpha), to_py(r.omega));
        },
        py::arg("v"), py::arg("d"), py::arg("tau"));

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a qica command in-process: (exit code, stdout, stderr)");
}
