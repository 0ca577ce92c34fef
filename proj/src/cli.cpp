#include "qica/cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qica/covering_array.hpp"
#include "qica/errors.hpp"
#include "qica/graph.hpp"
#include "qica/partition.hpp"
#include "qica/spectra.hpp"

namespace qica::cli {

namespace {

/// A failed command with a chosen exit code and message.
struct Exit {
    int code;
    std::string message;
};

struct Common {
    std::string out_path;
    int jobs = 1;
    std::string format = "tsv";
    std::uint64_t seed = 1;
    long budget = 50'000'000;
};

struct GraphSource {
    std::string file;
    std::string family = "qi";
    int n = 0;
    int k = 0;
    std::string relation = "intersecting";
    std::string type = "forall";
    int t = 1;
    bool all_partitions = false;
};

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) {
        if (path.empty() || path == "-") {
            os_ = &fallback;
        } else {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw Exit{kUsage, "cannot open '" + path + "' for writing"};
            os_ = file_.get();
        }
    }
    std::ostream& operator*() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Exit{kUsage, "cannot open '" + path + "'"};
    return in;
}

void add_common(CLI::App* c, Common& o, bool with_format = false) {
    c->add_option("--out,-o", o.out_path, "Output path (default: standard output)");
    c->add_option("--jobs,-j", o.jobs, "Worker threads")->check(CLI::Range(1, 256));
    c->add_option("--seed", o.seed, "Random seed");
    c->add_option("--budget", o.budget, "Search node budget")->check(CLI::PositiveNumber);
    if (with_format) c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"tsv", "json"}));
}

void add_graph_source(CLI::App* c, GraphSource& g) {
    c->add_option("--graph,-g", g.file, "Graph file (otherwise built from --family)");
    c->add_option("--family", g.family, "qi, uqi, auqi, kneser, complete or relation")
        ->check(CLI::IsMember({"qi", "uqi", "auqi", "kneser", "complete", "relation"}));
    c->add_option("-n", g.n, "Ground set size (vertex count for complete)");
    c->add_option("-k", g.k, "Number of classes (subset size for kneser)");
    c->add_option("--relation", g.relation, "Set relation for relation graphs")
        ->check(CLI::IsMember({"incomparable", "comparable", "disjoint", "intersecting", "partial"}));
    c->add_option("--type", g.type, "forall or exists")->check(CLI::IsMember({"forall", "exists"}));
    c->add_option("--t", g.t, "Threshold for partial intersection");
    c->add_flag("--all-partitions", g.all_partitions, "Relation graphs over all k-partitions instead of uniform ones");
}

SetRelation parse_relation(const std::string& s) {
    if (s == "incomparable") return SetRelation::Incomparable;
    if (s == "comparable") return SetRelation::Comparable;
    if (s == "disjoint") return SetRelation::Disjoint;
    if (s == "partial") return SetRelation::PartialIntersecting;
    return SetRelation::Intersecting;
}

GraphSpec to_spec(const GraphSource& g, const std::string& family) {
    GraphSpec s;
    static const std::map<std::string, GraphFamily> fam{{"qi", GraphFamily::QI},         {"uqi", GraphFamily::UQI},
                                                        {"auqi", GraphFamily::AUQI},     {"kneser", GraphFamily::Kneser},
                                                        {"complete", GraphFamily::Complete}, {"relation", GraphFamily::Relation}};
    s.family = fam.at(family);
    s.n = g.n;
    s.k = g.k;
    s.relation = parse_relation(g.relation);
    s.type = g.type == "exists" ? RelationType::Exists : RelationType::ForAll;
    s.t = g.t;
    s.uniform = !g.all_partitions;
    return s;
}

Graph load_graph(const GraphSource& g) {
    if (!g.file.empty()) {
        auto in = open_input(g.file);
        return read_graph(in);
    }
    if (g.n <= 0) throw Exit{kUsage, "give --graph or -n/-k with --family"};
    return build_graph(to_spec(g, g.family));
}

PartitionFilter parse_filter(const std::string& s) {
    if (s == "all") return PartitionFilter::all();
    if (s == "uniform") return PartitionFilter::uniform();
    if (s == "almost-uniform") return PartitionFilter::almost_uniform();
    if (s.rfind("min-size:", 0) == 0) {
        try {
            return PartitionFilter::min_class_size(std::stoi(s.substr(9)));
        } catch (const std::exception&) {
        }
    }
    throw Exit{kUsage, "unknown filter '" + s + "' (all, uniform, almost-uniform, min-size:S)"};
}

void write_vertex_list(std::ostream& os, const Graph& g, const std::vector<int>& vs) {
    for (int v : vs) {
        os << v;
        if (!g.labels().empty()) os << '\t' << g.labels()[v].to_string();
        os << '\n';
    }
}

int outcome_code(SearchOutcome o) {
    switch (o) {
        case SearchOutcome::Found: return kOk;
        case SearchOutcome::None: return kNegative;
        case SearchOutcome::Unknown: return kResource;
    }
    return kResource;
}

const char* outcome_name(SearchOutcome o) {
    switch (o) {
        case SearchOutcome::Found: return "found";
        case SearchOutcome::None: return "none";
        case SearchOutcome::Unknown: return "unknown";
    }
    return "unknown";
}

QuotientRelation parse_quotient_relation(const std::string& s) {
    if (s == "qi") return QuotientRelation::qi();
    if (s.rfind("meet:", 0) == 0) {
        try {
            return QuotientRelation::meet(std::stoi(s.substr(5)));
        } catch (const std::exception&) {
        }
    }
    throw Exit{kUsage, "relation must be qi or meet:<class index>"};
}

BoundFamily parse_bound_family(const std::string& s) {
    static const std::map<std::string, BoundFamily> m{{"tc-point-balanced", BoundFamily::TcPointBalanced},
                                                      {"tc-log", BoundFamily::TcLog},
                                                      {"tc-square-plus-two", BoundFamily::TcSquarePlusTwo},
                                                      {"pbtc-rows", BoundFamily::PbtcRows},
                                                      {"vertex-transitive", BoundFamily::VertexTransitive},
                                                      {"chromatic-square", BoundFamily::ChromaticSquare},
                                                      {"fractional-square", BoundFamily::FractionalSquare}};
    return m.at(s);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Covering arrays, qualitative independence graphs and their spectra", "qica"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "qica 0.1.0");
    Common common;
    std::function<int()> action;
    auto bind = [&](CLI::App* c, std::function<int()> f) { c->callback([&action, f] { action = f; }); };

    // ---- ca ------------------------------------------------------------------
    auto* ca = app.add_subcommand("ca", "Covering arrays");
    ca->require_subcommand(1);

    std::string method = "finite-field";
    int ca_k = 0, ca_r = 0, iterations = 1;
    std::string starter_text, starter_file, input_file;
    auto* construct = ca->add_subcommand("construct", "Build a covering array");
    add_common(construct, common);
    construct->add_option("--method", method, "finite-field, block-recursive or starter")
        ->check(CLI::IsMember({"finite-field", "block-recursive", "starter"}));
    construct->add_option("-k", ca_k, "Alphabet size");
    construct->add_option("--iterations", iterations, "Rounds of reduced block recursion")->check(CLI::PositiveNumber);
    construct->add_option("--starter", starter_text, "Starter vector entries, e.g. \"0 1 1 1 2\"");
    construct->add_option("--starter-file", starter_file, "Starter vector file");
    bind(construct, [&] {
        CoveringArray result;
        if (method == "finite-field") {
            result = construct_finite_field_ca(ca_k);
        } else if (method == "block-recursive") {
            result = iterate_block_recursive(ca_k, iterations);
        } else {
            StarterVector s;
            if (!starter_file.empty()) {
                auto in = open_input(starter_file);
                s = read_starter(in);
            } else {
                if (starter_text.empty()) throw Exit{kUsage, "--method starter needs --starter or --starter-file"};
                std::istringstream ss(starter_text);
                for (int x; ss >> x;) s.v.push_back(x);
                if (!ss.eof()) throw Exit{kUsage, "starter entries must be integers"};
                s.k = ca_k;
            }
            result = expand_starter(s);
        }
        Output o(common.out_path, out);
        write_ca(*o, result);
        return kOk;
    });

    auto* verify_cmd = ca->add_subcommand("verify", "Check pairwise coverage of an array or a starter vector");
    add_common(verify_cmd, common);
    verify_cmd->add_option("file", input_file, "Array (ca ...) or starter (sv ...) file")->required();
    bind(verify_cmd, [&] {
        auto in = open_input(input_file);
        std::string head;
        in >> head;
        in.seekg(0);
        Output o(common.out_path, out);
        if (head == "sv") {
            const StarterVector s = read_starter(in);
            const StarterReport rep = verify_starter(s);
            *o << (rep.valid ? "valid" : "invalid") << "\tmissing " << rep.missing.size() << '\n';
            for (auto [shift, d] : rep.missing) *o << "shift " << shift << "\tdifference " << d << '\n';
            return rep.valid ? kOk : kNegative;
        }
        const CoveringArray a = read_ca(in);
        const VerificationReport rep = verify(a);
        *o << (rep.valid ? "valid" : "invalid") << "\tCA(" << a.n() << "," << a.r() << "," << a.k() << ")\tmisses "
           << rep.misses.size() << '\n';
        for (const auto& m : rep.misses)
            *o << "rows " << m.row_a << "," << m.row_b << "\tsymbols " << m.sym_a << "," << m.sym_b << '\n';
        return rep.valid ? kOk : kNegative;
    });

    std::string mode = "exhaustive";
    auto* search = ca->add_subcommand("search-starter", "Search for a starter vector");
    add_common(search, common);
    search->add_option("-k", ca_k, "Alphabet size")->required();
    search->add_option("-r", ca_r, "Number of rows")->required();
    search->add_option("--mode", mode, "exhaustive or hillclimb")->check(CLI::IsMember({"exhaustive", "hillclimb"}));
    bind(search, [&] {
        const auto res = search_starter(ca_k, ca_r, mode == "exhaustive" ? StarterSearchMode::Exhaustive : StarterSearchMode::HillClimb,
                                        common.seed, common.budget);
        err << outcome_name(res.outcome) << " after " << res.steps << " steps\n";
        if (res.starter) {
            Output o(common.out_path, out);
            write_starter(*o, *res.starter);
        } else if (res.outcome == SearchOutcome::None) {
            Output o(common.out_path, out);
            *o << "none\n";
        }
        return outcome_code(res.outcome);
    });

    auto* to_mols = ca->add_subcommand("to-mols", "Convert an orthogonal array to MOLS");
    add_common(to_mols, common);
    to_mols->add_option("file", input_file, "Array file")->required();
    bind(to_mols, [&] {
        auto in = open_input(input_file);
        const LatinSquareSet s = ca_to_mols(read_ca(in));
        if (const auto problem = check_mols(s); !problem.empty()) throw StructureError(problem);
        Output o(common.out_path, out);
        *o << "mols " << s.k << ' ' << s.squares.size() << '\n';
        for (std::size_t i = 0; i < s.squares.size(); ++i) {
            if (i) *o << '\n';
            for (const auto& row : s.squares[i]) {
                for (std::size_t j = 0; j < row.size(); ++j) *o << (j ? " " : "") << row[j];
                *o << '\n';
            }
        }
        return kOk;
    });

    std::string bound_family;
    BoundQuery bq;
    auto* bounds = ca->add_subcommand("bounds", "Evaluate size bounds");
    add_common(bounds, common);
    bounds->add_option("--family", bound_family, "Bound family")
        ->required()
        ->check(CLI::IsMember({"binary-can", "tc-point-balanced", "tc-log", "tc-square-plus-two", "pbtc-rows", "vertex-transitive",
                               "chromatic-square", "fractional-square"}));
    bounds->add_option("-r", bq.r, "Rows");
    bounds->add_option("-k", bq.k, "Alphabet size / classes");
    bounds->add_option("-n", bq.n, "Columns / ground set size");
    bounds->add_option("-b", bq.b, "Blocks");
    bounds->add_option("--pbtc", bq.pbtc, "Point-balanced size");
    bind(bounds, [&] {
        Output o(common.out_path, out);
        if (bound_family == "binary-can") {
            if (bq.r < 1) throw ParameterError("binary-can needs r >= 1");
            *o << "binary_can\t" << binary_can(bq.r) << '\n';
            return kOk;
        }
        bq.family = parse_bound_family(bound_family);
        for (const auto& b : size_bounds(bq)) *o << b.name << '\t' << b.value.get_str() << '\t' << b.integral.get_str() << '\n';
        return kOk;
    });

    // ---- qi ------------------------------------------------------------------
    auto* qi = app.add_subcommand("qi", "Qualitative independence and related graphs");
    qi->require_subcommand(1);
    GraphSource gs;

    auto* build = qi->add_subcommand("build", "Build a graph and write it");
    add_common(build, common);
    add_graph_source(build, gs);
    bind(build, [&] {
        const Graph g = load_graph(gs);
        Output o(common.out_path, out);
        write_graph(*o, g);
        return kOk;
    });

    auto* info = qi->add_subcommand("info", "Regularity and diameter");
    add_common(info, common);
    add_graph_source(info, gs);
    bind(info, [&] {
        const Graph g = load_graph(gs);
        const auto rep = regularity_and_diameter(g);
        Output o(common.out_path, out);
        *o << "vertices\t" << g.size() << "\nedges\t" << g.edge_count() << "\nregular\t" << (rep.regular ? "yes" : "no")
           << "\nmin_degree\t" << rep.min_degree << "\nmax_degree\t" << rep.max_degree << "\ndiameter\t"
           << (rep.connected ? std::to_string(rep.diameter) : "inf") << '\n';
        return kOk;
    });

    auto* clique = qi->add_subcommand("clique", "Maximum clique");
    add_common(clique, common);
    add_graph_source(clique, gs);
    int upper = -1;
    clique->add_option("--upper-bound", upper, "Known upper bound; stop when reached");
    bind(clique, [&] {
        const Graph g = load_graph(gs);
        CliqueOptions opt;
        opt.budget = common.budget;
        opt.upper_bound = upper;
        const auto res = max_clique(g, opt);
        Output o(common.out_path, out);
        *o << "# clique " << res.vertices.size() << (res.exact ? " exact" : " lower-bound") << '\n';
        write_vertex_list(*o, g, res.vertices);
        return res.exact ? kOk : kResource;
    });

    auto* indep = qi->add_subcommand("indep", "Maximum independent set");
    add_common(indep, common);
    add_graph_source(indep, gs);
    long ratio = -1;
    indep->add_option("--ratio-bound", ratio, "Upper bound certifying optimality (e.g. from the eigenvalue ratio bound)");
    bind(indep, [&] {
        const Graph g = load_graph(gs);
        CliqueOptions opt;
        opt.budget = common.budget;
        const auto res = max_independent_set(g, opt, ratio >= 0 ? std::optional<long>(ratio) : std::nullopt);
        Output o(common.out_path, out);
        *o << "# independent " << res.vertices.size() << (res.exact ? " exact" : " lower-bound")
           << (res.certified_by_ratio ? " ratio-certified" : "") << '\n';
        write_vertex_list(*o, g, res.vertices);
        return res.exact ? kOk : kResource;
    });

    auto* chroma = qi->add_subcommand("chroma", "Chromatic number");
    add_common(chroma, common);
    add_graph_source(chroma, gs);
    bind(chroma, [&] {
        const Graph g = load_graph(gs);
        const auto res = chromatic_number(g, common.budget);
        Output o(common.out_path, out);
        *o << "# chromatic " << res.upper << (res.exact ? " exact" : " bounds " + std::to_string(res.lower) + ".." + std::to_string(res.upper))
           << '\n';
        for (int v = 0; v < g.size(); ++v) *o << v << '\t' << res.coloring[v] << '\n';
        return res.exact ? kOk : kResource;
    });

    std::string target_file;
    int target_n = 0, target_k = 0;
    auto* hom = qi->add_subcommand("hom", "Homomorphism into a target graph");
    add_common(hom, common);
    add_graph_source(hom, gs);
    hom->add_option("--target", target_file, "Target graph file");
    hom->add_option("--target-n", target_n, "Target QI(n,k): n");
    hom->add_option("--target-k", target_k, "Target QI(n,k): k");
    bind(hom, [&] {
        const Graph g = load_graph(gs);
        Graph h;
        if (!target_file.empty()) {
            auto in = open_input(target_file);
            h = read_graph(in);
        } else if (target_n > 0) {
            h = build_graph({GraphFamily::QI, target_n, target_k});
        } else {
            throw Exit{kUsage, "give --target or --target-n/--target-k"};
        }
        const auto res = find_homomorphism(g, h, common.budget);
        Output o(common.out_path, out);
        *o << "# homomorphism " << outcome_name(res.outcome) << '\n';
        if (res.outcome == SearchOutcome::Found)
            for (int v = 0; v < g.size(); ++v) {
                *o << v << '\t' << res.map[v];
                if (!h.labels().empty()) *o << '\t' << h.labels()[res.map[v]].to_string();
                *o << '\n';
            }
        return outcome_code(res.outcome);
    });

    int cag_n = 0, cag_k = 0;
    auto* cag = qi->add_subcommand("ca-on-graph", "Covering array on a graph");
    add_common(cag, common);
    cag->add_option("--graph,-g", gs.file, "Graph file")->required();
    cag->add_option("-n", cag_n, "Columns")->required();
    cag->add_option("-k", cag_k, "Alphabet size")->required();
    bind(cag, [&] {
        auto in = open_input(gs.file);
        const Graph g = read_graph(in);
        const auto res = covering_array_on_graph(g, cag_n, cag_k, common.budget);
        err << outcome_name(res.outcome) << (res.via_coloring ? " via coloring" : "") << '\n';
        if (res.rows) {
            Output o(common.out_path, out);
            write_ca(*o, *res.rows);
        }
        return outcome_code(res.outcome);
    });

    // ---- spectra -------------------------------------------------------------
    int sp_n = 0, sp_k = 0;
    std::string sp_rel = "qi";
    auto* spectra_cmd = app.add_subcommand("spectra", "Spectrum of a uniform partition graph via its meet-table quotient");
    add_common(spectra_cmd, common, true);
    spectra_cmd->add_option("-n", sp_n, "Ground set size")->required();
    spectra_cmd->add_option("-k", sp_k, "Number of classes")->required();
    spectra_cmd->add_option("--relation", sp_rel, "qi or meet:<class index>");
    bind(spectra_cmd, [&] {
        const Spectrum s = spectrum(sp_n, sp_k, parse_quotient_relation(sp_rel), common.jobs);
        Output o(common.out_path, out);
        if (common.format == "json")
            *o << spectrum_json(s) << '\n';
        else
            write_spectrum_tsv(*o, s);
        return kOk;
    });

    auto* eig = app.add_subcommand("eigenmatrix", "Modified eigenmatrix of the meet-table scheme");
    add_common(eig, common, true);
    eig->add_option("-n", sp_n, "Ground set size")->required();
    eig->add_option("-k", sp_k, "Number of classes")->required();
    bind(eig, [&] {
        const EigenMatrix e = modified_eigenmatrix(sp_n, sp_k, common.jobs);
        Output o(common.out_path, out);
        if (common.format == "json")
            *o << eigenmatrix_json(e) << '\n';
        else
            write_eigenmatrix_tsv(*o, e);
        return e.commuting ? kOk : kNegative;
    });

    std::string scheme_mode = "full";
    SchemeOptions sopt;
    auto* scheme = app.add_subcommand("scheme-check", "Check whether the meet-table relations form an association scheme");
    add_common(scheme, common, true);
    scheme->add_option("-n", sp_n, "Ground set size")->required();
    scheme->add_option("-k", sp_k, "Number of classes")->required();
    scheme->add_option("--mode", scheme_mode, "full or sampled")->check(CLI::IsMember({"full", "sampled"}));
    scheme->add_option("--samples", sopt.samples, "Samples per class in sampled mode")->check(CLI::PositiveNumber);
    scheme->add_option("--full-cap", sopt.full_cap, "Largest vertex count for full mode");
    bind(scheme, [&] {
        sopt.mode = scheme_mode == "full" ? SchemeMode::Full : SchemeMode::Sampled;
        sopt.seed = common.seed;
        sopt.jobs = common.jobs;
        const SchemeVerdict v = check_association_scheme(sp_n, sp_k, sopt);
        Output o(common.out_path, out);
        if (common.format == "json") {
            nlohmann::json j{{"symmetric", v.symmetric}, {"scheme", v.scheme}, {"complete", v.complete},
                             {"classes", v.classes},     {"pairs_checked", v.pairs_checked}, {"reason", v.reason}};
            if (v.counterexample)
                j["counterexample"] = {v.counterexample->first.to_string(), v.counterexample->second.to_string()};
            *o << j.dump(2) << '\n';
        } else {
            *o << "symmetric\t" << (v.symmetric ? "yes" : "no") << "\nscheme\t" << (v.scheme ? "yes" : "no") << "\nmode\t"
               << scheme_mode << "\nclasses\t" << v.classes << "\npairs_checked\t" << v.pairs_checked << '\n';
            if (!v.reason.empty()) *o << "reason\t" << v.reason << '\n';
            if (v.counterexample)
                *o << "counterexample\t" << v.counterexample->first.to_string() << "\t" << v.counterexample->second.to_string()
                   << '\n';
        }
        return v.scheme ? kOk : kNegative;
    });

    // ---- extremal ------------------------------------------------------------
    auto* extremal = app.add_subcommand("extremal", "Extremal partition systems by exact search");
    extremal->require_subcommand(1);
    auto* emax = extremal->add_subcommand("max", "Largest family of partitions pairwise in the given relation");
    add_common(emax, common);
    emax->add_option("-n", gs.n, "Ground set size")->required();
    emax->add_option("-k", gs.k, "Number of classes")->required();
    emax->add_option("--relation", gs.relation, "Set relation")
        ->required()
        ->check(CLI::IsMember({"incomparable", "comparable", "disjoint", "intersecting", "partial"}));
    emax->add_option("--type", gs.type, "forall or exists")->required()->check(CLI::IsMember({"forall", "exists"}));
    emax->add_option("--t", gs.t, "Threshold for partial intersection");
    emax->add_flag("--all-partitions", gs.all_partitions, "Search all k-partitions instead of uniform ones");
    bind(emax, [&] {
        const Graph g = build_graph(to_spec(gs, "relation"));
        CliqueOptions opt;
        opt.budget = common.budget;
        const auto res = max_clique(g, opt);
        Output o(common.out_path, out);
        *o << "# " << g.name() << " maximum " << res.vertices.size() << (res.exact ? " exact" : " lower-bound") << '\n';
        write_vertex_list(*o, g, res.vertices);
        return res.exact ? kOk : kResource;
    });

    // ---- partition -----------------------------------------------------------
    auto* part = app.add_subcommand("partition", "Set partitions");
    part->require_subcommand(1);
    int pn = 0, pk = 0;
    std::string filter = "all";
    auto* penum = part->add_subcommand("enum", "Enumerate k-partitions in lexicographic order");
    auto* pcount = part->add_subcommand("count", "Count k-partitions");
    for (auto* c : {penum, pcount}) {
        add_common(c, common);
        c->add_option("-n", pn, "Ground set size")->required();
        c->add_option("-k", pk, "Number of classes")->required();
        c->add_option("--filter", filter, "all, uniform, almost-uniform or min-size:S");
    }
    bind(penum, [&] {
        const PartitionFilter f = parse_filter(filter);
        validate_partition_params(pn, pk, f);
        if (count_partitions(pn, pk, f) > default_vertex_cap())
            throw ResourceError("more partitions than the vertex cap (QICA_VERTEX_CAP)");
        Output o(common.out_path, out);
        for_each_partition(pn, pk, f, [&](std::span<const std::uint8_t> lab) {
            *o << Partition::from_labels(lab).to_string() << '\n';
            return true;
        });
        return kOk;
    });
    bind(pcount, [&] {
        const PartitionFilter f = parse_filter(filter);
        Output o(common.out_path, out);
        *o << count_partitions(pn, pk, f).get_str() << '\n';
        return kOk;
    });
    int bc = 0;
    auto* bar = part->add_subcommand("baranyai", "1-factorization of the complete c-uniform hypergraph");
    add_common(bar, common);
    bar->add_option("-n", pn, "Ground set size")->required();
    bar->add_option("-c", bc, "Class size")->required();
    bind(bar, [&] {
        const OneFactorization f = baranyai_factorization(pn, bc, common.budget);
        if (const auto problem = check_one_factorization(f); !problem.empty()) throw StructureError(problem);
        Output o(common.out_path, out);
        *o << "# " << f.factors.size() << " factors\n";
        for (const auto& p : f.factors) *o << p.to_string() << '\n';
        return kOk;
    });

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << "qica 0.1.0\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "qica: " << e.what() << '\n';
        return kUsage;
    }
    if (!action) {
        err << "qica: missing command\n";
        return kUsage;
    }
    try {
        return action();
    } catch (const Exit& e) {
        err << "qica: " << e.message << '\n';
        return e.code;
    } catch (const ParseError& e) {
        err << "qica: parse error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParameterError& e) {
        err << "qica: " << e.what() << '\n';
        return kUsage;
    } catch (const ResourceError& e) {
        err << "qica: " << e.what() << '\n';
        return kResource;
    } catch (const StructureError& e) {
        err << "qica: " << e.what() << '\n';
        return kNegative;
    } catch (const ArithmeticError& e) {
        err << "qica: " << e.what() << '\n';
        return kNegative;
    } catch (const std::bad_alloc&) {
        err << "qica: out of memory\n";
        return kResource;
    }
}

}  // namespace qica::cli
