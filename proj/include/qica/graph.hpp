#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qica/covering_array.hpp"
#include "qica/partition.hpp"

namespace qica {

/// Simple undirected graph with bitset adjacency rows. Vertices may carry
/// partition labels.
class Graph {
public:
    Graph() = default;
    explicit Graph(int n, std::string name = {});

    int size() const noexcept { return n_; }
    int words() const noexcept { return words_; }
    const std::string& name() const noexcept { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    /// Throws ParameterError on self-loops or out-of-range endpoints.
    void add_edge(int u, int v);
    bool adjacent(int u, int v) const { return (row(u)[v >> 6] >> (v & 63)) & 1; }
    const std::uint64_t* row(int v) const { return adj_.data() + static_cast<std::size_t>(v) * words_; }
    int degree(int v) const;
    long edge_count() const;
    std::vector<int> neighbors(int v) const;
    std::vector<std::pair<int, int>> edges() const;

    const std::vector<Partition>& labels() const noexcept { return labels_; }
    /// Must match the vertex count.
    void set_labels(std::vector<Partition> labels);

    Graph complement() const;
    Graph induced(const std::vector<int>& vertices) const;

    friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.adj_ == b.adj_; }

private:
    std::uint64_t* mrow(int v) { return adj_.data() + static_cast<std::size_t>(v) * words_; }

    int n_ = 0;
    int words_ = 0;
    std::vector<std::uint64_t> adj_;
    std::vector<Partition> labels_;
    std::string name_;
};

enum class GraphFamily { QI, UQI, AUQI, Kneser, Complete, Relation };
enum class SetRelation { Incomparable, Comparable, Disjoint, Intersecting, PartialIntersecting };
enum class RelationType { ForAll, Exists };

struct GraphSpec {
    GraphFamily family = GraphFamily::QI;
    int n = 0;
    /// Number of classes, or the subset size r for Kneser graphs.
    int k = 0;
    SetRelation relation = SetRelation::Intersecting;
    RelationType type = RelationType::ForAll;
    bool uniform = true;
    /// Threshold for partial t-intersection.
    int t = 1;

    std::string describe() const;
};

/// QICA_VERTEX_CAP if set, else 100000.
long default_vertex_cap();

/// Vertex order is the partition enumeration order (lexicographic canonical
/// class lists); Kneser vertices are r-subsets in colex-free lexicographic order.
Graph build_graph(const GraphSpec& spec, long vertex_cap = default_vertex_cap());

/// Relation between two partitions under a symmetric type.
bool partitions_related(const Partition& p, const Partition& q, SetRelation rel, RelationType type, int t = 1);

// ---------------------------------------------------------------------------
// Solvers. Budgets count search nodes.

struct CliqueOptions {
    long budget = 50'000'000;
    /// Known upper bound; search stops once a clique of this size is found.
    int upper_bound = -1;
    /// Stop as soon as a clique of at least this size is found.
    int target = -1;
};

struct CliqueResult {
    std::vector<int> vertices;
    /// True when the search completed or the size meets upper_bound.
    bool exact = false;
    long nodes = 0;
};

CliqueResult max_clique(const Graph& g, const CliqueOptions& opt = {});

struct IndependentSetResult {
    std::vector<int> vertices;
    bool exact = false;
    /// Size equals the floor of the supplied ratio bound.
    bool certified_by_ratio = false;
    long nodes = 0;
};

/// ratio_bound is an externally supplied upper bound (e.g. the eigenvalue ratio bound).
IndependentSetResult max_independent_set(const Graph& g, const CliqueOptions& opt = {},
                                         std::optional<long> ratio_bound = std::nullopt);

struct ColoringResult {
    /// Best coloring found (color per vertex, 0-based) and its number of colors.
    std::vector<int> coloring;
    int upper = 0;
    int lower = 0;
    bool exact = false;
    long nodes = 0;
};

/// Exact when lower == upper. The lower bound combines the clique number with
/// ceil(|H| / alpha(H)) over degree classes H; a hint coloring seeds the upper bound.
ColoringResult chromatic_number(const Graph& g, long budget = 20'000'000,
                                const std::vector<int>* hint = nullptr);

bool is_proper_coloring(const Graph& g, const std::vector<int>& coloring);
int color_count(const std::vector<int>& coloring);

/// Maximum matching in a general graph (Edmonds blossom). mate[v] = -1 when unmatched.
std::vector<int> maximum_matching(const Graph& g);

/// Proper coloring of build_graph(QI(n,2)) by paired symmetric chains,
/// using ceil(C(n, n/2) / 2) colors; vertex order matches build_graph.
std::vector<int> qi2_chain_coloring(int n);

/// Image of a 2-partition under the chain projection onto the middle level.
Partition core_project(const Partition& p);

struct HomomorphismResult {
    SearchOutcome outcome = SearchOutcome::Unknown;
    std::vector<int> map;
    long nodes = 0;
};

HomomorphismResult find_homomorphism(const Graph& g, const Graph& h, long budget = 50'000'000);
bool is_homomorphism(const Graph& g, const Graph& h, const std::vector<int>& map);

struct GraphCAResult {
    SearchOutcome outcome = SearchOutcome::Unknown;
    /// One row per vertex of g.
    std::optional<CoveringArray> rows;
    bool via_coloring = false;
};

/// Rows are images of vertices under a homomorphism into QI(n,k); tries the
/// coloring route (a clique of size chi in QI(n,k)) before a direct search.
GraphCAResult covering_array_on_graph(const Graph& g, int n, int k, long budget = 50'000'000);

struct RegularityReport {
    bool regular = false;
    int min_degree = 0;
    int max_degree = 0;
    std::map<int, int> degree_histogram;
    bool connected = false;
    /// -1 when disconnected.
    int diameter = -1;
};

RegularityReport regularity_and_diameter(const Graph& g);

// ---------------------------------------------------------------------------
// DIMACS-like text format with "c v <index> <partition>" label comments.

void write_graph(std::ostream& os, const Graph& g);
/// Each edge listed once, or every edge listed in both orientations; mixed
/// listings, duplicates and self-loops are rejected with ParseError.
Graph read_graph(std::istream& is);

}  // namespace qica
