#include "qica/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

#include "qica/errors.hpp"

namespace qica {

namespace {

using Bits = std::vector<std::uint64_t>;

inline void set_bit(std::uint64_t* b, int i) { b[i >> 6] |= std::uint64_t{1} << (i & 63); }
inline void clear_bit(std::uint64_t* b, int i) { b[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
inline bool test_bit(const std::uint64_t* b, int i) { return (b[i >> 6] >> (i & 63)) & 1; }

int popcount(const std::uint64_t* b, int words) {
    int c = 0;
    for (int w = 0; w < words; ++w) c += std::popcount(b[w]);
    return c;
}

template <class F>
void for_each_bit(const std::uint64_t* b, int words, F&& f) {
    for (int w = 0; w < words; ++w) {
        std::uint64_t x = b[w];
        while (x) {
            f(w * 64 + std::countr_zero(x));
            x &= x - 1;
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Graph

Graph::Graph(int n, std::string name) : n_(n), words_((n + 63) / 64), name_(std::move(name)) {
    if (n < 0) throw ParameterError("negative vertex count");
    adj_.assign(static_cast<std::size_t>(n_) * words_, 0);
}

void Graph::add_edge(int u, int v) {
    if (u < 0 || v < 0 || u >= n_ || v >= n_) throw ParameterError("edge endpoint out of range");
    if (u == v) throw ParameterError("self-loop at vertex " + std::to_string(u));
    set_bit(mrow(u), v);
    set_bit(mrow(v), u);
}

int Graph::degree(int v) const { return popcount(row(v), words_); }

long Graph::edge_count() const {
    long total = 0;
    for (int v = 0; v < n_; ++v) total += degree(v);
    return total / 2;
}

std::vector<int> Graph::neighbors(int v) const {
    std::vector<int> out;
    for_each_bit(row(v), words_, [&](int u) { out.push_back(u); });
    return out;
}

std::vector<std::pair<int, int>> Graph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < n_; ++u)
        for_each_bit(row(u), words_, [&](int v) {
            if (u < v) out.emplace_back(u, v);
        });
    return out;
}

void Graph::set_labels(std::vector<Partition> labels) {
    if (!labels.empty() && static_cast<int>(labels.size()) != n_)
        throw ParameterError("label count does not match vertex count");
    labels_ = std::move(labels);
}

Graph Graph::complement() const {
    Graph c(n_, name_.empty() ? std::string{} : "complement of " + name_);
    for (int u = 0; u < n_; ++u)
        for (int v = u + 1; v < n_; ++v)
            if (!adjacent(u, v)) c.add_edge(u, v);
    c.labels_ = labels_;
    return c;
}

Graph Graph::induced(const std::vector<int>& vertices) const {
    const int m = static_cast<int>(vertices.size());
    Graph h(m, name_);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (adjacent(vertices[i], vertices[j])) h.add_edge(i, j);
    if (!labels_.empty()) {
        std::vector<Partition> lab;
        lab.reserve(m);
        for (int v : vertices) lab.push_back(labels_[v]);
        h.labels_ = std::move(lab);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Construction

namespace {

const char* relation_name(SetRelation r) {
    switch (r) {
        case SetRelation::Incomparable: return "incomparable";
        case SetRelation::Comparable: return "comparable";
        case SetRelation::Disjoint: return "disjoint";
        case SetRelation::Intersecting: return "intersecting";
        case SetRelation::PartialIntersecting: return "partial";
    }
    return "?";
}

inline bool classes_related(std::uint64_t a, std::uint64_t b, SetRelation rel, int t) {
    switch (rel) {
        case SetRelation::Incomparable: return (a & ~b) != 0 && (b & ~a) != 0;
        case SetRelation::Comparable: return (a & ~b) == 0 || (b & ~a) == 0;
        case SetRelation::Disjoint: return (a & b) == 0;
        case SetRelation::Intersecting: return (a & b) != 0;
        case SetRelation::PartialIntersecting: return std::popcount(a & b) >= t;
    }
    return false;
}

bool masks_related(const std::uint64_t* p, const std::uint64_t* q, int k, SetRelation rel, RelationType type,
                   int t) {
    if (type == RelationType::ForAll) {
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (!classes_related(p[i], q[j], rel, t)) return false;
        return true;
    }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (classes_related(p[i], q[j], rel, t)) return true;
    return false;
}

void check_cap(const mpz_class& count, long cap, const std::string& what) {
    if (count > cap)
        throw ResourceError(what + " has " + count.get_str() + " vertices, above the cap of " + std::to_string(cap) +
                            " (set QICA_VERTEX_CAP to raise it)");
}

}  // namespace

std::string GraphSpec::describe() const {
    const std::string nk = std::to_string(n) + "," + std::to_string(k);
    switch (family) {
        case GraphFamily::QI: return "QI(" + nk + ")";
        case GraphFamily::UQI: return "UQI(" + nk + ")";
        case GraphFamily::AUQI: return "AUQI(" + nk + ")";
        case GraphFamily::Kneser: return "Kneser(" + nk + ")";
        case GraphFamily::Complete: return "Complete(" + std::to_string(n) + ")";
        case GraphFamily::Relation: {
            std::string s = "Relation(" + nk + "," + relation_name(relation);
            if (relation == SetRelation::PartialIntersecting) s += "-" + std::to_string(t);
            s += type == RelationType::ForAll ? ",forall" : ",exists";
            s += uniform ? ",uniform)" : ",all)";
            return s;
        }
    }
    return "?";
}

long default_vertex_cap() {
    if (const char* env = std::getenv("QICA_VERTEX_CAP")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return v;
    }
    return 100000;
}

bool partitions_related(const Partition& p, const Partition& q, SetRelation rel, RelationType type, int t) {
    require_comparable(p, q);
    return masks_related(p.masks().data(), q.masks().data(), p.k(), rel, type, t);
}

Graph build_graph(const GraphSpec& spec, long vertex_cap) {
    const int n = spec.n, k = spec.k;
    const std::string name = spec.describe();

    if (spec.family == GraphFamily::Complete) {
        if (n < 1) throw ParameterError("Complete(n) needs n >= 1");
        check_cap(n, vertex_cap, name);
        Graph g(n, name);
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
        return g;
    }

    if (spec.family == GraphFamily::Kneser) {
        if (n < 1 || n > kMaxGroundSet || k < 1 || k > n) throw ParameterError("Kneser(n,r) needs 1 <= r <= n <= 64");
        check_cap(binomial(n, k), vertex_cap, name);
        std::vector<std::uint64_t> sets;
        std::vector<int> cur;
        auto rec = [&](auto&& self, int start) -> void {
            if (static_cast<int>(cur.size()) == k) {
                std::uint64_t m = 0;
                for (int e : cur) m |= std::uint64_t{1} << e;
                sets.push_back(m);
                return;
            }
            for (int e = start; e <= n - (k - static_cast<int>(cur.size())); ++e) {
                cur.push_back(e);
                self(self, e + 1);
                cur.pop_back();
            }
        };
        rec(rec, 0);
        Graph g(static_cast<int>(sets.size()), name);
        for (std::size_t u = 0; u < sets.size(); ++u)
            for (std::size_t v = u + 1; v < sets.size(); ++v)
                if ((sets[u] & sets[v]) == 0) g.add_edge(static_cast<int>(u), static_cast<int>(v));
        return g;
    }

    PartitionFilter filter;
    SetRelation rel = SetRelation::Intersecting;
    RelationType type = RelationType::ForAll;
    switch (spec.family) {
        case GraphFamily::QI:
            if (k < 2 || n < k * k) throw ParameterError("QI(n,k) needs k >= 2 and n >= k^2");
            filter = PartitionFilter::min_class_size(k);
            break;
        case GraphFamily::UQI:
            if (k < 2 || n % k != 0) throw ParameterError("UQI(n,k) needs k >= 2 dividing n");
            filter = PartitionFilter::uniform();
            break;
        case GraphFamily::AUQI:
            if (k < 2 || n < k) throw ParameterError("AUQI(n,k) needs 2 <= k <= n");
            filter = PartitionFilter::almost_uniform();
            break;
        case GraphFamily::Relation:
            if (k < 2 || n < k) throw ParameterError("relation graphs need 2 <= k <= n");
            if (spec.uniform && n % k != 0) throw ParameterError("uniform relation graphs need k dividing n");
            if (spec.relation == SetRelation::PartialIntersecting && spec.t < 1)
                throw ParameterError("partial intersection needs t >= 1");
            filter = spec.uniform ? PartitionFilter::uniform() : PartitionFilter::all();
            rel = spec.relation;
            type = spec.type;
            break;
        default: break;
    }
    validate_partition_params(n, k, filter);
    check_cap(count_partitions(n, k, filter), vertex_cap, name);

    std::vector<std::uint64_t> masks;
    std::vector<Partition> labels;
    for_each_partition(n, k, filter, [&](std::span<const std::uint8_t> lab) {
        labels.push_back(Partition::from_labels(lab));
        const auto m = labels.back().masks();
        masks.insert(masks.end(), m.begin(), m.end());
        return true;
    });
    const int v_count = static_cast<int>(labels.size());
    Graph g(v_count, name);
    for (int u = 0; u < v_count; ++u) {
        const std::uint64_t* pu = masks.data() + static_cast<std::size_t>(u) * k;
        for (int v = u + 1; v < v_count; ++v)
            if (masks_related(pu, masks.data() + static_cast<std::size_t>(v) * k, k, rel, type, spec.t))
                g.add_edge(u, v);
    }
    g.set_labels(std::move(labels));
    return g;
}

// ---------------------------------------------------------------------------
// Maximum clique: bitset branch and bound with greedy coloring bounds

namespace {

class CliqueSearch {
public:
    CliqueSearch(const Graph& g, const CliqueOptions& opt) : g_(g), opt_(opt), n_(g.size()), w_((n_ + 63) / 64) {
        // Degree-descending order; ties by index.
        order_.resize(n_);
        for (int i = 0; i < n_; ++i) order_[i] = i;
        std::vector<int> deg(n_);
        for (int i = 0; i < n_; ++i) deg[i] = g.degree(i);
        std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return deg[a] > deg[b]; });
        adj_.assign(static_cast<std::size_t>(n_) * w_, 0);
        std::vector<int> pos(n_);
        for (int i = 0; i < n_; ++i) pos[order_[i]] = i;
        for (int i = 0; i < n_; ++i)
            for_each_bit(g.row(order_[i]), g.words(), [&](int u) { set_bit(&adj_[std::size_t(i) * w_], pos[u]); });
    }

    CliqueResult run() {
        greedy_seed();
        if (!done()) {
            Bits p(w_, 0);
            for (int i = 0; i < n_; ++i) set_bit(p.data(), i);
            std::vector<int> cur;
            expand(p, cur);
        }
        CliqueResult r;
        for (int v : best_) r.vertices.push_back(order_[v]);
        std::sort(r.vertices.begin(), r.vertices.end());
        r.nodes = nodes_;
        r.exact = !aborted_ || reached_upper_;
        return r;
    }

private:
    const std::uint64_t* nrow(int v) const { return adj_.data() + static_cast<std::size_t>(v) * w_; }

    bool done() {
        const int b = static_cast<int>(best_.size());
        if (opt_.upper_bound >= 0 && b >= opt_.upper_bound) return aborted_ = reached_upper_ = true;
        if (opt_.target >= 0 && b >= opt_.target) return aborted_ = true;
        return false;
    }

    void greedy_seed() {
        for (int v = 0; v < n_; ++v) {
            bool ok = true;
            for (int u : best_)
                if (!test_bit(nrow(u), v)) { ok = false; break; }
            if (ok) best_.push_back(v);
        }
        done();
    }

    void expand(Bits& p, std::vector<int>& cur) {
        if (aborted_) return;
        if (++nodes_ > opt_.budget) {
            aborted_ = true;
            return;
        }
        // Greedy sequential coloring of p into independent classes.
        std::vector<int> verts, colors;
        Bits u = p, q(w_);
        int color = 0;
        const int need = static_cast<int>(best_.size()) - static_cast<int>(cur.size());
        while (true) {
            bool any = false;
            for (int w = 0; w < w_; ++w) any |= u[w] != 0;
            if (!any) break;
            ++color;
            q = u;
            for (int w = 0; w < w_; ++w) {
                while (q[w]) {
                    const int v = w * 64 + std::countr_zero(q[w]);
                    clear_bit(u.data(), v);
                    clear_bit(q.data(), v);
                    const std::uint64_t* nr = nrow(v);
                    for (int x = w; x < w_; ++x) q[x] &= ~nr[x];
                    if (color > need) {
                        verts.push_back(v);
                        colors.push_back(color);
                    }
                }
            }
        }
        for (int i = static_cast<int>(verts.size()) - 1; i >= 0; --i) {
            if (static_cast<int>(cur.size()) + colors[i] <= static_cast<int>(best_.size())) return;
            const int v = verts[i];
            cur.push_back(v);
            Bits np(w_);
            bool empty = true;
            const std::uint64_t* nr = nrow(v);
            for (int w = 0; w < w_; ++w) {
                np[w] = p[w] & nr[w];
                empty &= np[w] == 0;
            }
            if (empty) {
                if (cur.size() > best_.size()) {
                    best_ = cur;
                    if (done()) return;
                }
            } else {
                expand(np, cur);
            }
            cur.pop_back();
            if (aborted_) return;
            clear_bit(p.data(), v);
        }
    }

    const Graph& g_;
    CliqueOptions opt_;
    int n_, w_;
    std::vector<int> order_;
    Bits adj_;
    std::vector<int> best_;
    long nodes_ = 0;
    bool aborted_ = false;
    bool reached_upper_ = false;
};

}  // namespace

CliqueResult max_clique(const Graph& g, const CliqueOptions& opt) {
    if (g.size() == 0) return {{}, true, 0};
    return CliqueSearch(g, opt).run();
}

IndependentSetResult max_independent_set(const Graph& g, const CliqueOptions& opt, std::optional<long> ratio_bound) {
    CliqueOptions o = opt;
    if (ratio_bound && (o.upper_bound < 0 || *ratio_bound < o.upper_bound)) o.upper_bound = static_cast<int>(*ratio_bound);
    const CliqueResult c = max_clique(g.complement(), o);
    IndependentSetResult r;
    r.vertices = c.vertices;
    r.nodes = c.nodes;
    r.certified_by_ratio = ratio_bound && static_cast<long>(c.vertices.size()) == *ratio_bound;
    r.exact = c.exact || r.certified_by_ratio;
    return r;
}

// ---------------------------------------------------------------------------
// Coloring

bool is_proper_coloring(const Graph& g, const std::vector<int>& coloring) {
    if (static_cast<int>(coloring.size()) != g.size()) return false;
    for (int c : coloring)
        if (c < 0) return false;
    for (auto [u, v] : g.edges())
        if (coloring[u] == coloring[v]) return false;
    return true;
}

int color_count(const std::vector<int>& coloring) {
    std::set<int> s(coloring.begin(), coloring.end());
    return static_cast<int>(s.size());
}

namespace {

class Dsatur {
public:
    Dsatur(const Graph& g, int max_colors) : g_(g), n_(g.size()), cap_(max_colors) {
        nbrs_.resize(n_);
        deg_.resize(n_);
        for (int v = 0; v < n_; ++v) {
            nbrs_[v] = g.neighbors(v);
            deg_[v] = static_cast<int>(nbrs_[v].size());
        }
        color_.assign(n_, -1);
        cnt_.assign(static_cast<std::size_t>(n_) * cap_, 0);
        sat_.assign(n_, 0);
    }

    /// Greedy DSATUR (no backtracking).
    std::vector<int> greedy() {
        int used = 0;
        for (int step = 0; step < n_; ++step) {
            const int v = pick();
            int c = 0;
            while (c < used && cnt(v, c) > 0) ++c;
            if (c == used) ++used;
            assign(v, c);
        }
        std::vector<int> out = color_;
        for (int v = 0; v < n_; ++v) unassign(v, out[v]);
        return out;
    }

    /// Searches for a coloring with fewer than `best` colors, stopping at `lower`.
    void solve(int best, std::vector<int> best_coloring, int lower, long budget) {
        best_ = best;
        best_coloring_ = std::move(best_coloring);
        lower_ = lower;
        budget_ = budget;
        if (best_ > lower_) search(0, 0);
    }

    int best() const { return best_; }
    const std::vector<int>& best_coloring() const { return best_coloring_; }
    bool aborted() const { return aborted_; }
    long nodes() const { return nodes_; }

private:
    int& cnt(int v, int c) { return cnt_[static_cast<std::size_t>(v) * cap_ + c]; }

    int pick() const {
        int best = -1;
        for (int v = 0; v < n_; ++v) {
            if (color_[v] >= 0) continue;
            if (best < 0 || sat_[v] > sat_[best] || (sat_[v] == sat_[best] && deg_[v] > deg_[best])) best = v;
        }
        return best;
    }

    void assign(int v, int c) {
        color_[v] = c;
        for (int u : nbrs_[v])
            if (cnt(u, c)++ == 0) ++sat_[u];
    }

    void unassign(int v, int c) {
        for (int u : nbrs_[v])
            if (--cnt(u, c) == 0) --sat_[u];
        color_[v] = -1;
    }

    bool search(int colored, int used) {
        if (used >= best_) return false;
        if (colored == n_) {
            best_ = used;
            best_coloring_ = color_;
            return best_ <= lower_;
        }
        if (++nodes_ > budget_) {
            aborted_ = true;
            return true;
        }
        const int v = pick();
        for (int c = 0; c < used; ++c) {
            if (cnt(v, c) > 0) continue;
            assign(v, c);
            const bool stop = search(colored + 1, used);
            unassign(v, c);
            if (stop) return true;
        }
        if (used + 1 < best_ && used < cap_) {
            assign(v, used);
            const bool stop = search(colored + 1, used + 1);
            unassign(v, used);
            if (stop) return true;
        }
        return false;
    }

    const Graph& g_;
    int n_, cap_;
    std::vector<std::vector<int>> nbrs_;
    std::vector<int> deg_, color_, cnt_, sat_;
    int best_ = 0, lower_ = 0;
    std::vector<int> best_coloring_;
    long budget_ = 0, nodes_ = 0;
    bool aborted_ = false;
};

std::vector<int> normalize_colors(const std::vector<int>& c) {
    std::map<int, int> ren;
    std::vector<int> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        auto [it, fresh] = ren.try_emplace(c[i], static_cast<int>(ren.size()));
        out[i] = it->second;
    }
    return out;
}

}  // namespace

ColoringResult chromatic_number(const Graph& g, long budget, const std::vector<int>* hint) {
    ColoringResult r;
    const int n = g.size();
    if (n == 0) {
        r.exact = true;
        return r;
    }
    // Lower bound: clique number, then ceil(|H| / alpha(H)) on degree classes.
    CliqueOptions copt;
    copt.budget = budget / 4 + 1;
    const CliqueResult clique = max_clique(g, copt);
    r.nodes += clique.nodes;
    int lower = std::max<int>(1, static_cast<int>(clique.vertices.size()));
    std::map<int, std::vector<int>> by_degree;
    for (int v = 0; v < n; ++v) by_degree[g.degree(v)].push_back(v);
    for (const auto& [d, verts] : by_degree) {
        if (verts.size() < 2 || verts.size() > 400) continue;
        CliqueOptions iopt;
        iopt.budget = budget / 8 + 1;
        const auto ind = max_independent_set(g.induced(verts), iopt);
        r.nodes += ind.nodes;
        if (!ind.exact || ind.vertices.empty()) continue;
        const int a = static_cast<int>(ind.vertices.size());
        lower = std::max(lower, (static_cast<int>(verts.size()) + a - 1) / a);
    }

    int max_degree = 0;
    for (int v = 0; v < n; ++v) max_degree = std::max(max_degree, g.degree(v));
    std::vector<int> best = Dsatur(g, max_degree + 1).greedy();
    if (hint && is_proper_coloring(g, *hint) && color_count(*hint) < color_count(best)) best = *hint;
    best = normalize_colors(best);
    int upper = color_count(best);

    if (upper > lower) {
        Dsatur exact(g, upper);
        exact.solve(upper, best, lower, budget);
        r.nodes += exact.nodes();
        best = exact.best_coloring();
        upper = exact.best();
        if (!exact.aborted()) lower = upper;
    }
    r.coloring = best;
    r.upper = upper;
    r.lower = std::min(lower, upper);
    r.exact = r.lower == r.upper;
    return r;
}

// ---------------------------------------------------------------------------
// Blossom matching

std::vector<int> maximum_matching(const Graph& g) {
    const int n = g.size();
    std::vector<std::vector<int>> adj(n);
    for (int v = 0; v < n; ++v) adj[v] = g.neighbors(v);
    std::vector<int> match(n, -1), parent(n), base(n);
    std::vector<char> used(n), blossom(n);

    auto lca = [&](int a, int b) {
        std::vector<char> seen(n, 0);
        while (true) {
            a = base[a];
            seen[a] = 1;
            if (match[a] == -1) break;
            a = parent[match[a]];
        }
        while (true) {
            b = base[b];
            if (seen[b]) return b;
            b = parent[match[b]];
        }
    };
    auto mark_path = [&](int v, int b, int child) {
        while (base[v] != b) {
            blossom[base[v]] = blossom[base[match[v]]] = 1;
            parent[v] = child;
            child = match[v];
            v = parent[match[v]];
        }
    };
    auto find_path = [&](int root) {
        std::fill(used.begin(), used.end(), 0);
        std::fill(parent.begin(), parent.end(), -1);
        for (int i = 0; i < n; ++i) base[i] = i;
        used[root] = 1;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int to : adj[v]) {
                if (base[v] == base[to] || match[v] == to) continue;
                if (to == root || (match[to] != -1 && parent[match[to]] != -1)) {
                    const int cur = lca(v, to);
                    std::fill(blossom.begin(), blossom.end(), 0);
                    mark_path(v, cur, to);
                    mark_path(to, cur, v);
                    for (int i = 0; i < n; ++i) {
                        if (blossom[base[i]]) {
                            base[i] = cur;
                            if (!used[i]) {
                                used[i] = 1;
                                q.push(i);
                            }
                        }
                    }
                } else if (parent[to] == -1) {
                    parent[to] = v;
                    if (match[to] == -1) return to;
                    used[match[to]] = 1;
                    q.push(match[to]);
                }
            }
        }
        return -1;
    };

    for (int v = 0; v < n; ++v) {
        if (match[v] != -1) continue;
        int u = find_path(v);
        while (u != -1) {
            const int pv = parent[u], ppv = match[pv];
            match[u] = pv;
            match[pv] = u;
            u = ppv;
        }
    }
    return match;
}

// ---------------------------------------------------------------------------
// QI(n,2) chains

namespace {

/// Leftmost unmatched absent positions are added until the set reaches size target.
std::uint64_t chain_middle(std::uint64_t s, int n, int target) {
    std::vector<int> stack;
    std::uint64_t matched = 0;
    for (int i = 0; i < n; ++i) {
        if (!((s >> i) & 1)) {
            stack.push_back(i);
        } else if (!stack.empty()) {
            matched |= (std::uint64_t{1} << stack.back()) | (std::uint64_t{1} << i);
            stack.pop_back();
        }
    }
    int size = std::popcount(s);
    for (int i = 0; i < n && size < target; ++i) {
        const std::uint64_t b = std::uint64_t{1} << i;
        if (!(s & b) && !(matched & b)) {
            s |= b;
            ++size;
        }
    }
    return s;
}

std::uint64_t smaller_class(const Partition& p) {
    const std::uint64_t a = p.mask(0), b = p.mask(1);
    return std::popcount(b) < std::popcount(a) ? b : a;
}

}  // namespace

Partition core_project(const Partition& p) {
    if (p.k() != 2) throw ParameterError("core_project needs a 2-partition");
    const int n = p.n();
    if (n > 24) throw ParameterError("core_project supports n <= 24");
    if (std::min(p.class_size(0), p.class_size(1)) < 2) throw ParameterError("core_project needs classes of size >= 2");
    const std::uint64_t mid = chain_middle(smaller_class(p), n, n / 2);
    std::vector<int> lab(n);
    for (int i = 0; i < n; ++i) lab[i] = (mid >> i) & 1 ? 0 : 1;
    return Partition::from_labels(std::span<const int>(lab));
}

std::vector<int> qi2_chain_coloring(int n) {
    if (n < 4 || n > 20) throw ParameterError("qi2_chain_coloring supports 4 <= n <= 20");
    const int half = n / 2;
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;

    // Chains are identified by their middle set.
    std::vector<std::uint64_t> middles;
    for (const auto& chain : symmetric_chain_decomposition(n).chains)
        for (std::uint64_t s : chain)
            if (std::popcount(s) == half) middles.push_back(s);
    std::unordered_map<std::uint64_t, int> middle_index;
    for (std::size_t i = 0; i < middles.size(); ++i) middle_index[middles[i]] = static_cast<int>(i);

    std::vector<int> chain_color(middles.size(), -1);
    int colors = 0;
    if (n % 2 == 0) {
        for (std::size_t i = 0; i < middles.size(); ++i) {
            if (chain_color[i] >= 0) continue;
            chain_color[i] = chain_color[middle_index.at(full & ~middles[i])] = colors++;
        }
    } else {
        Graph kneser(static_cast<int>(middles.size()));
        for (std::size_t i = 0; i < middles.size(); ++i)
            for (std::size_t j = i + 1; j < middles.size(); ++j)
                if ((middles[i] & middles[j]) == 0) kneser.add_edge(static_cast<int>(i), static_cast<int>(j));
        const std::vector<int> mate = maximum_matching(kneser);
        for (std::size_t i = 0; i < middles.size(); ++i) {
            if (chain_color[i] >= 0) continue;
            chain_color[i] = colors;
            if (mate[i] >= 0) chain_color[mate[i]] = colors;
            ++colors;
        }
    }

    std::vector<int> coloring;
    for_each_partition(n, 2, PartitionFilter::min_class_size(2), [&](std::span<const std::uint8_t> lab) {
        const Partition p = Partition::from_labels(lab);
        coloring.push_back(chain_color[middle_index.at(chain_middle(smaller_class(p), n, half))]);
        return true;
    });
    return coloring;
}

// ---------------------------------------------------------------------------
// Homomorphisms

bool is_homomorphism(const Graph& g, const Graph& h, const std::vector<int>& map) {
    if (static_cast<int>(map.size()) != g.size()) return false;
    for (int x : map)
        if (x < 0 || x >= h.size()) return false;
    for (auto [u, v] : g.edges())
        if (!h.adjacent(map[u], map[v])) return false;
    return true;
}

namespace {

class HomSearch {
public:
    HomSearch(const Graph& g, const Graph& h, long budget)
        : g_(g), h_(h), ng_(g.size()), wh_(h.words()), budget_(budget) {
        nbrs_.resize(ng_);
        for (int v = 0; v < ng_; ++v) nbrs_[v] = g.neighbors(v);
        arc_ = h.size() <= 4096;
    }

    HomomorphismResult run() {
        HomomorphismResult r;
        Bits dom(static_cast<std::size_t>(ng_) * wh_, 0);
        // Vertices with neighbours can only map to non-isolated targets.
        for (int v = 0; v < ng_; ++v)
            for (int x = 0; x < h_.size(); ++x)
                if (nbrs_[v].empty() || h_.degree(x) > 0) set_bit(&dom[std::size_t(v) * wh_], x);
        map_.assign(ng_, -1);
        const bool consistent = !arc_ || propagate_all(dom);
        const bool found = consistent && search(dom, 0);
        r.nodes = nodes_;
        if (found) {
            r.outcome = SearchOutcome::Found;
            r.map = map_;
        } else {
            r.outcome = aborted_ ? SearchOutcome::Unknown : SearchOutcome::None;
        }
        return r;
    }

private:
    std::uint64_t* d(Bits& dom, int v) const { return dom.data() + static_cast<std::size_t>(v) * wh_; }

    /// Removes x from dom(w) when no neighbour of x lies in dom(u), for edges uw.
    bool revise(Bits& dom, int w, int u, bool& changed) {
        std::uint64_t* dw = d(dom, w);
        const std::uint64_t* du = d(dom, u);
        changed = false;
        bool nonempty = false;
        for (int wd = 0; wd < wh_; ++wd) {
            std::uint64_t x = dw[wd];
            while (x) {
                const int t = wd * 64 + std::countr_zero(x);
                x &= x - 1;
                const std::uint64_t* hr = h_.row(t);
                bool support = false;
                for (int k = 0; k < wh_ && !support; ++k) support = (hr[k] & du[k]) != 0;
                if (!support) {
                    clear_bit(dw, t);
                    changed = true;
                }
            }
            nonempty |= dw[wd] != 0;
        }
        return nonempty;
    }

    bool propagate(Bits& dom, std::vector<int> queue) {
        std::vector<char> inq(ng_, 0);
        for (int v : queue) inq[v] = 1;
        while (!queue.empty()) {
            const int u = queue.back();
            queue.pop_back();
            inq[u] = 0;
            for (int w : nbrs_[u]) {
                if (map_[w] >= 0) continue;
                bool changed = false;
                if (!revise(dom, w, u, changed)) return false;
                if (changed && !inq[w]) {
                    inq[w] = 1;
                    queue.push_back(w);
                }
            }
        }
        return true;
    }

    bool propagate_all(Bits& dom) {
        std::vector<int> all(ng_);
        for (int v = 0; v < ng_; ++v) all[v] = v;
        return propagate(dom, all);
    }

    int choose(Bits& dom) const {
        int best = -1, best_size = 0;
        for (int v = 0; v < ng_; ++v) {
            if (map_[v] >= 0) continue;
            const int s = popcount(dom.data() + std::size_t(v) * wh_, wh_);
            if (best < 0 || s < best_size ||
                (s == best_size && nbrs_[v].size() > nbrs_[best].size())) {
                best = v;
                best_size = s;
            }
        }
        return best;
    }

    bool search(Bits& dom, int assigned) {
        if (assigned == ng_) return true;
        if (++nodes_ > budget_) {
            aborted_ = true;
            return false;
        }
        const int v = choose(dom);
        std::vector<int> candidates;
        for_each_bit(d(dom, v), wh_, [&](int x) { candidates.push_back(x); });
        for (int x : candidates) {
            Bits next = dom;
            std::uint64_t* dv = d(next, v);
            std::fill(dv, dv + wh_, 0);
            set_bit(dv, x);
            map_[v] = x;
            bool ok = true;
            const std::uint64_t* hx = h_.row(x);
            for (int u : nbrs_[v]) {
                if (map_[u] >= 0) {
                    if (!h_.adjacent(x, map_[u])) { ok = false; break; }
                    continue;
                }
                std::uint64_t* du = d(next, u);
                bool nonempty = false;
                for (int w = 0; w < wh_; ++w) {
                    du[w] &= hx[w];
                    nonempty |= du[w] != 0;
                }
                if (!nonempty) { ok = false; break; }
            }
            if (ok && arc_) ok = propagate(next, nbrs_[v]);
            if (ok && search(next, assigned + 1)) return true;
            map_[v] = -1;
            if (aborted_) return false;
        }
        return false;
    }

    const Graph& g_;
    const Graph& h_;
    int ng_, wh_;
    long budget_;
    long nodes_ = 0;
    bool aborted_ = false;
    bool arc_ = true;
    std::vector<std::vector<int>> nbrs_;
    std::vector<int> map_;
};

}  // namespace

HomomorphismResult find_homomorphism(const Graph& g, const Graph& h, long budget) {
    if (g.size() == 0) return {SearchOutcome::Found, {}, 0};
    if (h.size() == 0) return {SearchOutcome::None, {}, 0};
    HomomorphismResult r = HomSearch(g, h, budget).run();
    if (r.outcome == SearchOutcome::Found && !is_homomorphism(g, h, r.map))
        throw StructureError("homomorphism search produced a non edge-preserving map");
    return r;
}

GraphCAResult covering_array_on_graph(const Graph& g, int n, int k, long budget) {
    if (k < 2 || n < k * k) throw ParameterError("covering arrays on graphs need k >= 2 and n >= k^2");
    const Graph target = build_graph({GraphFamily::QI, n, k});
    GraphCAResult out;
    auto emit = [&](const std::vector<int>& map) {
        CoveringArray ca(g.size(), n, k);
        for (int v = 0; v < g.size(); ++v) {
            const auto& lab = target.labels()[map[v]].labels();
            for (int c = 0; c < n; ++c) ca.set(v, c, lab[c]);
        }
        out.outcome = SearchOutcome::Found;
        out.rows = std::move(ca);
    };

    const ColoringResult col = chromatic_number(g, budget);
    CliqueOptions copt;
    copt.budget = budget;
    copt.target = col.upper;
    const CliqueResult clique = max_clique(target, copt);
    if (static_cast<int>(clique.vertices.size()) >= col.upper) {
        std::vector<int> map(g.size());
        for (int v = 0; v < g.size(); ++v) map[v] = clique.vertices[col.coloring[v]];
        if (!is_homomorphism(g, target, map)) throw StructureError("coloring route produced an invalid map");
        emit(map);
        out.via_coloring = true;
        return out;
    }
    const HomomorphismResult hom = find_homomorphism(g, target, budget);
    if (hom.outcome == SearchOutcome::Found) {
        emit(hom.map);
    } else {
        out.outcome = hom.outcome;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Regularity and diameter

RegularityReport regularity_and_diameter(const Graph& g) {
    RegularityReport r;
    const int n = g.size(), w = g.words();
    if (n == 0) return r;
    for (int v = 0; v < n; ++v) ++r.degree_histogram[g.degree(v)];
    r.min_degree = r.degree_histogram.begin()->first;
    r.max_degree = r.degree_histogram.rbegin()->first;
    r.regular = r.degree_histogram.size() == 1;

    int diameter = 0;
    Bits visited(w), frontier(w), next(w);
    for (int s = 0; s < n; ++s) {
        std::fill(visited.begin(), visited.end(), 0);
        std::fill(frontier.begin(), frontier.end(), 0);
        set_bit(visited.data(), s);
        set_bit(frontier.data(), s);
        int reached = 1, depth = 0;
        while (true) {
            std::fill(next.begin(), next.end(), 0);
            for_each_bit(frontier.data(), w, [&](int v) {
                const std::uint64_t* row = g.row(v);
                for (int i = 0; i < w; ++i) next[i] |= row[i];
            });
            int added = 0;
            for (int i = 0; i < w; ++i) {
                next[i] &= ~visited[i];
                visited[i] |= next[i];
                added += std::popcount(next[i]);
            }
            if (added == 0) break;
            reached += added;
            ++depth;
            frontier.swap(next);
        }
        if (reached < n) {
            r.connected = false;
            r.diameter = -1;
            return r;
        }
        diameter = std::max(diameter, depth);
    }
    r.connected = true;
    r.diameter = diameter;
    return r;
}

// ---------------------------------------------------------------------------
// Text format

void write_graph(std::ostream& os, const Graph& g) {
    if (!g.name().empty()) os << "c " << g.name() << '\n';
    const auto edges = g.edges();
    os << "p edge " << g.size() << ' ' << edges.size() << '\n';
    for (std::size_t i = 0; i < g.labels().size(); ++i) os << "c v " << i + 1 << ' ' << g.labels()[i].to_string() << '\n';
    for (auto [u, v] : edges) os << "e " << u + 1 << ' ' << v + 1 << '\n';
}

Graph read_graph(std::istream& is) {
    std::string line, name;
    int line_no = 0, vertices = -1;
    long declared = -1;
    std::vector<std::pair<int, int>> arcs;
    std::vector<int> arc_lines;
    std::map<int, Partition> labels;
    while (std::getline(is, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "c") {
            std::string sub;
            std::streampos after = ss.tellg();
            if (ss >> sub && sub == "v") {
                int idx = 0;
                if (!(ss >> idx)) throw ParseError(line_no, "label comment needs a vertex index");
                std::string rest;
                std::getline(ss, rest);
                if (vertices < 0) throw ParseError(line_no, "label before problem line");
                if (idx < 1 || idx > vertices) throw ParseError(line_no, "label index out of range");
                if (labels.count(idx)) throw ParseError(line_no, "duplicate label for vertex " + std::to_string(idx));
                try {
                    labels.emplace(idx, Partition::parse(rest));
                } catch (const ParameterError& e) {
                    throw ParseError(line_no, e.what());
                }
            } else if (vertices < 0 && name.empty()) {
                ss.clear();
                ss.seekg(after);
                std::getline(ss, name);
                const auto b = name.find_first_not_of(" \t");
                name = b == std::string::npos ? std::string{} : name.substr(b);
            }
            continue;
        }
        if (tag == "p") {
            std::string kind;
            if (vertices >= 0) throw ParseError(line_no, "second problem line");
            if (!(ss >> kind >> vertices >> declared) || kind != "edge" || vertices < 0 || declared < 0)
                throw ParseError(line_no, "expected 'p edge <V> <E>'");
        } else if (tag == "e") {
            int u = 0, v = 0;
            if (vertices < 0) throw ParseError(line_no, "edge before problem line");
            if (!(ss >> u >> v)) throw ParseError(line_no, "expected 'e <u> <v>'");
            if (u < 1 || v < 1 || u > vertices || v > vertices) throw ParseError(line_no, "edge endpoint out of range");
            if (u == v) throw ParseError(line_no, "self-loop");
            arcs.emplace_back(u - 1, v - 1);
            arc_lines.push_back(line_no);
        } else {
            throw ParseError(line_no, "unknown line type '" + tag + "'");
        }
        std::string extra;
        if (ss >> extra) throw ParseError(line_no, "trailing content");
    }
    if (vertices < 0) throw ParseError(line_no, "missing problem line");
    if (static_cast<long>(arcs.size()) != declared)
        throw ParseError(line_no, "declared " + std::to_string(declared) + " edges, found " + std::to_string(arcs.size()));

    std::set<std::pair<int, int>> seen;
    for (std::size_t i = 0; i < arcs.size(); ++i)
        if (!seen.insert(arcs[i]).second) throw ParseError(arc_lines[i], "duplicate edge");
    std::size_t with_reverse = 0;
    int first_unpaired = -1, first_paired = -1;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        if (seen.count({arcs[i].second, arcs[i].first})) {
            ++with_reverse;
            if (first_paired < 0) first_paired = arc_lines[i];
        } else if (first_unpaired < 0) {
            first_unpaired = arc_lines[i];
        }
    }
    if (with_reverse != 0 && with_reverse != arcs.size())
        throw ParseError(std::max(first_paired, first_unpaired), "asymmetric edge list");

    Graph g(vertices, name);
    for (auto [u, v] : arcs) g.add_edge(u, v);
    if (!labels.empty()) {
        if (static_cast<int>(labels.size()) != vertices) throw ParseError(line_no, "labels missing for some vertices");
        std::vector<Partition> lab;
        for (auto& [i, p] : labels) lab.push_back(std::move(p));
        g.set_labels(std::move(lab));
    }
    return g;
}

}  // namespace qica
