#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "qica/errors.hpp"
#include "qica/graph.hpp"

using namespace qica;

namespace {

Graph qi(int n, int k) { return build_graph({GraphFamily::QI, n, k}); }

Graph random_graph(int n, double p, std::mt19937& rng) {
    Graph g(n);
    std::bernoulli_distribution coin(p);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (coin(rng)) g.add_edge(u, v);
    return g;
}

int brute_clique(const Graph& g) {
    const int n = g.size();
    int best = 0;
    for (std::uint32_t s = 1; s < (1u << n); ++s) {
        bool ok = true;
        for (int u = 0; u < n && ok; ++u)
            for (int v = u + 1; v < n && ok; ++v)
                if ((s >> u & 1) && (s >> v & 1) && !g.adjacent(u, v)) ok = false;
        if (ok) best = std::max(best, std::popcount(s));
    }
    return best;
}

int brute_chromatic(const Graph& g) {
    const int n = g.size();
    for (int c = 1; c <= n; ++c) {
        std::vector<int> col(n, 0);
        while (true) {
            if (is_proper_coloring(g, col)) return c;
            int i = 0;
            while (i < n && ++col[i] == c) col[i++] = 0;
            if (i == n) break;
        }
    }
    return n;
}

int brute_matching(const Graph& g) {
    const int n = g.size();
    std::vector<int> memo(1u << n, -1);
    auto rec = [&](auto&& self, std::uint32_t used) -> int {
        if (memo[used] >= 0) return memo[used];
        int v = 0;
        while (v < n && (used >> v & 1)) ++v;
        if (v == n) return memo[used] = 0;
        int best = self(self, used | 1u << v);
        for (int u = v + 1; u < n; ++u)
            if (!(used >> u & 1) && g.adjacent(u, v)) best = std::max(best, 1 + self(self, used | 1u << v | 1u << u));
        return memo[used] = best;
    };
    return rec(rec, 0);
}

bool brute_isomorphic(const Graph& a, const Graph& b) {
    if (a.size() != b.size() || a.edge_count() != b.edge_count()) return false;
    const int n = a.size();
    std::vector<int> map(n, -1);
    std::vector<char> used(n, 0);
    auto rec = [&](auto&& self, int v) -> bool {
        if (v == n) return true;
        for (int x = 0; x < n; ++x) {
            if (used[x] || a.degree(v) != b.degree(x)) continue;
            bool ok = true;
            for (int u = 0; u < v && ok; ++u) ok = a.adjacent(u, v) == b.adjacent(map[u], x);
            if (!ok) continue;
            used[x] = 1;
            map[v] = x;
            if (self(self, v + 1)) return true;
            used[x] = 0;
        }
        return false;
    };
    return rec(rec, 0);
}

long c(long n, long k) { return binomial(n, k).get_si(); }

bool is_clique(const Graph& g, const std::vector<int>& vs) {
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j)
            if (!g.adjacent(vs[i], vs[j])) return false;
    return true;
}

Graph cycle(int n) {
    Graph g(n);
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
}

}  // namespace

TEST_CASE("small QI graphs") {
    const Graph g4 = qi(4, 2);
    CHECK(g4.size() == 3);
    CHECK(g4.edge_count() == 3);

    const Graph g5 = qi(5, 2);
    CHECK(g5.size() == 10);
    CHECK(g5.edge_count() == 30);
    const auto reg = regularity_and_diameter(g5);
    CHECK(reg.regular);
    CHECK(reg.min_degree == 6);
    CHECK(reg.diameter == 2);
    const Graph petersen = build_graph({GraphFamily::Kneser, 5, 2});
    CHECK(petersen.edge_count() == 15);
    CHECK(brute_isomorphic(g5.complement(), petersen));

    CHECK(max_clique(g5).vertices.size() == 4);
    CHECK(max_independent_set(g5).vertices.size() == 2);
    const auto chi = chromatic_number(g5);
    CHECK(chi.exact);
    CHECK(chi.upper == 5);
    CHECK(is_proper_coloring(g5, chi.coloring));

    const auto k4 = regularity_and_diameter(build_graph({GraphFamily::Complete, 4}));
    CHECK(k4.min_degree == 3);
    CHECK(k4.diameter == 1);
}

TEST_CASE("QI(9,3) structure") {
    const Graph g = qi(9, 3);
    CHECK(g.size() == 280);
    const auto reg = regularity_and_diameter(g);
    CHECK(reg.regular);
    CHECK(reg.min_degree == 36);
    CHECK(reg.diameter == 2);
    const auto w = max_clique(g);
    CHECK(w.exact);
    CHECK(w.vertices.size() == 4);
    CHECK(is_clique(g, w.vertices));
}

TEST_CASE("independent set of QI(9,3) meets the ratio bound") {
    const Graph g = qi(9, 3);
    const auto r = max_independent_set(g, {}, 70);
    CHECK(r.vertices.size() == 70);
    CHECK(r.certified_by_ratio);
    CHECK(is_clique(g.complement(), r.vertices));
    // Same size as the family of partitions with 1 and 2 in one class.
    int same_class = 0;
    for (const auto& p : g.labels()) same_class += p.class_of(0) == p.class_of(1);
    CHECK(same_class == 70);
}

TEST_CASE("parameter and cap errors") {
    CHECK_THROWS_AS(build_graph({GraphFamily::QI, 8, 3}), ParameterError);
    CHECK_THROWS_AS(build_graph({GraphFamily::UQI, 7, 3}), ParameterError);
    CHECK_THROWS_AS(build_graph({GraphFamily::QI, 16, 4}), ResourceError);
    CHECK_THROWS_AS(build_graph({GraphFamily::QI, 9, 3}, 100), ResourceError);
}

TEST_CASE("clique solver against brute force") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        const Graph g = random_graph(6 + trial % 10, 0.3 + 0.01 * trial, rng);
        const auto r = max_clique(g);
        CHECK(r.exact);
        CHECK(is_clique(g, r.vertices));
        CHECK(static_cast<int>(r.vertices.size()) == brute_clique(g));
    }
    CliqueOptions tiny;
    tiny.budget = 1;
    const auto partial = max_clique(qi(9, 3), tiny);
    CHECK_FALSE(partial.exact);
    CHECK(is_clique(qi(9, 3), partial.vertices));
}

TEST_CASE("chromatic number against brute force") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const Graph g = random_graph(5 + trial % 5, 0.5, rng);
        const auto r = chromatic_number(g);
        CHECK(r.exact);
        CHECK(is_proper_coloring(g, r.coloring));
        CHECK(color_count(r.coloring) == r.upper);
        CHECK(r.upper == brute_chromatic(g));
    }
}

TEST_CASE("QI(n,2) clique and chromatic numbers") {
    for (int n = 4; n <= 8; ++n) {
        CAPTURE(n);
        const Graph g = qi(n, 2);
        const auto w = max_clique(g);
        CHECK(w.exact);
        CHECK(static_cast<long>(w.vertices.size()) == c(n - 1, n / 2 - 1));
        const long chi = (c(n, n / 2) + 1) / 2;
        const auto chain = qi2_chain_coloring(n);
        CHECK(is_proper_coloring(g, chain));
        CHECK(color_count(chain) == chi);
        const auto r = chromatic_number(g, 20'000'000, &chain);
        CHECK(r.exact);
        CHECK(r.upper == chi);
    }
}

TEST_CASE("binary CAN agrees with cliques in QI(n,2)") {
    std::vector<int> omega(9, 0);
    for (int n = 4; n <= 8; ++n) omega[n] = static_cast<int>(max_clique(qi(n, 2)).vertices.size());
    for (int r = 2; r <= 10; ++r) {
        int n = 4;
        while (omega[n] < r) ++n;
        CHECK(binary_can(r) == n);
    }
    CHECK(binary_can(5) == 6);
}

TEST_CASE("blossom matching against brute force") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 80; ++trial) {
        const Graph g = random_graph(4 + trial % 9, 0.25, rng);
        const auto mate = maximum_matching(g);
        int size = 0;
        for (int v = 0; v < g.size(); ++v) {
            if (mate[v] < 0) continue;
            CHECK(mate[mate[v]] == v);
            CHECK(g.adjacent(v, mate[v]));
            ++size;
        }
        CHECK(size / 2 == brute_matching(g));
    }
}

TEST_CASE("core projection") {
    const Partition p = Partition::parse("1 2 | 3 4 5 6");
    CHECK(core_project(p) == Partition::parse("1 2 3 | 4 5 6"));
    CHECK(core_project(Partition::parse("1 4 5 | 2 3 6")) == Partition::parse("1 4 5 | 2 3 6"));
    CHECK_THROWS_AS(core_project(Partition::parse("1 2 3 | 4 5 6 | 7 8 9")), ParameterError);

    for (int n = 4; n <= 8; ++n) {
        CAPTURE(n);
        const Graph g = qi(n, 2);
        const auto chains = symmetric_chain_decomposition(n);
        for (const auto& lab : g.labels()) {
            const std::uint64_t small =
                std::popcount(lab.mask(1)) < std::popcount(lab.mask(0)) ? lab.mask(1) : lab.mask(0);
            for (const auto& ch : chains.chains) {
                if (std::find(ch.begin(), ch.end(), small) == ch.end()) continue;
                for (std::uint64_t s : ch)
                    if (std::popcount(s) == n / 2) CHECK(core_project(lab).mask(0) == (s & 1 ? s : ((1ull << n) - 1) & ~s));
            }
        }
        for (auto [u, v] : g.edges())
            CHECK(is_qualitatively_independent(core_project(g.labels()[u]), core_project(g.labels()[v])));
    }
}

TEST_CASE("homomorphisms") {
    const Graph k3 = build_graph({GraphFamily::Complete, 3});
    const Graph q4 = qi(4, 2);
    const auto a = find_homomorphism(k3, q4);
    CHECK(a.outcome == SearchOutcome::Found);
    CHECK(is_homomorphism(k3, q4, a.map));
    CHECK(find_homomorphism(qi(5, 2), q4).outcome == SearchOutcome::None);
    const auto b = find_homomorphism(cycle(5), q4);
    CHECK(b.outcome == SearchOutcome::Found);
    CHECK(is_homomorphism(cycle(5), q4, b.map));
    CHECK(find_homomorphism(qi(6, 2), qi(5, 2), 1).outcome == SearchOutcome::Unknown);

    std::mt19937 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const Graph g = random_graph(8, 0.4, rng);
        const auto r = find_homomorphism(g, qi(5, 2));
        const bool colorable = brute_chromatic(g) <= 5;
        if (colorable) CHECK(r.outcome == SearchOutcome::Found);
        if (r.outcome == SearchOutcome::Found) CHECK(is_homomorphism(g, qi(5, 2), r.map));
    }
}

TEST_CASE("covering arrays on graphs") {
    auto check_rows = [](const Graph& g, const CoveringArray& ca) {
        for (auto [u, v] : g.edges()) {
            std::vector<int> ru(ca.row(u).begin(), ca.row(u).end()), rv(ca.row(v).begin(), ca.row(v).end());
            CHECK(is_qualitatively_independent(Partition::from_labels(std::span<const int>(ru)),
                                               Partition::from_labels(std::span<const int>(rv))));
        }
    };
    const auto c4 = covering_array_on_graph(cycle(4), 4, 2);
    REQUIRE(c4.outcome == SearchOutcome::Found);
    check_rows(cycle(4), *c4.rows);
    const Graph k5 = build_graph({GraphFamily::Complete, 5});
    CHECK(covering_array_on_graph(k5, 5, 2).outcome == SearchOutcome::None);
    const auto six = covering_array_on_graph(k5, 6, 2);
    REQUIRE(six.outcome == SearchOutcome::Found);
    CHECK(verify(*six.rows).valid);
    check_rows(k5, *six.rows);
}

TEST_CASE("relation graphs") {
    for (auto [n, k] : {std::pair{6, 2}, {6, 3}, {8, 2}, {9, 3}}) {
        GraphSpec rel{GraphFamily::Relation, n, k, SetRelation::Intersecting, RelationType::ForAll, true};
        CHECK(build_graph(rel) == build_graph({GraphFamily::UQI, n, k}));
        CHECK(build_graph(rel).labels() == build_graph({GraphFamily::UQI, n, k}).labels());
    }
    for (auto [n, k] : {std::pair{4, 2}, {6, 2}, {6, 3}, {8, 2}}) {
        CAPTURE(n);
        CAPTURE(k);
        const int cs = n / k;
        GraphSpec sperner{GraphFamily::Relation, n, k, SetRelation::Incomparable, RelationType::ForAll, true};
        CHECK(static_cast<long>(max_clique(build_graph(sperner)).vertices.size()) == c(n, cs) / k);
        GraphSpec common{GraphFamily::Relation, n, k, SetRelation::Comparable, RelationType::Exists, true};
        CHECK(mpz_class(static_cast<long>(max_clique(build_graph(common)).vertices.size())) ==
              uniform_count(n - cs, k - 1));
    }
    GraphSpec partial{GraphFamily::Relation, 6, 2, SetRelation::PartialIntersecting, RelationType::ForAll, true, 2};
    CHECK(build_graph(partial).edge_count() == 0);
    GraphSpec all{GraphFamily::Relation, 4, 2, SetRelation::Intersecting, RelationType::Exists, false};
    CHECK(build_graph(all).size() == 7);
}

TEST_CASE("graph file round trip") {
    const Graph g = qi(5, 2);
    std::ostringstream out;
    write_graph(out, g);
    std::istringstream in(out.str());
    const Graph back = read_graph(in);
    CHECK(back == g);
    CHECK(back.labels() == g.labels());
    CHECK(back.name() == g.name());
    std::ostringstream again;
    write_graph(again, back);
    CHECK(again.str() == out.str());

    std::istringstream both("p edge 3 4\ne 1 2\ne 2 1\ne 2 3\ne 3 2\n");
    CHECK(read_graph(both).edge_count() == 2);
    std::istringstream mixed("p edge 3 3\ne 1 2\ne 2 1\ne 2 3\n");
    CHECK_THROWS_AS(read_graph(mixed), ParseError);
    std::istringstream dup("p edge 3 2\ne 1 2\ne 1 2\n");
    CHECK_THROWS_AS(read_graph(dup), ParseError);
    std::istringstream loop("p edge 3 1\ne 2 2\n");
    CHECK_THROWS_AS(read_graph(loop), ParseError);
    std::istringstream count("p edge 3 2\ne 1 2\n");
    CHECK_THROWS_AS(read_graph(count), ParseError);
}
