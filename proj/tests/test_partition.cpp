#include <algorithm>
#include <set>

#include "doctest.h"
#include "qica/errors.hpp"
#include "qica/partition.hpp"

using namespace qica;

namespace {

// Every set partition via restricted growth strings; independent of the library enumerator.
void rgs_all(int n, std::vector<int>& a, int pos, int maxv, std::vector<std::vector<int>>& out) {
    if (pos == n) {
        out.push_back(a);
        return;
    }
    for (int v = 0; v <= maxv + 1; ++v) {
        a[pos] = v;
        rgs_all(n, a, pos + 1, std::max(maxv, v), out);
    }
}

std::vector<std::vector<std::vector<int>>> brute_force(int n, int k, const PartitionFilter& f) {
    std::vector<std::vector<int>> all;
    std::vector<int> a(n, 0);
    rgs_all(n, a, 1, 0, all);
    std::vector<std::vector<std::vector<int>>> out;
    for (const auto& rgs : all) {
        int blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
        if (blocks != k) continue;
        std::vector<std::vector<int>> cls(k);
        for (int e = 0; e < n; ++e) cls[rgs[e]].push_back(e);
        auto [lo, hi] = f.size_range(n, k);
        bool ok = true;
        for (auto& c : cls) ok = ok && static_cast<int>(c.size()) >= lo && static_cast<int>(c.size()) <= hi;
        if (ok) out.push_back(cls);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("partition canonical form and text round trip") {
    auto p = Partition::parse("4 5 6 | 1 2 3 | 9 7 8");
    CHECK(p.to_string() == "1 2 3 | 4 5 6 | 7 8 9");
    CHECK(p.k() == 3);
    CHECK(p.class_of(7) == 2);
    std::vector<int> labels{7, 7, 3, 3};
    CHECK(Partition::from_labels(std::span<const int>(labels)).to_string() == "1 2 | 3 4");
    CHECK_THROWS_AS(Partition::parse("1 2 | 2 3"), ParameterError);
    CHECK_THROWS_AS(Partition::parse("1 | 3"), ParameterError);
    CHECK_THROWS_AS(Partition::parse("1 x"), ParameterError);
}

TEST_CASE("enumeration examples") {
    auto ps = enumerate_partitions(4, 2, PartitionFilter::min_class_size(2));
    REQUIRE(ps.size() == 3);
    CHECK(ps[0].to_string() == "1 2 | 3 4");
    CHECK(ps[1].to_string() == "1 3 | 2 4");
    CHECK(ps[2].to_string() == "1 4 | 2 3");
    auto one = enumerate_partitions(3, 3, PartitionFilter::all());
    REQUIRE(one.size() == 1);
    CHECK(one[0].to_string() == "1 | 2 | 3");
    CHECK(enumerate_partitions(9, 3, PartitionFilter::uniform()).size() == 280);
    CHECK_THROWS_AS(enumerate_partitions(9, 2, PartitionFilter::uniform()), ParameterError);
    CHECK_THROWS_AS(enumerate_partitions(3, 4, PartitionFilter::all()), ParameterError);
}

TEST_CASE("enumeration equals brute force in lexicographic order") {
    for (int n = 1; n <= 8; ++n)
        for (int k = 1; k <= n; ++k) {
            std::vector<PartitionFilter> filters{PartitionFilter::all(), PartitionFilter::almost_uniform(),
                                                 PartitionFilter::min_class_size(2)};
            if (n % k == 0) filters.push_back(PartitionFilter::uniform());
            for (const auto& f : filters) {
                auto expect = brute_force(n, k, f);
                auto got = enumerate_partitions(n, k, f);
                REQUIRE(got.size() == expect.size());
                for (std::size_t i = 0; i < got.size(); ++i) REQUIRE(got[i].classes() == expect[i]);
                CHECK(std::is_sorted(got.begin(), got.end()));
            }
        }
}

TEST_CASE("sharding covers the family exactly once") {
    std::multiset<std::vector<std::uint8_t>> seen;
    for (int s = 0; s < 3; ++s)
        for_each_partition(9, 3, PartitionFilter::uniform(), [&](std::span<const std::uint8_t> l) {
            seen.emplace(l.begin(), l.end());
            return true;
        }, s, 3);
    CHECK(seen.size() == 280);
    CHECK(std::set<std::vector<std::uint8_t>>(seen.begin(), seen.end()).size() == 280);
}

TEST_CASE("counting formulas") {
    CHECK(count_partitions(4, 2, PartitionFilter::all()) == 7);
    CHECK(count_partitions(16, 4, PartitionFilter::uniform()) == 2627625);
    CHECK(count_partitions(9, 3, PartitionFilter::uniform()) == 280);
    for (int n = 1; n <= 10; ++n) CHECK(count_partitions(n, n, PartitionFilter::all()) == 1);
    for (int n = 1; n <= 10; ++n)
        for (int k = 1; k <= n; ++k) {
            std::vector<PartitionFilter> filters{PartitionFilter::all(), PartitionFilter::almost_uniform(),
                                                 PartitionFilter::min_class_size(2),
                                                 PartitionFilter::min_class_size(3)};
            if (n % k == 0) filters.push_back(PartitionFilter::uniform());
            for (const auto& f : filters) {
                INFO("n=" << n << " k=" << k << " " << f.name());
                CHECK(count_partitions(n, k, f) == count_by_enumeration(n, k, f));
            }
        }
}

TEST_CASE("qualitative independence and meets") {
    auto a = Partition::parse("1 2 | 3 4");
    auto b = Partition::parse("1 3 | 2 4");
    CHECK(is_qualitatively_independent(a, b));
    CHECK(is_qualitatively_independent(b, a));
    CHECK_FALSE(is_qualitatively_independent(a, a));
    CHECK(meet_value(a, b) == 4);
    CHECK(meet_value(a, a) == 2);
    CHECK_THROWS_AS(meet_value(a, Partition::parse("1 2 3 | 4 5")), ParameterError);

    // Rows 2 and 3 of the printed OA(9,4,3,2), read as 3-partitions.
    std::vector<int> r2{0, 1, 2, 0, 1, 2, 0, 1, 2};
    std::vector<int> r3{0, 1, 2, 2, 0, 1, 1, 2, 0};
    auto p2 = Partition::from_labels(std::span<const int>(r2));
    auto p3 = Partition::from_labels(std::span<const int>(r3));
    CHECK(is_qualitatively_independent(p2, p3));

    auto u93 = enumerate_partitions(9, 3, PartitionFilter::uniform());
    std::set<int> values;
    for (const auto& p : u93)
        for (const auto& q : u93) {
            int m = meet_value(p, q);
            values.insert(m);
            CHECK((m == 9) == is_qualitatively_independent(p, q));
            CHECK((m == 3) == (p == q));
        }
    CHECK(values == std::set<int>{3, 5, 6, 7, 9});
}

TEST_CASE("symmetric chain decomposition") {
    for (int n = 1; n <= 10; ++n) {
        auto d = symmetric_chain_decomposition(n);
        CHECK(check_chain_decomposition(d).empty());
        CHECK(d.chains.size() == binomial(n, n / 2).get_ui());
    }
    CHECK(symmetric_chain_decomposition(3).chains.size() == 3);
    CHECK(symmetric_chain_decomposition(6).chains.size() == 20);
    auto d = symmetric_chain_decomposition(4);
    d.chains[0].pop_back();
    CHECK_FALSE(check_chain_decomposition(d).empty());
}

TEST_CASE("one-factorizations") {
    auto f42 = baranyai_factorization(4, 2);
    REQUIRE(f42.factors.size() == 3);
    CHECK(f42.factors[0].to_string() == "1 2 | 3 4");
    CHECK(f42.factors[1].to_string() == "1 3 | 2 4");
    CHECK(f42.factors[2].to_string() == "1 4 | 2 3");
    for (auto [n, c] : std::vector<std::pair<int, int>>{{6, 2}, {6, 3}, {8, 2}, {8, 4}, {9, 3}, {10, 2}, {10, 5},
                                                        {12, 3}, {12, 4}, {12, 6}}) {
        INFO("n=" << n << " c=" << c);
        auto f = baranyai_factorization(n, c);
        CHECK(check_one_factorization(f).empty());
        CHECK(f.factors.size() == binomial(n - 1, c - 1).get_ui());
        for (std::size_t i = 0; i < f.factors.size(); ++i)
            for (std::size_t j = i + 1; j < f.factors.size(); ++j)
                CHECK(has_sperner_property(f.factors[i], f.factors[j]));
    }
    CHECK_THROWS_AS(baranyai_factorization(7, 2), ParameterError);
    CHECK_THROWS_AS(baranyai_factorization(12, 3, 10), ResourceError);
}
