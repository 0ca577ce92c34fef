#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qica/covering_array.hpp"
#include "qica/errors.hpp"

using namespace qica;

namespace {

const std::vector<std::vector<int>> kPrintedCA11{
    {0, 0, 2, 1, 1, 1, 0, 1, 2, 2, 2},
    {0, 1, 0, 2, 1, 1, 2, 0, 1, 2, 2},
    {0, 1, 1, 0, 2, 1, 2, 2, 0, 1, 2},
    {0, 1, 1, 1, 0, 2, 2, 2, 2, 0, 1},
    {0, 2, 1, 1, 1, 0, 1, 2, 2, 2, 0},
};

const std::vector<std::vector<int>> kPrintedOA9{
    {0, 0, 0, 1, 1, 1, 2, 2, 2},
    {0, 1, 2, 0, 1, 2, 0, 1, 2},
    {0, 1, 2, 2, 0, 1, 1, 2, 0},
    {0, 1, 2, 1, 2, 0, 2, 0, 1},
};

const std::vector<std::vector<int>> kPrintedCA16{
    {0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3},
    {0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3},
    {0, 1, 2, 3, 1, 0, 3, 2, 2, 3, 0, 1, 3, 2, 1, 0},
    {0, 1, 2, 3, 2, 3, 0, 1, 3, 2, 1, 0, 1, 0, 3, 2},
    {0, 1, 2, 3, 3, 2, 1, 0, 1, 0, 3, 2, 2, 3, 0, 1},
};

// Brute-force pair coverage, independent of verify().
bool covers_all_pairs(const std::vector<std::vector<int>>& rows, int k) {
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = a + 1; b < rows.size(); ++b)
            for (int x = 0; x < k; ++x)
                for (int y = 0; y < k; ++y) {
                    bool hit = false;
                    for (std::size_t c = 0; c < rows[a].size() && !hit; ++c) hit = rows[a][c] == x && rows[b][c] == y;
                    if (!hit) return false;
                }
    return true;
}

// Circulant orbit array built without any validity check.
std::vector<std::vector<int>> orbit_rows(const std::vector<int>& v, int k) {
    const int r = static_cast<int>(v.size());
    std::vector<std::vector<int>> rows(r, std::vector<int>{0});
    for (int g = 0; g < k - 1; ++g)
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                int x = v[((i - j) % r + r) % r];
                rows[i].push_back(x == 0 ? 0 : (x - 1 + g) % (k - 1) + 1);
            }
    return rows;
}

}  // namespace

TEST_CASE("verify on printed arrays") {
    CHECK(verify(CoveringArray::from_rows(3, kPrintedCA11)).valid);
    CHECK(verify(CoveringArray::from_rows(3, kPrintedOA9)).valid);
    auto twin = CoveringArray::from_rows(2, {{0, 1, 0, 1}, {0, 1, 0, 1}});
    auto rep = verify(twin);
    CHECK_FALSE(rep.valid);
    bool has01 = false;
    for (auto m : rep.misses) has01 = has01 || (m.row_a == 0 && m.row_b == 1 && m.sym_a == 0 && m.sym_b == 1);
    CHECK(has01);
}

TEST_CASE("finite-field construction") {
    for (int k : {2, 3, 4, 5, 7, 8, 9}) {
        auto ca = construct_finite_field_ca(k);
        CHECK(ca.r() == k + 1);
        CHECK(ca.n() == k * k);
        CHECK(verify(ca).valid);
        CHECK(covers_all_pairs(ca.rows(), k));
    }
    // Labels x -> 2, x+1 -> 3 under x^2 + x + 1 reproduce the printed GF(4) array.
    CHECK(construct_finite_field_ca(4).rows() == kPrintedCA16);
    CHECK_THROWS_AS(construct_finite_field_ca(6), ParameterError);
    CHECK(binary_can(3) == 4);
}

TEST_CASE("disjoint columns and stripping") {
    for (int k : {2, 3, 4}) {
        auto s = strip_to_disjoint(construct_finite_field_ca(k));
        CHECK(s.r() == k);
        CHECK(s.n() == k * k);
        CHECK(verify(s).valid);
        auto d = disjoint_columns(s);
        CHECK(d.columns.size() == static_cast<std::size_t>(k));
        CHECK(d.exact);
    }
    auto four = strip_to_disjoint(construct_finite_field_ca(4));
    auto d4 = disjoint_columns(four);
    CHECK(d4.columns == std::vector<int>{0, 1, 2, 3});
    CHECK(four.rows() == std::vector<std::vector<int>>(kPrintedCA16.begin() + 1, kPrintedCA16.end()));

    auto zero_one = CoveringArray::from_rows(2, {{0, 1}, {0, 1}});
    CHECK(disjoint_columns(zero_one).columns == std::vector<int>{0, 1});
    auto single = CoveringArray::from_rows(3, {{0}, {2}});
    CHECK(disjoint_columns(single).columns == std::vector<int>{0});
    CHECK_THROWS_AS(strip_to_disjoint(CoveringArray::from_rows(3, kPrintedCA11)), ParameterError);
}

TEST_CASE("block recursion") {
    auto a = construct_finite_field_ca(3);
    auto b = strip_to_disjoint(a);
    auto c = block_recursive(a, b, true);
    CHECK(c.n() == 15);
    CHECK(c.r() == 12);
    CHECK(verify(c).valid);
    auto plain = block_recursive(a, b, false);
    CHECK(plain.n() == 18);
    CHECK(plain.r() == 12);
    CHECK(verify(plain).valid);
    // Row t is a_{t / s} followed by b_{t mod s}.
    for (int t = 0; t < plain.r(); ++t)
        for (int col = 0; col < 9; ++col) {
            CHECK(plain.at(t, col) == a.at(t / 3, col));
            CHECK(plain.at(t, 9 + col) == b.at(t % 3, col));
        }

    auto a2 = construct_finite_field_ca(2);
    auto c2 = block_recursive(a2, strip_to_disjoint(a2), true);
    CHECK(c2.n() == 6);
    CHECK(c2.r() == 6);
    CHECK(verify(c2).valid);
    CHECK_THROWS_AS(block_recursive(a, CoveringArray::from_rows(3, kPrintedCA11), true), ParameterError);
    CHECK_THROWS_AS(block_recursive(a, a2, false), ParameterError);
}

TEST_CASE("iterated block recursion is balanced") {
    auto c = iterate_block_recursive(3, 1);
    CHECK(c.n() == 15);
    CHECK(c.r() == 12);
    CHECK(is_balanced(c));
    CHECK(verify(c).valid);
    auto c2 = iterate_block_recursive(2, 2);
    CHECK(c2.n() == 8);
    CHECK(c2.r() == 12);
    CHECK(is_balanced(c2));
    CHECK(verify(c2).valid);
    CHECK(iterate_block_recursive(5, 0) == construct_finite_field_ca(5));
    CHECK(verify(iterate_block_recursive(4, 2)).valid);
    CHECK_FALSE(is_balanced(CoveringArray::from_rows(3, kPrintedCA11)));
    CHECK(is_balanced(CoveringArray::from_rows(2, {{0, 1}})));
}

TEST_CASE("starter vectors") {
    StarterVector good{3, {0, 1, 1, 1, 2}};
    CHECK(verify_starter(good).valid);
    CHECK(expand_starter(good).rows() == kPrintedCA11);
    StarterVector bad{3, {0, 1, 1, 1, 1}};
    auto rep = verify_starter(bad);
    CHECK_FALSE(rep.valid);
    bool misses_one = false;
    for (auto [i, d] : rep.missing) misses_one = misses_one || d == 1;
    CHECK(misses_one);
    CHECK_FALSE(covers_all_pairs(orbit_rows(bad.v, 3), 3));
    CHECK_THROWS_AS(expand_starter(bad), ParameterError);
    CHECK_THROWS_AS(verify_starter(StarterVector{3, {1, 1, 1}}), ParameterError);
    CHECK_THROWS_AS(verify_starter(StarterVector{3, {0, 0, 1}}), ParameterError);

    // No length-4 starter exists for k = 3.
    for (int mask = 0; mask < 8; ++mask) {
        StarterVector s{3, {0, 1 + (mask & 1), 1 + ((mask >> 1) & 1), 1 + ((mask >> 2) & 1)}};
        CHECK_FALSE(verify_starter(s).valid);
    }
}

TEST_CASE("starter validity matches brute-force coverage of the expansion") {
    std::mt19937_64 rng(20240611);
    int valid = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = 3 + static_cast<int>(rng() % 3);
        const int r = 3 + static_cast<int>(rng() % 6);
        std::vector<int> v(r, 0);
        for (int j = 1; j < r; ++j) v[j] = 1 + static_cast<int>(rng() % (k - 1));
        const bool claimed = verify_starter(StarterVector{k, v}).valid;
        const bool actual = covers_all_pairs(orbit_rows(v, k), k);
        CHECK(claimed == actual);
        if (claimed) {
            ++valid;
            CHECK(verify(expand_starter(StarterVector{k, v})).valid);
        }
    }
    CHECK(valid > 0);
}

TEST_CASE("starter search") {
    auto f = search_starter(3, 5, StarterSearchMode::Exhaustive);
    REQUIRE(f.outcome == SearchOutcome::Found);
    CHECK(verify_starter(*f.starter).valid);
    auto six = search_starter(3, 6, StarterSearchMode::Exhaustive);
    REQUIRE(six.outcome == SearchOutcome::Found);
    CHECK(six.starter->v == std::vector<int>{0, 1, 1, 1, 1, 2});
    CHECK(covers_all_pairs(orbit_rows(six.starter->v, 3), 3));
    CHECK(search_starter(3, 4, StarterSearchMode::Exhaustive).outcome == SearchOutcome::None);
    CHECK(search_starter(4, 7, StarterSearchMode::Exhaustive).outcome == SearchOutcome::Found);
    CHECK(search_starter(5, 9, StarterSearchMode::Exhaustive, 1, 3).outcome == SearchOutcome::Unknown);

    // Lexicographically least: compare with a plain odometer scan.
    for (auto [k, r] : std::vector<std::pair<int, int>>{{3, 5}, {4, 6}, {4, 8}, {5, 7}}) {
        std::vector<int> v(r, 1);
        v[0] = 0;
        std::optional<std::vector<int>> least;
        while (true) {
            if (verify_starter(StarterVector{k, v}).valid) {
                least = v;
                break;
            }
            int j = r - 1;
            while (j >= 1 && v[j] == k - 1) v[j--] = 1;
            if (j == 0) break;
            ++v[j];
        }
        auto res = search_starter(k, r, StarterSearchMode::Exhaustive);
        REQUIRE(least.has_value());
        REQUIRE(res.starter.has_value());
        CHECK(res.starter->v == *least);
    }

    auto h1 = search_starter(5, 10, StarterSearchMode::HillClimb, 7, 5'000'000);
    auto h2 = search_starter(5, 10, StarterSearchMode::HillClimb, 7, 5'000'000);
    REQUIRE(h1.outcome == SearchOutcome::Found);
    CHECK(verify_starter(*h1.starter).valid);
    CHECK(h1.starter == h2.starter);
    CHECK(h1.steps == h2.steps);
    CHECK(search_starter(3, 4, StarterSearchMode::HillClimb, 1, 1000).outcome == SearchOutcome::Unknown);
}

TEST_CASE("binary CAN formula") {
    CHECK(binary_can(5) == 6);
    CHECK(binary_can(3) == 4);
    CHECK(binary_can(10) == 6);
    CHECK(binary_can(11) == 7);
    CHECK(binary_can(2) == 4);
}

TEST_CASE("size bounds") {
    auto tc3 = size_bounds({BoundFamily::TcSquarePlusTwo, 5, 3});
    CHECK(tc3[0].integral == 11);
    auto vt = size_bounds({BoundFamily::VertexTransitive, 0, 3, 9});
    CHECK(vt[0].value == 4);
    auto vt37 = size_bounds({BoundFamily::VertexTransitive, 0, 6, 37});
    CHECK(vt37[0].integral == 8);
    CHECK(vt37[0].value == mpq_class(222, 25));
    // k+1 for every n = k^2.
    for (long k = 2; k <= 8; ++k) CHECK(size_bounds({BoundFamily::VertexTransitive, 0, k, k * k})[0].value == k + 1);
    auto tc2 = size_bounds({BoundFamily::TcLog, 8, 3});
    CHECK(tc2[0].integral == 5);  // ceil(3*3/2)
    auto tc2b = size_bounds({BoundFamily::TcLog, 5, 2});
    CHECK(tc2b[0].integral == 3);  // ceil(log2 5) = 3
    auto tc1 = size_bounds({BoundFamily::TcPointBalanced, 0, 3, 0, 0, 12});
    CHECK(tc1[0].value == 10);
    CHECK(tc1[1].value == 12);
    // b = 9, k = 3: C(9,2) / (3 C(3,1)) = 36 / 9 = 4.
    CHECK(size_bounds({BoundFamily::PbtcRows, 0, 3, 0, 9})[0].integral == 4);
    CHECK(size_bounds({BoundFamily::ChromaticSquare, 0, 3})[0].integral == 6);
    CHECK(size_bounds({BoundFamily::FractionalSquare, 0, 3})[0].integral == 4);
    CHECK_THROWS_AS(size_bounds({BoundFamily::TcSquarePlusTwo, 4, 3}), ParameterError);
    CHECK_THROWS_AS(size_bounds({BoundFamily::VertexTransitive, 0, 4, 9}), ParameterError);
}

TEST_CASE("MOLS conversion") {
    auto m4 = ca_to_mols(construct_finite_field_ca(4));
    CHECK(m4.squares.size() == 3);
    CHECK(check_mols(m4).empty());
    auto m3 = ca_to_mols(construct_finite_field_ca(3));
    CHECK(m3.squares.size() == 2);
    CHECK(check_mols(m3).empty());
    CHECK_THROWS_AS(ca_to_mols(CoveringArray::from_rows(3, kPrintedCA11)), StructureError);
    auto doubled = construct_finite_field_ca(3);
    doubled.set(2, 0, doubled.at(2, 1));
    try {
        ca_to_mols(doubled);
        FAIL("expected a structure error");
    } catch (const StructureError& e) {
        CHECK(std::string(e.what()).find("more than once") != std::string::npos);
    }
}

TEST_CASE("text formats") {
    auto ca = construct_finite_field_ca(3);
    std::ostringstream os;
    write_ca(os, ca);
    std::istringstream is(os.str());
    auto back = read_ca(is);
    CHECK(back == ca);
    std::ostringstream os2;
    write_ca(os2, back);
    CHECK(os2.str() == os.str());

    std::istringstream commented("# comment\nca 2 2 2\n0 1\n# inner\n1 0\n");
    CHECK(read_ca(commented).n() == 2);
    std::istringstream bad("ca 3 2 2\n0 1 0\n1 0\n");
    try {
        read_ca(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    std::istringstream range("ca 2 1 2\n0 5\n");
    CHECK_THROWS_AS(read_ca(range), ParseError);

    std::istringstream sv("sv 3 5\n0 1 1 1 2\n");
    auto s = read_starter(sv);
    CHECK(s == StarterVector{3, {0, 1, 1, 1, 2}});
    std::ostringstream sout;
    write_starter(sout, s);
    CHECK(sout.str() == "sv 3 5\n0 1 1 1 2\n");
    std::istringstream sv_bad("sv 3 5\n0 1 1 2\n");
    CHECK_THROWS_AS(read_starter(sv_bad), ParseError);
}
