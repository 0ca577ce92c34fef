#include "qica/covering_array.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "qica/errors.hpp"
#include "qica/finite_field.hpp"
#include "qica/partition.hpp"

namespace qica {

CoveringArray::CoveringArray(int r, int n, int k) : r_(r), n_(n), k_(k) {
    if (r < 1 || n < 1) throw ParameterError("covering array needs at least one row and one column");
    if (k < 1 || k > 255) throw ParameterError("alphabet size must be in 1..255");
    data_.assign(static_cast<std::size_t>(r) * n, 0);
}

CoveringArray CoveringArray::from_rows(int k, const std::vector<std::vector<int>>& rows) {
    if (rows.empty() || rows[0].empty()) throw ParameterError("covering array needs at least one row and one column");
    CoveringArray ca(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()), k);
    for (int i = 0; i < ca.r(); ++i) {
        if (static_cast<int>(rows[i].size()) != ca.n()) throw ParameterError("ragged covering array rows");
        for (int j = 0; j < ca.n(); ++j) {
            if (rows[i][j] < 0 || rows[i][j] >= k) throw ParameterError("covering array symbol out of range");
            ca.set(i, j, rows[i][j]);
        }
    }
    return ca;
}

std::vector<std::vector<int>> CoveringArray::rows() const {
    std::vector<std::vector<int>> out(r_);
    for (int i = 0; i < r_; ++i) out[i].assign(row(i).begin(), row(i).end());
    return out;
}

VerificationReport verify(const CoveringArray& ca) {
    VerificationReport rep;
    const int k = ca.k();
    std::vector<char> seen(static_cast<std::size_t>(k) * k);
    for (int a = 0; a < ca.r(); ++a)
        for (int b = a + 1; b < ca.r(); ++b) {
            std::fill(seen.begin(), seen.end(), 0);
            auto ra = ca.row(a);
            auto rb = ca.row(b);
            for (int c = 0; c < ca.n(); ++c) seen[static_cast<std::size_t>(ra[c]) * k + rb[c]] = 1;
            for (int x = 0; x < k; ++x)
                for (int y = 0; y < k; ++y)
                    if (!seen[static_cast<std::size_t>(x) * k + y]) rep.misses.push_back({a, b, x, y});
        }
    rep.valid = rep.misses.empty();
    return rep;
}

CoveringArray construct_finite_field_ca(int k) {
    Field f = make_field(k);
    CoveringArray ca(k + 1, k * k, k);
    for (int c = 0; c < k * k; ++c) {
        const int l = c / k;
        const int j = c % k;
        ca.set(0, c, l);
        for (int i = 0; i < k; ++i) ca.set(i + 1, c, f.add(f.mul(i, l), j));
    }
    return ca;
}

CoveringArray strip_to_disjoint(const CoveringArray& ca) {
    const int k = ca.k();
    bool shaped = ca.r() == k + 1 && ca.n() == k * k;
    for (int c = 0; shaped && c < ca.n(); ++c) shaped = ca.at(0, c) == c / k;
    for (int i = 1; shaped && i <= k; ++i)
        for (int j = 0; shaped && j < k; ++j) shaped = ca.at(i, j) == j;
    if (!shaped) throw ParameterError("strip_to_disjoint expects a finite-field covering array");
    CoveringArray out(k, k * k, k);
    for (int i = 0; i < k; ++i)
        for (int c = 0; c < k * k; ++c) out.set(i, c, ca.at(i + 1, c));
    return out;
}

namespace {

bool columns_disjoint(const CoveringArray& ca, int x, int y) {
    for (int i = 0; i < ca.r(); ++i)
        if (ca.at(i, x) == ca.at(i, y)) return false;
    return true;
}

struct SmallClique {
    std::vector<std::uint64_t> adj;
    std::uint64_t best = 0;
    long nodes = 0;
    long budget = 0;
    bool aborted = false;

    void expand(std::uint64_t current, std::uint64_t cand) {
        if (++nodes > budget) {
            aborted = true;
            return;
        }
        if (!cand) {
            if (std::popcount(current) > std::popcount(best)) best = current;
            return;
        }
        while (cand) {
            if (std::popcount(current) + std::popcount(cand) <= std::popcount(best)) return;
            const int v = std::countr_zero(cand);
            const std::uint64_t bit = std::uint64_t{1} << v;
            expand(current | bit, cand & adj[v]);
            if (aborted) return;
            cand &= ~bit;
        }
        if (std::popcount(current) > std::popcount(best)) best = current;
    }
};

}  // namespace

DisjointColumns disjoint_columns(const CoveringArray& ca, long budget) {
    const int n = ca.n();
    DisjointColumns out;
    auto greedy = [&] {
        std::vector<int> cols;
        for (int c = 0; c < n; ++c) {
            bool ok = true;
            for (int d : cols) ok = ok && columns_disjoint(ca, c, d);
            if (ok) cols.push_back(c);
        }
        return cols;
    };
    if (n > 64) {
        out.columns = greedy();
        out.exact = out.columns.size() >= static_cast<std::size_t>(ca.k());
        return out;
    }
    SmallClique s;
    s.adj.assign(n, 0);
    s.budget = budget;
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            if (columns_disjoint(ca, x, y)) {
                s.adj[x] |= std::uint64_t{1} << y;
                s.adj[y] |= std::uint64_t{1} << x;
            }
    auto g = greedy();
    for (int c : g) s.best |= std::uint64_t{1} << c;
    const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    s.expand(0, all);
    for (std::uint64_t m = s.best; m; m &= m - 1) out.columns.push_back(std::countr_zero(m));
    // k pairwise disjoint columns is the ceiling since each row has k symbols.
    out.exact = !s.aborted || out.columns.size() >= static_cast<std::size_t>(ca.k());
    return out;
}

CoveringArray block_recursive(const CoveringArray& a, const CoveringArray& b, bool reduce) {
    if (a.k() != b.k()) throw ParameterError("block recursion needs equal alphabets");
    const int k = a.k();
    std::vector<int> dropped;
    if (reduce) {
        auto d = disjoint_columns(b);
        if (static_cast<int>(d.columns.size()) < k)
            throw ParameterError("second array lacks k pairwise disjoint columns");
        dropped.assign(d.columns.begin(), d.columns.begin() + k);
    }
    std::vector<int> kept;
    for (int c = 0; c < b.n(); ++c)
        if (std::find(dropped.begin(), dropped.end(), c) == dropped.end()) kept.push_back(c);
    // Relabelled b-rows.
    std::vector<std::vector<int>> brows(b.r());
    for (int s = 0; s < b.r(); ++s) {
        std::vector<int> inv(k);
        for (int x = 0; x < k; ++x) inv[x] = x;
        if (reduce)
            for (int j = 0; j < k; ++j) inv[b.at(s, dropped[j])] = j;
        for (int c : kept) brows[s].push_back(inv[b.at(s, c)]);
    }
    CoveringArray out(a.r() * b.r(), a.n() + static_cast<int>(kept.size()), k);
    for (int t = 0; t < out.r(); ++t) {
        const int ai = t / b.r();
        const int bi = t % b.r();
        for (int c = 0; c < a.n(); ++c) out.set(t, c, a.at(ai, c));
        for (std::size_t c = 0; c < kept.size(); ++c) out.set(t, a.n() + static_cast<int>(c), brows[bi][c]);
    }
    return out;
}

CoveringArray iterate_block_recursive(int k, int i) {
    if (i < 0) throw ParameterError("iteration count must be nonnegative");
    CoveringArray c = construct_finite_field_ca(k);
    if (i == 0) return c;
    const CoveringArray b = strip_to_disjoint(c);
    for (int t = 0; t < i; ++t) c = block_recursive(c, b, true);
    return c;
}

bool is_balanced(const CoveringArray& ca) {
    const int k = ca.k();
    if (ca.n() % k) return false;
    std::vector<int> count(k);
    for (int i = 0; i < ca.r(); ++i) {
        std::fill(count.begin(), count.end(), 0);
        for (auto x : ca.row(i)) ++count[x];
        for (int x = 0; x < k; ++x)
            if (count[x] != ca.n() / k) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Starter vectors

void validate_starter_shape(const StarterVector& s) {
    if (s.k < 3) throw ParameterError("starter vectors need k >= 3");
    if (s.r() < 2) throw ParameterError("starter vectors need length >= 2");
    if (s.v[0] != 0) throw ParameterError("starter vector must start with 0");
    for (int j = 1; j < s.r(); ++j)
        if (s.v[j] < 1 || s.v[j] >= s.k) throw ParameterError("starter entries after the first must lie in 1..k-1");
}

namespace {

template <typename F>
void for_each_requirement_pair(int r, F&& f) {
    for (int i = 1; i < r; ++i)
        for (int j = 1; j < r; ++j) {
            const int t = (j + i) % r;
            if (t != 0) f(i, j, t);
        }
}

}  // namespace

int starter_defect(int k, std::span<const int> v) {
    const int r = static_cast<int>(v.size());
    const int m = k - 1;
    std::vector<char> hit(static_cast<std::size_t>(r) * m, 0);
    for_each_requirement_pair(r, [&](int i, int j, int t) { hit[static_cast<std::size_t>(i) * m + ((v[j] - v[t]) % m + m) % m] = 1; });
    int missing = 0;
    for (int i = 1; i < r; ++i)
        for (int d = 0; d < m; ++d) missing += !hit[static_cast<std::size_t>(i) * m + d];
    return missing;
}

StarterReport verify_starter(const StarterVector& s) {
    validate_starter_shape(s);
    const int r = s.r();
    const int m = s.k - 1;
    std::vector<char> hit(static_cast<std::size_t>(r) * m, 0);
    for_each_requirement_pair(r, [&](int i, int j, int t) {
        hit[static_cast<std::size_t>(i) * m + ((s.v[j] - s.v[t]) % m + m) % m] = 1;
    });
    StarterReport rep;
    for (int i = 1; i < r; ++i)
        for (int d = 0; d < m; ++d)
            if (!hit[static_cast<std::size_t>(i) * m + d]) rep.missing.emplace_back(i, d);
    rep.valid = rep.missing.empty();
    return rep;
}

CoveringArray expand_starter(const StarterVector& s) {
    if (!verify_starter(s).valid) throw ParameterError("starter vector fails the difference condition");
    const int r = s.r();
    const int k = s.k;
    CoveringArray ca(r, 1 + r * (k - 1), k);
    for (int g = 0; g < k - 1; ++g)
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                const int x = s.v[((i - j) % r + r) % r];
                const int y = x == 0 ? 0 : (x - 1 + g) % (k - 1) + 1;
                ca.set(i, 1 + g * r + j, y);
            }
    return ca;
}

namespace {

class ExhaustiveStarter {
public:
    ExhaustiveStarter(int k, int r, long budget) : k_(k), r_(r), m_(k - 1), budget_(budget), v_(r, 0) {
        cnt_.assign(static_cast<std::size_t>(r) * m_, 0);
        uncovered_.assign(r, m_);
        remaining_.assign(r, 0);
        for_each_requirement_pair(r, [&](int i, int, int) { ++remaining_[i]; });
    }

    StarterSearchResult run() {
        StarterSearchResult res;
        bool found = false;
        if (r_ >= 2) {
            assign(1, 1);
            found = dfs(2);
        }
        res.steps = steps_;
        if (found) {
            res.outcome = SearchOutcome::Found;
            res.starter = StarterVector{k_, v_};
        } else {
            res.outcome = aborted_ ? SearchOutcome::Unknown : SearchOutcome::None;
        }
        return res;
    }

private:
    // Adds (sign = +1) or removes (-1) the pairs formed by position t with earlier positions.
    bool update(int t, int sign) {
        bool feasible = true;
        for (int a = 1; a < t; ++a) {
            for (auto [j, u] : {std::pair{a, t}, std::pair{t, a}}) {
                const int i = ((u - j) % r_ + r_) % r_;
                if (i == 0 || u % r_ == 0) continue;
                const int d = ((v_[j] - v_[u]) % m_ + m_) % m_;
                int& c = cnt_[static_cast<std::size_t>(i) * m_ + d];
                if (sign > 0) {
                    if (c++ == 0) --uncovered_[i];
                    --remaining_[i];
                } else {
                    if (--c == 0) ++uncovered_[i];
                    ++remaining_[i];
                }
            }
        }
        if (sign > 0)
            for (int i = 1; i < r_; ++i)
                if (uncovered_[i] > remaining_[i]) feasible = false;
        return feasible;
    }

    bool assign(int t, int value) {
        v_[t] = value;
        return update(t, +1);
    }

    bool dfs(int t) {
        if (t == r_) {
            for (int i = 1; i < r_; ++i)
                if (uncovered_[i]) return false;
            return true;
        }
        for (int x = 1; x <= m_; ++x) {
            if (++steps_ > budget_) {
                aborted_ = true;
                return false;
            }
            const bool ok = assign(t, x);
            if (ok && dfs(t + 1)) return true;
            update(t, -1);
            if (aborted_) return false;
        }
        return false;
    }

    int k_, r_, m_;
    long budget_;
    long steps_ = 0;
    bool aborted_ = false;
    std::vector<int> v_;
    std::vector<int> cnt_;
    std::vector<int> uncovered_, remaining_;
};

StarterSearchResult hill_climb(int k, int r, std::uint64_t seed, long budget) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> sym(1, k - 1);
    std::uniform_int_distribution<int> pos(1, r - 1);
    StarterSearchResult res;
    std::vector<int> v(r, 0);
    auto restart = [&] {
        for (int j = 1; j < r; ++j) v[j] = sym(rng);
    };
    restart();
    int cost = starter_defect(k, v);
    long stale = 0;
    const long patience = 50L * r;
    while (cost > 0) {
        if (++res.steps > budget) {
            res.outcome = SearchOutcome::Unknown;
            return res;
        }
        const int j = pos(rng);
        const int old = v[j];
        int x = sym(rng);
        if (x == old) x = x % (k - 1) + 1;
        v[j] = x;
        const int next = starter_defect(k, v);
        if (next < cost) {
            cost = next;
            stale = 0;
            continue;
        }
        if (next == cost) {
            ++stale;
        } else {
            v[j] = old;
            ++stale;
        }
        if (stale >= patience) {
            restart();
            cost = starter_defect(k, v);
            stale = 0;
        }
    }
    res.outcome = SearchOutcome::Found;
    res.starter = StarterVector{k, v};
    return res;
}

}  // namespace

StarterSearchResult search_starter(int k, int r, StarterSearchMode mode, std::uint64_t seed, long budget) {
    if (k < 3) throw ParameterError("starter search needs k >= 3");
    if (r < 2) throw ParameterError("starter search needs r >= 2");
    if (mode == StarterSearchMode::Exhaustive) return ExhaustiveStarter(k, r, budget).run();
    return hill_climb(k, r, seed, budget);
}

// ---------------------------------------------------------------------------
// Bounds

int binary_can(long r) {
    if (r < 1) throw ParameterError("binary_can needs r >= 1");
    for (int n = 2;; ++n)
        if (binomial(n - 1, n / 2 - 1) >= r) return n;
}

namespace {

NamedBound make_bound(std::string name, mpq_class v, bool upper) {
    v.canonicalize();
    mpz_class z;
    if (upper)
        mpz_fdiv_q(z.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
    else
        mpz_cdiv_q(z.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
    return {std::move(name), v, z};
}

}  // namespace

std::vector<NamedBound> size_bounds(const BoundQuery& q) {
    std::vector<NamedBound> out;
    switch (q.family) {
        case BoundFamily::TcPointBalanced: {
            if (q.k < 1 || q.pbtc < 1) throw ParameterError("tc bound 1 needs k, pbtc >= 1");
            out.push_back(make_bound("tc_lower", mpq_class(q.pbtc, q.k) + q.k * (q.k - 1), false));
            out.push_back(make_bound("tc_upper", mpq_class(q.pbtc), true));
            break;
        }
        case BoundFamily::TcLog: {
            if (q.k < 1 || q.r < 1) throw ParameterError("tc bound 2 needs k, r >= 1");
            // ceil(k log2 r / 2) = least m with 4^m >= r^k.
            mpz_class rk, four(1);
            mpz_ui_pow_ui(rk.get_mpz_t(), static_cast<unsigned long>(q.r), static_cast<unsigned long>(q.k));
            long m = 0;
            while (four < rk) {
                four *= 4;
                ++m;
            }
            out.push_back(make_bound("tc_lower", mpq_class(m), false));
            break;
        }
        case BoundFamily::TcSquarePlusTwo: {
            if (q.k < 3 || q.r < q.k + 2) throw ParameterError("tc bound 3 needs k >= 3 and r >= k+2");
            out.push_back(make_bound("tc_lower", mpq_class(q.k * q.k + 2), false));
            break;
        }
        case BoundFamily::PbtcRows: {
            if (q.k < 2 || q.b < 1 || q.b % q.k) throw ParameterError("tc bound 4 needs k >= 2 and k | b");
            const long c = q.b / q.k;
            if (c < q.k - 2) throw ParameterError("tc bound 4 needs b/k >= k-2");
            mpq_class v(binomial(q.b, c - (q.k - 2)), q.k * binomial(c, q.k - 2));
            out.push_back(make_bound("rows_upper", v, true));
            break;
        }
        case BoundFamily::VertexTransitive: {
            if (q.k < 2 || q.n < 1) throw ParameterError("vertex-transitive bound needs k >= 2");
            const long c = q.n / q.k;
            const long rem = q.n % q.k;
            if (q.k > c) throw ParameterError("vertex-transitive bound needs n >= k^2");
            mpq_class v(factorial(q.n) * factorial(q.k - 2),
                        mpz_class(q.k - rem) * factorial(q.n - c + q.k - 2) * factorial(c));
            out.push_back(make_bound("omega_upper", v, true));
            break;
        }
        case BoundFamily::ChromaticSquare: {
            if (q.k < 2) throw ParameterError("chromatic bound needs k >= 2");
            out.push_back(make_bound("chi_upper", mpq_class(binomial(q.k + 1, 2)), true));
            break;
        }
        case BoundFamily::FractionalSquare: {
            if (q.k < 2) throw ParameterError("fractional chromatic bound needs k >= 2");
            out.push_back(make_bound("frac_chi_upper", mpq_class(q.k + 1), true));
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Latin squares

LatinSquareSet ca_to_mols(const CoveringArray& ca) {
    const int k = ca.k();
    if (ca.n() != k * k || ca.r() < 3) throw StructureError("expected an array with k^2 columns and at least 3 rows");
    std::vector<int> seen(static_cast<std::size_t>(k) * k);
    for (int a = 0; a < ca.r(); ++a)
        for (int b = a + 1; b < ca.r(); ++b) {
            std::fill(seen.begin(), seen.end(), 0);
            for (int c = 0; c < ca.n(); ++c) {
                const int x = ca.at(a, c), y = ca.at(b, c);
                if (seen[static_cast<std::size_t>(x) * k + y]++) {
                    std::ostringstream os;
                    os << "rows " << a << "," << b << " cover pair (" << x << "," << y << ") more than once";
                    throw StructureError(os.str());
                }
            }
        }
    LatinSquareSet out;
    out.k = k;
    for (int t = 2; t < ca.r(); ++t) {
        std::vector<std::vector<int>> sq(k, std::vector<int>(k));
        for (int c = 0; c < ca.n(); ++c) sq[ca.at(0, c)][ca.at(1, c)] = ca.at(t, c);
        out.squares.push_back(std::move(sq));
    }
    return out;
}

std::string check_mols(const LatinSquareSet& s) {
    const int k = s.k;
    for (std::size_t t = 0; t < s.squares.size(); ++t) {
        const auto& sq = s.squares[t];
        for (int i = 0; i < k; ++i) {
            std::vector<char> row(k), col(k);
            for (int j = 0; j < k; ++j) {
                if (row[sq[i][j]]++ || col[sq[j][i]]++) return "square " + std::to_string(t) + " is not Latin";
            }
        }
        for (std::size_t u = t + 1; u < s.squares.size(); ++u) {
            std::vector<char> pairs(static_cast<std::size_t>(k) * k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j)
                    if (pairs[static_cast<std::size_t>(sq[i][j]) * k + s.squares[u][i][j]]++)
                        return "squares " + std::to_string(t) + " and " + std::to_string(u) + " are not orthogonal";
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

struct LineReader {
    std::istream& is;
    int line = 0;

    // Next non-blank, non-comment line.
    bool next(std::string& out) {
        while (std::getline(is, out)) {
            ++line;
            auto pos = out.find_first_not_of(" \t\r");
            if (pos == std::string::npos || out[pos] == '#') continue;
            return true;
        }
        return false;
    }

    std::vector<long> ints(const std::string& s) {
        std::istringstream ss(s);
        std::vector<long> v;
        std::string tok;
        while (ss >> tok) {
            std::size_t p = 0;
            long x = 0;
            try {
                x = std::stol(tok, &p);
            } catch (const std::exception&) {
                p = 0;
            }
            if (p != tok.size()) throw ParseError(line, "expected an integer, got '" + tok + "'");
            v.push_back(x);
        }
        return v;
    }

    std::vector<long> header(const std::string& tag, std::size_t count) {
        std::string s;
        if (!next(s)) throw ParseError(line, "missing '" + tag + "' header");
        std::istringstream ss(s);
        std::string t;
        ss >> t;
        if (t != tag) throw ParseError(line, "expected '" + tag + "' header");
        std::string rest;
        std::getline(ss, rest);
        auto v = ints(rest);
        if (v.size() != count) throw ParseError(line, "header needs " + std::to_string(count) + " integers");
        return v;
    }

    void expect_end() {
        std::string s;
        if (next(s)) throw ParseError(line, "unexpected trailing content");
    }
};

}  // namespace

void write_ca(std::ostream& os, const CoveringArray& ca) {
    os << "ca " << ca.n() << ' ' << ca.r() << ' ' << ca.k() << '\n';
    for (int i = 0; i < ca.r(); ++i) {
        for (int c = 0; c < ca.n(); ++c) os << (c ? " " : "") << ca.at(i, c);
        os << '\n';
    }
}

CoveringArray read_ca(std::istream& is) {
    LineReader lr{is};
    auto h = lr.header("ca", 3);
    const long n = h[0], r = h[1], k = h[2];
    if (n < 1 || r < 1 || k < 1 || k > 255) throw ParseError(lr.line, "covering array dimensions out of range");
    CoveringArray ca(static_cast<int>(r), static_cast<int>(n), static_cast<int>(k));
    for (int i = 0; i < r; ++i) {
        std::string s;
        if (!lr.next(s)) throw ParseError(lr.line, "expected " + std::to_string(r) + " rows");
        auto v = lr.ints(s);
        if (static_cast<long>(v.size()) != n)
            throw ParseError(lr.line, "row has " + std::to_string(v.size()) + " entries, expected " + std::to_string(n));
        for (int c = 0; c < n; ++c) {
            if (v[c] < 0 || v[c] >= k) throw ParseError(lr.line, "symbol out of range");
            ca.set(i, c, static_cast<int>(v[c]));
        }
    }
    lr.expect_end();
    return ca;
}

void write_starter(std::ostream& os, const StarterVector& s) {
    os << "sv " << s.k << ' ' << s.r() << '\n';
    for (int j = 0; j < s.r(); ++j) os << (j ? " " : "") << s.v[j];
    os << '\n';
}

StarterVector read_starter(std::istream& is) {
    LineReader lr{is};
    auto h = lr.header("sv", 2);
    std::string s;
    if (!lr.next(s)) throw ParseError(lr.line, "missing starter entries");
    auto v = lr.ints(s);
    if (static_cast<long>(v.size()) != h[1]) throw ParseError(lr.line, "starter length does not match header");
    StarterVector sv{static_cast<int>(h[0]), std::vector<int>(v.begin(), v.end())};
    try {
        validate_starter_shape(sv);
    } catch (const ParameterError& e) {
        throw ParseError(lr.line, e.what());
    }
    lr.expect_end();
    return sv;
}

}  // namespace qica
