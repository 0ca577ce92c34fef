#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <regex>
#include <sstream>

#include <Eigen/Dense>

#include "json.hpp"
#include "qica/errors.hpp"
#include "qica/spectra.hpp"

namespace qica {

namespace {

using u64 = std::uint64_t;
using QPoly = std::vector<mpq_class>;  // ascending

// ---------------------------------------------------------------------------
// Modular characteristic polynomial

u64 mulmod(u64 a, u64 b, u64 p) { return a * b % p; }

u64 powmod(u64 a, u64 e, u64 p) {
    u64 r = 1;
    for (a %= p; e; e >>= 1, a = mulmod(a, a, p))
        if (e & 1) r = mulmod(r, a, p);
    return r;
}

bool is_prime(u64 v) {
    if (v < 2) return false;
    for (u64 d = 2; d * d <= v; ++d)
        if (v % d == 0) return false;
    return true;
}

/// Coefficients of det(xI - M) mod p, ascending, via Hessenberg reduction.
std::vector<u64> char_poly_mod(const Matrix& m, u64 p) {
    const int n = static_cast<int>(m.size());
    std::vector<std::vector<u64>> h(n, std::vector<u64>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const long long v = m[i][j] % static_cast<long long>(p);
            h[i][j] = static_cast<u64>(v < 0 ? v + static_cast<long long>(p) : v);
        }
    for (int j = 0; j + 2 < n; ++j) {
        int piv = -1;
        for (int i = j + 1; i < n && piv < 0; ++i)
            if (h[i][j]) piv = i;
        if (piv < 0) continue;
        if (piv != j + 1) {
            std::swap(h[piv], h[j + 1]);
            for (int r = 0; r < n; ++r) std::swap(h[r][piv], h[r][j + 1]);
        }
        const u64 inv = powmod(h[j + 1][j], p - 2, p);
        for (int r = j + 2; r < n; ++r) {
            if (!h[r][j]) continue;
            const u64 u = mulmod(h[r][j], inv, p);
            for (int c = 0; c < n; ++c) h[r][c] = (h[r][c] + p - mulmod(u, h[j + 1][c], p)) % p;
            for (int c = 0; c < n; ++c) h[c][j + 1] = (h[c][j + 1] + mulmod(u, h[c][r], p)) % p;
        }
    }
    std::vector<std::vector<u64>> polys(n + 1);
    polys[0] = {1};
    for (int k = 1; k <= n; ++k) {
        std::vector<u64> q(k + 1, 0);
        const auto& prev = polys[k - 1];
        const u64 d = h[k - 1][k - 1];
        for (int i = 0; i < k; ++i) {
            q[i + 1] = (q[i + 1] + prev[i]) % p;
            q[i] = (q[i] + p - mulmod(d, prev[i], p)) % p;
        }
        u64 t = 1;
        for (int i = k - 1; i >= 1; --i) {
            t = mulmod(t, h[i][i - 1], p);
            if (!t) break;
            const u64 f = mulmod(h[i - 1][k - 1], t, p);
            const auto& pi = polys[i - 1];
            for (std::size_t c = 0; c < pi.size(); ++c) q[c] = (q[c] + p - mulmod(f, pi[c], p)) % p;
        }
        polys[k] = std::move(q);
    }
    return polys[n];
}

// ---------------------------------------------------------------------------
// Rational polynomials

void trim(QPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

QPoly to_q(const Polynomial& p) {
    QPoly q(p.c.begin(), p.c.end());
    trim(q);
    return q;
}

std::pair<QPoly, QPoly> divmod(QPoly a, QPoly b) {
    trim(a);
    trim(b);
    if (b.empty()) throw ArithmeticError("polynomial division by zero");
    if (a.size() < b.size()) return {{}, a};
    QPoly q(a.size() - b.size() + 1);
    for (std::size_t s = q.size(); s-- > 0;) {
        const mpq_class f = a[s + b.size() - 1] / b.back();
        q[s] = f;
        if (f != 0)
            for (std::size_t j = 0; j < b.size(); ++j) a[s + j] -= f * b[j];
    }
    trim(a);
    trim(q);
    return {q, a};
}

QPoly monic(QPoly a) {
    trim(a);
    if (a.empty()) return a;
    const mpq_class lead = a.back();
    for (auto& c : a) c /= lead;
    return a;
}

QPoly gcd(QPoly a, QPoly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        auto r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return monic(a);
}

QPoly derivative(const QPoly& a) {
    QPoly d;
    for (std::size_t i = 1; i < a.size(); ++i) d.push_back(a[i] * static_cast<long>(i));
    trim(d);
    return d;
}

mpq_class eval(const QPoly& a, const mpq_class& x) {
    mpq_class r = 0;
    for (std::size_t i = a.size(); i-- > 0;) r = r * x + a[i];
    return r;
}

long double eval_ld(const QPoly& a, long double x) {
    long double r = 0;
    for (std::size_t i = a.size(); i-- > 0;) r = r * x + a[i].get_d();
    return r;
}

/// a + b*sqrt(d)
struct QS {
    mpq_class a, b;
};

QS mul(const QS& x, const QS& y, const mpz_class& d) {
    return {x.a * y.a + x.b * y.b * mpq_class(d), x.a * y.b + x.b * y.a};
}

QS div(const QS& x, const QS& y, const mpz_class& d) {
    const mpq_class norm = y.a * y.a - y.b * y.b * mpq_class(d);
    if (norm == 0) throw ArithmeticError("division by zero in a quadratic field");
    const QS num = mul(x, {y.a, -y.b}, d);
    return {num.a / norm, num.b / norm};
}

QS eval(const QPoly& p, const QS& x, const mpz_class& d) {
    QS r{0, 0};
    for (std::size_t i = p.size(); i-- > 0;) {
        r = mul(r, x, d);
        r.a += p[i];
    }
    return r;
}

/// Splits v > 0 as f^2 * r with r free of small square factors.
std::pair<mpz_class, mpz_class> square_part(mpz_class v) {
    mpz_class f = 1;
    for (unsigned long p = 2; p <= 1'000'000 && p * p <= v; ++p) {
        const mpz_class pp = p * p;
        while (mpz_divisible_p(v.get_mpz_t(), pp.get_mpz_t())) {
            v /= pp;
            f *= p;
        }
    }
    if (mpz_perfect_square_p(v.get_mpz_t())) {
        mpz_class s;
        mpz_sqrt(s.get_mpz_t(), v.get_mpz_t());
        f *= s;
        v = 1;
    }
    return {f, v};
}

double approx_of(const Eigenvalue& e) {
    if (e.kind == Eigenvalue::Kind::Numeric) return e.approx;
    return e.a.get_d() + e.b.get_d() * std::sqrt(e.radicand.get_d());
}

std::vector<double> approximate_eigenvalues(const Matrix& b, const std::vector<long>& sizes) {
    const int m = static_cast<int>(b.size());
    bool symmetric = true;
    for (int c = 0; c < m && symmetric; ++c)
        for (int d = 0; d < m && symmetric; ++d)
            symmetric = static_cast<long double>(sizes[c]) * b[c][d] == static_cast<long double>(sizes[d]) * b[d][c];
    std::vector<double> out;
    if (symmetric) {
        Eigen::MatrixXd s(m, m);
        for (int c = 0; c < m; ++c)
            for (int d = 0; d < m; ++d)
                s(c, d) = static_cast<double>(b[c][d]) * std::sqrt(static_cast<double>(sizes[c]) / static_cast<double>(sizes[d]));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
        for (int i = 0; i < m; ++i) out.push_back(es.eigenvalues()[i]);
    } else {
        Eigen::MatrixXd s(m, m);
        for (int c = 0; c < m; ++c)
            for (int d = 0; d < m; ++d) s(c, d) = static_cast<double>(b[c][d]);
        Eigen::EigenSolver<Eigen::MatrixXd> es(s, false);
        for (int i = 0; i < m; ++i) out.push_back(es.eigenvalues()[i].real());
    }
    return out;
}

void validate_quotient(const Matrix& b, const std::vector<long>& sizes) {
    const std::size_t m = b.size();
    if (m == 0 || sizes.size() != m) throw ParameterError("quotient and class sizes disagree");
    for (const auto& r : b)
        if (r.size() != m) throw ParameterError("quotient matrix is not square");
    if (sizes[0] != 1) throw ParameterError("class 0 of the quotient must be a single vertex");
    for (long s : sizes)
        if (s < 1) throw ParameterError("class sizes must be positive");
}

/// Distinct eigenvalues seen from vertex 0 with multiplicities, without the
/// degree identity check (weighted relation sums use this too).
Spectrum spectrum_core(const Matrix& b, const std::vector<long>& sizes) {
    validate_quotient(b, sizes);
    const int m = static_cast<int>(b.size());
    const long v = std::accumulate(sizes.begin(), sizes.end(), 0L);

    Matrix minor(m - 1, std::vector<long long>(m - 1));
    for (int i = 1; i < m; ++i)
        for (int j = 1; j < m; ++j) minor[i - 1][j - 1] = b[i][j];
    const QPoly phi = to_q(char_poly(b));
    const QPoly num = m > 1 ? to_q(char_poly(minor)) : QPoly{1};
    const QPoly g = gcd(phi, num);
    QPoly den = divmod(phi, g).first;
    const QPoly nr = divmod(num, g).first;
    if (gcd(den, derivative(den)).size() > 1) throw StructureError("resolvent has a repeated pole");
    const QPoly dden = derivative(den);

    Spectrum s;
    s.vertices = v;
    for (long long x : b[0]) s.degree += static_cast<long>(x);

    auto mult_of = [&](const QS& lam, const mpz_class& d) {
        const QS r = div(eval(nr, lam, d), eval(dden, lam, d), d);
        const mpq_class mq = r.a * v;
        if (r.b != 0 || mq.get_den() != 1 || mq <= 0) throw StructureError("multiplicity is not a positive integer");
        return mq.get_num().get_si();
    };

    std::vector<double> approx = approximate_eigenvalues(b, sizes);
    std::vector<char> used(approx.size(), 0);
    QPoly rest = den;
    for (std::size_t i = 0; i < approx.size() && rest.size() > 1; ++i) {
        const mpz_class r(static_cast<long>(std::llround(approx[i])));
        if (eval(rest, mpq_class(r)) != 0) continue;
        rest = divmod(rest, QPoly{mpq_class(-r), 1}).first;
        Eigenvalue e = Eigenvalue::integer(r);
        s.entries.push_back({e, mult_of({mpq_class(r), 0}, 1)});
        used[i] = 1;
    }
    for (std::size_t i = 0; i < approx.size() && rest.size() > 2; ++i) {
        if (used[i]) continue;
        for (std::size_t j = i + 1; j < approx.size(); ++j) {
            if (used[j]) continue;
            const mpz_class sum(static_cast<long>(std::llround(approx[i] + approx[j])));
            const double pd = approx[i] * approx[j];
            if (std::abs(pd) > 9e15) continue;
            const mpz_class prod(static_cast<long>(std::llround(pd)));
            const mpz_class disc = sum * sum - 4 * prod;
            if (disc <= 0 || mpz_perfect_square_p(disc.get_mpz_t())) continue;
            const QPoly quad{mpq_class(prod), mpq_class(-sum), 1};
            auto [q, r] = divmod(rest, quad);
            if (!r.empty()) continue;
            rest = q;
            used[i] = used[j] = 1;
            const auto [f, rad] = square_part(disc);
            for (int sign : {1, -1}) {
                Eigenvalue e;
                e.kind = Eigenvalue::Kind::Surd;
                e.a = mpq_class(sum, 2);
                e.b = mpq_class(sign * f, 2);
                e.a.canonicalize();
                e.b.canonicalize();
                e.radicand = rad;
                e.approx = approx_of(e);
                s.entries.push_back({e, mult_of({e.a, e.b}, rad)});
            }
            break;
        }
    }
    if (rest.size() > 1) {
        const int deg = static_cast<int>(rest.size()) - 1;
        const QPoly mr = monic(rest);
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
        for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1;
        for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -mr[i].get_d();
        Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
        const QPoly dr = derivative(mr);
        for (int i = 0; i < deg; ++i) {
            long double x = es.eigenvalues()[i].real();
            for (int it = 0; it < 8; ++it) {
                const long double dv = eval_ld(dr, x);
                if (dv == 0) break;
                x -= eval_ld(mr, x) / dv;
            }
            Eigenvalue e;
            e.kind = Eigenvalue::Kind::Numeric;
            e.approx = static_cast<double>(x);
            const long double dv = eval_ld(dr, x);
            e.error = dv == 0 ? INFINITY : static_cast<double>(deg * std::fabs(eval_ld(mr, x) / dv));
            const long double mult = v * eval_ld(nr, x) / eval_ld(dden, x);
            const long rounded = std::lround(static_cast<double>(mult));
            if (rounded <= 0 || std::fabs(static_cast<double>(mult) - rounded) > 1e-3)
                throw StructureError("numeric multiplicity is not a positive integer");
            s.entries.push_back({e, rounded});
        }
    }
    std::sort(s.entries.begin(), s.entries.end(),
              [](const SpectrumEntry& x, const SpectrumEntry& y) { return approx_of(x.value) > approx_of(y.value); });
    return s;
}

std::string format_q(const mpq_class& q) { return q.get_str(); }

}  // namespace

// ---------------------------------------------------------------------------
// Polynomials

std::string Polynomial::to_string() const {
    std::string s;
    for (int i = degree(); i >= 0; --i) {
        const mpz_class& coef = c[i];
        if (coef == 0) continue;
        const bool neg = coef < 0;
        const mpz_class mag = neg ? mpz_class(-coef) : coef;
        if (s.empty())
            s += neg ? "-" : "";
        else
            s += neg ? " - " : " + ";
        const bool unit = mag == 1 && i > 0;
        if (!unit) s += mag.get_str();
        if (i > 0) s += (unit ? "" : "*") + std::string("x") + (i > 1 ? "^" + std::to_string(i) : "");
    }
    return s.empty() ? "0" : s;
}

Polynomial char_poly(const Matrix& m) {
    const int n = static_cast<int>(m.size());
    for (const auto& r : m)
        if (static_cast<int>(r.size()) != n) throw ParameterError("matrix is not square");
    if (n == 0) return {{1}};
    // Every coefficient is bounded by (1 + ||M||_F / sqrt(n))^n.
    long double frob2 = 0;
    for (const auto& r : m)
        for (long long x : r) frob2 += static_cast<long double>(x) * x;
    const double bits = n * std::log2(1.0 + std::sqrt(static_cast<double>(frob2 / n))) + 2;
    const int primes_needed = static_cast<int>(std::ceil(bits / 30.0)) + 1;

    std::vector<mpz_class> acc(n + 1, 0);
    mpz_class modulus = 1;
    u64 p = (u64{1} << 31) - 1;
    for (int used = 0; used < primes_needed; --p) {
        if (!is_prime(p)) continue;
        const auto r = char_poly_mod(m, p);
        const mpz_class mp(static_cast<unsigned long>(p));
        mpz_class mm;
        mpz_mod(mm.get_mpz_t(), modulus.get_mpz_t(), mp.get_mpz_t());
        const u64 inv = powmod(mm.get_ui(), p - 2, p);
        for (int i = 0; i <= n; ++i) {
            mpz_class cur;
            mpz_mod(cur.get_mpz_t(), acc[i].get_mpz_t(), mp.get_mpz_t());
            const u64 diff = (r[i] + p - cur.get_ui()) % p;
            acc[i] += modulus * static_cast<unsigned long>(mulmod(diff, inv, p));
        }
        modulus *= mp;
        ++used;
    }
    const mpz_class half = modulus / 2;
    Polynomial out;
    out.c = acc;
    for (auto& c : out.c)
        if (c > half) c -= modulus;
    return out;
}

Polynomial adjacency_char_poly(const Graph& g) {
    const int n = g.size();
    Matrix m(n, std::vector<long long>(n, 0));
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) m[u][v] = g.adjacent(u, v) ? 1 : 0;
    return char_poly(m);
}

bool poly_divides(const Polynomial& d, const Polynomial& p) {
    QPoly dq = to_q(d), pq = to_q(p);
    if (dq.empty()) return pq.empty();
    return divmod(pq, dq).second.empty();
}

// ---------------------------------------------------------------------------
// Eigenvalues

Eigenvalue Eigenvalue::integer(const mpz_class& v) {
    Eigenvalue e;
    e.a = v;
    e.b = 0;
    e.radicand = 1;
    e.approx = v.get_d();
    return e;
}

std::string Eigenvalue::to_string() const {
    if (kind == Kind::Numeric) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.15g", approx);
        return buf;
    }
    if (kind == Kind::Integer || b == 0) return format_q(a);
    std::string s = a == 0 ? "" : format_q(a);
    const mpq_class mag = b < 0 ? mpq_class(-b) : b;
    if (b < 0)
        s += "-";
    else if (!s.empty())
        s += "+";
    if (mag != 1) s += format_q(mag) + "*";
    return s + "sqrt(" + radicand.get_str() + ")";
}

Eigenvalue Eigenvalue::parse(const std::string& text, bool numeric) {
    if (numeric) {
        Eigenvalue e;
        e.kind = Kind::Numeric;
        std::size_t pos = 0;
        try {
            e.approx = std::stod(text, &pos);
        } catch (const std::exception&) {
            throw ParameterError("bad numeric eigenvalue '" + text + "'");
        }
        if (pos != text.size()) throw ParameterError("bad numeric eigenvalue '" + text + "'");
        return e;
    }
    static const std::regex rational(R"(^-?\d+(/\d+)?$)");
    static const std::regex surd(R"(^(-?\d+(?:/\d+)?)?([+-])?(?:(\d+(?:/\d+)?)\*)?sqrt\((\d+)\)$)");
    std::smatch mt;
    if (std::regex_match(text, rational)) {
        const mpq_class q(text);
        Eigenvalue e = Eigenvalue::integer(0);
        e.a = q;
        e.a.canonicalize();
        e.kind = e.a.get_den() == 1 ? Kind::Integer : Kind::Surd;
        e.approx = e.a.get_d();
        return e;
    }
    if (std::regex_match(text, mt, surd)) {
        if (mt[1].matched && !mt[2].matched) throw ParameterError("bad eigenvalue '" + text + "'");
        Eigenvalue e;
        e.kind = Kind::Surd;
        e.a = mt[1].matched ? mpq_class(mt[1].str()) : mpq_class(0);
        e.b = mt[3].matched ? mpq_class(mt[3].str()) : mpq_class(1);
        e.a.canonicalize();
        e.b.canonicalize();
        if (mt[2].matched && mt[2].str() == "-") e.b = -e.b;
        e.radicand = mpz_class(mt[4].str());
        if (e.radicand < 2) throw ParameterError("bad radicand in '" + text + "'");
        e.approx = approx_of(e);
        return e;
    }
    throw ParameterError("bad eigenvalue '" + text + "'");
}

bool operator==(const Eigenvalue& x, const Eigenvalue& y) {
    if (x.exact() != y.exact()) return false;
    if (!x.exact()) {
        const double tol = std::max({x.error, y.error, 1e-9 * std::max(1.0, std::abs(x.approx))});
        return std::abs(x.approx - y.approx) <= tol;
    }
    const bool xr = x.b == 0, yr = y.b == 0;
    if (xr || yr) return xr && yr && x.a == y.a;
    return x.a == y.a && x.b == y.b && x.radicand == y.radicand;
}

bool Spectrum::exact() const {
    return std::all_of(entries.begin(), entries.end(), [](const SpectrumEntry& e) { return e.value.exact(); });
}

std::optional<long> Spectrum::multiplicity_of(long integer_eigenvalue) const {
    for (const auto& e : entries)
        if (e.value.exact() && e.value.b == 0 && e.value.a == integer_eigenvalue) return e.multiplicity;
    return std::nullopt;
}

std::string check_spectrum(const Spectrum& s) {
    long total = 0;
    for (const auto& e : s.entries) total += e.multiplicity;
    if (total != s.vertices)
        return "multiplicities sum to " + std::to_string(total) + ", not " + std::to_string(s.vertices);
    if (s.exact()) {
        mpq_class t1 = 0, t2 = 0;
        std::map<mpz_class, mpq_class> s1, s2;
        for (const auto& e : s.entries) {
            const auto& v = e.value;
            t1 += v.a * e.multiplicity;
            t2 += (v.a * v.a + v.b * v.b * mpq_class(v.radicand)) * e.multiplicity;
            if (v.b != 0) {
                s1[v.radicand] += v.b * e.multiplicity;
                s2[v.radicand] += 2 * v.a * v.b * e.multiplicity;
            }
        }
        bool surd_zero = true;
        for (const auto& [r, c] : s1) surd_zero = surd_zero && c == 0;
        for (const auto& [r, c] : s2) surd_zero = surd_zero && c == 0;
        if (t1 != 0 || !surd_zero) return "eigenvalues do not sum to zero";
        if (t2 != mpq_class(s.vertices) * s.degree) return "squared eigenvalues do not sum to |V| * degree";
        return {};
    }
    long double t1 = 0, t2 = 0, scale = 0;
    for (const auto& e : s.entries) {
        const long double v = approx_of(e.value);
        t1 += v * e.multiplicity;
        t2 += v * v * e.multiplicity;
        scale += std::fabs(v) * e.multiplicity;
    }
    const long double target = static_cast<long double>(s.vertices) * s.degree;
    if (std::fabs(t1) > 1e-6 * std::max<long double>(1, scale)) return "eigenvalues do not sum to zero";
    if (std::fabs(t2 - target) > 1e-6 * std::max<long double>(1, target)) return "squared eigenvalues do not sum to |V| * degree";
    return {};
}

Spectrum spectrum_from_quotient(const Matrix& b, const std::vector<long>& class_sizes) {
    Spectrum s = spectrum_core(b, class_sizes);
    if (const auto err = check_spectrum(s); !err.empty()) throw StructureError("spectrum check failed: " + err);
    return s;
}

Spectrum spectrum(int n, int k, const QuotientRelation& rel, int jobs) {
    const MeetClassPartition mcp = equitable_partition(n, k);
    return spectrum_from_quotient(quotient_matrix(mcp, rel, jobs), mcp.class_sizes());
}

Matrix kneser_quotient(int n, int r, std::vector<long>* class_sizes) {
    if (r < 1 || r > n || n > 62) throw ParameterError("Kneser graph needs 1 <= r <= n <= 62");
    auto bin = [](long a, long b) { return a < 0 || b < 0 || b > a ? 0L : binomial(a, b).get_si(); };
    std::vector<int> inter;
    std::vector<long> sizes;
    for (int i = r; i >= 0; --i)
        if (const long sz = bin(r, i) * bin(n - r, r - i); sz > 0) {
            inter.push_back(i);
            sizes.push_back(sz);
        }
    const int m = static_cast<int>(inter.size());
    Matrix b(m, std::vector<long long>(m));
    for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) b[c][d] = bin(r - inter[c], inter[d]) * bin(n - 2 * r + inter[c], r - inter[d]);
    if (class_sizes) *class_sizes = sizes;
    return b;
}

Spectrum kneser_spectrum(int n, int r) {
    std::vector<long> sizes;
    const Matrix b = kneser_quotient(n, r, &sizes);
    return spectrum_from_quotient(b, sizes);
}

// ---------------------------------------------------------------------------
// Eigenmatrices

namespace {

Matrix multiply(const Matrix& x, const Matrix& y) {
    const std::size_t m = x.size();
    Matrix z(m, std::vector<long long>(m, 0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < m; ++k)
            if (x[i][k])
                for (std::size_t j = 0; j < m; ++j) z[i][j] += x[i][k] * y[k][j];
    return z;
}

/// One nonzero vector spanning the kernel of (m - mu I), or empty if the kernel is not a line.
std::vector<mpq_class> kernel_line(const Matrix& mat, const mpz_class& mu) {
    const int m = static_cast<int>(mat.size());
    std::vector<std::vector<mpq_class>> a(m, std::vector<mpq_class>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a[i][j] = mpq_class(mpz_class(static_cast<long>(mat[i][j])) - (i == j ? mu : 0));
    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < m && row < m; ++col) {
        int piv = -1;
        for (int i = row; i < m && piv < 0; ++i)
            if (a[i][col] != 0) piv = i;
        if (piv < 0) continue;
        std::swap(a[piv], a[row]);
        const mpq_class inv = 1 / a[row][col];
        for (auto& x : a[row]) x *= inv;
        for (int i = 0; i < m; ++i)
            if (i != row && a[i][col] != 0) {
                const mpq_class f = a[i][col];
                for (int j = col; j < m; ++j) a[i][j] -= f * a[row][j];
            }
        pivot_col.push_back(col);
        ++row;
    }
    if (row != m - 1) return {};
    int free_col = 0;
    for (int c : pivot_col) {
        if (c != free_col) break;
        ++free_col;
    }
    std::vector<mpq_class> y(m, 0);
    y[free_col] = 1;
    for (int r = 0; r < row; ++r) y[pivot_col[r]] = -a[r][free_col];
    return y;
}

}  // namespace

EigenMatrix eigenmatrix_from_quotients(const std::vector<Matrix>& b, const std::vector<long>& class_sizes) {
    const int m = static_cast<int>(b.size());
    if (m < 1) throw ParameterError("no relations supplied");
    for (const auto& x : b) validate_quotient(x, class_sizes);
    if (static_cast<int>(class_sizes.size()) != m) throw ParameterError("one relation per class is required");

    EigenMatrix out;
    for (int e = 1; e < m; ++e) out.column_names.push_back("R" + std::to_string(e));
    for (int e = 1; e < m && out.commuting; ++e)
        for (int f = e + 1; f < m && out.commuting; ++f)
            if (multiply(b[e], b[f]) != multiply(b[f], b[e])) {
                out.commuting = false;
                out.exact = false;
                out.note = "quotients of relations " + std::to_string(e) + " and " + std::to_string(f) + " do not commute";
            }
    if (!out.commuting) return out;

    std::mt19937_64 rng(12345);
    const std::vector<long long> primes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
    Matrix weighted;
    Spectrum spec;
    bool separated = false;
    for (int attempt = 0; attempt < 10 && !separated; ++attempt) {
        std::vector<long long> w(m, 0);
        for (int e = 1; e < m; ++e)
            w[e] = attempt == 0 && e - 1 < static_cast<int>(primes.size())
                       ? primes[e - 1]
                       : std::uniform_int_distribution<long long>(1, 1000)(rng);
        weighted.assign(m, std::vector<long long>(m, 0));
        for (int e = 1; e < m; ++e)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d) weighted[c][d] += w[e] * b[e][c][d];
        try {
            spec = spectrum_core(weighted, class_sizes);
        } catch (const StructureError&) {
            continue;
        }
        separated = static_cast<int>(spec.entries.size()) == m;
    }
    if (!separated) throw StructureError("no weighting separates the common eigenspaces");

    std::optional<Eigen::EigenSolver<Eigen::MatrixXd>> numeric;
    for (const auto& entry : spec.entries) {
        out.multiplicities.push_back(entry.multiplicity);
        std::vector<Eigenvalue> row;
        const auto& mu = entry.value;
        std::vector<mpq_class> y;
        if (mu.exact() && mu.b == 0) y = kernel_line(weighted, mu.a.get_num());
        if (!y.empty()) {
            int i0 = 0;
            while (y[i0] == 0) ++i0;
            for (int e = 1; e < m; ++e) {
                std::vector<mpq_class> by(m, 0);
                for (int c = 0; c < m; ++c)
                    for (int d = 0; d < m; ++d) by[c] += mpq_class(static_cast<long>(b[e][c][d])) * y[d];
                const mpq_class theta = by[i0] / y[i0];
                for (int c = 0; c < m; ++c)
                    if (by[c] != theta * y[c]) throw StructureError("common eigenvector check failed");
                if (theta.get_den() != 1) throw StructureError("non-integral eigenvalue on an integral eigenvector");
                row.push_back(Eigenvalue::integer(theta.get_num()));
            }
        } else {
            if (!numeric) {
                Eigen::MatrixXd mat(m, m);
                for (int c = 0; c < m; ++c)
                    for (int d = 0; d < m; ++d) mat(c, d) = static_cast<double>(weighted[c][d]);
                numeric.emplace(mat, true);
            }
            int best = 0;
            for (int i = 1; i < m; ++i)
                if (std::abs(numeric->eigenvalues()[i].real() - mu.approx) <
                    std::abs(numeric->eigenvalues()[best].real() - mu.approx))
                    best = i;
            const Eigen::VectorXd vec = numeric->eigenvectors().col(best).real();
            Eigen::Index i0;
            vec.cwiseAbs().maxCoeff(&i0);
            for (int e = 1; e < m; ++e) {
                double acc = 0;
                for (int d = 0; d < m; ++d) acc += static_cast<double>(b[e][i0][d]) * vec[d];
                Eigenvalue th;
                th.kind = Eigenvalue::Kind::Numeric;
                th.approx = acc / vec[i0];
                th.error = 1e-6 * std::max(1.0, std::abs(th.approx));
                row.push_back(th);
            }
            out.exact = false;
        }
        out.values.push_back(std::move(row));
    }
    if (!out.exact) out.note = "some eigenvalues are numeric";
    return out;
}

EigenMatrix modified_eigenmatrix(int n, int k, int jobs) {
    const MeetClassPartition mcp = equitable_partition(n, k);
    EigenMatrix em = eigenmatrix_from_quotients(meet_quotients(mcp, jobs), mcp.class_sizes());
    em.column_names.clear();
    for (std::size_t c = 1; c < mcp.classes.size(); ++c) {
        em.columns.push_back(mcp.classes[c].table);
        em.column_names.push_back(mcp.classes[c].table.hash());
    }
    return em;
}

RatioBounds ratio_bounds(const mpz_class& v, const mpz_class& d, const mpq_class& tau) {
    if (!(tau < 0) || !(d > 0) || !(v > 0)) throw ParameterError("ratio bound needs v > 0, d > 0 and tau < 0");
    RatioBounds r;
    r.omega = 1 - mpq_class(d) / tau;
    r.omega.canonicalize();
    r.alpha = mpq_class(v) / r.omega;
    r.alpha.canonicalize();
    return r;
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, '\t')) out.push_back(f);
    if (!line.empty() && line.back() == '\t') out.emplace_back();
    return out;
}

long parse_long(const std::string& s, int line) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(s, &pos);
    } catch (const std::exception&) {
        throw ParseError(line, "expected an integer, got '" + s + "'");
    }
    if (pos != s.size()) throw ParseError(line, "expected an integer, got '" + s + "'");
    return v;
}

nlohmann::json eigenvalue_json(const Eigenvalue& e) {
    nlohmann::json j{{"value", e.to_string()}, {"approx", approx_of(e)}, {"exact", e.exact()}};
    if (!e.exact()) j["error"] = e.error;
    return j;
}

}  // namespace

void write_spectrum_tsv(std::ostream& os, const Spectrum& s) {
    os << "# vertices " << s.vertices << " degree " << s.degree << "\n";
    os << "eigenvalue\tmultiplicity\tkind\n";
    for (const auto& e : s.entries)
        os << e.value.to_string() << '\t' << e.multiplicity << '\t' << (e.value.exact() ? "exact" : "numeric") << '\n';
}

Spectrum read_spectrum_tsv(std::istream& is) {
    Spectrum s;
    std::string line;
    int no = 0;
    bool header = false, meta = false;
    while (std::getline(is, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            long v = 0, d = 0;
            if (std::sscanf(line.c_str(), "# vertices %ld degree %ld", &v, &d) == 2) {
                s.vertices = v;
                s.degree = d;
                meta = true;
            }
            continue;
        }
        const auto f = split_tabs(line);
        if (!header) {
            if (f.size() != 3 || f[0] != "eigenvalue") throw ParseError(no, "missing header row");
            header = true;
            continue;
        }
        if (f.size() != 3) throw ParseError(no, "expected 3 tab-separated fields");
        if (f[2] != "exact" && f[2] != "numeric") throw ParseError(no, "kind must be exact or numeric");
        SpectrumEntry e;
        try {
            e.value = Eigenvalue::parse(f[0], f[2] == "numeric");
        } catch (const ParameterError& err) {
            throw ParseError(no, err.what());
        }
        e.multiplicity = parse_long(f[1], no);
        if (e.multiplicity < 1) throw ParseError(no, "multiplicity must be positive");
        s.entries.push_back(e);
    }
    if (!meta) throw ParseError(no, "missing '# vertices V degree d' line");
    if (!header) throw ParseError(no, "missing header row");
    return s;
}

std::string spectrum_json(const Spectrum& s) {
    nlohmann::json j{{"vertices", s.vertices}, {"degree", s.degree}, {"exact", s.exact()}};
    j["eigenvalues"] = nlohmann::json::array();
    for (const auto& e : s.entries) {
        auto ej = eigenvalue_json(e.value);
        ej["multiplicity"] = e.multiplicity;
        j["eigenvalues"].push_back(ej);
    }
    return j.dump(2);
}

void write_eigenmatrix_tsv(std::ostream& os, const EigenMatrix& e) {
    if (!e.note.empty()) os << "# " << e.note << "\n";
    for (std::size_t c = 0; c < e.columns.size(); ++c)
        os << "# column " << e.column_names[c] << " " << e.columns[c].to_string() << "\n";
    os << "multiplicity";
    for (const auto& n : e.column_names) os << '\t' << n;
    os << '\n';
    for (std::size_t r = 0; r < e.values.size(); ++r) {
        os << e.multiplicities[r];
        for (const auto& v : e.values[r]) os << '\t' << (v.exact() ? "" : "~") << v.to_string();
        os << '\n';
    }
}

EigenMatrix read_eigenmatrix_tsv(std::istream& is) {
    EigenMatrix e;
    std::string line;
    int no = 0;
    bool header = false;
    while (std::getline(is, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto f = split_tabs(line);
        if (!header) {
            if (f.empty() || f[0] != "multiplicity") throw ParseError(no, "missing header row");
            e.column_names.assign(f.begin() + 1, f.end());
            header = true;
            continue;
        }
        if (f.size() != e.column_names.size() + 1) throw ParseError(no, "row width differs from the header");
        const long mult = parse_long(f[0], no);
        if (mult < 1) throw ParseError(no, "multiplicity must be positive");
        e.multiplicities.push_back(mult);
        std::vector<Eigenvalue> row;
        for (std::size_t c = 1; c < f.size(); ++c) {
            const bool numeric = !f[c].empty() && f[c][0] == '~';
            try {
                row.push_back(Eigenvalue::parse(numeric ? f[c].substr(1) : f[c], numeric));
            } catch (const ParameterError& err) {
                throw ParseError(no, err.what());
            }
            if (numeric) e.exact = false;
        }
        e.values.push_back(std::move(row));
    }
    if (!header) throw ParseError(no, "missing header row");
    return e;
}

std::string eigenmatrix_json(const EigenMatrix& e) {
    nlohmann::json j{{"commuting", e.commuting}, {"exact", e.exact}, {"note", e.note}};
    j["columns"] = nlohmann::json::array();
    for (std::size_t c = 0; c < e.column_names.size(); ++c) {
        nlohmann::json cj{{"name", e.column_names[c]}};
        if (c < e.columns.size()) {
            const auto& t = e.columns[c];
            nlohmann::json rows = nlohmann::json::array();
            for (int i = 0; i < t.k; ++i) {
                nlohmann::json r = nlohmann::json::array();
                for (int jj = 0; jj < t.k; ++jj) r.push_back(t.at(i, jj));
                rows.push_back(r);
            }
            cj["table"] = rows;
        }
        j["columns"].push_back(cj);
    }
    j["rows"] = nlohmann::json::array();
    for (std::size_t r = 0; r < e.values.size(); ++r) {
        nlohmann::json vals = nlohmann::json::array();
        for (const auto& v : e.values[r]) vals.push_back(eigenvalue_json(v));
        j["rows"].push_back({{"multiplicity", e.multiplicities[r]}, {"values", vals}});
    }
    return j.dump(2);
}

}  // namespace qica
