#include "qica/finite_field.hpp"

#include <map>

#include "qica/errors.hpp"

namespace qica {

namespace {

// Conway polynomials, ascending coefficients without the leading 1.
const std::map<int, std::vector<int>>& modulus_table() {
    static const std::map<int, std::vector<int>> table{
        {4, {1, 1}},
        {8, {1, 1, 0}},
        {16, {1, 1, 0, 0}},
        {32, {1, 0, 1, 0, 0}},
        {64, {1, 1, 0, 1, 1, 0}},
        {128, {1, 1, 0, 0, 0, 0, 0}},
        {9, {2, 2}},
        {27, {1, 2, 0}},
        {81, {2, 0, 0, 2}},
        {25, {2, 4}},
        {125, {3, 3, 0}},
        {49, {3, 6}},
        {121, {2, 7}},
    };
    return table;
}

std::vector<int> digits(int a, int p, int m) {
    std::vector<int> d(m);
    for (int i = 0; i < m; ++i, a /= p) d[i] = a % p;
    return d;
}

int from_digits(const std::vector<int>& d, int p) {
    int a = 0;
    for (int i = static_cast<int>(d.size()) - 1; i >= 0; --i) a = a * p + d[i];
    return a;
}

}  // namespace

std::optional<std::pair<int, int>> prime_power(int q) {
    if (q < 2) return std::nullopt;
    int p = 2;
    while (q % p) ++p;
    int m = 0;
    while (q % p == 0) {
        q /= p;
        ++m;
    }
    if (q != 1) return std::nullopt;
    return std::pair{p, m};
}

int Field::check(int a) const {
    if (a < 0 || a >= q_) throw ParameterError("field element out of range");
    return a;
}

int Field::inv(int a) const {
    if (check(a) == 0) throw ArithmeticError("zero has no multiplicative inverse");
    return inv_[a];
}

Field make_field(int q) {
    auto pp = prime_power(q);
    if (!pp || q > 128) throw ParameterError("field order " + std::to_string(q) + " is not a supported prime power");
    auto [p, m] = *pp;
    Field f;
    f.q_ = q;
    f.p_ = p;
    f.m_ = m;
    if (m > 1) {
        auto it = modulus_table().find(q);
        if (it == modulus_table().end()) throw ParameterError("no built-in modulus for order " + std::to_string(q));
        f.modulus_ = it->second;
        f.modulus_.push_back(1);
    }
    const std::size_t qq = static_cast<std::size_t>(q) * q;
    f.add_.resize(qq);
    f.mul_.resize(qq);
    f.neg_.resize(q);
    f.inv_.assign(q, 0);
    std::vector<std::vector<int>> d(q);
    for (int a = 0; a < q; ++a) d[a] = digits(a, p, m);
    for (int a = 0; a < q; ++a) {
        std::vector<int> n(m);
        for (int i = 0; i < m; ++i) n[i] = (p - d[a][i]) % p;
        f.neg_[a] = static_cast<std::uint8_t>(from_digits(n, p));
        for (int b = 0; b < q; ++b) {
            std::vector<int> s(m);
            for (int i = 0; i < m; ++i) s[i] = (d[a][i] + d[b][i]) % p;
            f.add_[static_cast<std::size_t>(a) * q + b] = static_cast<std::uint8_t>(from_digits(s, p));
            std::vector<int> prod(2 * m - 1, 0);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) prod[i + j] = (prod[i + j] + d[a][i] * d[b][j]) % p;
            for (int deg = 2 * m - 2; deg >= m; --deg) {
                int c = prod[deg];
                if (!c) continue;
                for (int i = 0; i <= m; ++i) prod[deg - m + i] = ((prod[deg - m + i] - c * f.modulus_[i]) % p + p) % p;
            }
            prod.resize(m);
            f.mul_[static_cast<std::size_t>(a) * q + b] = static_cast<std::uint8_t>(from_digits(prod, p));
        }
    }
    for (int a = 1; a < q; ++a)
        for (int b = 1; b < q; ++b)
            if (f.mul_[static_cast<std::size_t>(a) * q + b] == 1) f.inv_[a] = static_cast<std::uint8_t>(b);
    if (auto err = check_field_axioms(f); !err.empty())
        throw StructureError("GF(" + std::to_string(q) + ") tables fail: " + err);
    return f;
}

int field_op(const Field& f, FieldOp op, int a, int b) {
    switch (op) {
        case FieldOp::Add: return f.add(a, b);
        case FieldOp::Mul: return f.mul(a, b);
        case FieldOp::Neg: return f.neg(a);
        case FieldOp::Inv: return f.inv(a);
    }
    throw ParameterError("unknown field operation");
}

std::string check_field_axioms(const Field& f) {
    const int q = f.q();
    for (int a = 0; a < q; ++a) {
        if (f.add(a, 0) != a) return "additive identity";
        if (f.mul(a, 1) != a) return "multiplicative identity";
        if (f.add(a, f.neg(a)) != 0) return "additive inverse";
        if (a && f.mul(a, f.inv(a)) != 1) return "multiplicative inverse of " + std::to_string(a);
        for (int b = 0; b < q; ++b) {
            if (f.add(a, b) != f.add(b, a) || f.mul(a, b) != f.mul(b, a)) return "commutativity";
            const int ab = f.add(a, b);
            const int mab = f.mul(a, b);
            for (int c = 0; c < q; ++c) {
                if (f.add(ab, c) != f.add(a, f.add(b, c))) return "additive associativity";
                if (f.mul(mab, c) != f.mul(a, f.mul(b, c))) return "multiplicative associativity";
                if (f.mul(a, f.add(b, c)) != f.add(mab, f.mul(a, c))) return "left distributivity";
                if (f.mul(f.add(b, c), a) != f.add(f.mul(b, a), f.mul(c, a))) return "right distributivity";
            }
        }
    }
    return {};
}

}  // namespace qica
