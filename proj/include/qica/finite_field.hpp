#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qica {

/// GF(q) for prime powers q <= 128 with precomputed tables. Element a is the
/// polynomial whose coefficient of x^i is the i-th base-p digit of a, reduced
/// modulo a fixed built-in modulus; 0 and 1 are the identities.
class Field {
public:
    int q() const noexcept { return q_; }
    int p() const noexcept { return p_; }
    int degree() const noexcept { return m_; }
    /// Ascending coefficients of the monic modulus (empty for prime fields).
    const std::vector<int>& modulus() const noexcept { return modulus_; }

    int add(int a, int b) const { return add_[idx(a, b)]; }
    int mul(int a, int b) const { return mul_[idx(a, b)]; }
    int neg(int a) const { return neg_[check(a)]; }
    /// Throws ArithmeticError for a = 0.
    int inv(int a) const;

    friend Field make_field(int q);

private:
    std::size_t idx(int a, int b) const { return static_cast<std::size_t>(check(a)) * q_ + check(b); }
    int check(int a) const;

    int q_ = 0, p_ = 0, m_ = 0;
    std::vector<int> modulus_;
    std::vector<std::uint8_t> add_, mul_, neg_, inv_;
};

/// Throws ParameterError unless q is a supported prime power.
Field make_field(int q);

/// (p, m) with q = p^m, or nullopt when q is not a prime power.
std::optional<std::pair<int, int>> prime_power(int q);

enum class FieldOp { Add, Mul, Neg, Inv };
int field_op(const Field& f, FieldOp op, int a, int b = 0);

/// Empty when every field axiom holds on the tables.
std::string check_field_axioms(const Field& f);

}  // namespace qica
