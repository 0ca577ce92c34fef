#include "doctest.h"
#include "qica/errors.hpp"
#include "qica/finite_field.hpp"

using namespace qica;

TEST_CASE("prime fields") {
    auto f = make_field(5);
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) {
            CHECK(f.add(a, b) == (a + b) % 5);
            CHECK(f.mul(a, b) == (a * b) % 5);
        }
    auto f2 = make_field(2);
    CHECK(field_op(f2, FieldOp::Add, 1, 1) == 0);
    auto f3 = make_field(3);
    CHECK(field_op(f3, FieldOp::Inv, 2) == 2);
    CHECK_THROWS_AS(field_op(f3, FieldOp::Inv, 0), ArithmeticError);
}

TEST_CASE("GF(4) polynomial labels") {
    auto f = make_field(4);
    // x * (x + 1) = x^2 + x = 1 modulo x^2 + x + 1.
    CHECK(f.mul(2, 3) == 1);
    CHECK(f.mul(2, 2) == 3);
    CHECK(f.add(2, 3) == 1);
}

TEST_CASE("every supported order passes the axiom check") {
    for (int q : {2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 25, 27, 32, 49, 64, 81, 121, 125, 127, 128}) {
        INFO("q=" << q);
        Field f = make_field(q);
        CHECK(check_field_axioms(f).empty());
        int units = 0;
        for (int a = 1; a < q; ++a) units += f.mul(a, f.inv(a)) == 1;
        CHECK(units == q - 1);
    }
    auto f9 = make_field(9);
    for (int a = 1; a < 9; ++a) CHECK(f9.mul(a, f9.inv(a)) == 1);
}

TEST_CASE("non prime powers are rejected") {
    for (int q : {0, 1, 6, 10, 12, 100, 243, 256}) CHECK_THROWS_AS(make_field(q), ParameterError);
}
