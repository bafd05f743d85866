#include <catch2/catch_amalgamated.hpp>

#include "ellrank/extension.hpp"
#include "ellrank/numeric.hpp"
#include "ellrank/poly.hpp"

using namespace ellrank;

TEST_CASE("polynomial ring basics over Q") {
    Rationals Q;
    auto f = poly_from_ints(Q, {1, 0, 1});      // x^2 + 1
    auto g = poly_from_ints(Q, {-1, 1});        // x - 1
    auto p = poly_mul(Q, f, g);                 // x^3 - x^2 + x - 1
    CHECK(poly_eq(Q, p, poly_from_ints(Q, {-1, 1, -1, 1})));
    auto [q, r] = poly_divmod(Q, p, g);
    CHECK(poly_eq(Q, q, f));
    CHECK(r.zero());
    CHECK(poly_eq(Q, poly_gcd(Q, p, g), poly_monic(Q, g)));
    CHECK(Q.eq(poly_eval(Q, p, Rat(2)), Rat(5)));  // 8-4+2-1
}

TEST_CASE("divmod with remainder over F_5") {
    PrimeField F(5);
    auto a = poly_from_ints(F, {1, 2, 3, 4});   // 4x^3+3x^2+2x+1
    auto b = poly_from_ints(F, {1, 1});         // x + 1
    auto [q, r] = poly_divmod(F, a, b);
    CHECK(poly_eq(F, poly_add(F, poly_mul(F, q, b), r), a));
    CHECK(r.deg() <= 0);
    // a(-1) = -4+3-2+1 = -2 = 3 mod 5 must equal the remainder constant
    CHECK(F.eq(poly_coeff(F, r, 0), F.from_int(-2)));
}

TEST_CASE("xgcd produces Bezout identity") {
    PrimeField F(7);
    auto a = poly_from_ints(F, {1, 0, 1});   // x^2+1, irreducible mod 7
    auto b = poly_from_ints(F, {3, 1, 2});   // 2x^2+x+3
    auto [g, u, v] = poly_xgcd(F, a, b);
    auto lhs = poly_add(F, poly_mul(F, u, a), poly_mul(F, v, b));
    CHECK(poly_eq(F, lhs, g));
    CHECK(g.deg() == 0);  // coprime
}

TEST_CASE("derivative and taylor shift") {
    Rationals Q;
    auto f = poly_from_ints(Q, {1, -2, 0, 1});  // x^3 - 2x + 1
    CHECK(poly_eq(Q, poly_derivative(Q, f), poly_from_ints(Q, {-2, 0, 3})));
    // f(x+1) = (x+1)^3 - 2(x+1) + 1 = x^3 + 3x^2 + x
    auto s = poly_taylor_shift(Q, f, Rat(1));
    CHECK(poly_eq(Q, s, poly_from_ints(Q, {0, 1, 3, 1})));
    // Shifting back must return f.
    CHECK(poly_eq(Q, poly_taylor_shift(Q, s, Rat(-1)), f));
}

TEST_CASE("valuation and shifts") {
    PrimeField F(5);
    auto f = poly_from_ints(F, {0, 0, 3, 1});  // x^3 + 3x^2
    CHECK(poly_valuation(F, f) == 2);
    auto g = poly_shift_down(F, f, 2);
    CHECK(poly_eq(F, g, poly_from_ints(F, {3, 1})));
    CHECK(poly_eq(F, poly_shift_up(F, g, 2), f));
    CHECK(poly_valuation(F, poly_zero(F)) == kValInfinity);
}

TEST_CASE("reverse pad computes s^d f(1/s)") {
    Rationals Q;
    auto f = poly_from_ints(Q, {1, 0, 0, 0, 0, 1});  // t^5 + 1
    // s^6 f(1/s) = s^6 (s^-5 + 1) = s + s^6
    auto r = poly_reverse_pad(Q, f, 6);
    CHECK(poly_eq(Q, r, poly_from_ints(Q, {0, 1, 0, 0, 0, 0, 1})));
}

TEST_CASE("powmod matches repeated multiplication") {
    PrimeField F(7);
    auto m = poly_from_ints(F, {1, 0, 1});  // x^2+1
    auto x = poly_var(F);
    auto r = poly_powmod(F, x, Int(49), m);
    // x^49 = x^(q^2) with q=7: Frobenius squared fixes F_49, and x^2=-1 gives
    // x^49 = (x^2)^24 * x = x since (-1)^24 = 1.
    CHECK(poly_eq(F, r, x));
}

TEST_CASE("multiplicity counts repeated factors") {
    Rationals Q;
    auto d = poly_from_ints(Q, {-1, 1});  // x-1
    auto f = poly_mul(Q, poly_mul(Q, d, d), poly_from_ints(Q, {1, 1}));
    CHECK(poly_multiplicity(Q, f, d) == 2);
    CHECK(poly_multiplicity(Q, f, poly_from_ints(Q, {1, 1})) == 1);
    CHECK(poly_multiplicity(Q, f, poly_from_ints(Q, {2, 1})) == 0);
}

TEST_CASE("polynomials over an extension field") {
    PrimeField F3(3);
    ExtensionField<PrimeField> F9(F3, poly_from_ints(F3, {1, 0, 1}), "w");
    using F9E = ExtensionField<PrimeField>;
    Poly<F9E> f;
    f.c = {F9.gen(), F9.one()};  // x + w
    auto sq = poly_mul(F9, f, f);
    // (x+w)^2 = x^2 + 2wx + w^2 = x^2 + 2wx - 1
    CHECK(sq.deg() == 2);
    CHECK(F9.eq(sq.c[0], F9.from_int(-1)));
    CHECK(F9.eq(sq.c[1], F9.mul(F9.from_int(2), F9.gen())));
    CHECK(F9.is_one(sq.c[2]));
}

TEST_CASE("to_string renders readable polynomials") {
    Rationals Q;
    auto f = poly_from_ints(Q, {1, -2, 0, 1});
    CHECK(poly_to_string(Q, f, "t") == "t^3 + -2*t + 1");
    CHECK(poly_to_string(Q, poly_zero(Q), "t") == "0");
}
