#include <catch2/catch_amalgamated.hpp>

#include "ellrank/factor.hpp"

using namespace ellrank;

namespace {

// Expansion oracle: unit * prod factors^mult must reproduce the input.
template <class F>
void check_expansion(const F& k, const Poly<F>& input, const FactorList<F>& fl) {
    auto prod = poly_const(k, fl.unit);
    for (const auto& [g, m] : fl.factors) {
        CHECK(k.is_one(poly_lc(k, g)));
        for (int i = 0; i < m; ++i) prod = poly_mul(k, prod, g);
    }
    CHECK(poly_eq(k, prod, input));
}

}  // namespace

TEST_CASE("t^5 + 1 over Q splits as (t+1)(t^4-t^3+t^2-t+1)") {
    Rationals Q;
    auto f = poly_from_ints(Q, {1, 0, 0, 0, 0, 1});
    auto fl = factor_univariate(Q, f);
    REQUIRE(fl.factors.size() == 2);
    CHECK(poly_eq(Q, fl.factors[0].first, poly_from_ints(Q, {1, 1})));
    CHECK(fl.factors[0].second == 1);
    CHECK(poly_eq(Q, fl.factors[1].first, poly_from_ints(Q, {1, -1, 1, -1, 1})));
    CHECK(fl.factors[1].second == 1);
    check_expansion(Q, f, fl);
}

TEST_CASE("t^2 + 1 is irreducible over F_7") {
    PrimeField F(7);
    auto f = poly_from_ints(F, {1, 0, 1});
    // Oracle: exhaust all residues; no square is -1 mod 7.
    for (std::uint64_t a = 0; a < 7; ++a) CHECK(F.mul(a, a) != 6);
    auto fl = factor_univariate(F, f);
    REQUIRE(fl.factors.size() == 1);
    CHECK(fl.factors[0].first.deg() == 2);
    CHECK(fl.factors[0].second == 1);
    CHECK(is_irreducible_finite(F, f));
}

TEST_CASE("squarefree decomposition with multiplicities over F_5") {
    PrimeField F(5);
    auto a = poly_from_ints(F, {1, 1});        // t+1
    auto b = poly_from_ints(F, {1, 1, 1});     // t^2+t+1, irreducible (disc=-3=2 nonsquare mod 5)
    auto f = poly_mul(F, poly_mul(F, a, a), b);
    auto fl = factor_univariate(F, f);
    REQUIRE(fl.factors.size() == 2);
    check_expansion(F, f, fl);
    bool saw_a = false, saw_b = false;
    for (auto& [g, m] : fl.factors) {
        if (poly_eq(F, g, a)) { saw_a = true; CHECK(m == 2); }
        if (poly_eq(F, g, b)) { saw_b = true; CHECK(m == 1); }
    }
    CHECK(saw_a);
    CHECK(saw_b);
}

TEST_CASE("frobenius-power factor over F_9: x^3 - w = (x+w)^3") {
    PrimeField F3(3);
    ExtensionField<PrimeField> F9(F3, poly_from_ints(F3, {1, 0, 1}), "w");
    using E = ExtensionField<PrimeField>;
    Poly<E> f;
    f.c = {F9.neg(F9.gen()), F9.zero(), F9.zero(), F9.one()};  // x^3 - w
    auto fl = factor_univariate(F9, f);
    REQUIRE(fl.factors.size() == 1);
    CHECK(fl.factors[0].second == 3);
    Poly<E> expected;
    expected.c = {F9.gen(), F9.one()};  // x + w, since (x+w)^3 = x^3 + w^3 = x^3 - w
    CHECK(poly_eq(F9, fl.factors[0].first, expected));
    check_expansion(F9, f, fl);
}

TEST_CASE("x^9 - x over F_9 splits into all nine linear factors") {
    PrimeField F3(3);
    ExtensionField<PrimeField> F9(F3, poly_from_ints(F3, {1, 0, 1}), "w");
    using E = ExtensionField<PrimeField>;
    Poly<E> f;
    f.c.assign(10, F9.zero());
    f.c[1] = F9.from_int(-1);
    f.c[9] = F9.one();
    auto fl = factor_univariate(F9, f);
    CHECK(fl.factors.size() == 9);
    for (auto& [g, m] : fl.factors) {
        CHECK(g.deg() == 1);
        CHECK(m == 1);
    }
    check_expansion(F9, f, fl);
}

TEST_CASE("rational factorization handles units and multiplicities") {
    Rationals Q;
    // 6(x-1)^2 (x^2+1)^3
    auto f = poly_const(Q, Rat(6));
    auto lin = poly_from_ints(Q, {-1, 1});
    auto quad = poly_from_ints(Q, {1, 0, 1});
    for (int i = 0; i < 2; ++i) f = poly_mul(Q, f, lin);
    for (int i = 0; i < 3; ++i) f = poly_mul(Q, f, quad);
    auto fl = factor_univariate(Q, f);
    REQUIRE(fl.factors.size() == 2);
    check_expansion(Q, f, fl);
    CHECK(Q.eq(fl.unit, Rat(6)));
}

TEST_CASE("recombination: x^4+1 stays irreducible, (x^2-2)(x^2-3) splits correctly") {
    Rationals Q;
    auto f = poly_from_ints(Q, {1, 0, 0, 0, 1});
    auto fl = factor_univariate(Q, f);
    REQUIRE(fl.factors.size() == 1);
    CHECK(fl.factors[0].first.deg() == 4);

    auto g = poly_mul(Q, poly_from_ints(Q, {-2, 0, 1}), poly_from_ints(Q, {-3, 0, 1}));
    auto gl = factor_univariate(Q, g);
    REQUIRE(gl.factors.size() == 2);
    CHECK(gl.factors[0].first.deg() == 2);
    CHECK(gl.factors[1].first.deg() == 2);
    check_expansion(Q, g, gl);
}

TEST_CASE("complete splitting over Q") {
    Rationals Q;
    auto f = poly_one(Q);
    for (long r = 1; r <= 6; ++r) f = poly_mul(Q, f, poly_from_ints(Q, {-r, 1}));
    auto fl = factor_univariate(Q, f);
    CHECK(fl.factors.size() == 6);
    check_expansion(Q, f, fl);
}

TEST_CASE("degree cap raises a capability error") {
    Rationals Q;
    Poly<Rationals> f;
    f.c.assign(32, Rat(0));
    f.c[0] = Rat(1);
    f.c[31] = Rat(1);
    CHECK_THROWS_AS(factor_univariate(Q, f), capability_error);
}

TEST_CASE("deterministic smallest irreducible moduli") {
    PrimeField F5(5);
    auto h5 = find_irreducible(F5, 2);
    CHECK(poly_eq(F5, h5, poly_from_ints(F5, {2, 0, 1})));  // x^2 + 2: first with x^2, x^2+1 reducible
    PrimeField F3(3);
    auto h3 = find_irreducible(F3, 2);
    CHECK(poly_eq(F3, h3, poly_from_ints(F3, {1, 0, 1})));  // x^2 + 1
    CHECK(is_irreducible_finite(F3, h3));
    auto h7 = find_irreducible(PrimeField(7), 3);
    CHECK(is_irreducible_finite(PrimeField(7), h7));
    CHECK(h7.deg() == 3);
}

TEST_CASE("roots over finite fields, frozen against exhaustive oracles") {
    PrimeField F5(5);
    // Oracle: brute force x^3+x+1 over all five residues; values 1,3,1,1,4.
    {
        auto f = poly_from_ints(F5, {1, 1, 0, 1});
        int oracle = 0;
        for (std::uint64_t x = 0; x < 5; ++x)
            if (F5.is_zero(poly_eval(F5, f, x))) ++oracle;
        CHECK(oracle == 0);
        CHECK(poly_root_count_finite(F5, f) == 0);
        CHECK(poly_roots_finite(F5, f).empty());
    }
    PrimeField F7(7);
    {
        auto f = poly_from_ints(F7, {-1, 0, 0, 1});  // x^3 - 1
        auto roots = poly_roots_finite(F7, f);
        REQUIRE(roots.size() == 3);
        CHECK(roots[0] == 1);
        CHECK(roots[1] == 2);
        CHECK(roots[2] == 4);
        for (auto r : roots) CHECK(F7.is_zero(poly_eval(F7, f, r)));
    }
}

TEST_CASE("finite-field square roots with certificates") {
    PrimeField F13(13);  // 13 = 1 mod 4 exercises the full Tonelli-Shanks loop
    int squares = 0;
    for (std::uint64_t a = 1; a < 13; ++a) {
        auto r = sqrt_finite(F13, a);
        if (r) {
            ++squares;
            CHECK(F13.mul(*r, *r) == a);
        }
    }
    CHECK(squares == 6);

    PrimeField F3(3);
    ExtensionField<PrimeField> F9(F3, poly_from_ints(F3, {1, 0, 1}), "w");
    int sq9 = 0;
    for (long i = 1; i < 9; ++i) {
        auto a = F9.element_by_index(Int(i));
        auto r = sqrt_finite(F9, a);
        if (r) {
            ++sq9;
            CHECK(F9.eq(F9.mul(*r, *r), a));
        }
    }
    CHECK(sq9 == 4);  // half the 8 units
}

TEST_CASE("factorization output is deterministic across calls") {
    PrimeField F7(7);
    Poly<PrimeField> f = poly_from_ints(F7, {3, 1, 4, 1, 5, 1});
    auto a = factor_univariate(F7, f);
    auto b = factor_univariate(F7, f);
    REQUIRE(a.factors.size() == b.factors.size());
    for (size_t i = 0; i < a.factors.size(); ++i) {
        CHECK(poly_eq(F7, a.factors[i].first, b.factors[i].first));
        CHECK(a.factors[i].second == b.factors[i].second);
    }
    check_expansion(F7, f, a);
}
