#include <catch2/catch_amalgamated.hpp>

#include "ellrank/tate.hpp"

using namespace ellrank;

namespace {

template <class K>
Poly<K> mkpoly(const K& k, std::vector<long> cs) {
    Poly<K> p;
    for (auto c : cs) p.c.push_back(k.from_int(c));
    return poly_trim(k, std::move(p));
}

template <class K>
Poly<K> mono(const K& k, long c, int d) {
    Poly<K> p;
    p.c.assign(d + 1, k.zero());
    p.c[d] = k.from_int(c);
    return poly_trim(k, std::move(p));
}

template <class K>
LocalReductionData<K> run_at(const K& k, Poly<K> A, Poly<K> B,
                             Place<K> v) {
    EllipticSurfaceModel<K> E{std::move(A), std::move(B)};
    return tate_local(k, E, v);
}

}  // namespace

TEST_CASE("j = 0 family y^2 = x^3 + t^m: type from v(B) mod 6") {
    Rationals Q;
    auto vt = make_finite_place(Q, mkpoly(Q, {0, 1}));

    // Independent oracle: for A = 0 the Kodaira type at a place depends only
    // on v(B) mod 6 (1 -> II, 2 -> IV, 3 -> I_0^*, 4 -> IV^*, 5 -> II^*).
    auto oracle = [](int m) -> KodairaType {
        switch (m % 6) {
            case 1: return {KodairaClass::II, 0};
            case 2: return {KodairaClass::IV, 0};
            case 3: return {KodairaClass::Istar, 0};
            case 4: return {KodairaClass::IVstar, 0};
            case 5: return {KodairaClass::IIstar, 0};
        }
        return {KodairaClass::I, 0};
    };

    for (int m : {1, 2, 3, 4, 5, 7, 8, 9, 10, 11}) {
        auto d = run_at(Q, Poly<Rationals>{}, mono(Q, 1, m), vt);
        INFO("m = " << m << " got " << kodaira_to_string(d.type));
        REQUIRE(kodaira_eq(d.type, oracle(m)));
        REQUIRE(d.f_v == 2);
        REQUIRE(d.reductions == (m >= 6 ? 1 : 0));
        REQUIRE(d.delta_min_v == kodaira_delta(d.type));
    }

    // Tamagawa numbers along the family over Q: IV and IV^* see the square
    // residue 1 (c = 3); I_0^* has residual cubic T^3 + 1 with the single
    // rational root -1 (c = 2); II/II^* are trivial.
    REQUIRE(run_at(Q, Poly<Rationals>{}, mono(Q, 1, 2), vt).c_v == 3);
    REQUIRE(run_at(Q, Poly<Rationals>{}, mono(Q, 1, 3), vt).c_v == 2);
    REQUIRE(run_at(Q, Poly<Rationals>{}, mono(Q, 1, 4), vt).c_v == 3);
    REQUIRE(run_at(Q, Poly<Rationals>{}, mono(Q, 1, 5), vt).c_v == 1);
}

TEST_CASE("A-only family y^2 = x^3 + t^m x") {
    Rationals Q;
    auto vt = make_finite_place(Q, mkpoly(Q, {0, 1}));

    auto d1 = run_at(Q, mono(Q, 1, 1), Poly<Rationals>{}, vt);
    REQUIRE(kodaira_eq(d1.type, {KodairaClass::III, 0}));
    REQUIRE(d1.c_v == 2);
    REQUIRE(d1.delta_min_v == 3);

    // m = 2: I_0^* with residual cubic T(T^2 + 1): one rational root over Q,
    // three over F_5 (full 2-torsion in the component group).
    auto d2 = run_at(Q, mono(Q, 1, 2), Poly<Rationals>{}, vt);
    REQUIRE(kodaira_eq(d2.type, {KodairaClass::Istar, 0}));
    REQUIRE(d2.c_v == 2);
    REQUIRE(d2.c_v_geom == 4);
    REQUIRE(!d2.full_two_rational);
    REQUIRE(d2.eps_geom == 2);
    REQUIRE(d2.eps_arith == 1);

    PrimeField F5(5);
    auto vt5 = make_finite_place(F5, mkpoly(F5, {0, 1}));
    auto d25 = run_at(F5, mono(F5, 1, 2), Poly<PrimeField>{}, vt5);
    REQUIRE(kodaira_eq(d25.type, {KodairaClass::Istar, 0}));
    REQUIRE(d25.c_v == 4);
    REQUIRE(d25.full_two_rational);
    REQUIRE(d25.eps_arith == 2);
    REQUIRE(local_correction(d25, 2) == 2);
    REQUIRE(local_correction(d2, 2) == 1);

    auto d3 = run_at(Q, mono(Q, 1, 3), Poly<Rationals>{}, vt);
    REQUIRE(kodaira_eq(d3.type, {KodairaClass::IIIstar, 0}));
    REQUIRE(d3.c_v == 2);
    REQUIRE(d3.delta_min_v == 9);

    auto d5 = run_at(Q, mono(Q, 1, 5), Poly<Rationals>{}, vt);
    REQUIRE(kodaira_eq(d5.type, {KodairaClass::III, 0}));
    REQUIRE(d5.reductions == 1);
}

TEST_CASE("multiplicative reduction: split vs nonsplit Tamagawa numbers") {
    // y^2 = x^3 - 3x + 2 + t^n has a node with tangent-slope square 3 at the
    // place t: nonsplit over Q and F_5, split over F_11 (5^2 = 3 mod 11).
    Rationals Q;
    PrimeField F5(5), F11(11);
    auto vtQ = make_finite_place(Q, mkpoly(Q, {0, 1}));
    auto vt5 = make_finite_place(F5, mkpoly(F5, {0, 1}));
    auto vt11 = make_finite_place(F11, mkpoly(F11, {0, 1}));

    for (int n : {1, 2, 3, 6}) {
        auto B_Q = poly_add(Q, mkpoly(Q, {2}), mono(Q, 1, n));
        auto dQ = run_at(Q, mkpoly(Q, {-3}), B_Q, vtQ);
        REQUIRE(kodaira_eq(dQ.type, {KodairaClass::I, n}));
        REQUIRE(dQ.f_v == 1);
        REQUIRE(dQ.m_v == n);
        REQUIRE(dQ.c_v == (n % 2 == 0 ? 2 : 1));  // nonsplit
        REQUIRE(dQ.c_v_geom == n);
        REQUIRE(dQ.eps_geom == (n % 2 == 0 ? 1 : 0));

        auto B5 = poly_add(F5, mkpoly(F5, {2}), mono(F5, 1, n));
        auto d5 = run_at(F5, mkpoly(F5, {-3}), B5, vt5);
        REQUIRE(d5.c_v == (n % 2 == 0 ? 2 : 1));

        auto B11 = poly_add(F11, mkpoly(F11, {2}), mono(F11, 1, n));
        auto d11 = run_at(F11, mkpoly(F11, {-3}), B11, vt11);
        REQUIRE(kodaira_eq(d11.type, {KodairaClass::I, n}));
        REQUIRE(d11.c_v == n);  // split
    }

    // Spec of the hand example: y^2 = x^3 - 3x + t at t = 2 is I_1 with
    // f = 1, c = 1.
    auto d = run_at(Q, mkpoly(Q, {-3}), mkpoly(Q, {0, 1}),
                    make_finite_place(Q, mkpoly(Q, {-2, 1})));
    REQUIRE(kodaira_eq(d.type, {KodairaClass::I, 1}));
    REQUIRE(d.f_v == 1);
    REQUIRE(d.c_v == 1);

    // local_correction at p = 3 sees split I_6 over F_11 (c = 6).
    auto B611 = poly_add(F11, mkpoly(F11, {2}), mono(F11, 1, 6));
    auto d611 = run_at(F11, mkpoly(F11, {-3}), B611, vt11);
    REQUIRE(d611.c_v == 6);
    REQUIRE(local_correction(d611, 3) == 1);
    REQUIRE(local_correction(d611, 2) == 1);
    REQUIRE(local_correction(d611, 5) == 0);
}

TEST_CASE("I_n^* chain: A = -3t^2, B = 2t^3 + t^m") {
    Rationals Q;
    PrimeField F7(7), F13(13);
    auto vtQ = make_finite_place(Q, mkpoly(Q, {0, 1}));

    auto family = [&](auto& k, int m) {
        using K = std::decay_t<decltype(k)>;
        auto A = mono(k, -3, 2);
        auto B = poly_add(k, mono(k, 2, 3), mono(k, 1, m));
        return run_at(k, A, B, make_finite_place(k, mkpoly(k, {0, 1})));
        (void)sizeof(K);
    };

    auto d4 = family(Q, 4);
    REQUIRE(kodaira_eq(d4.type, {KodairaClass::Istar, 1}));
    REQUIRE(d4.c_v == 4);  // residue 1 is a square
    REQUIRE(d4.delta_min_v == 7);
    REQUIRE(!d4.full_two_rational);  // odd index
    REQUIRE(d4.eps_geom == 1);       // I_odd^*: c_geom = 4 even, not I_{2n}^*

    auto d5 = family(Q, 5);
    REQUIRE(kodaira_eq(d5.type, {KodairaClass::Istar, 2}));
    REQUIRE(d5.c_v == 2);  // -12 is not a rational square
    REQUIRE(d5.eps_geom == 2);
    REQUIRE(d5.eps_arith == 1);

    auto d57 = family(F7, 5);  // -12 = 2 = 4^2 mod 7
    REQUIRE(kodaira_eq(d57.type, {KodairaClass::Istar, 2}));
    REQUIRE(d57.c_v == 4);
    REQUIRE(d57.full_two_rational);
    REQUIRE(d57.eps_arith == 2);

    auto d6 = family(Q, 6);
    REQUIRE(kodaira_eq(d6.type, {KodairaClass::Istar, 3}));
    REQUIRE(d6.c_v == 4);
    REQUIRE(d6.delta_min_v == 9);

    auto d7 = family(Q, 7);
    REQUIRE(kodaira_eq(d7.type, {KodairaClass::Istar, 4}));
    REQUIRE(d7.c_v == 2);
    REQUIRE(d7.delta_min_v == 10);

    auto d713 = family(F13, 7);  // -12 = 1 mod 13
    REQUIRE(d713.c_v == 4);
    REQUIRE(d713.full_two_rational);
    (void)vtQ;
}

TEST_CASE("global summary of y^2 = x^3 + t^5 + 1 over Q(t)") {
    Rationals Q;
    EllipticSurfaceModel<Rationals> E;
    E.B = mkpoly(Q, {1, 0, 0, 0, 0, 1});

    auto s = global_summary(Q, E, 2);
    REQUIRE(s.locals.size() == 3);
    for (auto& d : s.locals) {
        REQUIRE(kodaira_eq(d.type, {KodairaClass::II, 0}));
        REQUIRE(d.f_v == 2);
        REQUIRE(d.c_v == 1);
        REQUIRE(d.eps_geom == 0);
    }
    REQUIRE(s.locals[1].place.degree() == 4);
    REQUIRE(s.locals[2].place.infinite);
    REQUIRE(s.deg_f == 12);
    REQUIRE(s.chi == 1);
    REQUIRE(s.p_g == 0);
    REQUIRE(s.delta_min_deg == 12);
    REQUIRE(s.eps_sum_arith == 0);
    REQUIRE(s.eps_sum_geom == 0);
    REQUIRE(s.count_p_div_c == 0);
    REQUIRE(s.count_full_two == 0);
}

TEST_CASE("global summary of y^2 = x^3 + t^7 + 1 over Q(t)") {
    Rationals Q;
    EllipticSurfaceModel<Rationals> E;
    E.B = poly_add(Q, mono(Q, 1, 7), mkpoly(Q, {1}));

    auto s = global_summary(Q, E, 2);
    REQUIRE(s.locals.size() == 3);
    REQUIRE(kodaira_eq(s.locals[0].type, {KodairaClass::II, 0}));
    REQUIRE(s.locals[1].place.degree() == 6);
    REQUIRE(kodaira_eq(s.locals[1].type, {KodairaClass::II, 0}));
    REQUIRE(s.locals[2].place.infinite);
    REQUIRE(kodaira_eq(s.locals[2].type, {KodairaClass::IIstar, 0}));
    REQUIRE(s.deg_f == 16);
    REQUIRE(s.chi == 2);
    REQUIRE(s.p_g == 1);
}

TEST_CASE("more global summaries") {
    Rationals Q;
    PrimeField F7(7);

    // y^2 = x^3 + t: II at t, II^* at infinity.
    EllipticSurfaceModel<Rationals> E1;
    E1.B = mkpoly(Q, {0, 1});
    auto s1 = global_summary(Q, E1);
    REQUIRE(s1.locals.size() == 2);
    REQUIRE(kodaira_eq(s1.locals[0].type, {KodairaClass::II, 0}));
    REQUIRE(kodaira_eq(s1.locals[1].type, {KodairaClass::IIstar, 0}));
    REQUIRE(s1.deg_f == 4);
    REQUIRE(s1.chi == 1);
    REQUIRE(s1.p_g == 0);

    // y^2 = x^3 + (t^2 + 1) over F_7: II at the degree-2 place, IV^* at
    // infinity (residue 1 is a square, so c = 3 there).
    EllipticSurfaceModel<PrimeField> E2;
    E2.B = mkpoly(F7, {1, 0, 1});
    auto s2 = global_summary(F7, E2);
    REQUIRE(s2.locals.size() == 2);
    REQUIRE(s2.locals[0].place.degree() == 2);
    REQUIRE(kodaira_eq(s2.locals[0].type, {KodairaClass::II, 0}));
    REQUIRE(kodaira_eq(s2.locals[1].type, {KodairaClass::IVstar, 0}));
    REQUIRE(s2.locals[1].c_v == 3);
    REQUIRE(s2.deg_f == 6);
    REQUIRE(s2.chi == 1);

    // Constant surface rejected.
    EllipticSurfaceModel<Rationals> C;
    C.A = mono(Q, 1, 4);
    C.B = mono(Q, 1, 6);
    REQUIRE_THROWS_AS(global_summary(Q, C), hypothesis_error);
}

TEST_CASE("number-field Tamagawa decisions at a quartic place") {
    Rationals Q;
    auto quart = mkpoly(Q, {1, -1, 1, -1, 1});
    auto Bq = poly_mul(Q, quart, quart);

    // B = (t^4 - t^3 + t^2 - t + 1)^2: type IV at the quartic place with the
    // residue a perfect square (the derivative squared), certified over the
    // degree-4 number field; IV^* at infinity with residue 1.
    EllipticSurfaceModel<Rationals> E{Poly<Rationals>{}, Bq};
    auto s = global_summary(Q, E);
    REQUIRE(s.locals.size() == 2);
    REQUIRE(s.locals[0].place.degree() == 4);
    REQUIRE(kodaira_eq(s.locals[0].type, {KodairaClass::IV, 0}));
    REQUIRE(s.locals[0].c_v == 3);
    REQUIRE(kodaira_eq(s.locals[1].type, {KodairaClass::IVstar, 0}));
    REQUIRE(s.locals[1].c_v == 3);
    REQUIRE(s.deg_f == 10);
    REQUIRE(s.chi == 2);

    // B = -(...)^2: the residue -[square] is a nonsquare in Q(zeta_10)
    // (whose only quadratic subfield is Q(sqrt 5)), certified by a
    // nonresidue witness: c drops to 1 at both places.
    EllipticSurfaceModel<Rationals> Em{Poly<Rationals>{},
                                       poly_neg(Q, Bq)};
    auto sm = global_summary(Q, Em);
    REQUIRE(kodaira_eq(sm.locals[0].type, {KodairaClass::IV, 0}));
    REQUIRE(sm.locals[0].c_v == 1);
    REQUIRE(sm.locals[1].c_v == 1);
}

TEST_CASE("specialization consistency under base shifts") {
    Rationals Q;
    // y^2 = x^3 - 3x + t at (t - 2) vs the shifted model at (t).
    auto d1 = run_at(Q, mkpoly(Q, {-3}), mkpoly(Q, {0, 1}),
                     make_finite_place(Q, mkpoly(Q, {-2, 1})));
    auto d2 = run_at(Q, mkpoly(Q, {-3}), mkpoly(Q, {2, 1}),
                     make_finite_place(Q, mkpoly(Q, {0, 1})));
    REQUIRE(kodaira_eq(d1.type, d2.type));
    REQUIRE(d1.c_v == d2.c_v);
    REQUIRE(d1.f_v == d2.f_v);

    // Same for an additive place: y^2 = x^3 + t^3 + t^4 at t vs shift.
    auto A0 = Poly<Rationals>{};
    auto d3 = run_at(Q, A0, poly_add(Q, mono(Q, 1, 3), mono(Q, 1, 4)),
                     make_finite_place(Q, mkpoly(Q, {0, 1})));
    auto shifted = poly_taylor_shift(
        Q, poly_add(Q, mono(Q, 1, 3), mono(Q, 1, 4)), Q.from_int(1));
    auto d4 = run_at(Q, A0, shifted,
                     make_finite_place(Q, mkpoly(Q, {1, 1})));
    REQUIRE(kodaira_eq(d3.type, d4.type));
    REQUIRE(d3.c_v == d4.c_v);
}
