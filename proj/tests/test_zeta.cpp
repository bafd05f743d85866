#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>

#include "ellrank/zeta.hpp"

using namespace ellrank;
using Catch::Matchers::ContainsSubstring;

namespace {

template <class K>
Poly<K> mkpoly(const K& k, std::vector<long> cs) {
    Poly<K> p;
    for (auto c : cs) p.c.push_back(k.from_int(c));
    return poly_trim(k, std::move(p));
}

LPolynomial mklp(std::vector<long> a, long q, int g) {
    LPolynomial P;
    for (auto c : a) P.a.push_back(Int(c));
    P.q = q;
    P.g = g;
    return P;
}

}  // namespace

TEST_CASE("point counts of the rational curve x^3 = t over F_7") {
    PrimeField F7(7);
    EllipticSurfaceModel<PrimeField> E{Poly<PrimeField>{}, mkpoly(F7, {0, -1})};
    auto C = build_descent_curve(F7, E);
    REQUIRE(C.genus == 0);
    // C is a projective line: q + 1 points over every extension
    REQUIRE(count_points(F7, C, 1) == 8);
    REQUIRE(count_points(F7, C, 2) == 50);

    SECTION("parallel and serial counts agree") {
        REQUIRE(count_points(F7, C, 1, 3) == 8);
        REQUIRE(count_points(F7, C, 2, 4) == 50);
    }
}

TEST_CASE("genus-1 curve x^3 + t^2 + 1 = 0 over F_7: counts vs brute force") {
    PrimeField F7(7);
    EllipticSurfaceModel<PrimeField> E{Poly<PrimeField>{}, mkpoly(F7, {1, 0, 1})};
    auto C = build_descent_curve(F7, E);
    REQUIRE(C.genus == 1);

    // Independent oracle: naive affine solution count.  Both branch fibers
    // (t^2 = -1, only present over extensions containing i) carry a total
    // collision of the three roots, where the affine model is still a single
    // point, and infinity carries exactly one place, so for this curve
    // N = #affine solutions + 1 over every extension.
    auto brute = [](auto& k) {
        long n = 0;
        long q = k.cardinality().get_si();
        for (long a = 0; a < q; ++a)
            for (long b = 0; b < q; ++b) {
                auto x = k.element_by_index(a), t = k.element_by_index(b);
                auto lhs = k.add(k.mul(k.mul(x, x), x),
                                 k.add(k.mul(t, t), k.one()));
                if (k.is_zero(lhs)) ++n;
            }
        return n + 1;
    };

    long n1 = count_points(F7, C, 1);
    REQUIRE(n1 == brute(F7));
    REQUIRE(n1 == 4);  // hand count: only t = 0 has -(t^2+1) a cube

    ExtensionField<PrimeField> F49(F7, find_irreducible(F7, 2));
    long n2 = count_points(F7, C, 2);
    REQUIRE(n2 == brute(F49));

    // The L-polynomial is built from N_1 alone; its prediction for N_2
    // independently confirms the degree-2 count.
    auto P = l_polynomial({n1}, Int(7), 1);
    REQUIRE(P.a == std::vector<Int>{1, -4, 7});
    // N_2 = q^2 + 1 - (S_1^2 - 2q)
    REQUIRE(n2 == 49 + 1 - (4 * 4 - 14));
    REQUIRE(n2 == 48);

    SECTION("class-number data of this curve") {
        REQUIRE(lpoly_class_number(P) == 4);
        auto tb = two_torsion_bounds(P);
        REQUIRE(tb.lower == 1);
        REQUIRE(tb.upper == 2);
        REQUIRE_FALSE(tb.exact);
    }
}

TEST_CASE("L-polynomial assembly and self-checks") {
    SECTION("genus 0") {
        auto P = l_polynomial({}, Int(7), 0);
        REQUIRE(P.a == std::vector<Int>{1});
        REQUIRE(lpoly_class_number(P) == 1);
    }

    SECTION("genus 1 shape") {
        auto P = l_polynomial({8}, Int(7), 1);
        REQUIRE(P.a == std::vector<Int>{1, 0, 7});
    }

    SECTION("genus 2 frozen: product of two elliptic factors") {
        // (1 - 2T + 5T^2)(1 + T + 5T^2) = 1 - T + 8T^2 - 5T^3 + 25T^4
        // has S_1 = 1, S_2 = -15, so N_1 = 5, N_2 = 41 over q = 5.
        auto P = l_polynomial({5, 41}, Int(5), 2);
        REQUIRE(P.a == std::vector<Int>{1, -1, 8, -5, 25});
    }

    SECTION("inconsistent counts are rejected") {
        REQUIRE_THROWS_AS(l_polynomial({5, 40}, Int(5), 2), internal_error);
        // integral but off the Weil circle
        REQUIRE_THROWS_AS(l_polynomial({20}, Int(5), 1), internal_error);
        REQUIRE_THROWS_AS(l_polynomial({0}, Int(5), 1), internal_error);
    }

    SECTION("count-list length must equal the genus") {
        REQUIRE_THROWS_AS(l_polynomial({8}, Int(7), 2), internal_error);
    }
}

TEST_CASE("two-torsion intervals from the L-polynomial") {
    SECTION("odd class number collapses to zero") {
        auto tb = two_torsion_bounds(mklp({1, -1, 3}, 3, 1));
        REQUIRE(tb.lower == 0);
        REQUIRE(tb.upper == 0);
        REQUIRE(tb.exact);
    }

    SECTION("h = 4 with doubled eigenvalue 1") {
        auto tb = two_torsion_bounds(mklp({1, -2, 5}, 5, 1));
        REQUIRE(tb.lower == 1);
        REQUIRE(tb.upper == 2);
        REQUIRE_FALSE(tb.exact);
        REQUIRE_THAT(tb.notes, ContainsSubstring("class number 4"));
    }

    SECTION("h = 9") {
        auto tb = two_torsion_bounds(mklp({1, 3, 5}, 5, 1));
        REQUIRE(tb.lower == 0);
        REQUIRE(tb.upper == 0);
        REQUIRE(tb.exact);
    }

    SECTION("genus 0") {
        auto tb = two_torsion_bounds(mklp({1}, 7, 0));
        REQUIRE(tb.upper == 0);
        REQUIRE(tb.exact);
    }
}

TEST_CASE("2-torsion upper bounds over Q via good reduction") {
    Rationals Q;

    SECTION("genus 0 needs no primes") {
        EllipticSurfaceModel<Rationals> E{Poly<Rationals>{}, mkpoly(Q, {0, -1})};
        auto C = build_descent_curve(Q, E);
        auto tb = torsion_upper_over_Q(Q, C, {});
        REQUIRE(tb.upper == 0);
        REQUIRE(tb.exact);
    }

    EllipticSurfaceModel<Rationals> E{Poly<Rationals>{},
                                      mkpoly(Q, {1, 0, 0, 0, 0, 1})};
    auto C = build_descent_curve(Q, E);
    REQUIRE(C.genus == 4);

    SECTION("certified primes give a bound and name the certificate") {
        auto tb = torsion_upper_over_Q(Q, C, {7, 11, 13});
        REQUIRE(tb.lower == 0);
        REQUIRE(tb.upper >= 0);
        REQUIRE(tb.upper <= 8);
        REQUIRE_THAT(tb.notes, ContainsSubstring("certified at the good prime"));

        // agreement with the per-prime pipeline run by hand at l = 7
        PrimeField F7(7);
        EllipticSurfaceModel<PrimeField> E7{Poly<PrimeField>{},
                                            mkpoly(F7, {1, 0, 0, 0, 0, 1})};
        auto C7 = build_descent_curve(F7, E7);
        REQUIRE(C7.genus == 4);
        std::vector<long> counts;
        for (int i = 1; i <= 4; ++i) counts.push_back(count_points(F7, C7, i));
        auto tb7 = two_torsion_bounds(l_polynomial(counts, Int(7), 4));
        REQUIRE(tb.upper <= tb7.upper);
    }

    SECTION("a prime dividing the branch discriminant does not certify") {
        REQUIRE_THROWS_AS(torsion_upper_over_Q(Q, C, {5}), undetermined_error);
    }

    SECTION("primes below 5 are never used for reduction") {
        REQUIRE_THROWS_MATCHES(
            torsion_upper_over_Q(Q, C, {2, 3}), undetermined_error,
            Catch::Matchers::MessageMatches(
                ContainsSubstring("supply an asserted good prime")));
    }
}

TEST_CASE("work budget limits point counting") {
    PrimeField F7(7);
    EllipticSurfaceModel<PrimeField> E{Poly<PrimeField>{}, mkpoly(F7, {0, -1})};
    auto C = build_descent_curve(F7, E);

    setenv("ELLRANK_WORK_BUDGET", "10", 1);
    try {
        REQUIRE_THROWS_MATCHES(
            count_points(F7, C, 2), capability_error,
            Catch::Matchers::MessageMatches(
                ContainsSubstring("ELLRANK_WORK_BUDGET")));
    } catch (...) {
        unsetenv("ELLRANK_WORK_BUDGET");
        throw;
    }
    unsetenv("ELLRANK_WORK_BUDGET");
    REQUIRE(count_points(F7, C, 2) == 50);
}
