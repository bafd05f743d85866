#include <catch2/catch_amalgamated.hpp>

#include "ellrank/bounds.hpp"

using namespace ellrank;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

template <class K>
Poly<K> mkpoly(const K& k, std::vector<long> cs) {
    Poly<K> p;
    for (auto c : cs) p.c.push_back(k.from_int(c));
    return poly_trim(k, std::move(p));
}

template <class K>
EllipticSurfaceModel<K> mkmodel(const K& k, std::vector<long> a, std::vector<long> b) {
    return {mkpoly(k, a), mkpoly(k, b)};
}

GlobalReductionSummary<Rationals> synthQ(int deg_f) {
    GlobalReductionSummary<Rationals> s;
    s.deg_f = deg_f;
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Conductor bound
// ---------------------------------------------------------------------------

TEST_CASE("conductor bound is deg f minus four over the line") {
    REQUIRE(geometric_bound(synthQ(12)) == 8);
    REQUIRE(geometric_bound(synthQ(4)) == 0);
    REQUIRE(geometric_bound(synthQ(24)) == 20);
}

TEST_CASE("conductor bound on a real curve: y^2 = x^3 + t") {
    Rationals Q;
    auto s = global_summary(Q, mkmodel(Q, {}, {0, 1}));
    REQUIRE(s.deg_f == 4);
    REQUIRE(geometric_bound(s) == 0);
}

// ---------------------------------------------------------------------------
// Explicit-formula main term
// ---------------------------------------------------------------------------

TEST_CASE("explicit-formula main term at exact logarithms") {
    PrimeField F5(5);
    GlobalReductionSummary<PrimeField> s;

    s.deg_f = 25;  // log_5 25 = 2
    auto b = explicit_formula_bound(s, Int(5));
    REQUIRE(b.applicable);
    REQUIRE(b.main_term == Approx(5.25).margin(1e-12));
    REQUIRE_FALSE(b.c_term.has_value());
    REQUIRE(b.value == Approx(5.25).margin(1e-12));
    REQUIRE(b.floored == 5);

    s.deg_f = 5;  // log_5 5 = 1
    auto b2 = explicit_formula_bound(s, Int(5));
    REQUIRE(b2.main_term == Approx(0.5).margin(1e-12));
    REQUIRE(b2.floored == 0);

    SECTION("supplying c = 0 keeps the pure main term") {
        auto b3 = explicit_formula_bound(s, Int(5), 0.0);
        REQUIRE(b3.c_term.has_value());
        REQUIRE(*b3.c_term == Approx(0.0).margin(1e-12));
        REQUIRE(b3.value == Approx(0.5).margin(1e-12));
    }

    SECTION("degenerate conductor degree is refused") {
        s.deg_f = 1;
        auto b4 = explicit_formula_bound(s, Int(5));
        REQUIRE_FALSE(b4.applicable);
        REQUIRE_THAT(b4.reason, ContainsSubstring("conductor degree"));
    }
}

// ---------------------------------------------------------------------------
// Descent-counting bound
// ---------------------------------------------------------------------------

TEST_CASE("descent bound formula shapes") {
    GlobalReductionSummary<Rationals> s;

    SECTION("p = 3 adds only the Tamagawa count") {
        s.p = 3;
        s.count_p_div_c = 2;
        s.count_full_two = 99;  // must be ignored for odd p
        REQUIRE(descent_bound(s, 3, 5) == 7);
    }

    SECTION("p = 2 adds the Tamagawa count and the full even-star count") {
        s.p = 2;
        s.count_p_div_c = 1;
        s.count_full_two = 1;
        REQUIRE(descent_bound(s, 2, 0) == 2);
        REQUIRE(descent_bound(s, 2, 3, 1) == 4);
    }

    SECTION("geometric mode reads the closure-weighted counts") {
        s.p = 2;
        s.count_p_div_c_geom_weighted = 3;
        s.count_even_star_weighted = 2;
        REQUIRE(descent_bound(s, 2, 4, 0, CorrectionCount::geometric) == 9);
    }

    SECTION("prime mismatch with the summary is trapped") {
        s.p = 2;
        REQUIRE_THROWS_AS(descent_bound(s, 3, 0), internal_error);
    }
}

// ---------------------------------------------------------------------------
// Characteristic-zero surface bound
// ---------------------------------------------------------------------------

TEST_CASE("surface bound forms") {
    auto s = synthQ(12);
    s.p_g = 0;
    s.chi = 1;
    auto h = hodge_bound(s);
    REQUIRE(h.applicable);
    REQUIRE(h.conductor_form == 8);
    REQUIRE(h.chi_form == 8);

    auto s2 = synthQ(16);
    s2.p_g = 1;
    s2.chi = 2;
    REQUIRE(hodge_bound(s2).conductor_form == 10);
    REQUIRE(hodge_bound(s2).chi_form == 18);
}

TEST_CASE("surface bound is marked inapplicable in positive characteristic") {
    GlobalReductionSummary<PrimeField> s;
    s.deg_f = 12;
    REQUIRE_FALSE(hodge_bound(s).applicable);
}

// ---------------------------------------------------------------------------
// Pic(C)[2] dimension cap
// ---------------------------------------------------------------------------

TEST_CASE("Pic[2] dimension cap from class-group size") {
    auto b = pic_two_dim_bound(4, Int(3));
    REQUIRE(b.log_form == Approx(6.918863237274596).margin(1e-9));
    REQUIRE(b.dim_bound == 6);

    REQUIRE(pic_two_dim_bound(0, Int(3)).log_form == Approx(0.0).margin(1e-12));
    REQUIRE(pic_two_dim_bound(0, Int(3)).dim_bound == 0);

    auto b1 = pic_two_dim_bound(1, Int(3));
    REQUIRE(b1.log_form == Approx(2.0).margin(1e-12));
    REQUIRE(b1.dim_bound == 2);

    SECTION("gonality form is reported but marked approximate by design") {
        auto bg = pic_two_dim_bound(4, Int(3), 3);
        REQUIRE(bg.gonality_form.has_value());
        // (1 - 1/3) * 4 * log2(3)
        REQUIRE(*bg.gonality_form == Approx(4.22656666858975).margin(1e-9));
    }
}

// ---------------------------------------------------------------------------
// 3-adic bound over Q(t)
// ---------------------------------------------------------------------------

TEST_CASE("three-adic bound values and coefficient formatting") {
    auto b = three_adic_bound(1, 0);
    REQUIRE(format_fixed(b.chi_coefficient, 6) == "9.509775");
    REQUIRE(b.value == Approx(6.924812503605781).margin(1e-9));
    REQUIRE(b.floored == 6);

    auto b2 = three_adic_bound(1, 2);
    REQUIRE(b2.value == Approx(5.754887502163469).margin(1e-9));
    REQUIRE(b2.floored == 5);

    auto b3 = three_adic_bound(2, 0);
    REQUIRE(b3.value == Approx(16.434587507932717).margin(1e-9));
    REQUIRE(b3.floored == 16);
}

// ---------------------------------------------------------------------------
// Genus/conductor identity and its formula-level restatement
// ---------------------------------------------------------------------------

namespace {

template <class K>
void check_identity_and_closure_equivalence(const K& k,
                                            const EllipticSurfaceModel<K>& E) {
    auto s = global_summary(k, E, 2);
    auto C = build_descent_curve(k, E);
    REQUIRE(genus_conductor_identity(s, C));
    // the p = 2 descent bound with full torsion and geometric counts is the
    // conductor bound, restated
    REQUIRE(descent_bound(s, 2, 2 * C.genus, 0, CorrectionCount::geometric) ==
            geometric_bound(s));
}

}  // namespace

TEST_CASE("genus/conductor identity on known curves") {
    Rationals Q;
    PrimeField F5(5), F7(7);

    // rational trisection: 2*0 + 0 = deg f - 4 = 0
    check_identity_and_closure_equivalence(Q, mkmodel(Q, {}, {0, 1}));
    check_identity_and_closure_equivalence(F5, mkmodel(F5, {}, {0, -1}));

    // genus-1 trisection: 2*1 + 0 = 6 - 4
    check_identity_and_closure_equivalence(F5, mkmodel(F5, {}, {1, 0, 1}));
    check_identity_and_closure_equivalence(F5, mkmodel(F5, {}, {1, 1, 1}));
    check_identity_and_closure_equivalence(F7, mkmodel(F7, {}, {1, 0, 1}));

    // genus-4 trisection over Q: 2*4 + 0 = 12 - 4
    {
        Rationals k;
        auto E = mkmodel(k, {}, {1, 0, 0, 0, 0, 1});
        auto s = global_summary(k, E, 2);
        auto C = build_descent_curve(k, E);
        REQUIRE(C.genus == 4);
        REQUIRE(s.deg_f == 12);
        REQUIRE(genus_conductor_identity(s, C));
    }

    // assorted shapes with nonzero A over several fields
    check_identity_and_closure_equivalence(F5, mkmodel(F5, {0, 0, 2}, {1, 1, 0, 3, 2}));
    check_identity_and_closure_equivalence(F5, mkmodel(F5, {0, 1}, {1, 1, 0, 1, 3}));
    check_identity_and_closure_equivalence(F7, mkmodel(F7, {}, {1, 0, 0, 0, 0, 1}));
    check_identity_and_closure_equivalence(F7, mkmodel(F7, {0, 1}, {2, 0, 0, 1}));
    check_identity_and_closure_equivalence(Q, mkmodel(Q, {0, 1}, {2, 1}));
    check_identity_and_closure_equivalence(Q, mkmodel(Q, {1}, {0, 0, 0, 1}));
}

// ---------------------------------------------------------------------------
// Assembled report
// ---------------------------------------------------------------------------

namespace {

const BoundEntry& entry_named(const RankBoundReport<Rationals>& r,
                              const std::string& name) {
    for (auto& e : r.entries)
        if (e.name == name) return e;
    FAIL("missing entry " + name);
    throw internal_error("unreachable");
}

}  // namespace

TEST_CASE("report for the degree-12 conductor curve over Q") {
    Rationals Q;
    auto E = mkmodel(Q, {}, {1, 0, 0, 0, 0, 1});  // B = t^5 + 1

    SECTION("asserted trivial torsion collapses the best bound to zero") {
        BoundOptions opt;
        opt.torsion_dim = 0;
        opt.torsion_dim_note = "externally certified";
        auto rep = assemble_report(Q, E, opt);
        REQUIRE(rep.identity_checked);
        REQUIRE_FALSE(rep.hypothesis_violated);
        REQUIRE(entry_named(rep, "geometric").value == 8);
        auto& d = entry_named(rep, "descent");
        REQUIRE(d.applicable);
        REQUIRE(d.value == 0);
        REQUIRE_THAT(d.inputs, ContainsSubstring("externally certified"));
        REQUIRE(entry_named(rep, "hodge").value == 8);
        REQUIRE(rep.best_bound == 0);
        REQUIRE(rep.best_bound_name == "descent");
    }

    SECTION("closure mode reproduces the conductor bound") {
        BoundOptions opt;
        opt.geometric_mode = true;
        auto rep = assemble_report(Q, E, opt);
        REQUIRE(entry_named(rep, "descent").value == 8);
        REQUIRE(rep.best_bound == 8);
    }

    SECTION("no inputs: trivial torsion cap keeps the conductor value") {
        auto rep = assemble_report(Q, E);
        REQUIRE(rep.best_bound == 8);

        // adding a certified input can only improve the best bound
        BoundOptions opt;
        opt.torsion_dim = 0;
        auto rep2 = assemble_report(Q, E, opt);
        REQUIRE(rep2.best_bound <= rep.best_bound);
    }

    SECTION("asserting good reduction at 3 activates the three-adic entry") {
        BoundOptions opt;
        opt.good_reduction_at_3 = true;
        auto rep = assemble_report(Q, E, opt);
        auto& e = entry_named(rep, "three-adic");
        REQUIRE(e.applicable);
        REQUIRE_THAT(e.notes, ContainsSubstring("9.509775"));
        REQUIRE(e.value == 6);
        REQUIRE(rep.best_bound == 6);
    }
}

TEST_CASE("report flags an unconditional rank-zero curve") {
    Rationals Q;
    auto rep = assemble_report(Q, mkmodel(Q, {}, {0, 1}));  // y^2 = x^3 + t
    REQUIRE(entry_named(rep, "geometric").value == 0);
    REQUIRE(rep.best_bound == 0);
}

TEST_CASE("report handles reducible two-torsion via the fallback bound") {
    Rationals Q;
    auto E = mkmodel(Q, {0, 1}, {});  // y^2 = x^3 + t x: x = 0 kills E[2] irreducibility
    auto rep = assemble_report(Q, E);
    REQUIRE(rep.hypothesis_violated);
    REQUIRE_FALSE(rep.curve.has_value());
    REQUIRE_FALSE(rep.identity_checked);
    REQUIRE_THAT(rep.hypothesis_note, ContainsSubstring("E[2] not irreducible"));

    auto& d = entry_named(rep, "descent");
    REQUIRE_FALSE(d.applicable);
    auto& cox = entry_named(rep, "reducible-two-torsion");
    REQUIRE(cox.applicable);
    REQUIRE(cox.value == 6 * rep.summary.chi - 2);
}

TEST_CASE("report over a finite field uses the explicit formula and the dim cap") {
    PrimeField F5(5);
    EllipticSurfaceModel<PrimeField> E{Poly<PrimeField>{},
                                       mkpoly(F5, {1, 0, 1})};
    auto rep = assemble_report(F5, E);

    const BoundEntry* ef = nullptr;
    const BoundEntry* hodge = nullptr;
    for (auto& e : rep.entries) {
        if (e.name == "explicit-formula") ef = &e;
        if (e.name == "hodge") hodge = &e;
    }
    REQUIRE(ef != nullptr);
    REQUIRE(ef->applicable);
    // deg f = 6, q = 5: main term 2 / (2 log_5 6)
    REQUIRE(ef->raw == Approx(0.8982444017039273).margin(1e-9));
    REQUIRE(ef->value == 0);
    REQUIRE(hodge != nullptr);
    REQUIRE_FALSE(hodge->applicable);
    REQUIRE(rep.best_bound == 0);
    REQUIRE(rep.best_bound_name == "explicit-formula");
}
