#pragma once
// Local reduction data of y^2 = x^3 + A(t)x + B(t) at a place: Kodaira type,
// conductor exponent, Tamagawa numbers over the true residue field and over
// its algebraic closure, component counts, and the local epsilon defects.
// Residue characteristic 2 and 3 never occur here (the constant field
// excludes them), so the classification runs entirely in the tame case on
// models with a1 = a3 = 0.  Residue-field decisions (squareness, cubic
// roots) go through a pluggable ops policy so finite fields and number
// fields share one code path.

#include <string>
#include <utility>
#include <vector>

#include "ellrank/errors.hpp"
#include "ellrank/places.hpp"
#include "ellrank/residue.hpp"

namespace ellrank {

// ---------------------------------------------------------------------------
// Kodaira types and their tables
// ---------------------------------------------------------------------------

enum class KodairaClass { I, II, III, IV, Istar, IVstar, IIIstar, IIstar };

struct KodairaType {
    KodairaClass cls = KodairaClass::I;
    int n = 0;  // the index of I_n / I_n^*; 0 otherwise
};

inline bool kodaira_eq(const KodairaType& a, const KodairaType& b) {
    return a.cls == b.cls && a.n == b.n;
}

inline std::string kodaira_to_string(const KodairaType& t) {
    switch (t.cls) {
        case KodairaClass::I: return "I_" + std::to_string(t.n);
        case KodairaClass::II: return "II";
        case KodairaClass::III: return "III";
        case KodairaClass::IV: return "IV";
        case KodairaClass::Istar: return "I_" + std::to_string(t.n) + "^*";
        case KodairaClass::IVstar: return "IV^*";
        case KodairaClass::IIIstar: return "III^*";
        case KodairaClass::IIstar: return "II^*";
    }
    throw internal_error("unknown Kodaira class");
}

inline bool kodaira_good(const KodairaType& t) {
    return t.cls == KodairaClass::I && t.n == 0;
}

inline bool kodaira_multiplicative(const KodairaType& t) {
    return t.cls == KodairaClass::I && t.n >= 1;
}

inline bool kodaira_additive(const KodairaType& t) {
    return t.cls != KodairaClass::I;
}

// I_{2n}^* (n >= 0): the types whose geometric component group is (Z/2)^2.
inline bool kodaira_even_star(const KodairaType& t) {
    return t.cls == KodairaClass::Istar && t.n % 2 == 0;
}

// Number of irreducible components of the geometric fiber.
inline int kodaira_m(const KodairaType& t) {
    switch (t.cls) {
        case KodairaClass::I: return t.n == 0 ? 1 : t.n;
        case KodairaClass::II: return 1;
        case KodairaClass::III: return 2;
        case KodairaClass::IV: return 3;
        case KodairaClass::Istar: return t.n + 5;
        case KodairaClass::IVstar: return 7;
        case KodairaClass::IIIstar: return 8;
        case KodairaClass::IIstar: return 9;
    }
    throw internal_error("unknown Kodaira class");
}

// Order of the geometric component group of the Neron model.
inline int kodaira_c_geom(const KodairaType& t) {
    switch (t.cls) {
        case KodairaClass::I: return t.n == 0 ? 1 : t.n;
        case KodairaClass::II: return 1;
        case KodairaClass::III: return 2;
        case KodairaClass::IV: return 3;
        case KodairaClass::Istar: return 4;
        case KodairaClass::IVstar: return 3;
        case KodairaClass::IIIstar: return 2;
        case KodairaClass::IIstar: return 1;
    }
    throw internal_error("unknown Kodaira class");
}

// Conductor exponent (tame case).
inline int kodaira_f(const KodairaType& t) {
    if (kodaira_good(t)) return 0;
    return kodaira_multiplicative(t) ? 1 : 2;
}

// Minimal discriminant valuation.
inline int kodaira_delta(const KodairaType& t) {
    return kodaira_f(t) + kodaira_m(t) - 1;
}

// ---------------------------------------------------------------------------
// Per-place result
// ---------------------------------------------------------------------------

struct LocalReduction {
    KodairaType type;
    int f_v = 0;
    int c_v = 1;       // #components of the fiber rational over k_v
    int c_v_geom = 1;  // #components over the algebraic closure
    int m_v = 1;
    bool full_two_rational = false;  // I_{2n}^* with all four simple components rational
    int eps_arith = 0;
    int eps_geom = 0;
    int delta_min_v = 0;
    int reductions = 0;  // (u^4, u^6) rescalings applied to reach a minimal model
};

template <class K>
struct LocalReductionData : LocalReduction {
    Place<K> place;
};

// epsilon defect over the closure: 2 for I_{2n}^*, 1 when the geometric
// component count is even (and the type is not I_{2n}^*), else 0.
inline int eps_geom_of(const KodairaType& t) {
    if (kodaira_even_star(t)) return 2;
    return kodaira_c_geom(t) % 2 == 0 ? 1 : 0;
}

// Arithmetic analog with the true Tamagawa data.
inline int eps_arith_of(int c_v, bool full_two_rational) {
    if (full_two_rational) return 2;
    return c_v % 2 == 0 ? 1 : 0;
}

// dim_{F_p} of the p-torsion of the local component group over k_v.
inline int local_correction(const LocalReduction& d, int p) {
    if (p == 2) return (d.c_v % 2 == 0 ? 1 : 0) + (d.full_two_rational ? 1 : 0);
    return d.c_v % p == 0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// The classification at u = 0
// ---------------------------------------------------------------------------

namespace tatedetail {

template <class F>
int pval(const F& f, const Poly<F>& p) {
    return poly_valuation(f, p);
}

// Residue of p / u^i, valid when v(p) >= i.
template <class F>
typename F::Element res(const F& f, const Poly<F>& p, int i) {
    if (i < static_cast<int>(p.c.size())) return p.c[i];
    return f.zero();
}

// x -> x + s(u) on y^2 = x^3 + a2 x^2 + a4 x + a6.
template <class F>
void translate(const F& f, Poly<F>& a2, Poly<F>& a4, Poly<F>& a6,
               const Poly<F>& s) {
    auto s2 = poly_mul(f, s, s);
    auto s3 = poly_mul(f, s2, s);
    auto na6 = poly_add(f, a6,
                        poly_add(f, poly_mul(f, a4, s),
                                 poly_add(f, poly_mul(f, a2, s2), s3)));
    auto na4 = poly_add(
        f, a4,
        poly_add(f, poly_scale(f, f.from_int(2), poly_mul(f, a2, s)),
                 poly_scale(f, f.from_int(3), s2)));
    auto na2 = poly_add(f, a2, poly_scale(f, f.from_int(3), s));
    a2 = std::move(na2);
    a4 = std::move(na4);
    a6 = std::move(na6);
}

template <class F>
Poly<F> discriminant(const F& f, const Poly<F>& a2, const Poly<F>& a4,
                     const Poly<F>& a6) {
    auto b2 = poly_scale(f, f.from_int(4), a2);
    auto b4 = poly_scale(f, f.from_int(2), a4);
    auto b6 = poly_scale(f, f.from_int(4), a6);
    auto b8 = poly_sub(f, poly_scale(f, f.from_int(4), poly_mul(f, a2, a6)),
                       poly_mul(f, a4, a4));
    auto t1 = poly_mul(f, poly_mul(f, b2, b2), b8);
    auto t2 = poly_scale(f, f.from_int(8), poly_mul(f, poly_mul(f, b4, b4), b4));
    auto t3 = poly_scale(f, f.from_int(27), poly_mul(f, b6, b6));
    auto t4 = poly_scale(f, f.from_int(9), poly_mul(f, b2, poly_mul(f, b4, b6)));
    return poly_add(f, poly_sub(f, poly_sub(f, poly_neg(f, t1), t2), t3), t4);
}

template <class F>
Poly<F> monomial(const F& f, const typename F::Element& c, int deg) {
    Poly<F> p;
    p.c.assign(deg + 1, f.zero());
    p.c[deg] = c;
    return poly_trim(f, std::move(p));
}

}  // namespace tatedetail

// Classify the reduction of y^2 = x^3 + A(u) x + B(u) at u = 0 over the
// residue field F.  The ops policy answers squareness and cubic-root
// questions in F (and may throw undetermined_error when its certificates
// run out).
template <class F, class Ops>
LocalReduction tate_at_zero(const F& f, const Ops& ops, Poly<F> A, Poly<F> B) {
    using namespace tatedetail;
    if (A.zero() && B.zero())
        throw internal_error("singular local model (A = B = 0)");

    LocalReduction out;

    // Local minimality: x -> u^2 x, y -> u^3 y while admissible.
    while (pval(f, A) >= 4 && pval(f, B) >= 6) {
        A = poly_shift_down(f, A, 4);
        B = poly_shift_down(f, B, 6);
        ++out.reductions;
    }

    Poly<F> a2;  // zero; translations below may make it nonzero
    Poly<F> a4 = A, a6 = B;

    auto delta = discriminant(f, a2, a4, a6);
    if (delta.zero()) throw internal_error("vanishing local discriminant");
    const int vd = pval(f, delta);
    out.delta_min_v = vd;

    auto finish = [&](KodairaType t, int c, bool full) {
        out.type = t;
        out.f_v = kodaira_f(t);
        out.m_v = kodaira_m(t);
        out.c_v_geom = kodaira_c_geom(t);
        out.c_v = c;
        out.full_two_rational = full;
        out.eps_geom = eps_geom_of(t);
        out.eps_arith = eps_arith_of(c, full);
        if (kodaira_delta(t) != vd)
            throw internal_error("discriminant valuation mismatch for type " +
                                 kodaira_to_string(t));
        if (out.c_v_geom % out.c_v != 0)
            throw internal_error("Tamagawa number does not divide geometric count");
        return out;
    };

    if (vd == 0) return finish({KodairaClass::I, 0}, 1, false);

    auto a4bar = res(f, a4, 0);
    auto a6bar = res(f, a6, 0);
    if (!(f.is_zero(a4bar) && f.is_zero(a6bar))) {
        // Nodal reduction: the residual cubic x^3 + a4bar x + a6bar has a
        // double root r = -3 a6bar / (2 a4bar); the node is split when the
        // tangent slope square r - s = 3r is a square.
        auto r = f.div(f.mul(f.from_int(-3), a6bar),
                       f.mul(f.from_int(2), a4bar));
        bool split = ops.sqrt(f, f.mul(f.from_int(3), r)).has_value();
        int n = vd;
        int c = split ? n : (n % 2 == 0 ? 2 : 1);
        return finish({KodairaClass::I, n}, c, false);
    }

    // Additive reduction; the singular point is at the origin.
    if (pval(f, a6) == 1) return finish({KodairaClass::II, 0}, 1, false);
    if (pval(f, a4) == 1) return finish({KodairaClass::III, 0}, 2, false);
    if (pval(f, a6) == 2) {
        bool sq = ops.sqrt(f, res(f, a6, 2)).has_value();
        return finish({KodairaClass::IV, 0}, sq ? 3 : 1, false);
    }

    // Residual cubic of the chart x = uT: P(T) = T^3 + (a2/u) T^2 +
    // (a4/u^2) T + (a6/u^3).
    if (pval(f, a4) < 2 || pval(f, a6) < 3)
        throw internal_error("additive chain valuations out of range");
    Poly<F> P;
    P.c = {res(f, a6, 3), res(f, a4, 2), res(f, a2, 1), f.one()};
    P = poly_trim(f, std::move(P));
    auto g = poly_gcd(f, P, poly_derivative(f, P));

    if (g.deg() == 0) {
        // Separable residual cubic: I_0^*; the Tamagawa number counts the
        // rational roots.
        auto roots = ops.roots_with_mult(f, P);
        int c = 1 + static_cast<int>(roots.size());
        return finish({KodairaClass::Istar, 0}, c, c == 4);
    }

    if (g.deg() == 1) {
        // Double root: I_n^* for some n >= 1.  Move the double root to 0 and
        // walk the chain of quadratic tests.
        auto rbar = f.neg(res(f, poly_monic(f, g), 0));
        translate(f, a2, a4, a6, monomial(f, rbar, 1));
        auto A2 = res(f, a2, 1);
        if (f.is_zero(A2)) throw internal_error("I_n^* chain lost its leading term");
        int nu = -1, c = 0;
        for (int k = 1; k <= vd; ++k) {
            // Stage n = 2k-1: v(a4) >= k+2, v(a6) >= 2k+2 here.
            if (pval(f, a4) < k + 2 || pval(f, a6) < 2 * k + 2)
                throw internal_error("I_n^* chain invariant broken");
            if (pval(f, a6) == 2 * k + 2) {
                nu = 2 * k - 1;
                c = ops.sqrt(f, res(f, a6, 2 * k + 2)).has_value() ? 4 : 2;
                break;
            }
            // Stage n = 2k: far components come from A2 X^2 +
            // (a4/u^{k+2}) X + (a6/u^{2k+3}).
            auto bb = res(f, a4, k + 2);
            auto cc = res(f, a6, 2 * k + 3);
            auto disc2 = f.sub(f.mul(bb, bb),
                               f.mul(f.from_int(4), f.mul(A2, cc)));
            if (!f.is_zero(disc2)) {
                nu = 2 * k;
                c = ops.sqrt(f, disc2).has_value() ? 4 : 2;
                break;
            }
            auto r2 = f.neg(f.div(bb, f.mul(f.from_int(2), A2)));
            translate(f, a2, a4, a6, monomial(f, r2, k + 1));
        }
        if (nu < 1) throw internal_error("I_n^* chain did not terminate");
        if (nu != vd - 6)
            throw internal_error("I_n^* index disagrees with discriminant");
        return finish({KodairaClass::Istar, nu}, c, nu % 2 == 0 && c == 4);
    }

    // Triple root (necessarily at T = 0 since the cubic is depressed).
    if (g.deg() != 2) throw internal_error("degenerate residual cubic gcd");
    {
        auto gm = poly_monic(f, g);
        auto rbar = f.neg(f.div(res(f, gm, 1), f.from_int(2)));
        translate(f, a2, a4, a6, monomial(f, rbar, 1));
    }
    if (pval(f, a6) == 4) {
        bool sq = ops.sqrt(f, res(f, a6, 4)).has_value();
        return finish({KodairaClass::IVstar, 0}, sq ? 3 : 1, false);
    }
    if (pval(f, a4) == 3) return finish({KodairaClass::IIIstar, 0}, 2, false);
    if (pval(f, a6) == 5) return finish({KodairaClass::IIstar, 0}, 1, false);
    throw internal_error("non-minimal model survived local minimalization");
}

// ---------------------------------------------------------------------------
// Per-place and global entry points
// ---------------------------------------------------------------------------

template <class K>
LocalReductionData<K> tate_local(const K& k, const EllipticSurfaceModel<K>& E,
                                 const Place<K>& v) {
    auto lm = localize_at(k, E, v);
    CertifiedResidueOps ops;
    LocalReductionData<K> out;
    try {
        static_cast<LocalReduction&>(out) =
            tate_at_zero(lm.kv, ops, lm.a4, lm.a6);
    } catch (const undetermined_error& e) {
        throw undetermined_error("at place " + place_to_string(k, v) + ": " +
                                 e.what());
    }
    out.place = v;
    return out;
}

template <class K>
struct GlobalReductionSummary {
    std::vector<LocalReductionData<K>> locals;
    int delta_min_deg = 0;
    int chi = 0;
    int p_g = 0;
    int deg_f = 0;

    // Epsilon sums: the arithmetic sum counts each closed point once, the
    // geometric sum counts deg(v) geometric points per closed point.
    int eps_sum_arith = 0;
    int eps_sum_geom = 0;

    // Correction counts for the requested prime p.  "count" counts closed
    // points; "weighted" multiplies each by deg(v); "geom" re-counts over
    // the closure, where every component is rational.
    int p = 2;
    int count_p_div_c = 0;
    int count_p_div_c_weighted = 0;
    int count_full_two = 0;
    int count_full_two_weighted = 0;
    int count_p_div_c_geom_weighted = 0;
    int count_even_star_weighted = 0;
};

template <class K>
GlobalReductionSummary<K> global_summary(const K& k,
                                         const EllipticSurfaceModel<K>& E,
                                         int p = 2) {
    GlobalReductionSummary<K> s;
    s.p = p;
    for (auto& v : bad_places(k, E)) s.locals.push_back(tate_local(k, E, v));

    int m_excess = 0;
    for (auto& d : s.locals) {
        int deg = d.place.degree();
        if (d.delta_min_v <= 0)
            throw internal_error("bad place with trivial minimal discriminant");
        s.delta_min_deg += deg * d.delta_min_v;
        s.deg_f += deg * d.f_v;
        m_excess += deg * (d.m_v - 1);
        s.eps_sum_arith += d.eps_arith;
        s.eps_sum_geom += deg * d.eps_geom;
        if (d.c_v % p == 0) {
            ++s.count_p_div_c;
            s.count_p_div_c_weighted += deg;
        }
        if (d.full_two_rational) {
            ++s.count_full_two;
            s.count_full_two_weighted += deg;
        }
        if (kodaira_c_geom(d.type) % p == 0) s.count_p_div_c_geom_weighted += deg;
        if (kodaira_even_star(d.type)) s.count_even_star_weighted += deg;
    }

    if (s.delta_min_deg % 12 != 0)
        throw internal_error("total minimal discriminant degree not divisible by 12");
    s.chi = s.delta_min_deg / 12;
    if (s.chi == 0)
        throw hypothesis_error(
            "constant surface: every fiber is smooth after minimalization");
    s.p_g = s.chi - 1;
    if (s.deg_f + m_excess != 12 * s.chi)
        throw internal_error("conductor/component identity failed");
    if (s.deg_f < 2 * s.chi + 2 || s.deg_f > 12 * s.chi)
        throw internal_error("conductor degree outside its structural range");
    return s;
}

}  // namespace ellrank
