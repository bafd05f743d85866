#pragma once
// Places of the rational function field k(t) (the projective line over the
// constant field k): finite places are monic irreducible polynomials pi(t),
// plus one distinguished infinite place.  This header provides the surface
// model y^2 = x^3 + A(t) x + B(t), enumeration of its bad places, valuations
// of rational functions at places, and localization of the model at a place
// (residue-field construction plus rewriting A, B in the local uniformizer).

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "ellrank/errors.hpp"
#include "ellrank/extension.hpp"
#include "ellrank/factor.hpp"
#include "ellrank/poly.hpp"

namespace ellrank {

// ---------------------------------------------------------------------------
// Place of k(t)
// ---------------------------------------------------------------------------

template <class K>
struct Place {
    bool infinite = false;
    Poly<K> pi;  // monic irreducible defining polynomial; empty when infinite

    int degree() const { return infinite ? 1 : pi.deg(); }
};

template <class K>
Place<K> make_finite_place(const K& k, Poly<K> pi) {
    if (pi.deg() < 1) throw internal_error("finite place needs deg >= 1");
    Place<K> v;
    v.infinite = false;
    v.pi = poly_monic(k, std::move(pi));
    return v;
}

template <class K>
Place<K> make_infinite_place(const K&) {
    Place<K> v;
    v.infinite = true;
    return v;
}

template <class K>
bool place_eq(const K& k, const Place<K>& a, const Place<K>& b) {
    if (a.infinite != b.infinite) return false;
    if (a.infinite) return true;
    return poly_eq(k, a.pi, b.pi);
}

// Total order: finite places by (degree, lexicographic coefficients), the
// infinite place last.  Gives deterministic place lists everywhere.
template <class K>
int place_cmp(const K& k, const Place<K>& a, const Place<K>& b) {
    if (a.infinite != b.infinite) return a.infinite ? 1 : -1;
    if (a.infinite) return 0;
    if (a.pi.deg() != b.pi.deg()) return a.pi.deg() < b.pi.deg() ? -1 : 1;
    for (int i = a.pi.deg(); i >= 0; --i) {
        int c = k.cmp(a.pi.c[i], b.pi.c[i]);
        if (c != 0) return c;
    }
    return 0;
}

template <class K>
std::string place_to_string(const K& k, const Place<K>& v) {
    if (v.infinite) return "infinity";
    return poly_to_string(k, v.pi, "t");
}

// ---------------------------------------------------------------------------
// Surface model y^2 = x^3 + A(t) x + B(t)
// ---------------------------------------------------------------------------

template <class K>
struct EllipticSurfaceModel {
    Poly<K> A;
    Poly<K> B;
};

template <class K>
Poly<K> model_discriminant(const K& k, const EllipticSurfaceModel<K>& E) {
    // -16 (4 A^3 + 27 B^2)
    auto a3 = poly_mul(k, E.A, poly_mul(k, E.A, E.A));
    auto b2 = poly_mul(k, E.B, E.B);
    auto s = poly_add(k, poly_scale(k, k.from_int(4), a3),
                      poly_scale(k, k.from_int(27), b2));
    return poly_scale(k, k.from_int(-16), s);
}

// Rejects singular models.  Constant (chi = 0) models are rejected later,
// once local minimal discriminants are known.
template <class K>
void validate_model(const K& k, const EllipticSurfaceModel<K>& E) {
    if (model_discriminant(k, E).zero())
        throw hypothesis_error(
            "singular model: 4A^3 + 27B^2 vanishes identically");
}

// ---------------------------------------------------------------------------
// Valuations
// ---------------------------------------------------------------------------

// Valuation of a nonzero polynomial at a place: multiplicity of pi at finite
// places, -deg at infinity.  The zero polynomial returns kValInfinity.
template <class K>
int place_valuation(const K& k, const Poly<K>& f, const Place<K>& v) {
    if (f.zero()) return kValInfinity;
    if (v.infinite) return -f.deg();
    return poly_multiplicity(k, f, v.pi);
}

// Valuation of the rational function num/den.
template <class K>
int place_valuation(const K& k, const Poly<K>& num, const Poly<K>& den,
                    const Place<K>& v) {
    if (den.zero()) throw internal_error("valuation of fraction with zero denominator");
    if (num.zero()) return kValInfinity;
    return place_valuation(k, num, v) - place_valuation(k, den, v);
}

// dim_{F_p} Pic(S)[p] for the base S = P^1: Pic is infinite cyclic, so the
// torsion part vanishes for every p.
inline int dim_pic_base_torsion(int /*p*/) { return 0; }

// ---------------------------------------------------------------------------
// The model at infinity
// ---------------------------------------------------------------------------

// Substituting t = 1/s, x = X/s^(2h), y = Y/s^(3h) turns the model into
// Y^2 = X^3 + s^(4h) A(1/s) X + s^(6h) B(1/s); the smallest h that clears
// denominators is max(ceil(deg A / 4), ceil(deg B / 6)).
template <class K>
int infinity_twist_height(const K&, const EllipticSurfaceModel<K>& E) {
    int h = 0;
    if (!E.A.zero()) h = std::max(h, (E.A.deg() + 3) / 4);
    if (!E.B.zero()) h = std::max(h, (E.B.deg() + 5) / 6);
    return h;
}

template <class K>
EllipticSurfaceModel<K> model_at_infinity(const K& k,
                                          const EllipticSurfaceModel<K>& E) {
    int h = infinity_twist_height(k, E);
    EllipticSurfaceModel<K> r;
    r.A = E.A.zero() ? E.A : poly_reverse_pad(k, E.A, 4 * h);
    r.B = E.B.zero() ? E.B : poly_reverse_pad(k, E.B, 6 * h);
    return r;
}

// ---------------------------------------------------------------------------
// Bad-place enumeration
// ---------------------------------------------------------------------------

namespace pldetail {

// Minimal discriminant valuation at a place given the valuations of A, B and
// Delta there: each substitution x -> u^2 x, y -> u^3 y divides (A, B, Delta)
// by (u^4, u^6, u^12) and is admissible while v(A) >= 4 and v(B) >= 6.
inline int minimal_delta_valuation(int vA, int vB, int vDelta) {
    while (vA >= 4 && vB >= 6) {
        if (vA < kValInfinity) vA -= 4;
        if (vB < kValInfinity) vB -= 6;
        vDelta -= 12;
    }
    if (vDelta < 0) throw internal_error("negative minimal discriminant valuation");
    return vDelta;
}

}  // namespace pldetail

// All places where the locally minimal model has positive discriminant
// valuation.  Finite places are found by factoring the discriminant; the
// infinite place is included when the rewritten model at infinity is bad.
// Sorted by place_cmp (so the infinite place, when present, is last).
template <class K>
std::vector<Place<K>> bad_places(const K& k, const EllipticSurfaceModel<K>& E) {
    validate_model(k, E);
    std::vector<Place<K>> out;

    auto delta = model_discriminant(k, E);
    auto fl = factor_univariate(k, delta);
    for (auto& [pi, mult] : fl.factors) {
        auto v = make_finite_place(k, pi);
        int vA = place_valuation(k, E.A, v);
        int vB = place_valuation(k, E.B, v);
        if (pldetail::minimal_delta_valuation(vA, vB, mult) > 0) out.push_back(v);
    }

    auto Einf = model_at_infinity(k, E);
    auto dinf = model_discriminant(k, Einf);
    int vD = poly_valuation(k, dinf);
    if (vD > 0) {
        int vA = Einf.A.zero() ? kValInfinity : poly_valuation(k, Einf.A);
        int vB = Einf.B.zero() ? kValInfinity : poly_valuation(k, Einf.B);
        if (pldetail::minimal_delta_valuation(vA, vB, vD) > 0)
            out.push_back(make_infinite_place(k));
    }

    std::sort(out.begin(), out.end(), [&](const Place<K>& a, const Place<K>& b) {
        return place_cmp(k, a, b) < 0;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Localization at a place
// ---------------------------------------------------------------------------

// The model rewritten over the residue field k_v = k[y]/(pi(y)) in terms of a
// local uniformizer u: at a finite place, t = ybar + u (ybar the residue of
// t); at infinity, u = s = 1/t after the height twist.  Either way the model
// reads y^2 = x^3 + a4(u) x + a6(u) with a4, a6 in k_v[u] and the place at
// u = 0.
template <class K>
struct LocalizedModel {
    ExtensionField<K> kv;
    Poly<ExtensionField<K>> a4;
    Poly<ExtensionField<K>> a6;
};

namespace pldetail {

template <class K>
Poly<ExtensionField<K>> embed_poly(const ExtensionField<K>& kv,
                                   const Poly<K>& p) {
    Poly<ExtensionField<K>> r;
    r.c.reserve(p.c.size());
    for (auto& c : p.c) r.c.push_back(kv.embed(c));
    return poly_trim(kv, std::move(r));
}

}  // namespace pldetail

template <class K>
LocalizedModel<K> localize_at(const K& k, const EllipticSurfaceModel<K>& E,
                              const Place<K>& v) {
    LocalizedModel<K> lm;
    if (v.infinite) {
        // Residue field is k itself, wrapped as the degree-1 extension
        // k[y]/(y) so every place presents the same field interface.
        Poly<K> lin;
        lin.c = {k.zero(), k.one()};
        lm.kv = ExtensionField<K>(k, lin);
        auto Einf = model_at_infinity(k, E);
        lm.a4 = pldetail::embed_poly(lm.kv, Einf.A);
        lm.a6 = pldetail::embed_poly(lm.kv, Einf.B);
        return lm;
    }
    lm.kv = ExtensionField<K>(k, v.pi);
    auto tbar = lm.kv.gen();
    lm.a4 = poly_taylor_shift(lm.kv, pldetail::embed_poly(lm.kv, E.A), tbar);
    lm.a6 = poly_taylor_shift(lm.kv, pldetail::embed_poly(lm.kv, E.B), tbar);
    return lm;
}

}  // namespace ellrank
