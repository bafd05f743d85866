#pragma once
// Trisection curve attached to a nonconstant elliptic surface
// y^2 = x^3 + A(t) x + B(t): the curve C cut out by y = 0, i.e.
// x^3 + A(t) x + B(t) = 0, carrying the halving data of the generic fiber.
//
// C is represented by its function field k(t)[x]/(x^3 + A x + B); geometric
// quantities come from places and local factorizations, never from an
// embedded plane model.  Geometric integrality of C is certified before any
// genus computation, and the ramification of C over the t-line is computed
// two independent ways (component-table prediction vs. Newton/Hensel
// factorization) as a permanent cross-check.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ellrank/errors.hpp"
#include "ellrank/extension.hpp"
#include "ellrank/factor.hpp"
#include "ellrank/localfield.hpp"
#include "ellrank/numeric.hpp"
#include "ellrank/places.hpp"
#include "ellrank/poly.hpp"
#include "ellrank/residue.hpp"
#include "ellrank/tate.hpp"

namespace ellrank {

// --------------------------------------------------------------------------
// Fiberwise 2-torsion count and ramification table.
//
// Over a closed point v of bad reduction, the number of 2-torsion points in
// the special fiber's smooth part determines how the three roots of
// x^3 + A x + B collide: 4 remaining torsion points leave v unramified in C,
// 2 leave one simple branch point, 1 forces a total collision.
// --------------------------------------------------------------------------

inline int kodaira_two_torsion_count(const KodairaType& t) {
    switch (t.cls) {
        case KodairaClass::I:
            return (t.n % 2 == 0) ? 4 : 2;
        case KodairaClass::Istar:
            return (t.n % 2 == 0) ? 4 : 2;
        case KodairaClass::III:
        case KodairaClass::IIIstar:
            return 2;
        case KodairaClass::II:
        case KodairaClass::IIstar:
        case KodairaClass::IV:
        case KodairaClass::IVstar:
            return 1;
    }
    throw internal_error("unknown reduction type");
}

// deg(R_v) per closed point: 0, 1, or 2 according to 4, 2, or 1 surviving
// 2-torsion points.
inline int kodaira_ramification_degree(const KodairaType& t) {
    switch (kodaira_two_torsion_count(t)) {
        case 4: return 0;
        case 2: return 1;
        case 1: return 2;
    }
    throw internal_error("unknown reduction type");
}

namespace dcdetail {

// Distinct roots of a polynomial over K (finite field or the rationals).
template <class K>
std::vector<typename K::Element> poly_roots_any(const K& k, const Poly<K>& f) {
    if (f.zero()) throw internal_error("roots of the zero polynomial requested");
    if constexpr (K::is_char_zero) {
        std::vector<typename K::Element> out;
        auto fl = factor_univariate(k, f);
        for (auto& [g, m] : fl.factors) {
            (void)m;
            if (g.deg() == 1) out.push_back(k.neg(poly_coeff(k, g, 0)));
        }
        return out;
    } else {
        return poly_roots_finite(k, f);
    }
}

template <class K>
Poly<K> lagrange_interpolate(const K& k,
                             const std::vector<typename K::Element>& xs,
                             const std::vector<typename K::Element>& ys) {
    Poly<K> acc;
    for (size_t i = 0; i < xs.size(); ++i) {
        Poly<K> basis = poly_one(k);
        auto denom = k.one();
        for (size_t j = 0; j < xs.size(); ++j) {
            if (j == i) continue;
            Poly<K> lin;
            lin.c = {k.neg(xs[j]), k.one()};
            basis = poly_mul(k, basis, lin);
            denom = k.mul(denom, k.sub(xs[i], xs[j]));
        }
        basis = poly_scale(k, k.mul(ys[i], k.inv(denom)), basis);
        acc = poly_add(k, acc, basis);
    }
    return acc;
}

}  // namespace dcdetail

// --------------------------------------------------------------------------
// Root of x^3 + A x + B in k(t), if one exists.
//
// The cubic is monic with coefficients in k[t], so any root in k(t) is
// integral over k[t] and hence a polynomial r(t).  Its degree d obeys
// 3d <= max(deg A + d, deg B): otherwise the leading coefficient of r^3
// cannot cancel.  The root is pinned down by its values at d+1 sample
// points, each of which must be a root of the specialized cubic; every
// combination of specialized roots is interpolated and verified exactly.
// --------------------------------------------------------------------------

template <class K>
std::optional<Poly<K>> cubic_function_field_root(const K& k, const Poly<K>& A,
                                                const Poly<K>& B) {
    int bound = 0;
    if (!A.zero()) bound = std::max(bound, A.deg() / 2);
    if (!B.zero()) bound = std::max(bound, B.deg() / 3);
    int npts = bound + 1;

    std::vector<typename K::Element> xs;
    if constexpr (K::is_char_zero) {
        for (int i = 0; i < npts; ++i) xs.push_back(k.from_int(i));
    } else {
        if (k.cardinality() < npts)
            throw capability_error(
                "function-field root search needs more sample points than the "
                "constant field has elements");
        for (int i = 0; i < npts; ++i) xs.push_back(k.element_by_index(i));
    }

    std::vector<std::vector<typename K::Element>> choices;
    long combos = 1;
    for (auto& x0 : xs) {
        Poly<K> sp;
        sp.c = {poly_eval(k, B, x0), poly_eval(k, A, x0), k.zero(), k.one()};
        auto rts = dcdetail::poly_roots_any(k, sp);
        if (rts.empty()) return std::nullopt;
        combos *= static_cast<long>(rts.size());
        if (combos > 200000)
            throw capability_error(
                "function-field root search: too many specialization "
                "combinations (input degrees too large)");
        choices.push_back(std::move(rts));
    }

    std::vector<size_t> idx(choices.size(), 0);
    while (true) {
        std::vector<typename K::Element> ys;
        ys.reserve(choices.size());
        for (size_t i = 0; i < choices.size(); ++i) ys.push_back(choices[i][idx[i]]);
        Poly<K> r = dcdetail::lagrange_interpolate(k, xs, ys);
        Poly<K> lhs = poly_add(k, poly_mul(k, poly_mul(k, r, r), r),
                               poly_add(k, poly_mul(k, A, r), B));
        if (lhs.zero()) return r;
        size_t i = 0;
        while (i < idx.size() && ++idx[i] == choices[i].size()) {
            idx[i] = 0;
            ++i;
        }
        if (i == idx.size()) return std::nullopt;
    }
}

namespace dcdetail {

// Root search for the same cubic after extending the constant field by an
// irreducible modulus of the given degree (finite base fields only).
template <class K>
std::optional<Poly<ExtensionField<K>>> constant_extension_root(
    const K& k, const Poly<K>& A, const Poly<K>& B, int ext_deg) {
    ExtensionField<K> ke(k, find_irreducible(k, ext_deg));
    return cubic_function_field_root(ke, pldetail::embed_poly(ke, A),
                                     pldetail::embed_poly(ke, B));
}

inline Int rational_poly_denominator_lcm(const Poly<Rationals>& p) {
    Int l = 1;
    for (auto& c : p.c) {
        Int d = c.get_den();
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
    }
    return l;
}

inline Poly<PrimeField> reduce_poly_mod(const Rationals& Q, const PrimeField& F,
                                        const Poly<Rationals>& p) {
    (void)Q;
    Poly<PrimeField> r;
    for (auto& c : p.c) {
        if (c.get_den() != 1)
            throw internal_error("reduction of a non-integral coefficient");
        r.c.push_back(F.from_mpz(c.get_num()));
    }
    return poly_trim(F, std::move(r));
}

}  // namespace dcdetail

// --------------------------------------------------------------------------
// Geometric integrality certificate.
//
// C is geometrically integral iff the cubic x^3 + A x + B has no root over
// kbar(t).  Any such root has coefficients in a constant extension of degree
// dividing 3 (the Frobenius orbit of a root consists of roots), so over a
// finite field it suffices to search for roots over the constant extensions
// of degrees 2 and 3.  Over the rationals, the cubic is scaled integral and
// reduced modulo small primes l not in {2, 3}: a factorization over Qbar(t)
// has coefficients integral over Z[t] and therefore survives reduction, so a
// geometrically irreducible reduction certifies geometric irreducibility in
// characteristic zero.
//
// Throws hypothesis_error when the cubic is provably geometrically reducible
// and undetermined_error when (over Q) every tried reduction is reducible
// but no k(t)-root exists.
// --------------------------------------------------------------------------

template <class K>
std::string geometric_integrality_certificate(const K& k,
                                              const EllipticSurfaceModel<K>& E) {
    static const std::string kViolated =
        "hypothesis of Theorem 1.1 violated: E[2] not irreducible over "
        "k̄(t)";

    if (auto r = cubic_function_field_root(k, E.A, E.B))
        throw hypothesis_error(kViolated + ": the cubic x^3 + A x + B has the "
                               "root x = " +
                               poly_to_string(k, *r, "t") + " over k(t)");

    if constexpr (!K::is_char_zero) {
        Int q = k.cardinality();
        for (int d : {2, 3}) {
            if (auto r = dcdetail::constant_extension_root(k, E.A, E.B, d)) {
                (void)r;
                throw hypothesis_error(
                    kViolated + ": the cubic acquires a root over the constant "
                    "extension of degree " + std::to_string(d));
            }
        }
        return "geometrically integral: x^3 + A x + B has no root over the "
               "constant extensions of degrees 2 and 3 of the field with " +
               q.get_str() + " elements";
    } else {
        Int lam = 1;
        {
            Int la = dcdetail::rational_poly_denominator_lcm(E.A);
            Int lb = dcdetail::rational_poly_denominator_lcm(E.B);
            mpz_lcm(lam.get_mpz_t(), lam.get_mpz_t(), la.get_mpz_t());
            mpz_lcm(lam.get_mpz_t(), lam.get_mpz_t(), lb.get_mpz_t());
        }
        // x -> x / lam^2, y -> y / lam^3 rescales to integral coefficients
        // without changing reducibility.
        Rat l2(lam * lam), l4 = l2 * l2, l6 = l4 * l2;
        Poly<Rationals> Ai = poly_scale(k, l4, E.A);
        Poly<Rationals> Bi = poly_scale(k, l6, E.B);

        std::vector<unsigned long> tried;
        Int ell = 3;
        for (int attempt = 0; attempt < 15; ++attempt) {
            ell = next_prime_above(ell);
            PrimeField F(ell.get_ui());
            tried.push_back(ell.get_ui());
            Poly<PrimeField> Ar = dcdetail::reduce_poly_mod(k, F, Ai);
            Poly<PrimeField> Br = dcdetail::reduce_poly_mod(k, F, Bi);
            if (cubic_function_field_root(F, Ar, Br)) continue;
            bool ext_root = false;
            for (int d : {2, 3})
                if (dcdetail::constant_extension_root(F, Ar, Br, d)) {
                    ext_root = true;
                    break;
                }
            if (ext_root) continue;
            return "geometrically integral: the reduction modulo " +
                   ell.get_str() +
                   " of x^3 + A x + B has no root over the constant "
                   "extensions of degrees 2 and 3";
        }
        std::string list;
        for (size_t i = 0; i < tried.size(); ++i)
            list += (i ? ", " : "") + std::to_string(tried[i]);
        throw undetermined_error(
            "geometric integrality undetermined: x^3 + A x + B has no k(t) "
            "root, yet its reduction is reducible modulo every tried prime (" +
            list + ")");
    }
}

// --------------------------------------------------------------------------
// Ramification of C over the t-line, computed two independent ways.
//
// Way 1 reads deg(R_v) off the reduction type at each bad place.  Way 2
// factors the localized cubic x^3 + a4(u) x + a6(u) over k_v((u)) and sums
// (e_i - 1) f_i over the branches.  The two must agree, and both must equal
// f_v - eps_v^geom; any mismatch is an internal-consistency failure.
// --------------------------------------------------------------------------

template <class K>
int newton_ramification_degree(const K& k, const EllipticSurfaceModel<K>& E,
                               const Place<K>& v) {
    auto lm = localize_at(k, E, v);
    CertifiedResidueOps ops;
    Series<ExtensionField<K>> zero{};
    RamProfile prof;
    try {
        prof = local_factor_cubic(lm.kv, ops, zero,
                                  ser_from_poly(lm.kv, lm.a4),
                                  ser_from_poly(lm.kv, lm.a6));
    } catch (const undetermined_error& e) {
        throw undetermined_error("at place " + place_to_string(k, v) + ": " +
                                 e.what());
    }
    int total = 0, ram = 0;
    for (auto& [e, f] : prof) {
        total += e * f;
        ram += (e - 1) * f;
    }
    if (total != 3)
        throw internal_error("local factorization of the cubic does not have "
                             "total degree 3");
    return ram;
}

template <class K>
std::vector<std::pair<Place<K>, int>> ramification_profile(
    const K& k, const EllipticSurfaceModel<K>& E,
    const GlobalReductionSummary<K>& s) {
    std::vector<std::pair<Place<K>, int>> out;
    for (auto& d : s.locals) {
        int table = kodaira_ramification_degree(d.type);
        int newton = newton_ramification_degree(k, E, d.place);
        if (table != newton)
            throw internal_error(
                "ramification mismatch at place " + place_to_string(k, d.place) +
                ": component table predicts " + std::to_string(table) +
                ", Newton factorization gives " + std::to_string(newton));
        if (table != d.f_v - d.eps_geom)
            throw internal_error(
                "ramification at place " + place_to_string(k, d.place) +
                " does not equal f_v - eps_v^geom");
        out.emplace_back(d.place, table);
    }
    return out;
}

// --------------------------------------------------------------------------
// The trisection curve C with its certificate, ramification and genus.
// --------------------------------------------------------------------------

template <class K>
struct DescentCurveData {
    EllipticSurfaceModel<K> model;  // C : x^3 + A(t) x + B(t) = 0
    std::string integrality_certificate;
    std::vector<std::pair<Place<K>, int>> ram_degrees;  // per closed point
    int deg_R = 0;  // degree-weighted total
    int genus = 0;
};

template <class K>
std::string descent_cubic_to_string(const K& k, const DescentCurveData<K>& C) {
    return "x^3 + (" + poly_to_string(k, C.model.A, "t") + ")*x + (" +
           poly_to_string(k, C.model.B, "t") + ")";
}

template <class K>
DescentCurveData<K> build_descent_curve(const K& k,
                                        const EllipticSurfaceModel<K>& E,
                                        const GlobalReductionSummary<K>& s) {
    DescentCurveData<K> C;
    C.model = E;
    C.integrality_certificate = geometric_integrality_certificate(k, E);
    C.ram_degrees = ramification_profile(k, E, s);
    C.deg_R = 0;
    for (auto& [v, r] : C.ram_degrees) C.deg_R += v.degree() * r;
    if (C.deg_R != s.deg_f - s.eps_sum_geom)
        throw internal_error("total ramification degree does not match the "
                             "conductor/epsilon identity");
    if (C.deg_R % 2 != 0)
        throw internal_error("total ramification degree is odd");
    // Riemann-Hurwitz for the degree-3 map C -> P^1 (genus 0 base):
    // 2 g(C) - 2 = 3 (2*0 - 2) + deg R.
    if (C.deg_R < 4)
        throw internal_error("certified integral curve with negative genus");
    C.genus = (C.deg_R - 4) / 2;
    return C;
}

template <class K>
DescentCurveData<K> build_descent_curve(const K& k,
                                        const EllipticSurfaceModel<K>& E) {
    return build_descent_curve(k, E, global_summary(k, E));
}

}  // namespace ellrank
