#pragma once

// Certified squareness tests and root finding for polynomials of degree <= 3
// over the residue fields that occur in this library: finite fields (exact
// algorithms), the rationals (exact arithmetic), and number fields Q[y]/(pi)
// (certificate-based lift-and-verify).  Every positive answer carries an
// exact witness that is re-verified; every negative answer rests on a sound
// modular certificate.  When neither is found within budget the functions
// throw undetermined_error rather than guess.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ellrank/errors.hpp"
#include "ellrank/extension.hpp"
#include "ellrank/factor.hpp"
#include "ellrank/numeric.hpp"
#include "ellrank/poly.hpp"

namespace ellrank {

using NumberField = ExtensionField<Rationals>;

// --------------------------------------------------------------------------
// Exact rational squareness.
// --------------------------------------------------------------------------

inline std::optional<Rat> rat_sqrt(const Rat& a) {
    if (a == 0) return Rat(0);
    if (a < 0) return std::nullopt;
    Int num = a.get_num(), den = a.get_den();
    Int rn, rd;
    if (!is_perfect_square(num, &rn) || !is_perfect_square(den, &rd))
        return std::nullopt;
    Rat r(rn, rd);
    r.canonicalize();
    return r;
}

// --------------------------------------------------------------------------
// Result of a certified squareness test.
// --------------------------------------------------------------------------

template <class K>
struct SquarenessResult {
    bool is_square = false;
    std::optional<typename K::Element> witness;  // s with s^2 = a when square
    std::string certificate;                     // human-readable evidence
};

namespace rdetail {

inline constexpr int kPrimeBudget = 25;
inline constexpr int kLiftDoublings = 9;    // moduli up to ell^(2^9)
inline constexpr size_t kComboCap = 1024;

// Modular image of a number field at a good prime ell: pi mod ell must be
// defined (no denominator divisible by ell) and squarefree.
struct NfImage {
    unsigned long ell = 0;
    PrimeField Fl;
    Poly<PrimeField> pibar;
    std::vector<Poly<PrimeField>> hs;                   // irreducible factors
    std::vector<ExtensionField<PrimeField>> comps;      // residue fields
};

inline std::optional<std::uint64_t> rat_mod(const PrimeField& Fl, const Rat& a) {
    Int den = a.get_den();
    if (mpz_divisible_ui_p(den.get_mpz_t(), Fl.characteristic())) return std::nullopt;
    auto n = Fl.from_mpz(a.get_num());
    auto d = Fl.from_mpz(den);
    return Fl.div(n, d);
}

inline std::optional<Poly<PrimeField>> rat_poly_mod(const PrimeField& Fl,
                                                    const Poly<Rationals>& p) {
    Poly<PrimeField> r;
    for (const auto& c : p.c) {
        auto m = rat_mod(Fl, c);
        if (!m) return std::nullopt;
        r.c.push_back(*m);
    }
    return poly_trim(Fl, std::move(r));
}

inline std::optional<NfImage> make_image(const NumberField& nf, unsigned long ell) {
    NfImage im;
    im.ell = ell;
    im.Fl = PrimeField(ell);
    auto pb = rat_poly_mod(im.Fl, nf.modulus());
    if (!pb) return std::nullopt;
    im.pibar = *pb;
    if (im.pibar.deg() != nf.degree()) return std::nullopt;
    auto g = poly_gcd(im.Fl, im.pibar, poly_derivative(im.Fl, im.pibar));
    if (g.deg() != 0) return std::nullopt;  // not squarefree mod ell
    auto fl = factor_finite(im.Fl, im.pibar);
    for (auto& [h, m] : fl.factors) {
        if (m != 1) return std::nullopt;
        im.hs.push_back(h);
        im.comps.emplace_back(im.Fl, h, "y");
    }
    return im;
}

// Image of a number-field element as a polynomial mod (ell, pibar).
inline std::optional<Poly<PrimeField>> nf_elem_mod(const NfImage& im,
                                                   const NumberField& nf,
                                                   const NumberField::Element& a) {
    return rat_poly_mod(im.Fl, nf.lift(a));
}

// CRT for polynomial moduli over a prime field: r = ri mod hi.
inline Poly<PrimeField> poly_crt(const PrimeField& Fl,
                                 const std::vector<Poly<PrimeField>>& hs,
                                 const std::vector<Poly<PrimeField>>& rs) {
    Poly<PrimeField> r = rs[0];
    Poly<PrimeField> M = hs[0];
    for (size_t i = 1; i < hs.size(); ++i) {
        auto bez = poly_xgcd(Fl, M, hs[i]);
        if (bez[0].deg() != 0) throw internal_error("poly_crt: moduli not coprime");
        auto Minv = poly_scale(Fl, Fl.inv(bez[0].c[0]), bez[1]);  // M^-1 mod hs[i]
        auto diff = poly_rem(Fl, poly_sub(Fl, rs[i], r), hs[i]);
        auto s = poly_rem(Fl, poly_mul(Fl, diff, Minv), hs[i]);
        r = poly_add(Fl, r, poly_mul(Fl, M, s));
        M = poly_mul(Fl, M, hs[i]);
    }
    return poly_rem(Fl, r, M);
}

// Arithmetic in (Z/m)[y]/(pibar_m).
struct ZmodNf {
    ZmodRing R;
    Poly<ZmodRing> pibar;

    Poly<ZmodRing> red(const Poly<ZmodRing>& a) const {
        return poly_rem(R, a, pibar);
    }
    Poly<ZmodRing> mul(const Poly<ZmodRing>& a, const Poly<ZmodRing>& b) const {
        return red(poly_mul(R, a, b));
    }
    Poly<ZmodRing> sub(const Poly<ZmodRing>& a, const Poly<ZmodRing>& b) const {
        return poly_sub(R, a, b);
    }
};

inline std::optional<Poly<ZmodRing>> rat_poly_modring(const ZmodRing& R,
                                                      const Poly<Rationals>& p) {
    Poly<ZmodRing> r;
    for (const auto& c : p.c) {
        Int den = c.get_den();
        Int g;
        mpz_gcd(g.get_mpz_t(), den.get_mpz_t(), R.modulus().get_mpz_t());
        if (g != 1) return std::nullopt;
        r.c.push_back(R.mul(R.reduce(c.get_num()), R.inv(R.reduce(den))));
    }
    return poly_trim(R, std::move(r));
}

// Evaluate a monic polynomial F (coefficients in the number field) at a
// residue element, inside (Z/m)[y]/(pibar).
inline Poly<ZmodRing> eval_nfpoly(const ZmodNf& zn,
                                  const std::vector<Poly<ZmodRing>>& fcoef,
                                  const Poly<ZmodRing>& x) {
    Poly<ZmodRing> acc;
    for (int i = static_cast<int>(fcoef.size()) - 1; i >= 0; --i) {
        acc = zn.mul(acc, x);
        acc = zn.red(poly_add(zn.R, acc, fcoef[i]));
    }
    return acc;
}

inline Poly<PrimeField> to_prime_poly(const PrimeField& Fl, const Poly<ZmodRing>& a) {
    Poly<PrimeField> r;
    for (const auto& c : a.c) r.c.push_back(Fl.from_mpz(c));
    return poly_trim(Fl, std::move(r));
}

inline Poly<ZmodRing> from_prime_poly(const ZmodRing& R, const Poly<PrimeField>& a) {
    Poly<ZmodRing> r;
    for (const auto& c : a.c) r.c.push_back(R.reduce(Int(static_cast<unsigned long>(c))));
    return poly_trim(R, std::move(r));
}

// Newton-lift a residue root r0 of the monic polynomial F over the number
// field, attempting rational reconstruction at each precision; returns the
// first lifted candidate accepted by `verify`.
template <class Verify>
std::optional<NumberField::Element> lift_root(const NumberField& nf,
                                              const std::vector<NumberField::Element>& F,
                                              const NfImage& im,
                                              const Poly<PrimeField>& r0,
                                              Verify&& verify) {
    const int d = nf.degree();
    // derivative coefficients over nf
    std::vector<NumberField::Element> dF;
    for (size_t i = 1; i < F.size(); ++i)
        dF.push_back(nf.mul(nf.from_int(static_cast<long>(i)), F[i]));

    // initial inverse of F'(r0) modulo (ell, pibar)
    Int m(im.ell);
    ZmodNf zn{ZmodRing(m), Poly<ZmodRing>{}};
    auto pb = rat_poly_modring(zn.R, nf.modulus());
    if (!pb) return std::nullopt;
    zn.pibar = *pb;
    auto to_ring_coeffs = [&](const ZmodNf& z,
                              const std::vector<NumberField::Element>& cs)
        -> std::optional<std::vector<Poly<ZmodRing>>> {
        std::vector<Poly<ZmodRing>> out;
        for (const auto& c : cs) {
            auto p = rat_poly_modring(z.R, nf.lift(c));
            if (!p) return std::nullopt;
            out.push_back(z.red(*p));
        }
        return out;
    };
    auto fc = to_ring_coeffs(zn, F);
    auto dfc = to_ring_coeffs(zn, dF);
    if (!fc || !dfc) return std::nullopt;

    Poly<ZmodRing> r = from_prime_poly(zn.R, r0);
    // t = 1/F'(r0) mod (ell, pibar) via xgcd over the prime field
    auto dval = to_prime_poly(im.Fl, eval_nfpoly(zn, *dfc, r));
    auto bez = poly_xgcd(im.Fl, dval, im.pibar);
    if (bez[0].deg() != 0) return std::nullopt;  // derivative not a unit
    auto tprime = poly_scale(im.Fl, im.Fl.inv(bez[0].c[0]), bez[1]);
    Poly<ZmodRing> t = from_prime_poly(zn.R, poly_rem(im.Fl, tprime, im.pibar));

    for (int step = 0; step < kLiftDoublings; ++step) {
        Int m2 = m * m;
        ZmodNf z2{ZmodRing(m2), Poly<ZmodRing>{}};
        auto pb2 = rat_poly_modring(z2.R, nf.modulus());
        if (!pb2) return std::nullopt;
        z2.pibar = *pb2;
        auto fc2 = to_ring_coeffs(z2, F);
        auto dfc2 = to_ring_coeffs(z2, dF);
        if (!fc2 || !dfc2) return std::nullopt;
        // carry r, t into the bigger ring (entries already reduced ints)
        Poly<ZmodRing> r2 = r, t2 = t;
        auto Fr = eval_nfpoly(z2, *fc2, r2);
        r2 = z2.red(z2.sub(r2, z2.mul(Fr, t2)));
        auto dFr = eval_nfpoly(z2, *dfc2, r2);
        auto two = poly_const(z2.R, z2.R.from_int(2));
        t2 = z2.mul(t2, z2.sub(two, z2.mul(dFr, t2)));
        m = m2;
        zn = z2;
        r = r2;
        t = t2;

        // attempt rational reconstruction coefficient by coefficient
        Poly<Rationals> cand;
        bool ok = true;
        Rationals Q;
        for (int i = 0; i < d; ++i) {
            Int ci = i <= r.deg() ? r.c[i] : Int(0);
            auto rec = rational_reconstruct(ci, m);
            if (!rec) {
                ok = false;
                break;
            }
            cand.c.push_back(Rat(rec->first, rec->second));
        }
        if (!ok) continue;
        for (auto& c : cand.c) c.canonicalize();
        auto elem = nf.reduce(poly_trim(Q, std::move(cand)));
        if (verify(elem)) return elem;
    }
    return std::nullopt;
}

// Enumerate mixed-radix combinations of per-component values.
template <class T, class Fn>
bool for_each_combo(const std::vector<std::vector<T>>& sets, Fn&& fn) {
    size_t total = 1;
    for (const auto& s : sets) {
        if (s.empty()) return false;
        total *= s.size();
        if (total > kComboCap) return false;
    }
    std::vector<size_t> idx(sets.size(), 0);
    for (size_t n = 0; n < total; ++n) {
        std::vector<T> pick;
        size_t rem = n;
        for (size_t i = 0; i < sets.size(); ++i) {
            pick.push_back(sets[i][rem % sets[i].size()]);
            rem /= sets[i].size();
        }
        if (fn(pick)) return true;
    }
    return false;
}

}  // namespace rdetail

// --------------------------------------------------------------------------
// Certified squareness.
// --------------------------------------------------------------------------

namespace rdetail {

inline SquarenessResult<NumberField> nf_is_square(const NumberField& nf,
                                                  const NumberField::Element& a) {
    if (nf.is_zero(a)) return {true, nf.zero(), "zero"};
    if (nf.degree() == 1) {
        auto s = rat_sqrt(a[0]);
        if (s) return {true, nf.embed(*s), "exact rational square root"};
        return {false, std::nullopt, "exact rational non-square"};
    }

    // x^2 - a, for the witness path
    std::vector<NumberField::Element> F{nf.neg(a), nf.zero(), nf.one()};

    int used = 0;
    for (unsigned long ell = 5; used < kPrimeBudget && ell < 1000000;
         ell = next_prime_above(Int(ell)).get_ui()) {
        auto im = make_image(nf, ell);
        if (!im) continue;
        auto abar = nf_elem_mod(*im, nf, a);
        if (!abar) continue;
        ++used;

        bool all_units = true;
        for (size_t i = 0; i < im->comps.size(); ++i) {
            const auto& C = im->comps[i];
            auto ai = C.reduce(poly_rem(im->Fl, *abar, im->hs[i]));
            if (C.is_zero(ai)) {
                all_units = false;
                continue;
            }
            Int e = (C.cardinality() - 1) / 2;
            auto leg = element_pow(C, ai, e);
            if (C.is_one(leg)) continue;
            if (C.eq(leg, C.neg(C.one())))
                return {false, std::nullopt,
                        "nonresidue modulo (" + std::to_string(ell) + ", " +
                            poly_to_string(im->Fl, im->hs[i], "y") + ")"};
            throw internal_error("Euler criterion returned a non-unit value");
        }
        if (!all_units) continue;

        // witness attempt: per-component square roots, CRT, lift, verify
        std::vector<std::vector<Poly<PrimeField>>> sets;
        bool feasible = true;
        for (size_t i = 0; i < im->comps.size(); ++i) {
            const auto& C = im->comps[i];
            auto ai = C.reduce(poly_rem(im->Fl, *abar, im->hs[i]));
            auto s = sqrt_finite(C, ai);
            if (!s) {
                feasible = false;  // contradicts Euler +1; defensive
                break;
            }
            std::vector<Poly<PrimeField>> two{C.lift(*s), C.lift(C.neg(*s))};
            sets.push_back(two);
        }
        if (!feasible) continue;

        std::optional<NumberField::Element> witness;
        rdetail::for_each_combo(sets, [&](const std::vector<Poly<PrimeField>>& pick) {
            auto r0 = poly_crt(im->Fl, im->hs, pick);
            auto got = lift_root(nf, F, *im, r0, [&](const NumberField::Element& s) {
                return nf.eq(nf.mul(s, s), a);
            });
            if (got) {
                witness = got;
                return true;
            }
            return false;
        });
        if (witness)
            return {true, witness, "verified square root witness"};
    }
    throw undetermined_error("squareness undecided within prime budget");
}

}  // namespace rdetail

template <class K>
SquarenessResult<K> residue_is_square(const K& k, const typename K::Element& a) {
    if constexpr (std::is_same_v<K, Rationals>) {
        (void)k;
        auto s = rat_sqrt(a);
        if (s) return {true, *s, "exact rational square root"};
        return {false, std::nullopt, "exact rational non-square"};
    } else if constexpr (!K::is_char_zero) {
        auto s = sqrt_finite(k, a);
        if (s) return {true, *s, "exact finite-field square root"};
        return {false, std::nullopt, "exact finite-field non-square"};
    } else {
        static_assert(std::is_same_v<K, NumberField>,
                      "characteristic-zero residue fields must be Q[y]/(pi)");
        return rdetail::nf_is_square(k, a);
    }
}

// --------------------------------------------------------------------------
// Certified roots (with multiplicity) of polynomials of degree <= 3.
// --------------------------------------------------------------------------

namespace rdetail {

inline std::vector<std::pair<NumberField::Element, int>> nf_roots_with_mult(
    const NumberField& nf, const Poly<NumberField>& f) {
    if (f.deg() < 1) return {};
    if (f.deg() > 3) throw capability_error("certified roots limited to degree <= 3");

    std::vector<NumberField::Element> roots;

    if (nf.degree() == 1) {
        // residue field is Q: exact factorization
        Rationals Q;
        Poly<Rationals> fq;
        for (const auto& c : f.c) fq.c.push_back(c[0]);
        fq = poly_trim(Q, std::move(fq));
        auto fl = factor_univariate(Q, fq);
        for (auto& [g, m] : fl.factors)
            if (g.deg() == 1) roots.push_back(nf.embed(Q.neg(g.c[0])));
    } else {
        auto fm = poly_monic(nf, f);
        auto df = poly_derivative(nf, fm);
        auto g = fm;
        if (!df.zero()) {
            auto gc = poly_gcd(nf, fm, df);
            if (gc.deg() > 0) g = poly_quo(nf, fm, gc);
        }

        while (g.deg() > 0) {
            if (g.deg() == 1) {
                roots.push_back(nf.neg(g.c[0]));
                break;
            }
            if (g.deg() == 2) {
                auto b = g.c[1], c = g.c[0];
                auto disc = nf.sub(nf.mul(b, b),
                                   nf.mul(nf.from_int(4), c));
                auto sq = residue_is_square(nf, disc);
                if (!sq.is_square) break;
                auto s = *sq.witness;
                auto half = nf.inv(nf.from_int(2));
                roots.push_back(nf.mul(half, nf.sub(s, b)));
                roots.push_back(nf.mul(half, nf.sub(nf.neg(s), b)));
                break;
            }
            // degree 3: either certify no roots or find one and divide it out
            std::vector<NumberField::Element> F(g.c.begin(), g.c.end());
            bool resolved = false;
            int used = 0;
            for (unsigned long ell = 5; used < kPrimeBudget && !resolved && ell < 1000000;
                 ell = next_prime_above(Int(ell)).get_ui()) {
                auto im = make_image(nf, ell);
                if (!im) continue;
                // reduce g mod (ell, pibar)
                bool bad = false;
                std::vector<Poly<PrimeField>> gc_mod;
                for (const auto& c : g.c) {
                    auto p = rat_poly_mod(im->Fl, nf.lift(c));
                    if (!p) {
                        bad = true;
                        break;
                    }
                    gc_mod.push_back(*p);
                }
                if (bad) continue;
                ++used;

                // per-component root sets of the reduced cubic
                std::vector<std::vector<Poly<PrimeField>>> sets;
                bool empty_comp = false;
                bool separable_everywhere = true;
                for (size_t i = 0; i < im->comps.size() && !empty_comp; ++i) {
                    const auto& C = im->comps[i];
                    Poly<ExtensionField<PrimeField>> gi;
                    for (const auto& p : gc_mod)
                        gi.c.push_back(C.reduce(poly_rem(im->Fl, p, im->hs[i])));
                    gi = poly_trim(C, std::move(gi));
                    if (gi.deg() != g.deg()) {
                        separable_everywhere = false;
                        break;
                    }
                    auto dgi = poly_derivative(C, gi);
                    if (poly_gcd(C, gi, dgi).deg() != 0) separable_everywhere = false;
                    auto rs = poly_roots_finite(C, gi);
                    if (rs.empty()) {
                        empty_comp = true;
                        break;
                    }
                    std::vector<Poly<PrimeField>> lifted;
                    for (const auto& r : rs) lifted.push_back(C.lift(r));
                    sets.push_back(lifted);
                }
                if (empty_comp) {
                    // sound certificate: any root of the monic integral cubic
                    // would reduce to a root in every component
                    resolved = true;
                    g = poly_one(nf);
                    break;
                }
                if (!separable_everywhere) continue;

                std::optional<NumberField::Element> root;
                rdetail::for_each_combo(sets, [&](const std::vector<Poly<PrimeField>>& pick) {
                    auto r0 = poly_crt(im->Fl, im->hs, pick);
                    auto got = lift_root(nf, F, *im, r0, [&](const NumberField::Element& r) {
                        Poly<NumberField> lin;
                        lin.c = {nf.neg(r), nf.one()};
                        return poly_rem(nf, g, lin).zero();
                    });
                    if (got) {
                        root = got;
                        return true;
                    }
                    return false;
                });
                if (root) {
                    roots.push_back(*root);
                    Poly<NumberField> lin;
                    lin.c = {nf.neg(*root), nf.one()};
                    g = poly_quo(nf, g, lin);
                    resolved = true;
                }
            }
            if (!resolved)
                throw undetermined_error(
                    "cubic root search undecided within prime budget");
        }
    }

    std::vector<std::pair<NumberField::Element, int>> out;
    for (const auto& r : roots) {
        Poly<NumberField> lin;
        lin.c = {nf.neg(r), nf.one()};
        out.push_back({r, poly_multiplicity(nf, f, lin)});
    }
    return out;
}

}  // namespace rdetail

template <class K>
std::vector<std::pair<typename K::Element, int>> residue_roots_with_mult(
    const K& k, const Poly<K>& f) {
    if constexpr (std::is_same_v<K, Rationals>) {
        if (f.deg() > 3) throw capability_error("certified roots limited to degree <= 3");
        std::vector<std::pair<Rat, int>> out;
        if (f.deg() < 1) return out;
        auto fl = factor_univariate(k, f);
        for (auto& [g, m] : fl.factors)
            if (g.deg() == 1) out.push_back({k.neg(g.c[0]), m});
        return out;
    } else if constexpr (!K::is_char_zero) {
        std::vector<std::pair<typename K::Element, int>> out;
        if (f.deg() < 1) return out;
        for (const auto& r : poly_roots_finite(k, f)) {
            Poly<K> lin;
            lin.c = {k.neg(r), k.one()};
            out.push_back({r, poly_multiplicity(k, f, lin)});
        }
        return out;
    } else {
        static_assert(std::is_same_v<K, NumberField>,
                      "characteristic-zero residue fields must be Q[y]/(pi)");
        return rdetail::nf_roots_with_mult(k, f);
    }
}

template <class K>
int residue_root_count(const K& k, const Poly<K>& f) {
    return static_cast<int>(residue_roots_with_mult(k, f).size());
}

// Policy object with the interface expected by the local-field machinery,
// valid over every residue field this library supports.
struct CertifiedResidueOps {
    template <class F>
    std::vector<std::pair<typename F::Element, int>> roots_with_mult(
        const F& k, const Poly<F>& f) const {
        return residue_roots_with_mult(k, f);
    }

    template <class F>
    std::optional<typename F::Element> sqrt(const F& k,
                                            const typename F::Element& a) const {
        auto r = residue_is_square(k, a);
        if (r.is_square) return r.witness ? *r.witness : k.zero();
        return std::nullopt;
    }
};

}  // namespace ellrank
