#pragma once

// Arithmetic in k[[u]] / k((u)) with explicit precision tracking, Hensel
// splitting of monic polynomials, and the Newton-polygon analysis of monic
// quadratics and cubics over a local field of residue characteristic 0 or
// >= 5 (all ramification tame).  Residue-field decisions (roots of a cubic,
// squareness) are delegated to a policy object so the same machinery serves
// finite residue fields (exact algorithms) and characteristic-zero residue
// fields (certified lift-and-verify algorithms).

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "ellrank/errors.hpp"
#include "ellrank/factor.hpp"
#include "ellrank/poly.hpp"

namespace ellrank {

// --------------------------------------------------------------------------
// Truncated power series.
//
// A Series holds coefficients of u^0, u^1, ... in `c`.  Coefficients with
// index < prec are correct; coefficients with index in [c.size(), prec) are
// known to be zero; coefficients with index >= prec are unknown.  When
// prec == kValInfinity the series is an exact polynomial in u.
// --------------------------------------------------------------------------

template <class K>
struct Series {
    std::vector<typename K::Element> c;
    int prec = kValInfinity;
};

namespace serdetail {
inline int padd(int a, int b) {
    long s = static_cast<long>(a) + static_cast<long>(b);
    if (s >= static_cast<long>(kValInfinity)) return kValInfinity;
    return static_cast<int>(s);
}
}  // namespace serdetail

template <class K>
void ser_trim(const K& k, Series<K>& a) {
    while (!a.c.empty() && k.is_zero(a.c.back())) a.c.pop_back();
    if (a.prec != kValInfinity && static_cast<int>(a.c.size()) > a.prec)
        a.c.resize(a.prec);
}

template <class K>
Series<K> ser_zero(const K&) {
    return Series<K>{};
}

template <class K>
Series<K> ser_const(const K& k, const typename K::Element& v) {
    Series<K> s;
    if (!k.is_zero(v)) s.c.push_back(v);
    return s;
}

template <class K>
Series<K> ser_from_poly(const K& k, const Poly<K>& p) {
    Series<K> s;
    s.c = p.c;
    ser_trim(k, s);
    return s;
}

template <class K>
bool ser_is_exact_zero(const Series<K>& a) {
    return a.c.empty() && a.prec == kValInfinity;
}

// Coefficient of u^i; throws precision_error when the coefficient is not
// determined at the current precision.
template <class K>
typename K::Element ser_coeff(const K& k, const Series<K>& a, int i) {
    if (i < static_cast<int>(a.c.size())) return a.c[i];
    if (i < a.prec) return k.zero();
    throw precision_error("series coefficient beyond known precision");
}

// Exact valuation.  Returns kValInfinity for the exact zero series; throws
// precision_error when the series vanishes to its full (finite) precision.
template <class K>
int ser_valuation(const K& k, const Series<K>& a) {
    for (size_t i = 0; i < a.c.size(); ++i)
        if (!k.is_zero(a.c[i])) return static_cast<int>(i);
    if (a.prec == kValInfinity) return kValInfinity;
    throw precision_error("series valuation indistinguishable from precision");
}

// Lower bound for the valuation; never throws.
template <class K>
int ser_valuation_lb(const K& k, const Series<K>& a) {
    for (size_t i = 0; i < a.c.size(); ++i)
        if (!k.is_zero(a.c[i])) return static_cast<int>(i);
    return a.prec;
}

template <class K>
Series<K> ser_truncate(const K& k, const Series<K>& a, int prec) {
    Series<K> r = a;
    r.prec = std::min(r.prec, prec);
    ser_trim(k, r);
    return r;
}

template <class K>
Series<K> ser_add(const K& k, const Series<K>& a, const Series<K>& b) {
    Series<K> r;
    r.prec = std::min(a.prec, b.prec);
    size_t n = std::max(a.c.size(), b.c.size());
    if (r.prec != kValInfinity) n = std::min(n, static_cast<size_t>(r.prec));
    r.c.assign(n, k.zero());
    for (size_t i = 0; i < n; ++i) {
        auto x = i < a.c.size() ? a.c[i] : k.zero();
        auto y = i < b.c.size() ? b.c[i] : k.zero();
        r.c[i] = k.add(x, y);
    }
    ser_trim(k, r);
    return r;
}

template <class K>
Series<K> ser_neg(const K& k, const Series<K>& a) {
    Series<K> r = a;
    for (auto& v : r.c) v = k.neg(v);
    return r;
}

template <class K>
Series<K> ser_sub(const K& k, const Series<K>& a, const Series<K>& b) {
    return ser_add(k, a, ser_neg(k, b));
}

template <class K>
Series<K> ser_scale(const K& k, const typename K::Element& v, const Series<K>& a) {
    if (k.is_zero(v)) return Series<K>{};
    Series<K> r = a;
    for (auto& x : r.c) x = k.mul(v, x);
    ser_trim(k, r);
    return r;
}

template <class K>
Series<K> ser_mul(const K& k, const Series<K>& a, const Series<K>& b) {
    if (ser_is_exact_zero(a) || ser_is_exact_zero(b)) return Series<K>{};
    int va = ser_valuation_lb(k, a);
    int vb = ser_valuation_lb(k, b);
    Series<K> r;
    r.prec = std::min(serdetail::padd(a.prec, vb), serdetail::padd(b.prec, va));
    size_t n = a.c.empty() || b.c.empty() ? 0 : a.c.size() + b.c.size() - 1;
    if (r.prec != kValInfinity) n = std::min(n, static_cast<size_t>(r.prec));
    r.c.assign(n, k.zero());
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (k.is_zero(a.c[i])) continue;
        for (size_t j = 0; j < b.c.size() && i + j < n; ++j)
            r.c[i + j] = k.add(r.c[i + j], k.mul(a.c[i], b.c[j]));
    }
    ser_trim(k, r);
    return r;
}

// Multiply by u^n.
template <class K>
Series<K> ser_shift_up(const K& k, const Series<K>& a, int n) {
    Series<K> r;
    r.prec = serdetail::padd(a.prec, n);
    r.c.assign(a.c.size() + n, k.zero());
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i + n] = a.c[i];
    ser_trim(k, r);
    return r;
}

// Exact division by u^n: requires the first n coefficients to be known zero.
template <class K>
Series<K> ser_shift_down(const K& k, const Series<K>& a, int n) {
    for (int i = 0; i < n && i < static_cast<int>(a.c.size()); ++i)
        if (!k.is_zero(a.c[i]))
            throw internal_error("series shift_down below valuation");
    if (a.prec != kValInfinity && a.prec < n)
        throw precision_error("series shift_down beyond precision");
    Series<K> r;
    r.prec = a.prec == kValInfinity ? kValInfinity : a.prec - n;
    if (static_cast<int>(a.c.size()) > n)
        r.c.assign(a.c.begin() + n, a.c.end());
    ser_trim(k, r);
    return r;
}

// Inverse of a unit series (valuation 0), to `prec` terms.
template <class K>
Series<K> ser_inv(const K& k, const Series<K>& a, int prec) {
    if (a.c.empty() || k.is_zero(a.c[0]))
        throw internal_error("series inverse of non-unit");
    int p = std::min(prec, a.prec);
    if (p == kValInfinity)
        throw internal_error("series inverse requires finite target precision");
    Series<K> r;
    r.prec = p;
    r.c.assign(p, k.zero());
    auto inv0 = k.inv(a.c[0]);
    r.c[0] = inv0;
    for (int n = 1; n < p; ++n) {
        auto acc = k.zero();
        for (int i = 1; i <= n && i < static_cast<int>(a.c.size()); ++i)
            acc = k.add(acc, k.mul(a.c[i], r.c[n - i]));
        r.c[n] = k.neg(k.mul(inv0, acc));
    }
    ser_trim(k, r);
    return r;
}

template <class K>
Series<K> ser_pow(const K& k, const Series<K>& a, int e) {
    Series<K> r = ser_const(k, k.one());
    for (int i = 0; i < e; ++i) r = ser_mul(k, r, a);
    return r;
}

template <class K>
bool ser_eq(const K& k, const Series<K>& a, const Series<K>& b) {
    if (a.prec != b.prec) return false;
    size_t n = std::max(a.c.size(), b.c.size());
    for (size_t i = 0; i < n; ++i) {
        auto x = i < a.c.size() ? a.c[i] : k.zero();
        auto y = i < b.c.size() ? b.c[i] : k.zero();
        if (!k.eq(x, y)) return false;
    }
    return true;
}

template <class K>
std::string ser_to_string(const K& k, const Series<K>& a) {
    std::string out;
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (k.is_zero(a.c[i])) continue;
        if (!out.empty()) out += " + ";
        out += k.to_string(a.c[i]);
        if (i > 0) out += "*u^" + std::to_string(i);
    }
    if (out.empty()) out = "0";
    if (a.prec != kValInfinity) out += " + O(u^" + std::to_string(a.prec) + ")";
    return out;
}

// Evaluate a polynomial in u at... (composition): substitute the series s
// for the variable of p.
template <class K>
Series<K> ser_eval_poly(const K& k, const Poly<K>& p, const Series<K>& s) {
    Series<K> r;
    for (int i = p.deg(); i >= 0; --i) {
        r = ser_mul(k, r, s);
        r = ser_add(k, r, ser_const(k, p.c[i]));
    }
    return r;
}

// --------------------------------------------------------------------------
// Polynomials in x with series coefficients (index = power of x).
// --------------------------------------------------------------------------

template <class K>
using SPoly = std::vector<Series<K>>;

template <class K>
SPoly<K> spoly_from_polys(const K& k, const std::vector<Poly<K>>& cs) {
    SPoly<K> r;
    for (const auto& p : cs) r.push_back(ser_from_poly(k, p));
    return r;
}

template <class K>
Series<K> spoly_eval(const K& k, const SPoly<K>& f, const Series<K>& x) {
    Series<K> r;
    for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i) {
        r = ser_mul(k, r, x);
        r = ser_add(k, r, f[i]);
    }
    return r;
}

template <class K>
SPoly<K> spoly_derivative(const K& k, const SPoly<K>& f) {
    SPoly<K> r;
    for (size_t i = 1; i < f.size(); ++i)
        r.push_back(ser_scale(k, k.from_int(static_cast<long>(i)), f[i]));
    return r;
}

// f(x + r) for a monic polynomial of small degree.
template <class K>
SPoly<K> spoly_translate(const K& k, const SPoly<K>& f, const Series<K>& r) {
    size_t n = f.size();
    SPoly<K> out(n, Series<K>{});
    // binomial expansion: out[i] = sum_{j>=i} C(j,i) f[j] r^{j-i}
    for (size_t j = 0; j < n; ++j) {
        Series<K> rp = ser_const(k, k.one());
        // iterate i downward from j so rp = r^{j-i}
        for (int i = static_cast<int>(j); i >= 0; --i) {
            // C(j, i)
            Int binom = 1;
            for (int t = 0; t < static_cast<int>(j) - i; ++t) {
                binom *= static_cast<long>(j) - t;
                binom /= t + 1;
            }
            auto coef = k.from_int(0);
            {
                // from_int expects long; binomials here are tiny
                coef = k.from_int(binom.get_si());
            }
            out[i] = ser_add(k, out[i], ser_scale(k, coef, ser_mul(k, f[j], rp)));
            rp = ser_mul(k, rp, r);
        }
    }
    return out;
}

// f(u^lambda * x) / u^(n*lambda) for monic f of degree n.
template <class K>
SPoly<K> spoly_twist_down(const K& k, const SPoly<K>& f, int lambda) {
    int n = static_cast<int>(f.size()) - 1;
    SPoly<K> out(f.size(), Series<K>{});
    for (int i = 0; i <= n; ++i)
        out[i] = ser_shift_down(k, f[i], lambda * (n - i));
    return out;
}

// Reduction of f mod u: the polynomial over k of residues.
template <class K>
Poly<K> spoly_residue(const K& k, const SPoly<K>& f) {
    Poly<K> r;
    for (const auto& s : f) r.c.push_back(ser_coeff(k, s, 0));
    return poly_trim(k, std::move(r));
}

// Coefficient of u^j across the x-polynomial.
template <class K>
Poly<K> spoly_ucoeff(const K& k, const SPoly<K>& f, int j) {
    Poly<K> r;
    for (const auto& s : f) r.c.push_back(ser_coeff(k, s, j));
    return poly_trim(k, std::move(r));
}

// --------------------------------------------------------------------------
// Hensel splitting: F monic over k[[u]], residue F mod u = Gbar * Hbar with
// Gbar, Hbar monic and coprime.  Lift to F = G * H mod u^W.
// --------------------------------------------------------------------------

template <class K>
std::pair<SPoly<K>, SPoly<K>> hensel_split(const K& k, const SPoly<K>& f,
                                           const Poly<K>& gbar, const Poly<K>& hbar,
                                           int W) {
    int n = static_cast<int>(f.size()) - 1;
    int dg = gbar.deg(), dh = hbar.deg();
    if (dg + dh != n) throw internal_error("hensel_split: degree mismatch");
    if (!k.is_one(poly_lc(k, gbar)) || !k.is_one(poly_lc(k, hbar)))
        throw internal_error("hensel_split: factors must be monic");
    auto bez = poly_xgcd(k, gbar, hbar);
    if (bez[0].deg() != 0)
        throw internal_error("hensel_split: residual factors not coprime");
    auto ginv = k.inv(bez[0].c[0]);
    auto s = poly_scale(k, ginv, bez[1]);
    auto t = poly_scale(k, ginv, bez[2]);
    // s*gbar + t*hbar = 1
    (void)s;
    if (!poly_eq(k, spoly_residue(k, f), poly_mul(k, gbar, hbar)))
        throw internal_error("hensel_split: residual factorization mismatch");

    // Transposed representation: Gu[j] = coefficient polynomial of u^j.
    std::vector<Poly<K>> Gu(W), Hu(W);
    Gu[0] = gbar;
    Hu[0] = hbar;
    for (int j = 1; j < W; ++j) {
        // E_j = F_j - sum_{a+b=j} Gu[a] Hu[b]
        auto Ej = spoly_ucoeff(k, f, j);
        for (int a = 0; a <= j; ++a) {
            if (Gu[a].zero() || Hu[j - a].zero()) continue;
            Ej = poly_sub(k, Ej, poly_mul(k, Gu[a], Hu[j - a]));
        }
        if (Ej.zero()) continue;
        auto g = poly_rem(k, poly_mul(k, t, Ej), gbar);
        auto num = poly_sub(k, Ej, poly_mul(k, hbar, g));
        auto [h, rem] = poly_divmod(k, num, gbar);
        if (!rem.zero()) throw internal_error("hensel_split: inexact correction");
        Gu[j] = g;
        Hu[j] = h;
    }

    auto assemble = [&](const std::vector<Poly<K>>& Pu, int deg) {
        SPoly<K> out(deg + 1, Series<K>{});
        for (int i = 0; i <= deg; ++i) {
            Series<K> s2;
            s2.prec = W;
            s2.c.assign(W, k.zero());
            for (int j = 0; j < W; ++j) s2.c[j] = poly_coeff(k, Pu[j], i);
            ser_trim(k, s2);
            out[i] = s2;
        }
        return out;
    };
    return {assemble(Gu, dg), assemble(Hu, dh)};
}

// --------------------------------------------------------------------------
// Residue-field policy for finite fields: exact root finding and squareness.
// --------------------------------------------------------------------------

struct FiniteResidueOps {
    template <class F>
    std::vector<std::pair<typename F::Element, int>> roots_with_mult(
        const F& k, const Poly<F>& f) const {
        std::vector<std::pair<typename F::Element, int>> out;
        for (const auto& r : poly_roots_finite(k, f)) {
            Poly<F> lin;
            lin.c = {k.neg(r), k.one()};
            out.push_back({r, poly_multiplicity(k, f, lin)});
        }
        return out;
    }

    template <class F>
    std::optional<typename F::Element> sqrt(const F& k,
                                            const typename F::Element& a) const {
        return sqrt_finite(k, a);
    }
};

// --------------------------------------------------------------------------
// Ramification profile of a monic separable polynomial of degree <= 3 over
// k((u)): the multiset of (e_i, f_i) with sum e_i f_i = degree, where e_i is
// the ramification index and f_i the residue degree of each irreducible
// factor.  Residue characteristic 0 or >= 5, so everything is tame.
// --------------------------------------------------------------------------

using RamProfile = std::vector<std::pair<int, int>>;

inline void ram_sort(RamProfile& p) { std::sort(p.begin(), p.end()); }

namespace lfdetail {

template <class K, class ROps>
RamProfile quad_profile(const K& k, const ROps& ops, const Series<K>& p,
                        const Series<K>& q, int W);

// Residual analysis of a depressed cubic x^3 + P x + Q whose constant term
// is a unit or comes from a vertex twist (residue z^3 + pbar z + qbar).
template <class K, class ROps>
RamProfile cubic_case_unit(const K& k, const ROps& ops, const Series<K>& P,
                           const Series<K>& Q, int W) {
    Poly<K> resid;
    resid.c = {ser_coeff(k, Q, 0), ser_coeff(k, P, 0), k.zero(), k.one()};
    auto rm = ops.roots_with_mult(k, resid);
    int total = 0;
    for (auto& [r, m] : rm) total += m;
    if (rm.empty()) return {{1, 3}};
    bool all_simple = true;
    for (auto& [r, m] : rm)
        if (m > 1) all_simple = false;
    if (all_simple) {
        if (rm.size() == 3) return {{1, 1}, {1, 1}, {1, 1}};
        if (rm.size() == 1) return {{1, 1}, {1, 2}};
        throw internal_error("cubic residue: two simple roots impossible");
    }
    if (total == 3 && rm.size() == 1 && rm[0].second == 3)
        throw internal_error("cubic residue: triple root excluded here");
    // one double root r (nonzero since the residual cubic is depressed), one
    // simple root -2r
    typename K::Element r = k.zero();
    for (auto& [rt, m] : rm)
        if (m == 2) r = rt;
    if (k.is_zero(r)) throw internal_error("cubic residue: zero double root");
    SPoly<K> f{Q, P, Series<K>{}, ser_const(k, k.one())};
    auto shifted = spoly_translate(k, f, ser_const(k, r));
    Poly<K> gbar;  // x^2
    gbar.c = {k.zero(), k.zero(), k.one()};
    Poly<K> hbar;  // x + 3r
    hbar.c = {k.mul(k.from_int(3), r), k.one()};
    auto [G, H] = hensel_split(k, shifted, gbar, hbar, W);
    auto prof = quad_profile(k, ops, G[1], G[0], W);
    prof.push_back({1, 1});
    ram_sort(prof);
    return prof;
}

// Profile of a depressed integral cubic x^3 + P x + Q with nonzero
// discriminant.
template <class K, class ROps>
RamProfile cubic_profile(const K& k, const ROps& ops, const Series<K>& P,
                         const Series<K>& Q, int W) {
    int vq_lb = ser_valuation_lb(k, Q);
    if (vq_lb == kValInfinity) {
        // Q = 0 exactly: x (x^2 + P)
        auto prof = quad_profile(k, ops, Series<K>{}, P, W);
        prof.push_back({1, 1});
        ram_sort(prof);
        return prof;
    }
    int vq = ser_valuation(k, Q);  // throws precision_error if undetermined
    if (vq == 0) return cubic_case_unit(k, ops, P, Q, W);

    int vp_lb = ser_valuation_lb(k, P);
    // Newton polygon of {(0,vq), (1,vp), (3,0)}: vertex at x=1 iff 3 vp < 2 vq.
    bool vertex;
    if (3 * static_cast<long>(std::min(vp_lb, kValInfinity / 4)) > 2 * static_cast<long>(vq)) {
        vertex = false;  // sound with a lower bound
    } else if (vp_lb < P.prec || P.prec == kValInfinity) {
        vertex = 3 * static_cast<long>(vp_lb) < 2 * static_cast<long>(vq);
    } else {
        throw precision_error("Newton polygon vertex undecidable at precision");
    }

    if (!vertex) {
        if (vq % 3 != 0) return {{3, 1}};
        int lam = vq / 3;
        auto P2 = ser_shift_down(k, P, 2 * lam);
        auto Q2 = ser_shift_down(k, Q, 3 * lam);
        return cubic_case_unit(k, ops, P2, Q2, W);
    }
    int vp = vp_lb;  // exact here
    if (vp % 2 == 1) return {{1, 1}, {2, 1}};
    int lam = vp / 2;
    auto P2 = ser_shift_down(k, P, 2 * lam);
    auto Q2 = ser_shift_down(k, Q, 3 * lam);
    return cubic_case_unit(k, ops, P2, Q2, W);
}

// Profile of a monic integral quadratic x^2 + p x + q with nonzero
// discriminant.
template <class K, class ROps>
RamProfile quad_profile(const K& k, const ROps& ops, const Series<K>& p,
                        const Series<K>& q, int W) {
    (void)W;
    // complete the square: roots -p/2 +- sqrt(D), D = p^2/4 - q
    auto quarter = k.inv(k.from_int(4));
    auto D = ser_sub(k, ser_scale(k, quarter, ser_mul(k, p, p)), q);
    int d = ser_valuation(k, D);
    if (d == kValInfinity)
        throw internal_error("quadratic with zero discriminant");
    if (d % 2 == 1) return {{2, 1}};
    auto lead = ser_coeff(k, ser_shift_down(k, D, d), 0);
    if (ops.sqrt(k, lead)) return {{1, 1}, {1, 1}};
    return {{1, 2}};
}

}  // namespace lfdetail

// Ramification profile of the monic quadratic x^2 + p x + q over k((u)).
template <class K, class ROps>
RamProfile local_factor_quadratic(const K& k, const ROps& ops,
                                  const Series<K>& p, const Series<K>& q) {
    auto quarter = k.inv(k.from_int(4));
    auto D = ser_sub(k, ser_scale(k, quarter, ser_mul(k, p, p)), q);
    int vd = ser_valuation(k, D);
    if (vd == kValInfinity) throw internal_error("quadratic with zero discriminant");
    int W = 2 * vd + 4;
    for (int attempt = 0; attempt < 12; ++attempt) {
        try {
            return lfdetail::quad_profile(k, ops, p, q, W);
        } catch (const precision_error&) {
            W *= 2;
        }
    }
    throw internal_error("local quadratic analysis did not stabilize");
}

// Ramification profile of the monic cubic x^3 + c2 x^2 + c1 x + c0 over
// k((u)).  Coefficients must be integral (nonnegative valuation) and the
// discriminant nonzero.
template <class K, class ROps>
RamProfile local_factor_cubic(const K& k, const ROps& ops, const Series<K>& c2,
                              const Series<K>& c1, const Series<K>& c0) {
    // depress: x -> x - c2/3
    auto third = k.inv(k.from_int(3));
    auto r = ser_scale(k, third, c2);  // c2/3, subtracted via translate
    SPoly<K> f{c0, c1, c2, ser_const(k, k.one())};
    auto dep = spoly_translate(k, f, ser_neg(k, r));
    const auto& P = dep[1];
    const auto& Q = dep[0];
    if (!dep[2].c.empty())
        throw internal_error("cubic depression failed");

    // discriminant -4P^3 - 27Q^2 seeds the working precision
    auto disc = ser_sub(k, ser_scale(k, k.from_int(-4), ser_pow(k, P, 3)),
                        ser_scale(k, k.from_int(27), ser_mul(k, Q, Q)));
    int vd = ser_valuation(k, disc);
    if (vd == kValInfinity) throw internal_error("cubic with zero discriminant");
    int W = 2 * vd + 4;
    for (int attempt = 0; attempt < 12; ++attempt) {
        try {
            return lfdetail::cubic_profile(k, ops, P, Q, W);
        } catch (const precision_error&) {
            W *= 2;
        }
    }
    throw internal_error("local cubic analysis did not stabilize");
}

// --------------------------------------------------------------------------
// All roots in k[[u]] of a monic separable polynomial of degree <= 3 with
// integral series coefficients, each to precision `prec`.  Roots that live in
// ramified or residually inert extensions are not returned.
// --------------------------------------------------------------------------

namespace lfdetail {

template <class K>
Series<K> newton_refine(const K& k, const SPoly<K>& f,
                        const typename K::Element& r0, int prec) {
    auto df = spoly_derivative(k, f);
    Series<K> x = ser_const(k, r0);
    x.prec = prec;
    int steps = 1;
    {
        int have = 1;
        while (have < prec) {
            have *= 2;
            ++steps;
        }
    }
    for (int i = 0; i < steps + 2; ++i) {
        auto fx = ser_truncate(k, spoly_eval(k, f, x), prec);
        auto dfx = ser_truncate(k, spoly_eval(k, df, x), prec);
        auto corr = ser_mul(k, fx, ser_inv(k, dfx, prec));
        x = ser_truncate(k, ser_sub(k, x, corr), prec);
    }
    auto check = spoly_eval(k, f, x);
    int lb = ser_valuation_lb(k, check);
    if (lb < prec) {
        // all known coefficients zero but capped early: the input polynomial
        // did not carry enough coefficient precision, not a convergence failure
        if (lb == check.prec)
            throw precision_error("Newton refinement starved of coefficient precision");
        throw internal_error("Newton refinement did not converge");
    }
    return x;
}

template <class K, class ROps>
void roots_rec(const K& k, const ROps& ops, const SPoly<K>& f, int prec,
               int slack, int depth, std::vector<Series<K>>& out) {
    if (depth > 64) throw internal_error("series root recursion too deep");
    int n = static_cast<int>(f.size()) - 1;
    if (n == 0) return;
    if (n == 1) {
        // x + f0 = 0
        out.push_back(ser_truncate(k, ser_neg(k, f[0]), prec));
        return;
    }
    auto resid = spoly_residue(k, f);
    if (resid.deg() < n) throw internal_error("series roots: non-monic input");
    auto rm = ops.roots_with_mult(k, resid);
    for (auto& [r, m] : rm) {
        if (m == 1) {
            out.push_back(newton_refine(k, f, r, prec));
            continue;
        }
        // Multiple residual root: translate it to 0, isolate the factor whose
        // roots reduce to it, then rescale by the Newton slope and recurse.
        auto g = spoly_translate(k, f, ser_const(k, r));
        SPoly<K> gm;
        if (m == n) {
            gm = g;
        } else {
            Poly<K> gbar = poly_monomial(k, k.one(), m);
            auto [hbar, hrem] = poly_divmod(k, spoly_residue(k, g), gbar);
            if (!hrem.zero())
                throw internal_error("series roots: residual split inexact");
            // extra precision absorbs the valuation shed by the slope rescale
            gm = hensel_split(k, g, gbar, hbar, prec + slack).first;
        }
        // minimal slope over the polygon of gm (degree m, residue z^m)
        int best_num = -1, best_den = 1;
        for (int i = 0; i < m; ++i) {
            int v = ser_valuation_lb(k, gm[i]);
            if (v == kValInfinity) continue;
            if (best_num < 0 || static_cast<long>(v) * best_den <
                                    static_cast<long>(best_num) * (m - i)) {
                best_num = v;
                best_den = m - i;
            }
        }
        if (best_num < 0) throw internal_error("series roots: zero tail");
        if (best_num % best_den != 0) continue;  // ramified group: no k[[u]] roots
        int lam = best_num / best_den;
        if (lam < 1) throw internal_error("series roots: slope not positive");
        auto g2 = spoly_twist_down(k, gm, lam);
        std::vector<Series<K>> sub;
        roots_rec(k, ops, g2, prec, slack, depth + 1, sub);
        for (auto& y : sub) {
            auto xr = ser_add(k, ser_const(k, r), ser_shift_up(k, y, lam));
            out.push_back(ser_truncate(k, xr, prec));
        }
    }
}

}  // namespace lfdetail

template <class K, class ROps>
std::vector<Series<K>> series_roots_monic(const K& k, const ROps& ops,
                                          const SPoly<K>& f, int prec) {
    if (f.size() > 4) throw capability_error("series roots implemented for degree <= 3");
    int slack = 8;
    for (int attempt = 0; attempt < 12; ++attempt) {
        try {
            std::vector<Series<K>> out;
            lfdetail::roots_rec(k, ops, f, prec, slack, 0, out);
            return out;
        } catch (const precision_error&) {
            slack *= 2;
        }
    }
    throw internal_error("series root extraction did not stabilize");
}

}  // namespace ellrank
