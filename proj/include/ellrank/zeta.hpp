#pragma once
// Zeta data of the trisection curve over a finite constant field: point
// counts over constant extensions, the L-polynomial assembled from them by
// Newton identities plus the functional equation, and certified bounds on
// the 2-rank of the degree-zero class group.  Over the rationals, 2-torsion
// upper bounds come from reduction at certified good primes.

#include <complex>
#include <cstdlib>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ellrank/descent.hpp"
#include "ellrank/errors.hpp"
#include "ellrank/extension.hpp"
#include "ellrank/factor.hpp"
#include "ellrank/localfield.hpp"
#include "ellrank/numeric.hpp"
#include "ellrank/places.hpp"
#include "ellrank/poly.hpp"
#include "ellrank/residue.hpp"

namespace ellrank {

// --------------------------------------------------------------------------
// Point counting: N_i = number of degree-1 places of the function field of
// C over the constant extension of degree i.  Away from the branch locus the
// degree-1 places over t0 are exactly the roots of the specialized cubic; at
// branch points and at infinity they are the residue-degree-1 branches of
// the local factorization.
// --------------------------------------------------------------------------

namespace ztdetail {

// Degree-1 places of C above the place v of the t-line (local analysis).
template <class K>
long degree_one_places_at(const K& k, const EllipticSurfaceModel<K>& E,
                          const Place<K>& v) {
    auto lm = localize_at(k, E, v);
    CertifiedResidueOps ops;
    Series<ExtensionField<K>> zero{};
    auto prof = local_factor_cubic(lm.kv, ops, zero,
                                   ser_from_poly(lm.kv, lm.a4),
                                   ser_from_poly(lm.kv, lm.a6));
    long n = 0;
    for (auto& [e, f] : prof) {
        (void)e;
        if (f == 1) ++n;
    }
    return n;
}

}  // namespace ztdetail

template <class K>
long count_points(const K& k, const DescentCurveData<K>& C, int i,
                  int threads = 1) {
    static_assert(!K::is_char_zero,
                  "point counting requires a finite constant field");
    if (i < 1) throw internal_error("extension degree must be positive");

    Int qi;
    mpz_pow_ui(qi.get_mpz_t(), k.cardinality().get_mpz_t(),
               static_cast<unsigned long>(i));
    long budget = work_budget();
    if (qi > budget)
        throw capability_error(
            "point counting over the field with " + qi.get_str() +
            " elements exceeds the work budget of " + std::to_string(budget) +
            " specializations; a budget of at least " + qi.get_str() +
            " suffices (set ELLRANK_WORK_BUDGET)");

    ExtensionField<K> ki(k, find_irreducible(k, i));
    auto A = pldetail::embed_poly(ki, C.model.A);
    auto B = pldetail::embed_poly(ki, C.model.B);
    EllipticSurfaceModel<ExtensionField<K>> Ei{A, B};

    // branch locus in the affine line: roots of 4A^3 + 27B^2
    auto D = poly_add(ki, poly_scale(ki, ki.from_int(4),
                                     poly_mul(ki, poly_mul(ki, A, A), A)),
                      poly_scale(ki, ki.from_int(27), poly_mul(ki, B, B)));
    if (D.zero()) throw internal_error("zero discriminant in point counting");
    std::vector<typename ExtensionField<K>::Element> branch;
    if (D.deg() >= 1) branch = poly_roots_finite(ki, D);

    long qcount = static_cast<long>(qi.get_ui());
    int T = std::max(1, threads);
    std::vector<long> partial(T, 0);
    // For A = 0 the fiber count reduces to a cube-power test: x^3 = c has
    // one solution when cubing is a bijection (q = 2 mod 3) and otherwise
    // 3 or 0 solutions according to c^((q-1)/3).
    bool a_zero = A.zero();
    bool cube_bijective = (mpz_fdiv_ui(qi.get_mpz_t(), 3) == 2);
    Int cube_exp = a_zero && !cube_bijective ? (qi - 1) / 3 : Int(0);
    auto worker = [&](int w) {
        long lo = qcount * static_cast<long>(w) / T;
        long hi = qcount * static_cast<long>(w + 1) / T;
        long acc = 0;
        for (long idx = lo; idx < hi; ++idx) {
            auto t0 = ki.element_by_index(idx);
            if (ki.is_zero(poly_eval(ki, D, t0))) continue;
            if (a_zero) {
                if (cube_bijective) {
                    ++acc;
                } else {
                    auto c = ki.neg(poly_eval(ki, B, t0));
                    acc += ki.is_one(element_pow(ki, c, cube_exp)) ? 3 : 0;
                }
                continue;
            }
            Poly<ExtensionField<K>> sp;
            sp.c = {poly_eval(ki, B, t0), poly_eval(ki, A, t0), ki.zero(),
                    ki.one()};
            acc += poly_root_count_finite(ki, sp);
        }
        partial[w] = acc;
    };
    if (T == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < T; ++w) pool.emplace_back(worker, w);
        for (auto& th : pool) th.join();
    }
    long total = 0;
    for (long p : partial) total += p;

    // branch points and infinity via local factorization
    for (auto& t0 : branch) {
        Poly<ExtensionField<K>> pi;
        pi.c = {ki.neg(t0), ki.one()};
        total += ztdetail::degree_one_places_at(ki, Ei,
                                                make_finite_place(ki, pi));
    }
    total += ztdetail::degree_one_places_at(ki, Ei, make_infinite_place(ki));
    return total;
}

// --------------------------------------------------------------------------
// The L-polynomial P(T) = sum a_j T^j of degree 2g: a_1..a_g from the point
// counts by Newton identities, a_{g+1}..a_{2g} from the functional equation
// a_{2g-j} = q^{g-j} a_j.  Every assembled polynomial is self-verified: the
// counts are regenerated exactly, P(1) must be positive, and the reciprocal
// roots must sit on the circle of radius sqrt(q) to 1e-9.
// --------------------------------------------------------------------------

struct LPolynomial {
    std::vector<Int> a;  // a_0 .. a_{2g}
    Int q = 0;
    int g = 0;
};

inline Int lpoly_eval(const LPolynomial& P, const Int& x) {
    Int v = 0;
    for (size_t j = P.a.size(); j-- > 0;) v = v * x + P.a[j];
    return v;
}

inline Int lpoly_class_number(const LPolynomial& P) { return lpoly_eval(P, 1); }

namespace ztdetail {

// Numeric check that every reciprocal root of P has modulus sqrt(q).  The
// square-free part is extracted exactly first so the root finder only sees
// simple roots (full quadratic convergence).
inline void verify_weil_moduli(const LPolynomial& P) {
    if (P.g == 0) return;
    Rationals Q;
    Poly<Rationals> p;
    for (auto& c : P.a) p.c.push_back(Rat(c));
    p = poly_trim(Q, std::move(p));
    auto red = poly_quo(Q, p, poly_gcd(Q, p, poly_derivative(Q, p)));
    red = poly_monic(Q, red);
    int n = red.deg();
    if (n <= 0) throw internal_error("empty square-free part of the zeta numerator");

    std::vector<std::complex<double>> c(n + 1);
    for (int j = 0; j <= n; ++j) c[j] = poly_coeff(Q, red, j).get_d();
    auto eval = [&](std::complex<double> z) {
        std::complex<double> v = 0;
        for (int j = n; j >= 0; --j) v = v * z + c[j];
        return v;
    };
    double r0 = 1.0 / std::sqrt(P.q.get_d());
    std::vector<std::complex<double>> z(n);
    for (int j = 0; j < n; ++j) {
        double th = 2.0 * 3.14159265358979323846 * (j + 0.25) / n;
        z[j] = r0 * std::complex<double>(std::cos(th), std::sin(th));
    }
    double delta = 1.0;
    for (int it = 0; it < 500 && delta > 1e-14; ++it) {
        delta = 0.0;
        for (int j = 0; j < n; ++j) {
            std::complex<double> denom = 1.0;
            for (int m = 0; m < n; ++m)
                if (m != j) denom *= z[j] - z[m];
            auto step = eval(z[j]) / denom;
            z[j] -= step;
            delta = std::max(delta, std::abs(step));
        }
    }
    if (delta > 1e-10)
        throw internal_error("zeta numerator root finder did not converge");
    double sq = std::sqrt(P.q.get_d());
    for (int j = 0; j < n; ++j) {
        double mod = 1.0 / std::abs(z[j]);
        if (std::abs(mod - sq) > 1e-9)
            throw internal_error(
                "reciprocal root off the Weil circle (|alpha| = " +
                std::to_string(mod) + ", sqrt(q) = " + std::to_string(sq) +
                "): point counts are inconsistent");
    }
}

}  // namespace ztdetail

inline LPolynomial l_polynomial(const std::vector<long>& counts, const Int& q,
                                int g) {
    if (static_cast<int>(counts.size()) != g)
        throw internal_error("the L-polynomial needs exactly g point counts");
    LPolynomial P;
    P.q = q;
    P.g = g;
    P.a.assign(2 * g + 1, 0);
    P.a[0] = 1;

    // power sums of the reciprocal roots: S_i = q^i + 1 - N_i
    std::vector<Int> S(g + 1), e(g + 1);
    Int qi = 1;
    for (int i = 1; i <= g; ++i) {
        qi *= q;
        S[i] = qi + 1 - counts[i - 1];
    }
    e[0] = 1;
    for (int j = 1; j <= g; ++j) {
        Int acc = 0;
        for (int m = 1; m <= j; ++m) {
            Int term = e[j - m] * S[m];
            if (m % 2 == 0) term = -term;
            acc += term;
        }
        if (acc % j != 0)
            throw internal_error(
                "point counts are inconsistent: non-integral Newton "
                "coefficient at index " + std::to_string(j));
        e[j] = acc / j;
        P.a[j] = (j % 2 == 0) ? e[j] : -e[j];
    }
    for (int j = 0; j < g; ++j) {
        Int qp;
        mpz_pow_ui(qp.get_mpz_t(), q.get_mpz_t(),
                   static_cast<unsigned long>(g - j));
        P.a[2 * g - j] = qp * P.a[j];
    }

    // regenerate the counts from the full coefficient list (catches any slip
    // in the identities above)
    if (g > 0) {
        std::vector<Int> efull(2 * g + 1);
        for (int j = 0; j <= 2 * g; ++j)
            efull[j] = (j % 2 == 0) ? P.a[j] : -P.a[j];
        std::vector<Int> Sr(g + 1);
        for (int kk = 1; kk <= g; ++kk) {
            Int acc = 0;
            for (int j = 1; j < kk; ++j) {
                Int term = efull[j] * Sr[kk - j];
                if (j % 2 == 0) term = -term;
                acc += term;
            }
            Int tail = Int(kk) * efull[kk];
            if (kk % 2 == 0) tail = -tail;
            Sr[kk] = acc + tail;
            if (Sr[kk] != S[kk])
                throw internal_error(
                    "zeta self-check failed: regenerated point count differs "
                    "at extension degree " + std::to_string(kk));
        }
    }

    if (lpoly_class_number(P) <= 0)
        throw internal_error(
            "nonpositive class number: point counts are inconsistent");
    ztdetail::verify_weil_moduli(P);
    return P;
}

// --------------------------------------------------------------------------
// Certified interval for dim_F2 Pic0(C)[2](F_q).
//
// The group of rational degree-zero classes has order P(1), so the 2-rank is
// at most v_2(P(1)); Frobenius acts on the full 2-torsion with
// characteristic polynomial P mod 2, so the rank of the fixed space is also
// at most the multiplicity of the eigenvalue 1.  An even class number
// guarantees a point of order 2.  The exact Frobenius module structure is
// not determined by P, so only the interval is claimed.
// --------------------------------------------------------------------------

struct TwoTorsionBound {
    int lower = 0;
    int upper = 0;
    bool exact = false;
    std::string notes;
};

inline TwoTorsionBound two_torsion_bounds(const LPolynomial& P) {
    TwoTorsionBound out;
    Int h = lpoly_class_number(P);
    if (h <= 0) throw internal_error("nonpositive class number");
    int v2 = static_cast<int>(two_adic_valuation(h));

    PrimeField F2(2);
    Poly<PrimeField> p2;
    for (auto& c : P.a) p2.c.push_back(F2.from_mpz(c));
    p2 = poly_trim(F2, std::move(p2));
    Poly<PrimeField> lin;
    lin.c = {F2.one(), F2.one()};  // T + 1
    int mult = p2.deg() >= 1 ? poly_multiplicity(F2, p2, lin)
                             : 0;

    out.upper = std::min(v2, mult);
    out.lower = mpz_even_p(h.get_mpz_t()) ? 1 : 0;
    if (P.g == 0) out.lower = 0;
    out.exact = (out.lower == out.upper);
    out.notes = "class number " + h.get_str() + ": v_2 = " +
                std::to_string(v2) + ", Frobenius eigenvalue-1 multiplicity " +
                std::to_string(mult) +
                (out.exact ? " (interval collapsed)" : "");
    return out;
}

// --------------------------------------------------------------------------
// 2-torsion upper bound over Q by reduction at certified good primes.
//
// A prime l >= 5 is certified when the radical of the branch divisor stays
// squarefree of the same degree mod l, l divides neither the scaled leading
// coefficient nor the denominators, and the whole curve construction
// recomputed mod l returns the same genus.  Reduction is injective on
// 2-torsion at such primes, so every certified prime gives an upper bound;
// the minimum is reported with its certifying prime.  l in {2, 3} is never
// certified here (index-3 ramification is wild at 3); good reduction at 3
// can only be recorded as a user assertion for the bound that needs it.
// --------------------------------------------------------------------------

inline TwoTorsionBound torsion_upper_over_Q(const Rationals& Q,
                                            const DescentCurveData<Rationals>& C,
                                            const std::vector<long>& primes,
                                            bool user_asserts_good_3 = false) {
    TwoTorsionBound out;
    out.lower = 0;
    if (C.genus == 0) {
        out.upper = 0;
        out.exact = true;
        out.notes = "genus 0: the class group is trivial";
        return out;
    }

    Int lam = 1;
    {
        Int la = dcdetail::rational_poly_denominator_lcm(C.model.A);
        Int lb = dcdetail::rational_poly_denominator_lcm(C.model.B);
        mpz_lcm(lam.get_mpz_t(), lam.get_mpz_t(), la.get_mpz_t());
        mpz_lcm(lam.get_mpz_t(), lam.get_mpz_t(), lb.get_mpz_t());
    }
    Rat l2(lam * lam), l4 = l2 * l2, l6 = l4 * l2;
    Poly<Rationals> Ai = poly_scale(Q, l4, C.model.A);
    Poly<Rationals> Bi = poly_scale(Q, l6, C.model.B);

    // radical of the affine branch divisor
    auto D = poly_add(Q, poly_scale(Q, Rat(4),
                                    poly_mul(Q, poly_mul(Q, Ai, Ai), Ai)),
                      poly_scale(Q, Rat(27), poly_mul(Q, Bi, Bi)));
    auto rad = poly_monic(Q, poly_quo(Q, D, poly_gcd(Q, D, poly_derivative(Q, D))));
    Int dlam = dcdetail::rational_poly_denominator_lcm(rad);
    auto radz = poly_scale(Q, Rat(dlam), rad);

    int best = -1;
    long best_prime = 0;
    std::string skipped;
    for (long ell : primes) {
        if (ell < 5) {
            if (ell == 3 && user_asserts_good_3)
                skipped += "good reduction at 3 recorded by user assertion "
                           "(not usable for reduction bounds); ";
            else
                skipped += "prime " + std::to_string(ell) +
                           " skipped (reduction bounds need l >= 5); ";
            continue;
        }
        if (mpz_divisible_ui_p(lam.get_mpz_t(), ell) ||
            mpz_divisible_ui_p(dlam.get_mpz_t(), ell))
            continue;
        PrimeField F(static_cast<std::uint64_t>(ell));
        // branch divisor stays squarefree of the same degree
        auto radl = dcdetail::reduce_poly_mod(Q, F, radz);
        if (radl.deg() != radz.deg()) continue;
        if (radl.deg() >= 1 &&
            poly_gcd(F, radl, poly_derivative(F, radl)).deg() != 0)
            continue;
        // the whole construction must reproduce the genus mod l
        DescentCurveData<PrimeField> Cl;
        try {
            EllipticSurfaceModel<PrimeField> El{
                dcdetail::reduce_poly_mod(Q, F, Ai),
                dcdetail::reduce_poly_mod(Q, F, Bi)};
            Cl = build_descent_curve(F, El);
        } catch (const capability_error&) {
            throw;
        } catch (const std::exception&) {
            continue;
        }
        if (Cl.genus != C.genus) continue;

        std::vector<long> counts;
        for (int i = 1; i <= Cl.genus; ++i)
            counts.push_back(count_points(F, Cl, i));
        auto tb = two_torsion_bounds(l_polynomial(counts, F.cardinality(),
                                                  Cl.genus));
        if (best < 0 || tb.upper < best) {
            best = tb.upper;
            best_prime = ell;
        }
    }
    if (best < 0)
        throw undetermined_error(
            "no supplied prime certified good reduction of the trisection "
            "curve; supply an asserted good prime or an externally "
            "determined torsion dimension" +
            (skipped.empty() ? std::string()
                             : " (" + skipped.substr(0, skipped.size() - 2) +
                                   ")"));
    out.upper = best;
    out.exact = (out.lower == out.upper);
    out.notes = "upper bound " + std::to_string(best) +
                " certified at the good prime " + std::to_string(best_prime) +
                (skipped.empty() ? "" : "; " + skipped.substr(0, skipped.size() - 2));
    return out;
}

}  // namespace ellrank
