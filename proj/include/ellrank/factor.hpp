#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ellrank/errors.hpp"
#include "ellrank/extension.hpp"
#include "ellrank/numeric.hpp"
#include "ellrank/poly.hpp"

// Univariate factorization.
//  * Over a finite field of odd characteristic: squarefree decomposition,
//    distinct-degree splitting, then equal-degree splitting with a
//    deterministically seeded RNG, so identical inputs give identical output.
//  * Over Q: Yun squarefree decomposition, factorization modulo a small
//    prime, Hensel lifting to above the Mignotte bound, and subset
//    recombination. Degree is capped (default 30); larger inputs fault with
//    a capability error instead of running unbounded searches.
// Factors are returned monic with multiplicities, in a canonical order.

namespace ellrank {

template <class F>
struct FactorList {
    typename F::Element unit;                      // leading unit: f = unit * prod fac^mult
    std::vector<std::pair<Poly<F>, int>> factors;  // monic irreducible, multiplicity
};

template <class F>
int poly_cmp(const F& k, const Poly<F>& a, const Poly<F>& b) {
    if (a.deg() != b.deg()) return a.deg() < b.deg() ? -1 : 1;
    for (int i = a.deg(); i >= 0; --i)
        if (int c = k.cmp(a.c[i], b.c[i]); c != 0) return c;
    return 0;
}

template <class F>
void sort_factors(const F& k, FactorList<F>& fl) {
    std::sort(fl.factors.begin(), fl.factors.end(),
              [&](const auto& x, const auto& y) { return poly_cmp(k, x.first, y.first) < 0; });
}

template <class F>
typename F::Element element_pow(const F& k, typename F::Element a, Int e) {
    if (e < 0) { a = k.inv(a); e = -e; }
    auto r = k.one();
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = k.mul(r, a);
        a = k.mul(a, a);
        e >>= 1;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Finite-field machinery.

namespace detail {

// Coefficientwise p-th root; valid when every exponent with a nonzero
// coefficient is divisible by p. In F_q with q = p^m the p-th root of a is
// a^(q/p).
template <class F>
Poly<F> poly_pth_root(const F& k, const Poly<F>& f) {
    unsigned long p = k.characteristic();
    Int e = k.cardinality() / static_cast<unsigned long>(p);
    Poly<F> r;
    for (int i = 0; i <= f.deg(); ++i) {
        if (i % static_cast<int>(p) != 0) {
            if (!k.is_zero(f.c[i])) throw internal_error("poly_pth_root: exponent not divisible by p");
            continue;
        }
        r.c.resize(i / static_cast<int>(p) + 1, k.zero());
        r.c[i / static_cast<int>(p)] = element_pow(k, f.c[i], e);
    }
    return poly_trim(k, std::move(r));
}

template <class F>
std::uint64_t poly_seed(const F& k, const Poly<F>& f) {
    std::uint64_t h = hash_combine(0xe11a, static_cast<std::uint64_t>(f.deg()));
    h = hash_combine(h, mpz_get_ui(k.cardinality().get_mpz_t()));
    for (int i = 0; i <= f.deg(); ++i) {
        // Hash via the canonical string; cheap at our sizes and field-generic.
        for (char c : k.to_string(f.c[i])) h = hash_combine(h, static_cast<std::uint64_t>(c));
    }
    return h;
}

template <class F>
typename F::Element random_element(const F& k, DetRng& rng) {
    Int idx = (Int(rng.next()) << 64) | Int(rng.next());
    return k.element_by_index(idx % k.cardinality());
}

// Equal-degree splitting of a monic squarefree product of irreducibles all
// of degree d (Cantor-Zassenhaus, odd characteristic).
template <class F>
void equal_degree_split(const F& k, const Poly<F>& f, int d, DetRng& rng,
                        std::vector<Poly<F>>& out) {
    if (f.deg() == d) {
        out.push_back(f);
        return;
    }
    Int qd = 1;
    for (int i = 0; i < d; ++i) qd *= k.cardinality();
    Int e = (qd - 1) / 2;
    for (int attempt = 0; attempt < 256; ++attempt) {
        Poly<F> a;
        a.c.resize(f.deg(), k.zero());
        for (auto& c : a.c) c = random_element(k, rng);
        a = poly_trim(k, std::move(a));
        if (a.deg() < 1) continue;
        auto g = poly_gcd(k, a, f);
        if (g.deg() > 0 && g.deg() < f.deg()) {
            equal_degree_split(k, g, d, rng, out);
            equal_degree_split(k, poly_exact_div(k, f, g), d, rng, out);
            return;
        }
        auto b = poly_powmod(k, a, e, f);
        auto s = poly_gcd(k, poly_sub(k, b, poly_one(k)), f);
        if (s.deg() > 0 && s.deg() < f.deg()) {
            equal_degree_split(k, s, d, rng, out);
            equal_degree_split(k, poly_exact_div(k, f, s), d, rng, out);
            return;
        }
    }
    throw internal_error("equal-degree splitting failed to find a splitter");
}

// Distinct-degree decomposition of monic squarefree f: list of (product, d).
template <class F>
std::vector<std::pair<Poly<F>, int>> distinct_degree(const F& k, Poly<F> f) {
    std::vector<std::pair<Poly<F>, int>> out;
    Int q = k.cardinality();
    auto x = poly_var(k);
    auto h = x;
    int d = 0;
    while (f.deg() > 0) {
        ++d;
        if (2 * d > f.deg()) {
            out.emplace_back(f, f.deg());
            break;
        }
        h = poly_powmod(k, h, q, f);
        auto g = poly_gcd(k, poly_sub(k, h, x), f);
        if (g.deg() > 0) {
            out.emplace_back(g, d);
            f = poly_exact_div(k, f, g);
            h = poly_rem(k, h, f);
        }
    }
    return out;
}

// Squarefree decomposition over a finite field of characteristic p.
template <class F>
std::vector<std::pair<Poly<F>, int>> squarefree_finite(const F& k, Poly<F> f) {
    std::vector<std::pair<Poly<F>, int>> out;
    int e = 1;
    unsigned long p = k.characteristic();
    while (f.deg() > 0) {
        auto fp = poly_derivative(k, f);
        if (fp.zero()) {
            f = poly_pth_root(k, f);
            e *= static_cast<int>(p);
            continue;
        }
        auto t = poly_gcd(k, f, fp);
        auto v = poly_exact_div(k, f, t);
        int i = 1;
        while (v.deg() > 0) {
            auto vn = poly_gcd(k, t, v);
            auto g = poly_exact_div(k, v, vn);
            if (g.deg() > 0) out.emplace_back(poly_monic(k, g), i * e);
            t = poly_exact_div(k, t, vn);
            v = std::move(vn);
            ++i;
        }
        // t now collects the part whose multiplicity is divisible by p.
        if (t.deg() == 0) break;
        f = poly_pth_root(k, t);
        e *= static_cast<int>(p);
    }
    return out;
}

}  // namespace detail

template <class F>
FactorList<F> factor_finite(const F& k, const Poly<F>& f0) {
    if (k.characteristic() == 2)
        throw capability_error("factorization over characteristic 2 is not supported");
    if (f0.zero()) throw internal_error("factorization of the zero polynomial");
    FactorList<F> fl;
    fl.unit = poly_lc(k, f0);
    if (f0.deg() == 0) return fl;
    auto f = poly_monic(k, f0);
    DetRng rng(detail::poly_seed(k, f));
    std::map<int, int> seen;  // guard: degree bookkeeping
    for (auto& [sf, mult] : detail::squarefree_finite(k, f)) {
        for (auto& [dd, d] : detail::distinct_degree(k, sf)) {
            std::vector<Poly<F>> irr;
            detail::equal_degree_split(k, dd, d, rng, irr);
            for (auto& g : irr) fl.factors.emplace_back(poly_monic(k, g), mult);
        }
        seen[mult] += sf.deg();
    }
    sort_factors(k, fl);
    int total = 0;
    for (auto& [g, m] : fl.factors) total += g.deg() * m;
    if (total != f.deg()) throw internal_error("finite factorization degree bookkeeping failed");
    return fl;
}

// Distinct roots of f in F, canonically ordered.
template <class F>
std::vector<typename F::Element> poly_roots_finite(const F& k, const Poly<F>& f) {
    if (f.zero()) throw internal_error("roots of the zero polynomial");
    auto x = poly_var(k);
    auto xq = poly_powmod(k, x, k.cardinality(), f);
    auto g = poly_gcd(k, poly_sub(k, xq, x), f);
    std::vector<typename F::Element> roots;
    if (g.deg() == 0) return roots;
    DetRng rng(detail::poly_seed(k, f));
    std::vector<Poly<F>> lin;
    detail::equal_degree_split(k, g, 1, rng, lin);
    for (auto& l : lin) roots.push_back(k.neg(poly_coeff(k, poly_monic(k, l), 0)));
    std::sort(roots.begin(), roots.end(), [&](const auto& a, const auto& b) { return k.cmp(a, b) < 0; });
    return roots;
}

// Number of distinct roots of f in F without extracting them.
template <class F>
int poly_root_count_finite(const F& k, const Poly<F>& f) {
    auto x = poly_var(k);
    auto xq = poly_powmod(k, x, k.cardinality(), f);
    return std::max(0, poly_gcd(k, poly_sub(k, xq, x), f).deg());
}

// Rabin irreducibility test.
template <class F>
bool is_irreducible_finite(const F& k, const Poly<F>& f) {
    int n = f.deg();
    if (n <= 0) return false;
    if (n == 1) return true;
    Int q = k.cardinality();
    auto x = poly_var(k);
    std::vector<int> prime_divs;
    int m = n;
    for (int d = 2; d * d <= m; ++d)
        if (m % d == 0) {
            prime_divs.push_back(d);
            while (m % d == 0) m /= d;
        }
    if (m > 1) prime_divs.push_back(m);
    Int qn = 1;
    for (int i = 0; i < n; ++i) qn *= q;
    if (!poly_eq(k, poly_powmod(k, x, qn, f), poly_rem(k, x, f))) return false;
    for (int r : prime_divs) {
        Int qe = 1;
        for (int i = 0; i < n / r; ++i) qe *= q;
        auto h = poly_sub(k, poly_powmod(k, x, qe, f), x);
        if (poly_gcd(k, h, f).deg() != 0) return false;
    }
    return true;
}

// Smallest monic irreducible of degree m in the deterministic enumeration
// order: coefficient tuples (c_0,...,c_{m-1}) ordered by the integer whose
// base-|F| digits they are, least significant digit c_0 first.
template <class F>
Poly<F> find_irreducible(const F& k, int m) {
    if (m < 1) throw internal_error("find_irreducible: degree must be positive");
    Int count = 1;
    for (int i = 0; i < m; ++i) count *= k.cardinality();
    for (Int idx = 0; idx < count; ++idx) {
        Poly<F> f;
        f.c.assign(m + 1, k.zero());
        f.c[m] = k.one();
        Int rest = idx;
        for (int j = 0; j < m; ++j) {
            f.c[j] = k.element_by_index(rest % k.cardinality());
            rest /= k.cardinality();
        }
        if (is_irreducible_finite(k, f)) return f;
    }
    throw internal_error("no irreducible polynomial found (impossible)");
}

// Square root in a finite field of odd order; nullopt for non-squares.
// Tonelli-Shanks with a deterministic search for a non-residue.
template <class F>
std::optional<typename F::Element> sqrt_finite(const F& k, const typename F::Element& a) {
    if (k.is_zero(a)) return k.zero();
    Int q = k.cardinality();
    if (mpz_even_p(q.get_mpz_t())) throw capability_error("square root in characteristic 2 unsupported");
    Int e = (q - 1) / 2;
    auto leg = element_pow(k, a, e);
    if (!k.is_one(leg)) return std::nullopt;
    if ((q + 1) % 4 == 0) {
        auto r = element_pow(k, a, (q + 1) / 4);
        if (!k.eq(k.mul(r, r), a)) throw internal_error("sqrt_finite: q=3 mod 4 branch failed");
        return r;
    }
    unsigned long s = two_adic_valuation(q - 1);
    Int t = (q - 1) >> s;
    // Deterministic non-residue search by enumeration index.
    typename F::Element n = k.zero();
    for (Int i = 2; i < q; ++i) {
        auto cand = k.element_by_index(i);
        if (k.is_zero(cand)) continue;
        if (!k.is_one(element_pow(k, cand, e))) { n = cand; break; }
    }
    auto z = element_pow(k, n, t);
    auto r = element_pow(k, a, (t + 1) / 2);
    auto u = element_pow(k, a, t);
    unsigned long m = s;
    while (!k.is_one(u)) {
        auto u2 = u;
        unsigned long i = 0;
        while (!k.is_one(u2)) { u2 = k.mul(u2, u2); ++i; }
        if (i >= m) throw internal_error("sqrt_finite: order bookkeeping failed");
        auto b = z;
        for (unsigned long j = 0; j + i + 1 < m; ++j) b = k.mul(b, b);
        r = k.mul(r, b);
        z = k.mul(b, b);
        u = k.mul(u, z);
        m = i;
    }
    if (!k.eq(k.mul(r, r), a)) throw internal_error("sqrt_finite: verification failed");
    return r;
}

// ---------------------------------------------------------------------------
// Rational factorization.

namespace detail {

using IntPoly = std::vector<Int>;  // dense, no trailing zeros

inline int ideg(const IntPoly& f) { return static_cast<int>(f.size()) - 1; }

inline IntPoly itrim(IntPoly f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
    return f;
}

inline IntPoly imul(const IntPoly& a, const IntPoly& b) {
    if (a.empty() || b.empty()) return {};
    IntPoly r(a.size() + b.size() - 1, Int(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

inline Int icontent(const IntPoly& f) {
    Int g = 0;
    for (const auto& c : f) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    return g;
}

inline IntPoly iprimitive(IntPoly f) {
    Int g = icontent(f);
    if (g == 0) return f;
    if (f.back() < 0) g = -g;
    for (auto& c : f) c /= g;
    return f;
}

// Exact division test in Z[x]; returns quotient if b | a.
inline std::optional<IntPoly> idiv_exact(const IntPoly& a0, const IntPoly& b) {
    if (b.empty()) return std::nullopt;
    IntPoly a = a0, q(a0.size(), Int(0));
    int db = ideg(b);
    while (ideg(a) >= db) {
        Int lead = a.back();
        if (lead % b.back() != 0) return std::nullopt;
        Int f = lead / b.back();
        int shift = ideg(a) - db;
        q[shift] = f;
        for (int j = 0; j <= db; ++j) a[shift + j] -= f * b[j];
        a = itrim(std::move(a));
        if (a.empty()) break;
    }
    if (!a.empty()) return std::nullopt;
    return itrim(std::move(q));
}

inline Poly<Rationals> to_rat_poly(const Rationals& Q, const IntPoly& f) {
    Poly<Rationals> r;
    for (const auto& c : f) r.c.push_back(Rat(c));
    return poly_trim(Q, std::move(r));
}

inline Poly<PrimeField> reduce_mod_p(const PrimeField& Fp, const IntPoly& f) {
    Poly<PrimeField> r;
    for (const auto& c : f) r.c.push_back(Fp.from_mpz(c));
    return poly_trim(Fp, std::move(r));
}

// Symmetric representative in (-m/2, m/2].
inline Int sym_mod(const Int& a, const Int& m) {
    Int r = a % m;
    if (r < 0) r += m;
    if (2 * r > m) r -= m;
    return r;
}

// Quadratic Hensel lifting of a coprime factorization f = g*h (mod p) to
// modulus p^(2^rounds-ish) >= target. All polynomials integer, f monic not
// required: lc(f) must be a unit mod p and g is kept monic.
struct HenselPair {
    IntPoly g, h;
    Int modulus;
};

inline IntPoly ipoly_mod(IntPoly f, const Int& m) {
    for (auto& c : f) {
        c %= m;
        if (c < 0) c += m;
    }
    return itrim(std::move(f));
}

// One symmetric-lift step: given f = g*h mod m, g monic, and s*g + t*h = 1
// mod m, produce the same data mod m^2.
inline void hensel_step(const IntPoly& f, IntPoly& g, IntPoly& h, IntPoly& s, IntPoly& t, Int& m) {
    Int m2 = m * m;
    ZmodRing R(m2);
    auto P = [&](const IntPoly& v) {
        Poly<ZmodRing> r;
        for (const auto& c : v) r.c.push_back(R.reduce(c));
        return poly_trim(R, std::move(r));
    };
    auto U = [&](const Poly<ZmodRing>& v) {
        IntPoly r;
        for (const auto& c : v.c) r.push_back(c);
        return itrim(std::move(r));
    };
    auto pf = P(f), pg = P(g), ph = P(h), ps = P(s), pt = P(t);
    // e = f - g h; (q, r) = divmod(s e, h); g' = g + t e + q g; h' = h + r.
    auto e = poly_sub(R, pf, poly_mul(R, pg, ph));
    auto [q, r] = poly_divmod(R, poly_mul(R, ps, e), ph);
    auto gq = poly_add(R, pg, poly_add(R, poly_mul(R, pt, e), poly_mul(R, q, pg)));
    auto hq = poly_add(R, ph, r);
    // Bezout update: b = s g' + t h' - 1; (c, d) = divmod(s b, h'); s' = s - d; t' = t - t b - c g'.
    auto b = poly_sub(R, poly_add(R, poly_mul(R, ps, gq), poly_mul(R, pt, hq)), poly_one(R));
    auto [c, d] = poly_divmod(R, poly_mul(R, ps, b), hq);
    auto sq = poly_sub(R, ps, d);
    auto tq = poly_sub(R, poly_sub(R, pt, poly_mul(R, pt, b)), poly_mul(R, c, gq));
    g = U(gq); h = U(hq); s = U(sq); t = U(tq);
    m = m2;
}

// Lift the full modular factor list of f (monic mod p after lc adjustment)
// to modulus >= target. Factors come in monic mod p; result is the list of
// lifted factors mod M (monic), with f = lc(f) * prod factors (mod M).
inline void hensel_lift_list(const IntPoly& f, unsigned long p,
                             std::vector<IntPoly>& factors, const Int& target, Int& modulus_out) {
    PrimeField Fp(p);
    Int m(static_cast<unsigned long>(p));
    // Recursive binary split lifting.
    struct Lifter {
        const PrimeField& Fp;
        unsigned long p;
        Int target;
        // Lift f = prod(factors[lo..hi)) * (unit) mod p to mod M; f's lc must
        // be invertible mod p. Returns the per-factor lifts.
        void run(const IntPoly& f, std::vector<IntPoly>& factors, size_t lo, size_t hi, Int& mod_out) {
            if (hi - lo == 1) {
                // Single factor: lift is f itself made monic mod target power.
                Int m(static_cast<unsigned long>(p));
                while (m < target) m *= m;
                ZmodRing R(m);
                Poly<ZmodRing> pf;
                for (const auto& c : f) pf.c.push_back(R.reduce(c));
                pf = poly_trim(R, std::move(pf));
                pf = poly_monic(R, pf);
                IntPoly r;
                for (const auto& c : pf.c) r.push_back(c);
                factors[lo] = itrim(std::move(r));
                mod_out = m;
                return;
            }
            size_t mid = lo + (hi - lo) / 2;
            PrimeField F(p);
            auto mk = [&](size_t a, size_t b) {
                Poly<PrimeField> r = poly_one(F);
                for (size_t i = a; i < b; ++i) r = poly_mul(F, r, reduce_mod_p(F, factors[i]));
                return r;
            };
            auto pg = mk(lo, mid), ph = mk(mid, hi);
            // f = lc * g * h mod p with g, h monic; fold lc into h for lifting.
            auto pf = reduce_mod_p(F, f);
            auto lc = poly_lc(F, pf);
            ph = poly_scale(F, lc, ph);
            auto [gcd1, s1, t1] = poly_xgcd(F, pg, ph);
            if (gcd1.deg() != 0) throw internal_error("hensel: factors not coprime");
            IntPoly g, h, s, t;
            auto toI = [](const Poly<PrimeField>& v) {
                IntPoly r;
                for (auto c : v.c) r.push_back(Int(static_cast<unsigned long>(c)));
                return r;
            };
            g = toI(pg); h = toI(ph); s = toI(s1); t = toI(t1);
            Int m(static_cast<unsigned long>(p));
            while (m < target) hensel_step(f, g, h, s, t, m);
            // Recurse: g is monic; h carries lc(f).
            Int sub1, sub2;
            run(g, factors, lo, mid, sub1);
            run(h, factors, mid, hi, sub2);
            mod_out = m;
        }
    } lifter{Fp, p, target};
    lifter.run(f, factors, 0, factors.size(), modulus_out);
}

// Zassenhaus recombination: f primitive squarefree, factors lifted mod M.
inline std::vector<IntPoly> zassenhaus_recombine(IntPoly f, std::vector<IntPoly> lifted, const Int& M) {
    std::vector<IntPoly> out;
    std::vector<int> alive(lifted.size());
    for (size_t i = 0; i < lifted.size(); ++i) alive[i] = static_cast<int>(i);
    size_t max_subsets = 1 << 20;
    size_t tried = 0;
    ZmodRing R(M);
    auto mulmodM = [&](const IntPoly& a, const IntPoly& b) { return ipoly_mod(imul(a, b), M); };

    for (size_t card = 1; !alive.empty() && card <= alive.size(); ) {
        if (card > alive.size() / 2 + (alive.size() % 2)) {
            // Whatever remains is one irreducible factor.
            break;
        }
        bool found = false;
        std::vector<size_t> idx(card);
        for (size_t i = 0; i < card; ++i) idx[i] = i;
        while (true) {
            if (++tried > max_subsets)
                throw capability_error("rational factorization recombination exceeded its subset budget");
            // Candidate: lc(f) * prod_{i in subset} lifted[alive[idx]]
            IntPoly cand{f.back()};
            for (size_t j = 0; j < card; ++j) cand = mulmodM(cand, lifted[alive[idx[j]]]);
            for (auto& c : cand) c = sym_mod(c, M);
            cand = iprimitive(itrim(std::move(cand)));
            if (!cand.empty()) {
                auto q = idiv_exact(f, cand);
                if (q) {
                    out.push_back(cand);
                    f = iprimitive(*q);
                    std::vector<int> rest;
                    for (size_t i = 0, j = 0; i < alive.size(); ++i) {
                        if (j < card && idx[j] == i) { ++j; continue; }
                        rest.push_back(alive[i]);
                    }
                    alive = std::move(rest);
                    found = true;
                    break;
                }
            }
            // next subset
            int pos = static_cast<int>(card) - 1;
            while (pos >= 0 && idx[pos] == alive.size() - card + pos) --pos;
            if (pos < 0) break;
            ++idx[pos];
            for (size_t j = pos + 1; j < card; ++j) idx[j] = idx[j - 1] + 1;
        }
        if (!found) ++card;
    }
    if (ideg(f) > 0) out.push_back(iprimitive(f));
    return out;
}

// Factor a primitive squarefree integer polynomial of degree >= 1.
inline std::vector<IntPoly> factor_squarefree_integer(const IntPoly& f) {
    if (ideg(f) == 1) return {f};
    // Mignotte bound on factor coefficients: 2^n * |f|_2 * |lc|.
    Int norm2sq = 0;
    for (const auto& c : f) norm2sq += c * c;
    Int norm2;
    mpz_sqrt(norm2.get_mpz_t(), norm2sq.get_mpz_t());
    norm2 += 1;
    Int bound = (Int(1) << ideg(f)) * norm2 * abs(f.back());
    Int target = 2 * bound + 1;

    // Prime selection: first few good primes, keep the one with fewest factors.
    unsigned long best_p = 0;
    std::vector<Poly<PrimeField>> best_fac;
    int tried = 0;
    for (Int p(5); tried < 4; p = next_prime_above(p)) {
        unsigned long pl = p.get_ui();
        if (f.back() % p == 0) continue;
        PrimeField Fp(pl);
        auto fp = reduce_mod_p(Fp, f);
        if (fp.deg() != ideg(f)) continue;
        if (poly_gcd(Fp, fp, poly_derivative(Fp, fp)).deg() != 0) continue;
        ++tried;
        auto fl = factor_finite(Fp, fp);
        std::vector<Poly<PrimeField>> fac;
        for (auto& [g, m] : fl.factors) {
            if (m != 1) throw internal_error("squarefree reduction had repeated factor");
            fac.push_back(g);
        }
        if (best_p == 0 || fac.size() < best_fac.size()) {
            best_p = pl;
            best_fac = std::move(fac);
        }
        if (best_fac.size() == 1) break;
    }
    if (best_p == 0) throw internal_error("no usable prime for rational factorization");
    if (best_fac.size() == 1) return {f};

    std::vector<IntPoly> lifted(best_fac.size());
    for (size_t i = 0; i < best_fac.size(); ++i) {
        IntPoly g;
        for (auto c : best_fac[i].c) g.push_back(Int(static_cast<unsigned long>(c)));
        lifted[i] = itrim(std::move(g));
    }
    Int modulus;
    hensel_lift_list(f, best_p, lifted, target, modulus);
    // Verify the lift before recombining.
    {
        IntPoly prod{f.back()};
        for (const auto& g : lifted) prod = ipoly_mod(imul(prod, g), modulus);
        IntPoly fm = ipoly_mod(f, modulus);
        if (prod != fm) throw internal_error("hensel lift verification failed");
    }
    return zassenhaus_recombine(f, lifted, modulus);
}

}  // namespace detail

struct RationalFactorOptions {
    int degree_cap = 30;
};

inline FactorList<Rationals> factor_rationals(const Rationals& Q, const Poly<Rationals>& f0,
                                              const RationalFactorOptions& opt = {}) {
    if (f0.zero()) throw internal_error("factorization of the zero polynomial");
    if (f0.deg() > opt.degree_cap)
        throw capability_error("rational factorization degree cap " + std::to_string(opt.degree_cap) +
                               " exceeded by input of degree " + std::to_string(f0.deg()));
    FactorList<Rationals> fl;
    fl.unit = poly_lc(Q, f0);
    if (f0.deg() == 0) return fl;

    // Clear denominators; record nothing (unit already captured, factors monic).
    detail::IntPoly zf;
    {
        Int lcm_den(1);
        for (const auto& c : f0.c) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), c.get_den().get_mpz_t());
        for (const auto& c : f0.c) {
            Rat scaled = c * Rat(lcm_den);
            zf.push_back(scaled.get_num());
        }
        zf = detail::iprimitive(detail::itrim(std::move(zf)));
    }

    // Yun squarefree decomposition over Q (char 0: derivative never collapses).
    auto fr = detail::to_rat_poly(Q, zf);
    std::vector<std::pair<Poly<Rationals>, int>> squarefree_parts;
    {
        auto d = poly_derivative(Q, fr);
        auto a = poly_gcd(Q, fr, d);
        auto b = poly_exact_div(Q, fr, a);
        auto c = poly_exact_div(Q, d, a);
        int i = 1;
        while (b.deg() > 0) {
            auto t = poly_sub(Q, c, poly_derivative(Q, b));
            auto g = poly_gcd(Q, b, t);
            if (g.deg() > 0) squarefree_parts.emplace_back(g, i);
            b = poly_exact_div(Q, b, g);
            c = poly_exact_div(Q, t, g);
            ++i;
        }
    }

    for (auto& [part, mult] : squarefree_parts) {
        // Back to a primitive integer polynomial for the lifting machinery.
        detail::IntPoly zp;
        Int lcm_den(1);
        for (const auto& c : part.c) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), c.get_den().get_mpz_t());
        for (const auto& c : part.c) zp.push_back(Rat(c * Rat(lcm_den)).get_num());
        zp = detail::iprimitive(detail::itrim(std::move(zp)));
        for (auto& g : detail::factor_squarefree_integer(zp))
            fl.factors.emplace_back(poly_monic(Q, detail::to_rat_poly(Q, g)), mult);
    }
    sort_factors(Q, fl);
    int total = 0;
    for (auto& [g, m] : fl.factors) total += g.deg() * m;
    if (total != f0.deg()) throw internal_error("rational factorization degree bookkeeping failed");
    return fl;
}

// Front, dispatching on the coefficient field.
template <class F>
FactorList<F> factor_univariate(const F& k, const Poly<F>& f) {
    if constexpr (std::is_same_v<F, Rationals>) {
        return factor_rationals(k, f);
    } else if constexpr (F::is_char_zero) {
        (void)k; (void)f;
        throw capability_error("factorization over number fields is not supported");
    } else {
        return factor_finite(k, f);
    }
}

}  // namespace ellrank
