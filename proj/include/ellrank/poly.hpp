#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ellrank/errors.hpp"
#include "ellrank/numeric.hpp"

// Dense univariate polynomials over an arbitrary coefficient field K,
// represented as coefficient vectors without trailing zeros (the zero
// polynomial is the empty vector). All operations take the field context
// first and never mutate their inputs.

namespace ellrank {

template <class K>
struct Poly {
    std::vector<typename K::Element> c;  // c[i] is the x^i coefficient

    int deg() const { return static_cast<int>(c.size()) - 1; }
    bool zero() const { return c.empty(); }
};

template <class K>
Poly<K> poly_trim(const K& k, Poly<K> p) {
    while (!p.c.empty() && k.is_zero(p.c.back())) p.c.pop_back();
    return p;
}

template <class K>
Poly<K> poly_zero(const K&) { return Poly<K>{}; }

template <class K>
Poly<K> poly_const(const K& k, const typename K::Element& a) {
    Poly<K> p;
    if (!k.is_zero(a)) p.c.push_back(a);
    return p;
}

template <class K>
Poly<K> poly_one(const K& k) { return poly_const(k, k.one()); }

// The monomial a * x^n.
template <class K>
Poly<K> poly_monomial(const K& k, const typename K::Element& a, int n) {
    Poly<K> p;
    if (k.is_zero(a)) return p;
    p.c.assign(n + 1, k.zero());
    p.c[n] = a;
    return p;
}

template <class K>
Poly<K> poly_var(const K& k) { return poly_monomial(k, k.one(), 1); }

template <class K>
Poly<K> poly_from_ints(const K& k, const std::vector<long>& v) {
    Poly<K> p;
    p.c.reserve(v.size());
    for (long n : v) p.c.push_back(k.from_int(n));
    return poly_trim(k, std::move(p));
}

template <class K>
typename K::Element poly_coeff(const K& k, const Poly<K>& p, int i) {
    if (i < 0 || i > p.deg()) return k.zero();
    return p.c[i];
}

template <class K>
typename K::Element poly_lc(const K& k, const Poly<K>& p) {
    if (p.zero()) throw internal_error("leading coefficient of zero polynomial");
    (void)k;
    return p.c.back();
}

template <class K>
bool poly_eq(const K& k, const Poly<K>& a, const Poly<K>& b) {
    if (a.c.size() != b.c.size()) return false;
    for (size_t i = 0; i < a.c.size(); ++i)
        if (!k.eq(a.c[i], b.c[i])) return false;
    return true;
}

template <class K>
Poly<K> poly_add(const K& k, const Poly<K>& a, const Poly<K>& b) {
    Poly<K> r;
    r.c.resize(std::max(a.c.size(), b.c.size()), k.zero());
    for (size_t i = 0; i < r.c.size(); ++i)
        r.c[i] = k.add(poly_coeff(k, a, static_cast<int>(i)), poly_coeff(k, b, static_cast<int>(i)));
    return poly_trim(k, std::move(r));
}

template <class K>
Poly<K> poly_neg(const K& k, const Poly<K>& a) {
    Poly<K> r = a;
    for (auto& e : r.c) e = k.neg(e);
    return r;
}

template <class K>
Poly<K> poly_sub(const K& k, const Poly<K>& a, const Poly<K>& b) {
    return poly_add(k, a, poly_neg(k, b));
}

template <class K>
Poly<K> poly_scale(const K& k, const typename K::Element& s, const Poly<K>& a) {
    if (k.is_zero(s)) return Poly<K>{};
    Poly<K> r = a;
    for (auto& e : r.c) e = k.mul(s, e);
    return poly_trim(k, std::move(r));
}

template <class K>
Poly<K> poly_mul(const K& k, const Poly<K>& a, const Poly<K>& b) {
    if (a.zero() || b.zero()) return Poly<K>{};
    Poly<K> r;
    r.c.assign(a.c.size() + b.c.size() - 1, k.zero());
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (k.is_zero(a.c[i])) continue;
        for (size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] = k.add(r.c[i + j], k.mul(a.c[i], b.c[j]));
    }
    return poly_trim(k, std::move(r));
}

// Multiply by x^n.
template <class K>
Poly<K> poly_shift_up(const K& k, const Poly<K>& a, int n) {
    (void)k;
    if (a.zero() || n == 0) return a;
    Poly<K> r;
    r.c.assign(a.c.size() + n, k.zero());
    std::copy(a.c.begin(), a.c.end(), r.c.begin() + n);
    return r;
}

// Exact division by x^n; requires the low n coefficients to vanish.
template <class K>
Poly<K> poly_shift_down(const K& k, const Poly<K>& a, int n) {
    if (n == 0) return a;
    if (a.deg() < n - 1) return Poly<K>{};
    for (int i = 0; i < n && i <= a.deg(); ++i)
        if (!k.is_zero(a.c[i])) throw internal_error("poly_shift_down: low coefficients nonzero");
    Poly<K> r;
    if (a.deg() >= n) r.c.assign(a.c.begin() + n, a.c.end());
    return r;
}

// Order of vanishing at x = 0. Returns a large sentinel for the zero
// polynomial so valuation comparisons work without a special case.
inline constexpr int kValInfinity = std::numeric_limits<int>::max() / 4;

template <class K>
int poly_valuation(const K& k, const Poly<K>& a) {
    for (int i = 0; i <= a.deg(); ++i)
        if (!k.is_zero(a.c[i])) return i;
    return kValInfinity;
}

template <class K>
std::pair<Poly<K>, Poly<K>> poly_divmod(const K& k, const Poly<K>& a, const Poly<K>& b) {
    if (b.zero()) throw internal_error("polynomial division by zero");
    Poly<K> r = a, q;
    int db = b.deg();
    if (a.deg() < db) return {Poly<K>{}, a};
    q.c.assign(a.deg() - db + 1, k.zero());
    auto lc_inv = k.inv(b.c.back());
    for (int i = r.deg(); i >= db; --i) {
        if (static_cast<int>(r.c.size()) - 1 != i) continue;  // already cancelled
        if (k.is_zero(r.c[i])) { r.c.pop_back(); continue; }
        auto f = k.mul(r.c[i], lc_inv);
        q.c[i - db] = f;
        for (int j = 0; j <= db; ++j)
            r.c[i - db + j] = k.sub(r.c[i - db + j], k.mul(f, b.c[j]));
        r.c.pop_back();
    }
    return {poly_trim(k, std::move(q)), poly_trim(k, std::move(r))};
}

template <class K>
Poly<K> poly_rem(const K& k, const Poly<K>& a, const Poly<K>& b) {
    return poly_divmod(k, a, b).second;
}

template <class K>
Poly<K> poly_quo(const K& k, const Poly<K>& a, const Poly<K>& b) {
    return poly_divmod(k, a, b).first;
}

// Exact quotient; faults if the division leaves a remainder.
template <class K>
Poly<K> poly_exact_div(const K& k, const Poly<K>& a, const Poly<K>& b) {
    auto [q, r] = poly_divmod(k, a, b);
    if (!r.zero()) throw internal_error("poly_exact_div: inexact division");
    return q;
}

template <class K>
bool poly_divides(const K& k, const Poly<K>& b, const Poly<K>& a) {
    if (b.zero()) return a.zero();
    return poly_rem(k, a, b).zero();
}

template <class K>
Poly<K> poly_monic(const K& k, const Poly<K>& a) {
    if (a.zero()) return a;
    return poly_scale(k, k.inv(a.c.back()), a);
}

template <class K>
Poly<K> poly_gcd(const K& k, Poly<K> a, Poly<K> b) {
    while (!b.zero()) {
        auto r = poly_rem(k, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return a.zero() ? a : poly_monic(k, a);
}

// Returns (g, u, v) with u*a + v*b = g, g monic (or zero).
template <class K>
std::array<Poly<K>, 3> poly_xgcd(const K& k, const Poly<K>& a, const Poly<K>& b) {
    Poly<K> r0 = a, r1 = b;
    Poly<K> s0 = poly_one(k), s1 = poly_zero(k);
    Poly<K> t0 = poly_zero(k), t1 = poly_one(k);
    while (!r1.zero()) {
        auto [q, r2] = poly_divmod(k, r0, r1);
        r0 = std::move(r1); r1 = std::move(r2);
        Poly<K> s2 = poly_sub(k, s0, poly_mul(k, q, s1));
        s0 = std::move(s1); s1 = std::move(s2);
        Poly<K> t2 = poly_sub(k, t0, poly_mul(k, q, t1));
        t0 = std::move(t1); t1 = std::move(t2);
    }
    if (r0.zero()) return {r0, s0, t0};
    auto lcinv = k.inv(r0.c.back());
    return {poly_scale(k, lcinv, r0), poly_scale(k, lcinv, s0), poly_scale(k, lcinv, t0)};
}

template <class K>
Poly<K> poly_derivative(const K& k, const Poly<K>& a) {
    Poly<K> r;
    for (int i = 1; i <= a.deg(); ++i) {
        // i * c_i through repeated addition is wasteful; use from_int scaling.
        r.c.push_back(k.mul(k.from_int(i), a.c[i]));
    }
    return poly_trim(k, std::move(r));
}

template <class K>
typename K::Element poly_eval(const K& k, const Poly<K>& a, const typename K::Element& x) {
    auto r = k.zero();
    for (int i = a.deg(); i >= 0; --i) r = k.add(k.mul(r, x), a.c[i]);
    return r;
}

// p(x + a).
template <class K>
Poly<K> poly_taylor_shift(const K& k, const Poly<K>& p, const typename K::Element& a) {
    Poly<K> r;
    Poly<K> lin;  // x + a
    lin.c = {a, k.one()};
    lin = poly_trim(k, std::move(lin));
    for (int i = p.deg(); i >= 0; --i) {
        r = poly_mul(k, r, lin);
        r = poly_add(k, r, poly_const(k, p.c[i]));
    }
    return r;
}

// x^d * p(1/x) for d >= deg p: coefficient reversal padded to degree d.
template <class K>
Poly<K> poly_reverse_pad(const K& k, const Poly<K>& p, int d) {
    if (p.deg() > d) throw internal_error("poly_reverse_pad: degree exceeds pad");
    Poly<K> r;
    r.c.assign(d + 1, k.zero());
    for (int i = 0; i <= p.deg(); ++i) r.c[d - i] = p.c[i];
    return poly_trim(k, std::move(r));
}

// base^e mod m with an arbitrary-precision exponent.
template <class K>
Poly<K> poly_powmod(const K& k, Poly<K> base, Int e, const Poly<K>& m) {
    if (e < 0) throw internal_error("poly_powmod: negative exponent");
    Poly<K> r = poly_one(k);
    base = poly_rem(k, base, m);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = poly_rem(k, poly_mul(k, r, base), m);
        base = poly_rem(k, poly_mul(k, base, base), m);
        e >>= 1;
    }
    return r;
}

// Multiplicity of the (nonzero) factor d in a.
template <class K>
int poly_multiplicity(const K& k, const Poly<K>& a, const Poly<K>& d) {
    if (a.zero()) throw internal_error("poly_multiplicity of zero polynomial");
    if (d.deg() < 1) throw internal_error("poly_multiplicity: constant factor");
    int m = 0;
    Poly<K> cur = a;
    while (true) {
        auto [q, r] = poly_divmod(k, cur, d);
        if (!r.zero()) return m;
        cur = std::move(q);
        ++m;
    }
}

template <class K>
std::string poly_to_string(const K& k, const Poly<K>& p, const std::string& var) {
    if (p.zero()) return "0";
    std::string out;
    bool first = true;
    for (int i = p.deg(); i >= 0; --i) {
        if (k.is_zero(p.c[i])) continue;
        std::string cs = k.to_string(p.c[i]);
        // Parenthesize composite coefficients (sums, products, interior minus)
        // but not plain negative numbers.
        bool needs_paren = cs.find_first_of("+*") != std::string::npos ||
                           cs.find('-', 1) != std::string::npos;
        if (!first) out += " + ";
        first = false;
        if (i == 0) {
            out += needs_paren ? "(" + cs + ")" : cs;
            continue;
        }
        std::string xs = (i == 1) ? var : var + "^" + std::to_string(i);
        if (k.is_one(p.c[i])) {
            out += xs;
        } else {
            out += (needs_paren ? "(" + cs + ")" : cs) + "*" + xs;
        }
    }
    return out;
}

}  // namespace ellrank
