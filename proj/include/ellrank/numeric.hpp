#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ellrank/errors.hpp"

// Exact coefficient fields: the rationals, word-sized prime fields, and the
// auxiliary ring Z/M used by lifting code. Every field type exposes the same
// value-style interface (context object with pure methods, plain elements),
// which the generic polynomial and extension-field templates consume.

namespace ellrank {

using Int = mpz_class;
using Rat = mpq_class;

inline Int int_pow(Int base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline bool is_prime(const Int& n) {
    return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

inline Int next_prime_above(const Int& n) {
    Int r;
    mpz_nextprime(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline unsigned long two_adic_valuation(const Int& n) {
    if (n == 0) throw internal_error("two_adic_valuation of zero");
    return mpz_scan1(n.get_mpz_t(), 0);
}

inline bool is_perfect_square(const Int& n, Int* root = nullptr) {
    if (n < 0) return false;
    Int r, rem;
    mpz_sqrtrem(r.get_mpz_t(), rem.get_mpz_t(), n.get_mpz_t());
    if (rem != 0) return false;
    if (root) *root = r;
    return true;
}

// Exact integer n-th root when it exists.
inline bool is_perfect_power(const Int& n, unsigned long e, Int* root = nullptr) {
    Int r;
    int exact = mpz_root(r.get_mpz_t(), n.get_mpz_t(), e);
    if (!exact) return false;
    if (root) *root = r;
    return true;
}

// Rational reconstruction: the unique n/d with a*d = n (mod m),
// |n| <= B, 0 < d <= B where B = floor(sqrt(m/2)), if one exists.
inline std::optional<std::pair<Int, Int>> rational_reconstruct(const Int& a0, const Int& m) {
    Int bound;
    mpz_sqrt(bound.get_mpz_t(), Int(m / 2).get_mpz_t());
    Int a = a0 % m;
    if (a < 0) a += m;
    Int r0 = m, r1 = a, t0 = 0, t1 = 1;
    while (r1 > bound) {
        Int q = r0 / r1;
        Int r2 = r0 - q * r1;
        Int t2 = t0 - q * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
    }
    Int n = r1, d = t1;
    if (d < 0) { n = -n; d = -d; }
    if (d == 0 || d > bound) return std::nullopt;
    Int g;
    mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), m.get_mpz_t());
    if (g != 1) return std::nullopt;
    Int g2;
    mpz_gcd(g2.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    if (g2 != 1) return std::nullopt;
    if ((a * d - n) % m != 0) return std::nullopt;
    return std::make_pair(n, d);
}

// ---------------------------------------------------------------------------
// Field of rational numbers.

class Rationals {
  public:
    using Element = Rat;
    static constexpr bool is_char_zero = true;

    Element zero() const { return Rat(0); }
    Element one() const { return Rat(1); }
    Element from_int(long n) const { return Rat(n); }
    Element from_rat(const Rat& q) const { return q; }

    Element add(const Element& a, const Element& b) const { return a + b; }
    Element sub(const Element& a, const Element& b) const { return a - b; }
    Element mul(const Element& a, const Element& b) const { return a * b; }
    Element neg(const Element& a) const { return -a; }
    Element inv(const Element& a) const {
        if (a == 0) throw internal_error("inverse of zero in Q");
        return 1 / a;
    }
    Element div(const Element& a, const Element& b) const { return mul(a, inv(b)); }

    bool is_zero(const Element& a) const { return a == 0; }
    bool is_one(const Element& a) const { return a == 1; }
    bool eq(const Element& a, const Element& b) const { return a == b; }

    unsigned long characteristic() const { return 0; }
    bool finite() const { return false; }
    Int cardinality() const { throw internal_error("cardinality of Q"); }
    Element element_by_index(const Int&) const { throw internal_error("enumeration of Q"); }

    std::string to_string(const Element& a) const { return a.get_str(); }
    bool same_field(const Rationals&) const { return true; }
    int cmp(const Element& a, const Element& b) const { return ::cmp(a, b); }
};

// ---------------------------------------------------------------------------
// Prime field F_p for word-sized p. Elements are canonical residues in
// [0, p). p must be an odd prime below 2^32 (callers reject 2 and 3 where
// the theory demands it; the field itself only requires primality).

class PrimeField {
  public:
    using Element = std::uint64_t;
    static constexpr bool is_char_zero = false;

    PrimeField() : p_(0) {}
    explicit PrimeField(std::uint64_t p) : p_(p) {
        if (p < 2 || p >= (std::uint64_t(1) << 32) || !is_prime(Int(static_cast<unsigned long>(p))))
            throw capability_error("PrimeField requires a prime below 2^32, got " + std::to_string(p));
    }

    std::uint64_t p() const { return p_; }

    Element zero() const { return 0; }
    Element one() const { return p_ > 1 ? 1 : 0; }
    Element from_int(long n) const {
        long r = n % static_cast<long>(p_);
        if (r < 0) r += static_cast<long>(p_);
        return static_cast<Element>(r);
    }
    Element from_mpz(const Int& n) const {
        Int r = n % Int(static_cast<unsigned long>(p_));
        if (r < 0) r += Int(static_cast<unsigned long>(p_));
        return r.get_ui();
    }

    Element add(Element a, Element b) const { Element s = a + b; return s >= p_ ? s - p_ : s; }
    Element sub(Element a, Element b) const { return a >= b ? a - b : a + p_ - b; }
    Element mul(Element a, Element b) const {
        return static_cast<Element>((static_cast<unsigned __int128>(a) * b) % p_);
    }
    Element neg(Element a) const { return a == 0 ? 0 : p_ - a; }
    Element inv(Element a) const {
        if (a == 0) throw internal_error("inverse of zero in F_p");
        // Extended Euclid on (a, p).
        std::int64_t t0 = 0, t1 = 1;
        std::int64_t r0 = static_cast<std::int64_t>(p_), r1 = static_cast<std::int64_t>(a);
        while (r1 != 0) {
            std::int64_t q = r0 / r1;
            std::int64_t r2 = r0 - q * r1, t2 = t0 - q * t1;
            r0 = r1; r1 = r2;
            t0 = t1; t1 = t2;
        }
        if (r0 != 1) throw internal_error("non-unit in F_p inverse");
        if (t0 < 0) t0 += static_cast<std::int64_t>(p_);
        return static_cast<Element>(t0);
    }
    Element div(Element a, Element b) const { return mul(a, inv(b)); }

    bool is_zero(Element a) const { return a == 0; }
    bool is_one(Element a) const { return a == 1; }
    bool eq(Element a, Element b) const { return a == b; }

    unsigned long characteristic() const { return static_cast<unsigned long>(p_); }
    bool finite() const { return true; }
    Int cardinality() const { return Int(static_cast<unsigned long>(p_)); }
    Element element_by_index(const Int& i) const { return from_mpz(i); }

    std::string to_string(Element a) const { return std::to_string(a); }
    bool same_field(const PrimeField& o) const { return p_ == o.p_; }
    int cmp(Element a, Element b) const { return a < b ? -1 : (a > b ? 1 : 0); }

  private:
    std::uint64_t p_;
};

// ---------------------------------------------------------------------------
// The ring Z/M for arbitrary M. Not a field; division is only defined for
// units and faults loudly otherwise. Used by Hensel lifting, where every
// division is of a maintained unit.

class ZmodRing {
  public:
    using Element = Int;
    static constexpr bool is_char_zero = false;

    ZmodRing() : m_(0) {}
    explicit ZmodRing(Int m) : m_(std::move(m)) {
        if (m_ <= 1) throw internal_error("ZmodRing modulus must exceed 1");
    }

    const Int& modulus() const { return m_; }

    Element reduce(const Int& a) const {
        Int r = a % m_;
        if (r < 0) r += m_;
        return r;
    }
    Element zero() const { return Int(0); }
    Element one() const { return Int(1); }
    Element from_int(long n) const { return reduce(Int(n)); }

    Element add(const Element& a, const Element& b) const { return reduce(a + b); }
    Element sub(const Element& a, const Element& b) const { return reduce(a - b); }
    Element mul(const Element& a, const Element& b) const { return reduce(a * b); }
    Element neg(const Element& a) const { return reduce(-a); }
    Element inv(const Element& a) const {
        Int r;
        if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m_.get_mpz_t()))
            throw internal_error("non-unit inverse in Z/M");
        return r;
    }
    Element div(const Element& a, const Element& b) const { return mul(a, inv(b)); }

    bool is_zero(const Element& a) const { return a == 0; }
    bool is_one(const Element& a) const { return a == 1; }
    bool eq(const Element& a, const Element& b) const { return a == b; }

    unsigned long characteristic() const { return 0; }  // not meaningful; unused
    bool finite() const { return true; }
    Int cardinality() const { return m_; }
    Element element_by_index(const Int& i) const { return reduce(i); }

    std::string to_string(const Element& a) const { return a.get_str(); }
    bool same_field(const ZmodRing& o) const { return m_ == o.m_; }
    int cmp(const Element& a, const Element& b) const { return ::cmp(a, b); }

  private:
    Int m_;
};

// Deterministic splittable RNG for randomized algorithms (equal-degree
// splitting). Seeded from input data so identical inputs give identical runs.
class DetRng {
  public:
    explicit DetRng(std::uint64_t seed) : s_(seed ^ 0x9e3779b97f4a7c15ULL) {}
    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // Uniform-ish value below n (n small relative to 2^64; bias negligible
    // and irrelevant for splitting correctness).
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

  private:
    std::uint64_t s_;
};

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

// Work budget for enumeration-heavy operations, in elementary
// specializations.  Overridable through the ELLRANK_WORK_BUDGET environment
// variable; the default is desk scale.
inline long work_budget() {
    if (const char* s = std::getenv("ELLRANK_WORK_BUDGET")) {
        char* end = nullptr;
        long v = std::strtol(s, &end, 10);
        if (end != s && *end == '\0' && v > 0) return v;
    }
    return 100000000L;
}

}  // namespace ellrank
