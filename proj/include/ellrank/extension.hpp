#pragma once

#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "ellrank/errors.hpp"
#include "ellrank/numeric.hpp"
#include "ellrank/poly.hpp"

// Quotient-ring field K[y]/(h) for a monic modulus h over an arbitrary base
// field K. Covers F_{p^m} over F_p, residue fields k[t]/(pi) of places over
// any base, and number fields Q[y]/(pi); towers compose by instantiation.
// Elements are coefficient vectors of length exactly deg h.
//
// Irreducibility of the modulus is the caller's responsibility; arithmetic is
// well defined over any monic modulus, and inv() faults on zero divisors.

namespace ellrank {

template <class K>
class ExtensionField {
  public:
    using Base = K;
    using Element = std::vector<typename K::Element>;
    static constexpr bool is_char_zero = K::is_char_zero;

    ExtensionField() = default;
    ExtensionField(K base, Poly<K> modulus, std::string var = "y")
        : base_(std::move(base)), mod_(std::move(modulus)), var_(std::move(var)) {
        if (mod_.deg() < 1) throw internal_error("extension modulus must be nonconstant");
        if (!base_.is_one(mod_.c.back())) mod_ = poly_monic(base_, mod_);
    }

    const K& base() const { return base_; }
    const Poly<K>& modulus() const { return mod_; }
    int degree() const { return mod_.deg(); }
    const std::string& var() const { return var_; }

    Element embed(const typename K::Element& a) const {
        Element e(degree(), base_.zero());
        e[0] = a;
        return e;
    }
    Element zero() const { return Element(degree(), base_.zero()); }
    Element one() const { return embed(base_.one()); }
    Element from_int(long n) const { return embed(base_.from_int(n)); }
    // The class of y.
    Element gen() const {
        if (degree() == 1) {
            // y = -h_0 in K[y]/(y + h_0)
            return embed(base_.neg(mod_.c[0]));
        }
        Element e = zero();
        e[1] = base_.one();
        return e;
    }

    Element reduce(const Poly<K>& p) const {
        Poly<K> r = poly_rem(base_, p, mod_);
        Element e(degree(), base_.zero());
        for (int i = 0; i <= r.deg(); ++i) e[i] = r.c[i];
        return e;
    }
    Poly<K> lift(const Element& a) const {
        Poly<K> p;
        p.c = a;
        return poly_trim(base_, std::move(p));
    }

    Element add(const Element& a, const Element& b) const {
        Element r(degree(), base_.zero());
        for (int i = 0; i < degree(); ++i) r[i] = base_.add(a[i], b[i]);
        return r;
    }
    Element sub(const Element& a, const Element& b) const {
        Element r(degree(), base_.zero());
        for (int i = 0; i < degree(); ++i) r[i] = base_.sub(a[i], b[i]);
        return r;
    }
    Element neg(const Element& a) const {
        Element r(degree(), base_.zero());
        for (int i = 0; i < degree(); ++i) r[i] = base_.neg(a[i]);
        return r;
    }
    Element mul(const Element& a, const Element& b) const {
        return reduce(poly_mul(base_, lift(a), lift(b)));
    }
    Element inv(const Element& a) const {
        auto [g, u, v] = poly_xgcd(base_, lift(a), mod_);
        (void)v;
        if (g.deg() != 0) throw internal_error("non-unit inverse in extension field (modulus not irreducible or zero element)");
        return reduce(u);
    }
    Element div(const Element& a, const Element& b) const { return mul(a, inv(b)); }

    bool is_zero(const Element& a) const {
        for (const auto& e : a)
            if (!base_.is_zero(e)) return false;
        return true;
    }
    bool is_one(const Element& a) const {
        if (!base_.is_one(a[0])) return false;
        for (int i = 1; i < degree(); ++i)
            if (!base_.is_zero(a[i])) return false;
        return true;
    }
    bool eq(const Element& a, const Element& b) const {
        for (int i = 0; i < degree(); ++i)
            if (!base_.eq(a[i], b[i])) return false;
        return true;
    }

    unsigned long characteristic() const { return base_.characteristic(); }
    bool finite() const { return base_.finite(); }
    Int cardinality() const {
        Int b = base_.cardinality(), r = 1;
        for (int i = 0; i < degree(); ++i) r *= b;
        return r;
    }
    Element element_by_index(const Int& i0) const {
        Int i = i0, b = base_.cardinality();
        Element e(degree(), base_.zero());
        for (int j = 0; j < degree(); ++j) {
            e[j] = base_.element_by_index(i % b);
            i /= b;
        }
        return e;
    }

    std::string to_string(const Element& a) const {
        return poly_to_string(base_, lift(a), var_);
    }
    bool same_field(const ExtensionField& o) const {
        return base_.same_field(o.base_) && poly_eq(base_, mod_, o.mod_);
    }
    int cmp(const Element& a, const Element& b) const {
        for (int i = degree() - 1; i >= 0; --i)
            if (int c = base_.cmp(a[i], b[i]); c != 0) return c;
        return 0;
    }

  private:
    K base_;
    Poly<K> mod_;
    std::string var_ = "y";
};

// Trait helpers used by dispatching code.
template <class F>
struct is_extension_field : std::false_type {};
template <class K>
struct is_extension_field<ExtensionField<K>> : std::true_type {};
template <class F>
inline constexpr bool is_extension_field_v = is_extension_field<F>::value;

}  // namespace ellrank
