#pragma once
// Brute-force divisor-class arithmetic on a trisection curve over a small
// finite field.
//
// The curve C : x^3 + A(t) x + B(t) = 0 is handled purely through its
// function field F = k(t)[x]/(x^3 + A x + B).  Closed points of C are
// enumerated as branches of the cubic above places of the t-line, each with
// an explicit local expansion of x in a place uniformizer.  On top of the
// expansions sits a certified Riemann-Roch solver: the search space
// (x-degree <= 2 numerators, growing t-degrees, denominators supported on
// the poles and on the places where the order k[t][x] can be non-maximal)
// is accepted only once the computed dimension equals deg D - g + 1, which
// is the exact dimension whenever deg D >= 2g - 1.  Linear equivalence of
// divisors is decided by shifting into that certified range with a fixed
// auxiliary place, and the degree-g effective divisors are partitioned into
// linear-equivalence classes, giving the class number and the exact
// 2-torsion rank of the degree-zero divisor class group.
//
// Everything here is deterministic: places, branches, divisors and matrix
// rows are produced in a fixed order, so repeated runs agree bit for bit.

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ellrank/descent.hpp"
#include "ellrank/errors.hpp"
#include "ellrank/extension.hpp"
#include "ellrank/factor.hpp"
#include "ellrank/localfield.hpp"
#include "ellrank/places.hpp"
#include "ellrank/poly.hpp"
#include "ellrank/residue.hpp"

namespace ellrank {

// ---------------------------------------------------------------------------
// Public result types
// ---------------------------------------------------------------------------

// A function (n0 + n1 x + n2 x^2) / den on the trisection curve.
template <class K>
struct TrisectionFunction {
    Poly<K> n0, n1, n2, den;
};

template <class K>
struct RiemannRochSpace {
    int dim = 0;
    std::vector<TrisectionFunction<K>> basis;
};

// Partition of the effective divisors of degree g into linear-equivalence
// classes.  Divisors are sparse lists of (place index, multiplicity) against
// the model's place numbering.
struct DivisorClassTable {
    std::vector<std::vector<std::pair<int, int>>> divisors;
    std::vector<std::vector<int>> classes;  // indices into `divisors`
    std::vector<int> representatives;       // one divisor index per class
    long class_number = 0;
    long two_torsion_count = 0;
    int two_rank = 0;
};

namespace jcdetail {

// ---------------------------------------------------------------------------
// Laurent series over a residue field: s * w^off with s a power series
// ---------------------------------------------------------------------------

template <class F>
struct Laur {
    Series<F> s;
    int off = 0;
};

template <class F>
Laur<F> laur_mul(const F& f, const Laur<F>& a, const Laur<F>& b) {
    return Laur<F>{ser_mul(f, a.s, b.s), a.off + b.off};
}

// Multiply by a sparse exact series sum_j terms[j].second * w^{terms[j].first}
// shifted by boff; used for the (at most two-term) expansion of t.
template <class F>
Laur<F> laur_mul_sparse(const F& f, const Laur<F>& a,
                        const std::vector<std::pair<int, typename F::Element>>& terms,
                        int boff) {
    Laur<F> out;
    out.off = a.off + boff;
    out.s.prec = a.s.prec;
    if (ser_is_exact_zero(a.s) || terms.empty()) {
        out.s = Series<F>{};
        out.s.prec = a.s.prec;
        if (terms.empty()) out.s = Series<F>{};
        return out;
    }
    int maxidx = 0;
    for (auto& [i, c] : terms) maxidx = std::max(maxidx, i);
    int alen = static_cast<int>(a.s.c.size());
    int olen = alen + maxidx;
    if (out.s.prec != kValInfinity) olen = std::min(olen, out.s.prec);
    out.s.c.assign(static_cast<size_t>(std::max(olen, 0)), f.zero());
    for (auto& [i, c] : terms) {
        if (f.is_zero(c)) continue;
        for (int j = 0; j < alen && i + j < olen; ++j)
            out.s.c[static_cast<size_t>(i + j)] =
                f.add(out.s.c[static_cast<size_t>(i + j)],
                      f.mul(c, a.s.c[static_cast<size_t>(j)]));
    }
    ser_trim(f, out.s);
    return out;
}

// Coefficient of w^n.  Exponents below the offset are zero; exponents at or
// beyond the known precision mean the caller under-provisioned expansions.
template <class F>
typename F::Element laur_coeff(const F& f, const Laur<F>& a, int n) {
    if (n < a.off) return f.zero();
    int idx = n - a.off;
    if (idx < static_cast<int>(a.s.c.size())) return a.s.c[static_cast<size_t>(idx)];
    if (a.s.prec == kValInfinity || idx < a.s.prec) return f.zero();
    throw internal_error("jacobian oracle: local expansion precision exhausted");
}

template <class F>
int ser_lex_cmp(const F& f, const Series<F>& a, const Series<F>& b) {
    size_t n = std::max(a.c.size(), b.c.size());
    for (size_t i = 0; i < n; ++i) {
        auto ca = i < a.c.size() ? a.c[i] : f.zero();
        auto cb = i < b.c.size() ? b.c[i] : f.zero();
        int c = f.cmp(ca, cb);
        if (c != 0) return c;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Branch extraction above one place of the t-line
// ---------------------------------------------------------------------------

// One closed point of C above a base place: ramification e, residue degree f
// over the base, residue field kw (as a tower over the base residue field),
// the scaling  u = c * w^e  relating the base uniformizer u to the place
// uniformizer w, and the expansion of the local model x-coordinate in w.
template <class K>
struct ExtractedBranch {
    int e = 1;
    int f = 1;
    ExtensionField<ExtensionField<K>> kw;
    typename ExtensionField<ExtensionField<K>>::Element c;
    Series<ExtensionField<ExtensionField<K>>> xser;
};

template <class K>
bool elem_in_base(const ExtensionField<ExtensionField<K>>& kw,
                  const typename ExtensionField<ExtensionField<K>>::Element& a) {
    return kw.lift(a).deg() <= 0;
}

template <class K>
bool ser_in_base(const ExtensionField<ExtensionField<K>>& kw,
                 const Series<ExtensionField<ExtensionField<K>>>& s) {
    for (auto& c : s.c)
        if (!elem_in_base<K>(kw, c)) return false;
    return true;
}

template <class K>
bool ser_on_lattice(const ExtensionField<ExtensionField<K>>& kw,
                    const Series<ExtensionField<ExtensionField<K>>>& s, int e) {
    for (size_t i = 0; i < s.c.size(); ++i)
        if (static_cast<int>(i) % e != 0 && !kw.is_zero(s.c[i])) return false;
    return true;
}

// Unique ramification signatures (e, f, multiplicity) of the cubic above
// u = 0, in profile order.  Shared by the skeleton pass and the expansion
// pass so branch identities stay aligned.
template <class K>
std::vector<std::array<int, 3>> branch_signatures(const ExtensionField<K>& kv,
                                                  const Poly<ExtensionField<K>>& a4,
                                                  const Poly<ExtensionField<K>>& a6) {
    using E1 = ExtensionField<K>;
    CertifiedResidueOps ops;
    auto prof = local_factor_cubic(kv, ops, Series<E1>{}, ser_from_poly(kv, a4),
                                   ser_from_poly(kv, a6));
    std::vector<std::array<int, 3>> sig;  // (e, f, count)
    for (auto& [e, f] : prof) {
        bool found = false;
        for (auto& s : sig)
            if (s[0] == e && s[1] == f) {
                ++s[2];
                found = true;
            }
        if (!found) sig.push_back({e, f, 1});
    }
    return sig;
}

// All branches of x^3 + a4(u) x + a6(u) above u = 0, with expansions to the
// given absolute precision.  Deterministic: signatures are processed in the
// sorted profile order and roots are sorted lexicographically.
template <class K>
std::vector<ExtractedBranch<K>> extract_branches(const ExtensionField<K>& kv,
                                                 const Poly<ExtensionField<K>>& a4,
                                                 const Poly<ExtensionField<K>>& a6,
                                                 int prec) {
    using E1 = ExtensionField<K>;
    using E2 = ExtensionField<E1>;
    CertifiedResidueOps ops;
    auto sig = branch_signatures(kv, a4, a6);

    std::vector<ExtractedBranch<K>> out;
    for (auto& [e, f, mu] : sig) {
        E2 kw(kv, find_irreducible(kv, f));
        if (e == 1) {
            Poly<E2> A2 = pldetail::embed_poly(kw, a4);
            Poly<E2> B2 = pldetail::embed_poly(kw, a6);
            SPoly<E2> sp{ser_from_poly(kw, B2), ser_from_poly(kw, A2),
                         Series<E2>{}, ser_const(kw, kw.one())};
            auto roots = series_roots_monic(kw, ops, sp, prec);
            std::vector<Series<E2>> keep;
            for (auto& r : roots) {
                bool inb = ser_in_base<K>(kw, r);
                if ((f == 1 && inb) || (f > 1 && !inb)) keep.push_back(r);
            }
            std::sort(keep.begin(), keep.end(), [&](const auto& a, const auto& b) {
                return ser_lex_cmp(kw, a, b) < 0;
            });
            if (f == 1) {
                if (static_cast<int>(keep.size()) != mu)
                    throw internal_error(
                        "jacobian oracle: unramified rational branch count mismatch");
                for (auto& r : keep)
                    out.push_back({1, 1, kw, kw.one(), r});
            } else {
                if (mu != 1 || static_cast<int>(keep.size()) != f)
                    throw internal_error(
                        "jacobian oracle: inert branch root count mismatch");
                out.push_back({1, f, kw, kw.one(), keep[0]});
            }
        } else {
            // Ramified branches of a cubic always have residue degree 1.
            if (f != 1 || mu != 1)
                throw internal_error("jacobian oracle: ramified branch with f > 1");
            Poly<E2> A2 = pldetail::embed_poly(kw, a4);
            Poly<E2> B2 = pldetail::embed_poly(kw, a6);
            bool found = false;
            Int qv = kw.cardinality();
            for (Int ci = 1; ci < qv && !found; ++ci) {
                typename E2::Element c = kw.element_by_index(ci);
                auto sub_poly = [&](const Poly<E2>& p) {
                    Series<E2> s;
                    if (p.zero()) return s;
                    s.c.assign(static_cast<size_t>(e * p.deg() + 1), kw.zero());
                    typename E2::Element cp = kw.one();
                    for (int i = 0; i <= p.deg(); ++i) {
                        s.c[static_cast<size_t>(e * i)] =
                            kw.mul(p.c[static_cast<size_t>(i)], cp);
                        cp = kw.mul(cp, c);
                    }
                    ser_trim(kw, s);
                    return s;
                };
                SPoly<E2> sp{sub_poly(B2), sub_poly(A2), Series<E2>{},
                             ser_const(kw, kw.one())};
                auto roots = series_roots_monic(kw, ops, sp, prec);
                std::vector<Series<E2>> keep;
                for (auto& r : roots)
                    if (!ser_on_lattice<K>(kw, r, e)) keep.push_back(r);
                if (keep.empty()) continue;
                // the visible conjugates are the e-th roots of unity present
                // in the residue field: gcd(e, q_v - 1) of them
                int expected =
                    e == 2 ? 2
                           : (mpz_fdiv_ui(qv.get_mpz_t(), 3) == 1 ? 3 : 1);
                if (static_cast<int>(keep.size()) != expected)
                    throw internal_error(
                        "jacobian oracle: ramified branch conjugate count mismatch");
                std::sort(keep.begin(), keep.end(), [&](const auto& a, const auto& b) {
                    return ser_lex_cmp(kw, a, b) < 0;
                });
                out.push_back({e, 1, kw, c, keep[0]});
                found = true;
            }
            if (!found)
                throw internal_error("jacobian oracle: ramified branch not located");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dense linear algebra over the constant field
// ---------------------------------------------------------------------------

// Reduced row echelon form in place; returns pivot column list.
template <class K>
std::vector<int> rref(const K& k, std::vector<std::vector<typename K::Element>>& rows,
                      int ncols) {
    std::vector<int> pivots;
    size_t rank = 0;
    for (int col = 0; col < ncols && rank < rows.size(); ++col) {
        size_t sel = rows.size();
        for (size_t r = rank; r < rows.size(); ++r)
            if (!k.is_zero(rows[r][static_cast<size_t>(col)])) {
                sel = r;
                break;
            }
        if (sel == rows.size()) continue;
        std::swap(rows[rank], rows[sel]);
        auto inv = k.inv(rows[rank][static_cast<size_t>(col)]);
        for (int c = col; c < ncols; ++c)
            rows[rank][static_cast<size_t>(c)] =
                k.mul(inv, rows[rank][static_cast<size_t>(c)]);
        for (size_t r = 0; r < rows.size(); ++r) {
            if (r == rank) continue;
            auto piv = rows[r][static_cast<size_t>(col)];
            if (k.is_zero(piv)) continue;
            for (int c = col; c < ncols; ++c)
                rows[r][static_cast<size_t>(c)] =
                    k.sub(rows[r][static_cast<size_t>(c)],
                          k.mul(piv, rows[rank][static_cast<size_t>(c)]));
        }
        pivots.push_back(col);
        ++rank;
    }
    rows.resize(rank, std::vector<typename K::Element>());
    return pivots;
}

// Basis of the right nullspace of the row list.
template <class K>
std::vector<std::vector<typename K::Element>> nullspace(
    const K& k, std::vector<std::vector<typename K::Element>> rows, int ncols) {
    auto pivots = rref(k, rows, ncols);
    std::vector<bool> ispivot(static_cast<size_t>(ncols), false);
    for (int p : pivots) ispivot[static_cast<size_t>(p)] = true;
    std::vector<std::vector<typename K::Element>> basis;
    for (int freec = 0; freec < ncols; ++freec) {
        if (ispivot[static_cast<size_t>(freec)]) continue;
        std::vector<typename K::Element> v(static_cast<size_t>(ncols), k.zero());
        v[static_cast<size_t>(freec)] = k.one();
        for (size_t r = 0; r < pivots.size(); ++r)
            v[static_cast<size_t>(pivots[r])] =
                k.neg(rows[r][static_cast<size_t>(freec)]);
        basis.push_back(std::move(v));
    }
    return basis;
}

template <class K>
size_t matrix_rank(const K& k, std::vector<std::vector<typename K::Element>> rows,
                   int ncols) {
    rref(k, rows, ncols);
    return rows.size();
}

}  // namespace jcdetail

// ---------------------------------------------------------------------------
// The model: enumerated places with local expansions
// ---------------------------------------------------------------------------

template <class K>
class SmallJacobianModel {
    static_assert(!K::is_char_zero,
                  "the brute-force jacobian oracle runs over finite constant fields");

  public:
    using E1 = ExtensionField<K>;
    using E2 = ExtensionField<E1>;
    using Laur = jcdetail::Laur<E2>;

    SmallJacobianModel(const K& k, const DescentCurveData<K>& C) : k_(k), C_(C) {
        if (k.cardinality() > 9)
            throw capability_error(
                "the brute-force jacobian oracle supports constant fields with at "
                "most 9 elements");
        if (C.genus > 2)
            throw capability_error(
                "the brute-force jacobian oracle supports genus <= 2, got genus " +
                std::to_string(C.genus));
        genus_ = C.genus;
        hinf_ = infinity_twist_height(k, C.model);
        build_bases();
        pick_aux();
    }

    int genus() const { return genus_; }
    int place_count() const { return static_cast<int>(places_.size()); }
    int place_degree(int i) const { return places_[static_cast<size_t>(i)].degree; }
    int place_ramification(int i) const { return places_[static_cast<size_t>(i)].e; }
    bool place_infinite(int i) const {
        return bases_[static_cast<size_t>(places_[static_cast<size_t>(i)].base)]
            .v.infinite;
    }
    int degree_one_count() const {
        int n = 0;
        for (auto& p : places_)
            if (p.degree == 1) ++n;
        return n;
    }
    // First degree-1 place above the infinite base place, if any.
    std::optional<int> infinite_degree_one_place() const {
        for (size_t i = 0; i < places_.size(); ++i)
            if (place_infinite(static_cast<int>(i)) && places_[i].degree == 1)
                return static_cast<int>(i);
        return std::nullopt;
    }
    std::string place_label(int i) const {
        const auto& p = places_[static_cast<size_t>(i)];
        const auto& b = bases_[static_cast<size_t>(p.base)];
        std::string base = b.v.infinite ? std::string("infinity")
                                        : poly_to_string(k_, b.v.pi, "t");
        return "(" + base + ", branch e=" + std::to_string(p.e) +
               " f=" + std::to_string(p.f) + ", deg " + std::to_string(p.degree) +
               ")";
    }

    // Certified-complete Riemann-Roch space; requires deg D >= 2g - 1.
    RiemannRochSpace<K> riemann_roch(const std::vector<int>& D) {
        int degD = divisor_degree(D);
        if (degD < 2 * genus_ - 1)
            throw capability_error(
                "certified Riemann-Roch space requires deg D >= 2g - 1");
        int target = degD - genus_ + 1;
        auto res = certified_solve(D, target);
        RiemannRochSpace<K> out;
        out.dim = res.dim;
        for (auto& v : res.nullbasis) {
            TrisectionFunction<K> fn;
            fn.n0 = slice_poly(v, 0, res.N);
            fn.n1 = slice_poly(v, 1, res.N);
            fn.n2 = slice_poly(v, 2, res.N);
            fn.den = res.den;
            out.basis.push_back(std::move(fn));
        }
        return out;
    }

    // Linear equivalence of divisors of equal degree, via a shift by the
    // auxiliary place into the certified-complete range.
    bool equivalent(const std::vector<int>& D1, const std::vector<int>& D2) {
        if (divisor_degree(D1) != divisor_degree(D2))
            throw internal_error("equivalence test requires equal degrees");
        if (D1 == D2) return true;
        std::vector<int> delta(places_.size(), 0);
        for (size_t i = 0; i < places_.size(); ++i)
            delta[i] = D1[i] - D2[i];
        delta[static_cast<size_t>(aux_)] += m_;
        int target = m_ * place_degree(aux_) - genus_ + 1;
        auto res = certified_solve(delta, target);
        // Impose the extra vanishing at the auxiliary place on the certified
        // basis: D1 ~ D2 iff some basis combination vanishes there to the
        // full shifted order.
        size_t extra_rank = constrained_rank(res, delta, aux_, m_);
        return extra_rank < res.nullbasis.size();
    }

    DivisorClassTable class_table() {
        if (table_) return *table_;
        DivisorClassTable tab;
        if (genus_ == 0) {
            tab.divisors.push_back({});
            tab.classes.push_back({0});
            tab.representatives.push_back(0);
            tab.class_number = 1;
            tab.two_torsion_count = 1;
            tab.two_rank = 0;
            table_ = tab;
            return tab;
        }
        auto divs = enumerate_effective();
        std::vector<int> reps;
        std::vector<std::vector<int>> classes;
        for (size_t di = 0; di < divs.size(); ++di) {
            bool placed = false;
            for (size_t c = 0; c < reps.size(); ++c) {
                if (equivalent(divs[di], divs[static_cast<size_t>(reps[c])])) {
                    classes[c].push_back(static_cast<int>(di));
                    placed = true;
                    break;
                }
            }
            if (!placed) {
                reps.push_back(static_cast<int>(di));
                classes.push_back({static_cast<int>(di)});
                if (classes.size() > 100000)
                    throw capability_error(
                        "divisor class enumeration exceeded the class-number cap "
                        "100000");
            }
        }
        // 2-torsion: classes [D] with 2D ~ 2D0 against the origin D0.
        const auto& D0 = divs[static_cast<size_t>(reps[0])];
        auto dbl = [this](const std::vector<int>& d) {
            std::vector<int> r(places_.size(), 0);
            for (size_t i = 0; i < d.size(); ++i) r[i] = 2 * d[i];
            return r;
        };
        auto D0d = dbl(D0);
        long twocount = 0;
        for (int rep : reps)
            if (equivalent(dbl(divs[static_cast<size_t>(rep)]), D0d)) ++twocount;
        if (twocount <= 0 || (twocount & (twocount - 1)) != 0)
            throw internal_error(
                "2-torsion class count is not a power of two: " +
                std::to_string(twocount));
        int rank = 0;
        while ((1L << rank) < twocount) ++rank;

        for (auto& d : divs) tab.divisors.push_back(sparse(d));
        tab.classes = std::move(classes);
        tab.representatives = std::move(reps);
        tab.class_number = static_cast<long>(tab.representatives.size());
        tab.two_torsion_count = twocount;
        tab.two_rank = rank;
        table_ = tab;
        return tab;
    }

    int two_rank() { return class_table().two_rank; }

    int divisor_degree(const std::vector<int>& D) const {
        if (D.size() != places_.size())
            throw internal_error("divisor length does not match the place list");
        int d = 0;
        for (size_t i = 0; i < D.size(); ++i)
            d += D[i] * places_[i].degree;
        return d;
    }

  private:
    struct JacBase {
        Place<K> v;
        E1 kv;
        Poly<E1> a4, a6;
        bool singular = false;   // pi^2 divides 4A^3 + 27B^2
        bool extracted = false;  // expansions computed (they are lazy)
        int floorprec = 32;      // separation floor for branch expansions
        int prec = 0;            // current expansion precision of its branches
        int first_place = 0;     // index of its first branch in places_
        int nbranch = 0;
    };
    struct JacPlace {
        int base = 0;
        int e = 1, f = 1;
        int degree = 1;
        E2 kw;
        typename E2::Element c;  // u = c * w^e
        Series<E2> xser;         // local model x-coordinate in w
    };
    struct MonoCache {
        int N = -1;
        int prec = 0;
        int lo = 0;
        std::array<std::vector<Laur>, 3> mono;  // mono[j][i] = t^i x^j
    };
    struct SolveResult {
        int dim = 0;
        std::vector<std::vector<typename K::Element>> nullbasis;
        Poly<K> den;
        std::vector<int> wv;  // denominator exponent per base
        int N = 0;
        int W = 0;
    };

    // ---- construction -----------------------------------------------------

    void build_bases() {
        std::vector<Place<K>> bp;
        Int q = k_.cardinality();
        for (Int a = 0; a < q; ++a) {
            Poly<K> pi;
            pi.c = {k_.element_by_index(a), k_.one()};
            bp.push_back(make_finite_place(k_, pi));
        }
        for (Int a = 0; a < q; ++a)
            for (Int b = 0; b < q; ++b) {
                Poly<K> pi;
                pi.c = {k_.element_by_index(b), k_.element_by_index(a), k_.one()};
                pi = poly_trim(k_, std::move(pi));
                if (is_irreducible_finite(k_, pi)) bp.push_back(make_finite_place(k_, pi));
            }
        // places where the order k[t][x] can be non-maximal: pi^2 | disc
        auto disc = poly_add(
            k_, poly_scale(k_, k_.from_int(4), poly_mul(k_, C_.model.A,
                                                        poly_mul(k_, C_.model.A, C_.model.A))),
            poly_scale(k_, k_.from_int(27), poly_mul(k_, C_.model.B, C_.model.B)));
        if (disc.zero())
            throw internal_error("jacobian oracle: vanishing cubic discriminant");
        auto fl = factor_finite(k_, disc);
        std::vector<Poly<K>> singular;
        for (auto& [fac, mult] : fl.factors)
            if (mult >= 2) singular.push_back(fac);
        for (auto& pi : singular) {
            bool present = false;
            for (auto& v : bp)
                if (!v.infinite && poly_eq(k_, v.pi, pi)) present = true;
            if (!present) bp.push_back(make_finite_place(k_, pi));
        }
        bp.push_back(make_infinite_place(k_));
        std::sort(bp.begin(), bp.end(), [&](const Place<K>& a, const Place<K>& b) {
            return place_cmp(k_, a, b) < 0;
        });

        for (auto& v : bp) {
            JacBase jb;
            jb.v = v;
            auto lm = localize_at(k_, C_.model, v);
            jb.kv = lm.kv;
            jb.a4 = lm.a4;
            jb.a6 = lm.a6;
            jb.singular = false;
            if (!v.infinite)
                for (auto& pi : singular)
                    if (poly_eq(k_, v.pi, pi)) jb.singular = true;
            // precision floor: the branches are separated well before twice
            // the local discriminant valuation
            auto dloc = poly_add(
                jb.kv,
                poly_scale(jb.kv, jb.kv.from_int(4),
                           poly_mul(jb.kv, jb.a4, poly_mul(jb.kv, jb.a4, jb.a4))),
                poly_scale(jb.kv, jb.kv.from_int(27), poly_mul(jb.kv, jb.a6, jb.a6)));
            int vloc = 0;
            while (vloc <= dloc.deg() && jb.kv.is_zero(dloc.c[static_cast<size_t>(vloc)]))
                ++vloc;
            jb.floorprec = std::max(32, 2 * vloc + 10);
            jb.prec = 0;
            jb.extracted = false;
            jb.first_place = static_cast<int>(places_.size());
            // skeleton pass: branch identities and residue fields, no roots yet
            auto sig = jcdetail::branch_signatures(jb.kv, jb.a4, jb.a6);
            int bi = static_cast<int>(bases_.size());
            int nb = 0;
            for (auto& [e, f, mu] : sig) {
                E2 kw(jb.kv, find_irreducible(jb.kv, f));
                int copies = (e == 1 && f == 1) ? mu : 1;
                for (int cidx = 0; cidx < copies; ++cidx) {
                    JacPlace p{bi, e, f, f * v.degree(), kw, kw.one(), Series<E2>{}};
                    places_.push_back(std::move(p));
                    ++nb;
                }
            }
            jb.nbranch = nb;
            bases_.push_back(std::move(jb));
        }
        mono_.assign(places_.size(), MonoCache{});
    }

    void pick_aux() {
        aux_ = -1;
        for (size_t i = 0; i < places_.size() && aux_ < 0; ++i)
            if (places_[i].degree == 1) aux_ = static_cast<int>(i);
        for (size_t i = 0; i < places_.size() && aux_ < 0; ++i)
            if (places_[i].degree == 2) aux_ = static_cast<int>(i);
        if (aux_ < 0)
            throw capability_error(
                "jacobian oracle: no place of degree <= 2 to anchor equivalence "
                "tests");
        int need = std::max(1, 2 * genus_ - 1);
        int da = place_degree(aux_);
        m_ = (need + da - 1) / da;
    }

    void ensure_base_prec(int bi, int prec) {
        auto& jb = bases_[static_cast<size_t>(bi)];
        if (jb.extracted && jb.prec >= prec) return;
        int p2 = std::max({prec, jb.floorprec, 2 * jb.prec});
        auto br = jcdetail::extract_branches(jb.kv, jb.a4, jb.a6, p2);
        if (static_cast<int>(br.size()) != jb.nbranch)
            throw internal_error("jacobian oracle: branch list changed under refinement");
        for (int j = 0; j < jb.nbranch; ++j) {
            auto& p = places_[static_cast<size_t>(jb.first_place + j)];
            if (br[static_cast<size_t>(j)].e != p.e || br[static_cast<size_t>(j)].f != p.f)
                throw internal_error("jacobian oracle: branch identity changed under refinement");
            p.xser = br[static_cast<size_t>(j)].xser;
            p.c = br[static_cast<size_t>(j)].c;
            mono_[static_cast<size_t>(jb.first_place + j)] = MonoCache{};
        }
        jb.prec = p2;
        jb.extracted = true;
    }

    // ---- expansions -------------------------------------------------------

    // Monomial expansions t^i x^j at a place, i <= N, to series index depth
    // needidx in the place uniformizer.
    const MonoCache& monomials(int pi, int N, int needidx) {
        auto& mc = mono_[static_cast<size_t>(pi)];
        const auto& p = places_[static_cast<size_t>(pi)];
        const auto& jb = bases_[static_cast<size_t>(p.base)];
        if (mc.N >= N && mc.prec >= needidx) return mc;
        ensure_base_prec(p.base, needidx + 8);
        const auto& pl = places_[static_cast<size_t>(pi)];
        const auto& kw = pl.kw;

        MonoCache fresh;
        fresh.N = N;
        fresh.prec = needidx + 8;

        // expansion data for t
        std::vector<std::pair<int, typename E2::Element>> tterms;
        int tboff = 0;
        if (jb.v.infinite) {
            // t = 1/u, u = c w^e
            tterms = {{0, kw.inv(pl.c)}};
            tboff = -pl.e;
        } else {
            auto theta = kw.embed(jb.kv.gen());
            if (!kw.is_zero(theta)) tterms.push_back({0, theta});
            tterms.push_back({pl.e, pl.c});
        }

        Laur xl;
        if (jb.v.infinite) {
            auto cinv = kw.inv(pl.c);
            typename E2::Element sc = kw.one();
            for (int i = 0; i < 2 * hinf_; ++i) sc = kw.mul(sc, cinv);
            xl = Laur{ser_scale(kw, sc, pl.xser), -2 * hinf_ * pl.e};
        } else {
            xl = Laur{pl.xser, 0};
        }

        Laur one{ser_const(kw, kw.one()), 0};
        fresh.mono[0].push_back(one);
        fresh.mono[1].push_back(xl);
        fresh.mono[2].push_back(jcdetail::laur_mul(kw, xl, xl));
        for (int j = 0; j < 3; ++j)
            for (int i = 1; i <= N; ++i)
                fresh.mono[static_cast<size_t>(j)].push_back(jcdetail::laur_mul_sparse(
                    kw, fresh.mono[static_cast<size_t>(j)][static_cast<size_t>(i - 1)],
                    tterms, tboff));
        fresh.lo = 0;
        for (int j = 0; j < 3; ++j)
            for (auto& l : fresh.mono[static_cast<size_t>(j)])
                fresh.lo = std::min(fresh.lo, l.off);
        mc = std::move(fresh);
        return mc;
    }

    // coordinates of a tower element over K, length f * deg(kv)
    std::vector<typename K::Element> flatten(int pi, const typename E2::Element& a) const {
        const auto& p = places_[static_cast<size_t>(pi)];
        const auto& jb = bases_[static_cast<size_t>(p.base)];
        int vdeg = jb.v.degree();
        std::vector<typename K::Element> out;
        out.reserve(static_cast<size_t>(p.f * vdeg));
        auto outer = p.kw.lift(a);  // Poly<E1>, degree < f
        for (int io = 0; io < p.f; ++io) {
            typename E1::Element ce =
                io <= outer.deg() ? outer.c[static_cast<size_t>(io)] : jb.kv.zero();
            auto inner = jb.kv.lift(ce);  // Poly<K>, degree < vdeg
            for (int ii = 0; ii < vdeg; ++ii)
                out.push_back(ii <= inner.deg() ? inner.c[static_cast<size_t>(ii)]
                                                : k_.zero());
        }
        return out;
    }

    // ---- the solver -------------------------------------------------------

    std::vector<int> den_exponents(const std::vector<int>& D, int W) const {
        std::vector<int> wv(bases_.size(), 0);
        for (size_t bi = 0; bi < bases_.size(); ++bi)
            if (bases_[bi].singular && !bases_[bi].v.infinite)
                wv[bi] = W;
        for (size_t pi = 0; pi < places_.size(); ++pi) {
            if (D[pi] <= 0) continue;
            int bi = places_[pi].base;
            if (bases_[static_cast<size_t>(bi)].v.infinite) continue;
            wv[static_cast<size_t>(bi)] =
                std::max(wv[static_cast<size_t>(bi)], W + D[pi]);
        }
        return wv;
    }

    SolveResult rr_solve(const std::vector<int>& D, int N, int W) {
        SolveResult res;
        res.N = N;
        res.W = W;
        res.wv = den_exponents(D, W);
        int dentot = 0;
        for (size_t bi = 0; bi < bases_.size(); ++bi)
            if (res.wv[bi] > 0) dentot += res.wv[bi] * bases_[bi].v.degree();

        // constrained bases: denominator support, divisor support, infinity
        std::vector<bool> constrained(bases_.size(), false);
        for (size_t bi = 0; bi < bases_.size(); ++bi) {
            if (res.wv[bi] > 0) constrained[bi] = true;
            if (bases_[bi].v.infinite) constrained[bi] = true;
        }
        for (size_t pi = 0; pi < places_.size(); ++pi)
            if (D[pi] != 0) constrained[static_cast<size_t>(places_[pi].base)] = true;

        int ncols = 3 * (N + 1);
        std::vector<std::vector<typename K::Element>> rows;
        for (size_t bi = 0; bi < bases_.size(); ++bi) {
            if (!constrained[bi]) continue;
            const auto& jb = bases_[bi];
            for (int j = 0; j < jb.nbranch; ++j) {
                int pi = jb.first_place + j;
                const auto& p = places_[static_cast<size_t>(pi)];
                int vden = jb.v.infinite ? -p.e * dentot : p.e * res.wv[bi];
                int tau = vden - D[static_cast<size_t>(pi)];
                int lo_est = jb.v.infinite ? -p.e * (N + 4 * hinf_ + 1) : 0;
                if (tau <= lo_est) continue;
                const auto& mc = monomials(pi, N, tau - lo_est + 4);
                int lo = std::min(mc.lo, tau - 1);
                const auto& kw = places_[static_cast<size_t>(pi)].kw;
                int fdeg = p.f * jb.v.degree();
                for (int w = lo; w < tau; ++w) {
                    std::vector<std::vector<typename K::Element>> block(
                        static_cast<size_t>(fdeg),
                        std::vector<typename K::Element>(static_cast<size_t>(ncols),
                                                         k_.zero()));
                    for (int jx = 0; jx < 3; ++jx)
                        for (int i = 0; i <= N; ++i) {
                            auto cf = jcdetail::laur_coeff(
                                kw, mc.mono[static_cast<size_t>(jx)][static_cast<size_t>(i)],
                                w);
                            if (kw.is_zero(cf)) continue;
                            auto coords = flatten(pi, cf);
                            int col = jx * (N + 1) + i;
                            for (int r = 0; r < fdeg; ++r)
                                block[static_cast<size_t>(r)][static_cast<size_t>(col)] =
                                    coords[static_cast<size_t>(r)];
                        }
                    for (auto& b : block) rows.push_back(std::move(b));
                }
            }
        }
        res.nullbasis = jcdetail::nullspace(k_, std::move(rows), ncols);
        res.dim = static_cast<int>(res.nullbasis.size());

        res.den = poly_one();
        for (size_t bi = 0; bi < bases_.size(); ++bi)
            for (int w = 0; w < res.wv[bi]; ++w)
                if (!bases_[bi].v.infinite)
                    res.den = poly_mul(k_, res.den, bases_[bi].v.pi);
        return res;
    }

    SolveResult certified_solve(const std::vector<int>& D, int target) {
        int degpos = 0;
        for (size_t pi = 0; pi < places_.size(); ++pi)
            if (D[pi] > 0) degpos += D[pi] * places_[pi].degree;
        for (int iter = 0; iter < 6; ++iter) {
            int W = 1 + iter;
            auto wv = den_exponents(D, W);
            int dentot = 0;
            for (size_t bi = 0; bi < bases_.size(); ++bi)
                dentot += wv[bi] * bases_[bi].v.degree();
            int N = dentot + degpos + 2 * hinf_ + 4 + 4 * iter;
            auto res = rr_solve(D, N, W);
            if (res.dim == target) return res;
            if (res.dim > target)
                throw internal_error(
                    "Riemann-Roch dimension exceeds the Riemann-Roch value: "
                    "expansion constraints are incomplete");
        }
        throw capability_error(
            "Riemann-Roch search space reached its growth cap without certifying "
            "completeness");
    }

    // Rank of the extra vanishing conditions (order `extra` at place `api`)
    // restricted to the certified basis.
    size_t constrained_rank(SolveResult& res, const std::vector<int>& D, int api,
                            int extra) {
        const auto& p = places_[static_cast<size_t>(api)];
        const auto& jb = bases_[static_cast<size_t>(p.base)];
        int dentot = 0;
        for (size_t bi = 0; bi < bases_.size(); ++bi)
            dentot += res.wv[bi] * bases_[bi].v.degree();
        int vden = jb.v.infinite ? -p.e * dentot
                                 : p.e * res.wv[static_cast<size_t>(p.base)];
        int tau = vden - D[static_cast<size_t>(api)];
        int lo_est = jb.v.infinite ? -p.e * (res.N + 4 * hinf_ + 1) : 0;
        const auto& mc = monomials(api, res.N, tau + extra - lo_est + 4);
        const auto& kw = p.kw;
        int fdeg = p.f * jb.v.degree();
        int dim = static_cast<int>(res.nullbasis.size());
        std::vector<std::vector<typename K::Element>> rows;
        for (int w = tau; w < tau + extra; ++w) {
            // E2-coefficient of each basis function at exponent w
            std::vector<typename E2::Element> vals(static_cast<size_t>(dim), kw.zero());
            for (int b = 0; b < dim; ++b) {
                const auto& vec = res.nullbasis[static_cast<size_t>(b)];
                auto acc = kw.zero();
                for (int jx = 0; jx < 3; ++jx)
                    for (int i = 0; i <= res.N; ++i) {
                        const auto& cv =
                            vec[static_cast<size_t>(jx * (res.N + 1) + i)];
                        if (k_.is_zero(cv)) continue;
                        auto cf = jcdetail::laur_coeff(
                            kw, mc.mono[static_cast<size_t>(jx)][static_cast<size_t>(i)],
                            w);
                        acc = kw.add(acc, kw.mul(kw.embed(jb.kv.embed(cv)), cf));
                    }
                vals[static_cast<size_t>(b)] = acc;
            }
            for (int r = 0; r < fdeg; ++r) {
                std::vector<typename K::Element> row(static_cast<size_t>(dim),
                                                     k_.zero());
                bool nz = false;
                for (int b = 0; b < dim; ++b) {
                    auto coords = flatten(api, vals[static_cast<size_t>(b)]);
                    row[static_cast<size_t>(b)] = coords[static_cast<size_t>(r)];
                    if (!k_.is_zero(row[static_cast<size_t>(b)])) nz = true;
                }
                if (nz) rows.push_back(std::move(row));
            }
        }
        return jcdetail::matrix_rank(k_, std::move(rows), dim);
    }

    // ---- divisors ---------------------------------------------------------

    std::vector<std::vector<int>> enumerate_effective() const {
        std::vector<std::vector<int>> out;
        std::vector<int> deg1, deg2;
        for (size_t i = 0; i < places_.size(); ++i) {
            if (places_[i].degree == 1) deg1.push_back(static_cast<int>(i));
            if (places_[i].degree == 2) deg2.push_back(static_cast<int>(i));
        }
        auto unit = [this](int i, int n) {
            std::vector<int> d(places_.size(), 0);
            d[static_cast<size_t>(i)] = n;
            return d;
        };
        if (genus_ == 1) {
            for (int i : deg1) out.push_back(unit(i, 1));
        } else {
            for (size_t a = 0; a < deg1.size(); ++a)
                for (size_t b = a; b < deg1.size(); ++b) {
                    auto d = unit(deg1[a], 1);
                    d[static_cast<size_t>(deg1[b])] += 1;
                    out.push_back(std::move(d));
                }
            for (int i : deg2) out.push_back(unit(i, 1));
        }
        if (out.empty())
            throw capability_error(
                "jacobian oracle: no effective divisors of degree g over places "
                "of degree <= g");
        return out;
    }

    std::vector<std::pair<int, int>> sparse(const std::vector<int>& d) const {
        std::vector<std::pair<int, int>> s;
        for (size_t i = 0; i < d.size(); ++i)
            if (d[i] != 0) s.push_back({static_cast<int>(i), d[i]});
        return s;
    }

    Poly<K> slice_poly(const std::vector<typename K::Element>& v, int j, int N) const {
        Poly<K> p;
        p.c.assign(v.begin() + j * (N + 1), v.begin() + (j + 1) * (N + 1));
        return poly_trim(k_, std::move(p));
    }

    Poly<K> poly_one() const {
        Poly<K> p;
        p.c = {k_.one()};
        return p;
    }

    K k_;
    DescentCurveData<K> C_;
    int genus_ = 0;
    int hinf_ = 0;
    int aux_ = -1;
    int m_ = 1;
    std::vector<JacBase> bases_;
    std::vector<JacPlace> places_;
    std::vector<MonoCache> mono_;
    std::optional<DivisorClassTable> table_;
};

// ---------------------------------------------------------------------------
// Free-function entry points
// ---------------------------------------------------------------------------

template <class K>
RiemannRochSpace<K> riemann_roch_space(const K& k, const DescentCurveData<K>& C,
                                       const std::vector<int>& D) {
    SmallJacobianModel<K> m(k, C);
    return m.riemann_roch(D);
}

template <class K>
DivisorClassTable divisor_class_table(const K& k, const DescentCurveData<K>& C) {
    SmallJacobianModel<K> m(k, C);
    return m.class_table();
}

// Exact dim_F2 of the 2-torsion of the degree-zero divisor class group.
template <class K>
int two_rank_bruteforce(const K& k, const DescentCurveData<K>& C) {
    SmallJacobianModel<K> m(k, C);
    return m.two_rank();
}

}  // namespace ellrank
