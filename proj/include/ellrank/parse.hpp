#pragma once

// Text input: the polynomial grammar shared by curve files and command-line
// arguments, and the key-value curve description file.
//
// Polynomial grammar (integer coefficients):
//   expr   := term (('+'|'-') term)*
//   term   := ['-'] factor ('*' factor)*
//   factor := atom ['^' natural]
//   atom   := natural | <variable> | 'w' | '(' expr ')'
// A leading '-' negates the whole term, so -t^2 means -(t^2).
// The generator letter 'w' is only meaningful over an extension field, where
// it denotes the stored root of the field modulus.
//
// Curve file format: one "key: value" pair per line, '#' starts a comment.
//   base_field: rationals
//   base_field: finite <p> [<m> [<modulus in w>]]
//   a: <polynomial in t>          (defaults to 0)
//   b: <polynomial in t>          (defaults to 0)
//   torsion_dim_p2: <nonnegative integer>      (optional assertion)
//   good_prime_3: asserted                     (optional assertion)
//   external_notes: <free text>                (optional)

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ellrank/errors.hpp"
#include "ellrank/extension.hpp"
#include "ellrank/factor.hpp"
#include "ellrank/places.hpp"
#include "ellrank/poly.hpp"

namespace ellrank {

namespace psdetail {

struct Token {
    enum Kind { number, ident, plus, minus, star, caret, lparen, rparen, end };
    Kind kind = end;
    std::string text;
    int line = 1;
    int col = 1;
};

inline std::vector<Token> lex(const std::string& s, int line0, int col0) {
    std::vector<Token> out;
    int line = line0, col = col0;
    size_t i = 0;
    auto push = [&](Token::Kind k, std::string text) {
        out.push_back({k, std::move(text), line, col});
    };
    while (i < s.size()) {
        char c = s[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++col;
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            push(Token::number, s.substr(i, j - i));
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            push(Token::ident, s.substr(i, j - i));
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        switch (c) {
            case '+': push(Token::plus, "+"); break;
            case '-': push(Token::minus, "-"); break;
            case '*': push(Token::star, "*"); break;
            case '^': push(Token::caret, "^"); break;
            case '(': push(Token::lparen, "("); break;
            case ')': push(Token::rparen, ")"); break;
            default:
                throw parse_error("unexpected character '" + std::string(1, c) + "'",
                                  line, col);
        }
        ++col;
        ++i;
    }
    out.push_back({Token::end, "", line, col});
    return out;
}

// digits -> field element, via Horner so arbitrarily long literals work
template <class K>
typename K::Element element_from_digits(const K& k, const std::string& digits) {
    auto ten = k.from_int(10);
    auto v = k.zero();
    for (char c : digits) v = k.add(k.mul(v, ten), k.from_int(c - '0'));
    return v;
}

template <class K>
class PolyParser {
   public:
    PolyParser(const K& k, const std::string& text, std::string var, int line0,
               int col0)
        : k_(k), var_(std::move(var)), toks_(lex(text, line0, col0)) {}

    Poly<K> parse() {
        if (peek().kind == Token::end)
            throw parse_error("empty polynomial", peek().line, peek().col);
        auto p = expr();
        if (peek().kind != Token::end)
            throw parse_error("unexpected token '" + peek().text + "'", peek().line,
                              peek().col);
        return p;
    }

   private:
    const Token& peek() const { return toks_[pos_]; }
    Token take() { return toks_[pos_++]; }
    bool accept(Token::Kind kind) {
        if (peek().kind != kind) return false;
        ++pos_;
        return true;
    }

    Poly<K> expr() {
        auto p = term();
        for (;;) {
            if (accept(Token::plus)) {
                p = poly_add(k_, p, term());
            } else if (accept(Token::minus)) {
                p = poly_sub(k_, p, term());
            } else {
                return p;
            }
        }
    }

    Poly<K> term() {
        bool neg = accept(Token::minus);
        auto p = factor();
        while (accept(Token::star)) p = poly_mul(k_, p, factor());
        return neg ? poly_neg(k_, p) : p;
    }

    Poly<K> factor() {
        auto p = atom();
        if (accept(Token::caret)) {
            auto t = take();
            if (t.kind != Token::number)
                throw parse_error("exponent must be a natural number", t.line, t.col);
            if (t.text.size() > 4)
                throw parse_error("exponent too large", t.line, t.col);
            int e = std::stoi(t.text);
            if (e > 512) throw parse_error("exponent too large", t.line, t.col);
            auto r = poly_one(k_);
            for (int i = 0; i < e; ++i) r = poly_mul(k_, r, p);
            return r;
        }
        return p;
    }

    Poly<K> atom() {
        auto t = take();
        switch (t.kind) {
            case Token::number:
                return poly_const(k_, element_from_digits(k_, t.text));
            case Token::ident:
                if (t.text == var_) return poly_var(k_);
                if (t.text == "w") {
                    if constexpr (requires(const K& f) { f.gen(); }) {
                        return poly_const(k_, k_.gen());
                    } else {
                        throw parse_error(
                            "the coefficient generator 'w' requires an extension "
                            "field",
                            t.line, t.col);
                    }
                }
                throw parse_error("unknown variable '" + t.text + "' (expected '" +
                                      var_ + "'" +
                                      ")",
                                  t.line, t.col);
            case Token::lparen: {
                auto p = expr();
                auto r = take();
                if (r.kind != Token::rparen)
                    throw parse_error("expected ')'", r.line, r.col);
                return p;
            }
            case Token::minus:
                // unary minus inside a product, e.g. 2*-t is rejected; a
                // sign is only allowed at the head of a term
                throw parse_error("unexpected '-'", t.line, t.col);
            default:
                throw parse_error(t.kind == Token::end
                                      ? "unexpected end of polynomial"
                                      : "unexpected token '" + t.text + "'",
                                  t.line, t.col);
        }
    }

    const K& k_;
    std::string var_;
    std::vector<Token> toks_;
    size_t pos_ = 0;
};

}  // namespace psdetail

template <class K>
Poly<K> parse_polynomial(const K& k, const std::string& text,
                         const std::string& var = "t", int line0 = 1,
                         int col0 = 1) {
    return psdetail::PolyParser<K>(k, text, var, line0, col0).parse();
}

// ---------------------------------------------------------------------------
// Curve input file
// ---------------------------------------------------------------------------

struct CurveInputFile {
    enum class FieldKind { rationals, finite };
    FieldKind kind = FieldKind::rationals;
    long p = 0;  // characteristic when finite
    int m = 1;   // extension degree
    std::string modulus_text;  // optional explicit modulus in w
    int modulus_line = 0, modulus_col = 0;

    std::string a_text = "0", b_text = "0";
    int a_line = 1, a_col = 1, b_line = 1, b_col = 1;

    std::optional<int> torsion_dim_p2;
    bool good_prime_3 = false;
    std::string external_notes;
};

namespace psdetail {

inline std::string strip(const std::string& s, int& col_delta) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    col_delta = static_cast<int>(b);
    return s.substr(b, e - b);
}

inline long parse_long_field(const std::string& text, const std::string& what,
                             int line, int col) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
        throw parse_error(what + " must be a nonnegative integer, got '" + text + "'",
                          line, col);
    if (text.size() > 12) throw parse_error(what + " is too large", line, col);
    return std::stol(text);
}

}  // namespace psdetail

// The modulus for an extension base field: parse and validate the explicit
// one, or search for an irreducible of the right degree.
inline Poly<PrimeField> curve_file_modulus(const PrimeField& F,
                                           const CurveInputFile& f) {
    if (f.modulus_text.empty()) return find_irreducible(F, f.m);
    auto mod = parse_polynomial(F, f.modulus_text, "w", f.modulus_line,
                                f.modulus_col);
    if (mod.deg() != f.m)
        throw parse_error("modulus degree " + std::to_string(mod.deg()) +
                              " does not match extension degree " +
                              std::to_string(f.m),
                          f.modulus_line, f.modulus_col);
    mod = poly_monic(F, mod);
    if (!is_irreducible_finite(F, mod))
        throw parse_error("modulus is not irreducible", f.modulus_line,
                          f.modulus_col);
    return mod;
}

inline CurveInputFile parse_curve_file(const std::string& text) {
    CurveInputFile f;
    bool saw_base = false, saw_a = false, saw_b = false, saw_torsion = false,
         saw_good3 = false, saw_notes = false;

    int line = 0;
    size_t start = 0;
    while (start < text.size()) {
        size_t nl = text.find('\n', start);
        std::string raw = text.substr(
            start, nl == std::string::npos ? std::string::npos : nl - start);
        ++line;
        start = nl == std::string::npos ? text.size() : nl + 1;

        auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        int lead = 0;
        std::string body = psdetail::strip(raw, lead);
        if (body.empty()) continue;

        auto colon = body.find(':');
        if (colon == std::string::npos)
            throw parse_error("expected 'key: value'", line, lead + 1);
        int kd = 0;
        std::string key = psdetail::strip(body.substr(0, colon), kd);
        int vcol0 = lead + static_cast<int>(colon) + 2;
        int vd = 0;
        std::string value = psdetail::strip(body.substr(colon + 1), vd);
        int vcol = vcol0 + vd;
        if (key.empty()) throw parse_error("empty key", line, lead + 1);

        auto once = [&](bool& seen) {
            if (seen)
                throw parse_error("duplicate key '" + key + "'", line, lead + 1);
            seen = true;
        };

        if (key == "base_field") {
            once(saw_base);
            // split on spaces
            std::vector<std::pair<std::string, int>> words;
            size_t i = 0;
            while (i < value.size()) {
                while (i < value.size() &&
                       std::isspace(static_cast<unsigned char>(value[i])))
                    ++i;
                size_t j = i;
                while (j < value.size() &&
                       !std::isspace(static_cast<unsigned char>(value[j])))
                    ++j;
                if (j > i) words.push_back({value.substr(i, j - i),
                                            vcol + static_cast<int>(i)});
                i = j;
            }
            if (words.empty())
                throw parse_error("base_field needs a value", line, vcol);
            if (words[0].first == "rationals") {
                if (words.size() != 1)
                    throw parse_error("base_field rationals takes no arguments",
                                      line, words[1].second);
                f.kind = CurveInputFile::FieldKind::rationals;
            } else if (words[0].first == "finite") {
                f.kind = CurveInputFile::FieldKind::finite;
                if (words.size() < 2 || words.size() > 4)
                    throw parse_error(
                        "base_field finite takes <p> [<m> [<modulus>]]", line,
                        vcol);
                f.p = psdetail::parse_long_field(words[1].first, "characteristic",
                                                line, words[1].second);
                Int pz(f.p);
                if (f.p < 2 || mpz_probab_prime_p(pz.get_mpz_t(), 40) == 0)
                    throw parse_error("characteristic must be prime, got " +
                                          words[1].first,
                                      line, words[1].second);
                if (f.p == 2 || f.p == 3)
                    throw capability_error(
                        "characteristic " + std::to_string(f.p) +
                        " is not supported: the local analysis needs residue "
                        "characteristic coprime to 6");
                if (words.size() >= 3) {
                    long m = psdetail::parse_long_field(
                        words[2].first, "extension degree", line, words[2].second);
                    if (m < 1 || m > 12)
                        throw parse_error("extension degree must be in [1, 12]",
                                          line, words[2].second);
                    f.m = static_cast<int>(m);
                }
                if (words.size() == 4) {
                    if (f.m == 1)
                        throw parse_error(
                            "a modulus is only meaningful for extension degree "
                            "m > 1",
                            line, words[3].second);
                    f.modulus_text = words[3].first;
                    f.modulus_line = line;
                    f.modulus_col = words[3].second;
                }
            } else {
                throw parse_error("base_field must be 'rationals' or 'finite'",
                                  line, words[0].second);
            }
        } else if (key == "a") {
            once(saw_a);
            f.a_text = value;
            f.a_line = line;
            f.a_col = vcol;
        } else if (key == "b") {
            once(saw_b);
            f.b_text = value;
            f.b_line = line;
            f.b_col = vcol;
        } else if (key == "torsion_dim_p2") {
            once(saw_torsion);
            f.torsion_dim_p2 = static_cast<int>(psdetail::parse_long_field(
                value, "torsion_dim_p2", line, vcol));
        } else if (key == "good_prime_3") {
            once(saw_good3);
            if (value != "asserted")
                throw parse_error(
                    "good_prime_3 accepts only the value 'asserted'", line, vcol);
            f.good_prime_3 = true;
        } else if (key == "external_notes") {
            once(saw_notes);
            f.external_notes = value;
        } else {
            throw parse_error("unknown key '" + key + "'", line, lead + 1);
        }
    }

    line = std::max(line, 1);
    if (!saw_base) throw parse_error("missing required key 'base_field'", line, 1);
    if (!saw_a && !saw_b)
        throw parse_error("the model needs at least one of 'a' or 'b'", line, 1);
    if (f.kind == CurveInputFile::FieldKind::finite && !f.modulus_text.empty()) {
        PrimeField F(f.p);
        (void)curve_file_modulus(F, f);  // reject a bad modulus at parse time
    }
    return f;
}

// Instantiate the Weierstrass model over an already constructed field.
template <class K>
EllipticSurfaceModel<K> instantiate_model(const K& k, const CurveInputFile& f) {
    EllipticSurfaceModel<K> E;
    E.A = parse_polynomial(k, f.a_text, "t", f.a_line, f.a_col);
    E.B = parse_polynomial(k, f.b_text, "t", f.b_line, f.b_col);
    return E;
}

// Run fn(field, file) with the statically typed constant field the file
// describes.  All instantiations must return the same type.
template <class Fn>
auto with_curve_field(const CurveInputFile& f, Fn&& fn) {
    if (f.kind == CurveInputFile::FieldKind::rationals) {
        Rationals Q;
        return fn(Q);
    }
    if (f.m == 1) {
        PrimeField F(f.p);
        return fn(F);
    }
    PrimeField F(f.p);
    ExtensionField<PrimeField> Fq(F, curve_file_modulus(F, f), "w");
    return fn(Fq);
}

}  // namespace ellrank
