#pragma once

// Text form of polynomials and rational functions over an absolute field
// context.  Grammar (whitespace insignificant):
//
//   ratfunc := poly | "(" poly ")" "/" "(" poly ")"
//   poly    := term (("+"|"-") term)*
//   term    := factor ("*" factor)*
//   factor  := atom ("^" uint)?
//   atom    := "x" | "w" | uint | "(" poly ")"
//
// Integer literals reduce mod p; "w" is the class of z in an extension
// context.  A leading sign on the first term is accepted.

#include <string>

#include "permrat/field.hpp"
#include "permrat/poly.hpp"
#include "permrat/ratfunc.hpp"

namespace permrat {

namespace detail {

class ExprParser {
public:
    ExprParser(const std::string& text, const Field& F) : s_(text), f_(F) {}

    Poly parse_poly_full() {
        Poly p = parse_poly();
        skip_ws();
        if (i_ != s_.size()) throw parse_error("unexpected trailing input", i_);
        return p;
    }

    RatFunc parse_ratfunc_full() {
        skip_ws();
        if (peek() == '(') {
            std::size_t close = matching_paren(i_);
            std::size_t j = close + 1;
            while (j < s_.size() && std::isspace(static_cast<unsigned char>(s_[j]))) ++j;
            if (j < s_.size() && s_[j] == '/') {
                expect('(');
                Poly num = parse_poly();
                expect(')');
                skip_ws();
                expect('/');
                skip_ws();
                expect('(');
                Poly den = parse_poly();
                expect(')');
                skip_ws();
                if (i_ != s_.size()) throw parse_error("unexpected trailing input", i_);
                if (den.is_zero()) throw parse_error("zero denominator", close + 1);
                return RatFunc(num, den);
            }
        }
        Poly num = parse_poly_full();
        return RatFunc::from_poly(num);
    }

private:
    char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }

    void skip_ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c)
            throw parse_error(std::string("expected '") + c + "'", i_);
        ++i_;
    }

    std::size_t matching_paren(std::size_t open) const {
        int depth = 0;
        for (std::size_t j = open; j < s_.size(); ++j) {
            if (s_[j] == '(') ++depth;
            if (s_[j] == ')' && --depth == 0) return j;
        }
        throw parse_error("unbalanced parentheses", open);
    }

    std::uint64_t parse_uint() {
        skip_ws();
        if (!std::isdigit(static_cast<unsigned char>(peek())))
            throw parse_error("expected a number", i_);
        std::uint64_t v = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            v = v * 10 + static_cast<std::uint64_t>(s_[i_] - '0');
            if (v > 1000000000000ull) throw parse_error("number too large", i_);
            ++i_;
        }
        return v;
    }

    Poly parse_poly() {
        skip_ws();
        bool neg = false;
        if (peek() == '+' || peek() == '-') {
            neg = peek() == '-';
            ++i_;
        }
        Poly acc = parse_term();
        if (neg) acc = -acc;
        while (true) {
            skip_ws();
            char c = peek();
            if (c != '+' && c != '-') break;
            ++i_;
            Poly t = parse_term();
            acc = (c == '+') ? acc + t : acc - t;
        }
        return acc;
    }

    Poly parse_term() {
        Poly acc = parse_factor();
        while (true) {
            skip_ws();
            if (peek() != '*') break;
            ++i_;
            acc = acc * parse_factor();
        }
        return acc;
    }

    Poly parse_factor() {
        Poly a = parse_atom();
        skip_ws();
        if (peek() == '^') {
            ++i_;
            std::size_t at = i_;
            std::uint64_t e = parse_uint();
            if (e > 1024) throw parse_error("exponent too large", at);
            Poly r = Poly::constant(f_.one());
            Poly b = a;
            while (e) {
                if (e & 1) r = r * b;
                b = b * b;
                e >>= 1;
            }
            return r;
        }
        return a;
    }

    Poly parse_atom() {
        skip_ws();
        char c = peek();
        if (c == 'x') {
            ++i_;
            return Poly::x(f_);
        }
        if (c == 'w') {
            if (f_.degree() < 2)
                throw parse_error("'w' is only defined in extension fields", i_);
            ++i_;
            return Poly::constant(f_.gen());
        }
        if (c == '(') {
            ++i_;
            Poly p = parse_poly();
            expect(')');
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::uint64_t v = parse_uint();
            return Poly::constant(f_.from_int(static_cast<std::int64_t>(
                v % f_.characteristic())));
        }
        throw parse_error("expected 'x', 'w', a number or '('", i_);
    }

    const std::string& s_;
    const Field& f_;
    std::size_t i_ = 0;
};

} // namespace detail

inline Poly parse_poly(const std::string& text, const Field& F) {
    return detail::ExprParser(text, F).parse_poly_full();
}

inline RatFunc parse_ratfunc(const std::string& text, const Field& F) {
    return detail::ExprParser(text, F).parse_ratfunc_full();
}

// --- formatting --------------------------------------------------------------

// Element as a polynomial in w (plain residue for prime fields).
inline std::string format_elem(FE a) {
    const Field& F = *a.field;
    if (F.degree() < 2) return std::to_string(a.v);
    auto digits = F.coeffs(a.v);
    std::string out;
    int terms = 0;
    for (std::size_t i = digits.size(); i-- > 0;) {
        if (digits[i] == 0) continue;
        if (terms) out += '+';
        ++terms;
        if (i == 0) {
            out += std::to_string(digits[i]);
            continue;
        }
        if (digits[i] != 1) {
            out += std::to_string(digits[i]);
            out += '*';
        }
        out += 'w';
        if (i > 1) out += '^' + std::to_string(i);
    }
    if (terms == 0) return "0";
    return out;
}

inline std::string format_poly(const Poly& p, char var = 'x') {
    if (p.is_zero()) return "0";
    std::string out;
    int terms = 0;
    for (std::size_t i = static_cast<std::size_t>(p.deg()) + 1; i-- > 0;) {
        FE c = p.at(i);
        if (is_zero(c)) continue;
        if (terms) out += '+';
        ++terms;
        std::string ce = format_elem(c);
        bool compound = ce.find('+') != std::string::npos;
        if (i == 0) {
            out += compound ? "(" + ce + ")" : ce;
            continue;
        }
        if (c.v != 1) {
            out += compound ? "(" + ce + ")" : ce;
            out += '*';
        }
        out += var;
        if (i > 1) out += '^' + std::to_string(i);
    }
    return out;
}

inline std::string format_ratfunc(const RatFunc& phi) {
    if (phi.den().is_one()) return format_poly(phi.num());
    return "(" + format_poly(phi.num()) + ")/(" + format_poly(phi.den()) + ")";
}

} // namespace permrat
