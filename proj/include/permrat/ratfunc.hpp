#pragma once

// Rational functions as self-maps of P^1(F_q): reduced num/den pairs with a
// monic denominator, projective evaluation, brute-force permutation testing,
// separability, the Moebius group with its two-sided composition action, and
// the fractional-jump bijection of F_q.

#include <cstdint>
#include <vector>

#include "permrat/field.hpp"
#include "permrat/poly.hpp"

namespace permrat {

// A point of P^1(F_q) = F_q together with the point at infinity.
struct ProjPoint {
    bool infinite = false;
    elem_idx v = 0;

    static ProjPoint at_infinity() { return ProjPoint{true, 0}; }
    static ProjPoint finite(FE a) { return ProjPoint{false, a.v}; }

    bool operator==(const ProjPoint& o) const {
        return infinite == o.infinite && (infinite || v == o.v);
    }
    bool operator!=(const ProjPoint& o) const { return !(*this == o); }

    // Index in [0, q]: finite points by element index, infinity last.
    std::size_t slot(const Field& f) const {
        return infinite ? static_cast<std::size_t>(f.size()) : v;
    }
};

// Reduced rational function: gcd(num, den) = 1, den monic and nonzero.  The
// stored pair is the unique such representative, so equality is structural.
class RatFunc {
public:
    RatFunc() = default;

    RatFunc(const Poly& f, const Poly& g) {
        if (f.ctx() == nullptr || f.ctx() != g.ctx())
            throw domain_error("field context mismatch");
        if (g.is_zero())
            throw domain_error("rational function needs a nonzero denominator");
        Poly num = f, den = g;
        if (num.is_zero()) {
            den = Poly::constant(f.field().one());
        } else {
            Poly d = gcd_monic(num, den);
            if (d.deg() > 0) {
                num = num / d;
                den = den / d;
            }
        }
        FE s = inv(den.lc());
        num_ = num.scaled(s);
        den_ = den.scaled(s);
    }

    static RatFunc from_poly(const Poly& f) {
        return RatFunc(f, Poly::constant(f.field().one()));
    }

    // For pairs already known to be coprime (census inner loops).
    static RatFunc from_coprime(Poly num, Poly den) {
        RatFunc r;
        FE s = inv(den.lc());
        r.num_ = num.scaled(s);
        r.den_ = den.scaled(s);
        return r;
    }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    const Field& field() const { return num_.field(); }

    int degree() const { return std::max(num_.deg(), den_.deg()); }

    bool operator==(const RatFunc& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const RatFunc& o) const { return !(*this == o); }

    ProjPoint eval(ProjPoint p) const {
        const Field& F = field();
        if (!p.infinite) {
            FE x{&F, p.v};
            FE g = den_.eval(x);
            if (!is_zero(g)) return ProjPoint::finite(num_.eval(x) / g);
            return ProjPoint::at_infinity();  // coprimality: num(x) != 0
        }
        int dn = num_.deg(), dd = den_.deg();
        if (dn > dd) return ProjPoint::at_infinity();
        if (dn < dd) return ProjPoint::finite(F.zero());
        return ProjPoint::finite(num_.lc() / den_.lc());
    }

private:
    Poly num_, den_;
};

inline bool is_permutation_bruteforce(const RatFunc& phi) {
    const Field& F = phi.field();
    std::vector<char> seen(F.size() + 1, 0);
    for (std::uint64_t x = 0; x <= F.size(); ++x) {
        ProjPoint p = x < F.size()
                          ? ProjPoint::finite(FE{&F, static_cast<elem_idx>(x)})
                          : ProjPoint::at_infinity();
        std::size_t slot = phi.eval(p).slot(F);
        if (seen[slot]) return false;
        seen[slot] = 1;
    }
    return true;
}

// phi separable <=> phi not in F_q(x^p) <=> num' den - num den' != 0 for the
// reduced coprime pair.
inline bool is_separable(const RatFunc& phi) {
    Poly w = phi.num().derivative() * phi.den() - phi.num() * phi.den().derivative();
    return !w.is_zero();
}

// Moebius transformation (a x + b)/(c x + d), ad - bc != 0, stored with the
// first nonzero of (a, c) scaled to 1 so that equality is structural.
class Mobius {
public:
    Mobius(FE a, FE b, FE c, FE d) : a_(a), b_(b), c_(c), d_(d) {
        const Field* F = a.field;
        if (!F || b.field != F || c.field != F || d.field != F)
            throw domain_error("field context mismatch");
        if (is_zero(a_ * d_ - b_ * c_))
            throw domain_error("singular Moebius matrix");
        FE s = is_zero(a_) ? inv(c_) : inv(a_);
        a_ = a_ * s;
        b_ = b_ * s;
        c_ = c_ * s;
        d_ = d_ * s;
    }

    static Mobius identity(const Field& F) {
        return Mobius(F.one(), F.zero(), F.zero(), F.one());
    }
    // x + t
    static Mobius translation(FE t) {
        const Field& F = *t.field;
        return Mobius(F.one(), t, F.zero(), F.one());
    }
    // s x, s != 0
    static Mobius scaling(FE s) {
        const Field& F = *s.field;
        return Mobius(s, F.zero(), F.zero(), F.one());
    }
    // 1/x
    static Mobius inversion(const Field& F) {
        return Mobius(F.zero(), F.one(), F.one(), F.zero());
    }

    FE a() const { return a_; }
    FE b() const { return b_; }
    FE c() const { return c_; }
    FE d() const { return d_; }
    const Field& field() const { return *a_.field; }

    bool operator==(const Mobius& o) const {
        return a_ == o.a_ && b_ == o.b_ && c_ == o.c_ && d_ == o.d_;
    }
    bool operator!=(const Mobius& o) const { return !(*this == o); }

    // Composition (this after o), i.e. the matrix product.
    Mobius operator*(const Mobius& o) const {
        return Mobius(a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_,
                      c_ * o.a_ + d_ * o.c_, c_ * o.b_ + d_ * o.d_);
    }

    Mobius inverse() const { return Mobius(d_, -b_, -c_, a_); }

    ProjPoint apply(ProjPoint p) const {
        const Field& F = field();
        if (!p.infinite) {
            FE x{&F, p.v};
            FE g = c_ * x + d_;
            if (!is_zero(g)) return ProjPoint::finite((a_ * x + b_) / g);
            return ProjPoint::at_infinity();
        }
        if (!is_zero(c_)) return ProjPoint::finite(a_ / c_);
        return ProjPoint::at_infinity();
    }

    RatFunc to_ratfunc() const {
        const Field& F = field();
        return RatFunc(Poly(&F, {b_.v, a_.v}), Poly(&F, {d_.v, c_.v}));
    }

private:
    FE a_, b_, c_, d_;
};

enum class Side { left, right };

// m o phi (left) or phi o m (right), fully reduced.  Both preserve the
// degree and the permutation property.
inline RatFunc compose_mobius(const RatFunc& phi, const Mobius& m, Side side) {
    const Field& F = phi.field();
    if (&m.field() != &F) throw domain_error("field context mismatch");
    if (side == Side::left) {
        Poly num = m.a() * phi.num() + m.b() * phi.den();
        Poly den = m.c() * phi.num() + m.d() * phi.den();
        return RatFunc(num, den);
    }
    int D = phi.degree();
    Poly A(&F, {m.b().v, m.a().v});   // a x + b
    Poly Cd(&F, {m.d().v, m.c().v});  // c x + d
    std::vector<Poly> powA(static_cast<std::size_t>(D) + 1, Poly::constant(F.one()));
    std::vector<Poly> powC(static_cast<std::size_t>(D) + 1, Poly::constant(F.one()));
    for (int i = 1; i <= D; ++i) {
        powA[static_cast<std::size_t>(i)] = powA[static_cast<std::size_t>(i - 1)] * A;
        powC[static_cast<std::size_t>(i)] = powC[static_cast<std::size_t>(i - 1)] * Cd;
    }
    auto homogenize = [&](const Poly& p) {
        Poly acc(&F);
        for (int i = 0; i <= D; ++i) {
            FE ci = p.at(static_cast<std::size_t>(i));
            if (is_zero(ci)) continue;
            acc = acc + ci * (powA[static_cast<std::size_t>(i)] *
                              powC[static_cast<std::size_t>(D - i)]);
        }
        return acc;
    };
    return RatFunc(homogenize(phi.num()), homogenize(phi.den()));
}

// phi + lambda x as a fully reduced rational function (the degree may drop
// when leading terms cancel, or rise to 4 when deg den = 3).
inline RatFunc shifted(const RatFunc& phi, FE lambda) {
    const Field& F = phi.field();
    if (lambda.field != &F) throw domain_error("field context mismatch");
    Poly lx = Poly(&F, {0, lambda.v});
    return RatFunc(phi.num() + lx * phi.den(), phi.den());
}

// The fractional jump of a permutation rational function: the bijection of
// F_q equal to phi away from its pole, with the pole rerouted to phi(inf).
// Result: table[x] = image index.
inline std::vector<elem_idx> fractional_jump(const RatFunc& phi) {
    const Field& F = phi.field();
    if (!is_permutation_bruteforce(phi))
        throw domain_error("fractional jump requires a permutation of P^1");
    std::vector<elem_idx> table(F.size());
    std::optional<std::uint64_t> pole;
    for (std::uint64_t x = 0; x < F.size(); ++x) {
        ProjPoint img = phi.eval(ProjPoint::finite(FE{&F, static_cast<elem_idx>(x)}));
        if (img.infinite) {
            pole = x;
        } else {
            table[x] = img.v;
        }
    }
    if (pole) {
        ProjPoint b = phi.eval(ProjPoint::at_infinity());
        if (b.infinite) throw internal_error("two preimages of infinity");
        table[*pole] = b.v;
    }
    return table;
}

} // namespace permrat
