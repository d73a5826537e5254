#pragma once

// Dense univariate polynomials over a field context, plus the small kit of
// algebra the degree-3 classification needs: gcd, derivative, resultants,
// cubic discriminants, constant-times-square decomposition, quadratic root
// finding in both characteristics, and the bounded solver for
// S^2 + B S + C = 0 over F_q[t] used by the even-characteristic resolvent
// criterion.

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "permrat/field.hpp"

namespace permrat {

// Coefficients ascending; no trailing zeros; the zero polynomial has an empty
// vector and degree -1 (a sentinel distinct from degree 0).
class Poly {
public:
    Poly() = default;
    explicit Poly(const Field* f) : f_(f) {}
    Poly(const Field* f, std::vector<elem_idx> coeffs) : f_(f), c_(std::move(coeffs)) {
        trim();
    }

    static Poly zero(const Field& f) { return Poly(&f); }
    static Poly constant(FE a) { return Poly(a.field, {a.v}); }
    static Poly x(const Field& f) { return Poly(&f, {0, 1}); }

    static Poly from_indices(const Field& f, std::vector<elem_idx> coeffs) {
        for (elem_idx c : coeffs)
            if (c >= f.size()) throw domain_error("coefficient index out of range");
        return Poly(&f, std::move(coeffs));
    }

    static Poly from_ints(const Field& f, const std::vector<std::int64_t>& coeffs) {
        std::vector<elem_idx> v(coeffs.size());
        for (std::size_t i = 0; i < coeffs.size(); ++i) v[i] = f.from_int(coeffs[i]).v;
        return Poly(&f, std::move(v));
    }

    static Poly monomial(FE a, unsigned deg) {
        std::vector<elem_idx> v(deg + 1, 0);
        v[deg] = a.v;
        return Poly(a.field, std::move(v));
    }

    const Field& field() const {
        if (!f_) throw internal_error("polynomial without context");
        return *f_;
    }
    const Field* ctx() const { return f_; }

    int deg() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    bool is_one() const { return c_.size() == 1 && c_[0] == 1; }

    FE at(std::size_t i) const {
        return FE{f_, i < c_.size() ? c_[i] : 0};
    }
    FE lc() const {
        if (is_zero()) throw domain_error("leading coefficient of zero polynomial");
        return FE{f_, c_.back()};
    }
    const std::vector<elem_idx>& coeffs() const { return c_; }

    bool operator==(const Poly& o) const { return f_ == o.f_ && c_ == o.c_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly operator-() const {
        Poly r(*this);
        for (elem_idx& a : r.c_) a = f_->neg(a);
        return r;
    }

    Poly operator+(const Poly& o) const {
        check(o);
        Poly r(f_);
        r.c_.resize(std::max(c_.size(), o.c_.size()), 0);
        for (std::size_t i = 0; i < r.c_.size(); ++i)
            r.c_[i] = f_->add(i < c_.size() ? c_[i] : 0, i < o.c_.size() ? o.c_[i] : 0);
        r.trim();
        return r;
    }

    Poly operator-(const Poly& o) const { return *this + (-o); }

    Poly operator*(const Poly& o) const {
        check(o);
        if (is_zero() || o.is_zero()) return Poly(f_);
        Poly r(f_);
        r.c_.assign(c_.size() + o.c_.size() - 1, 0);
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (c_[i] == 0) continue;
            for (std::size_t j = 0; j < o.c_.size(); ++j)
                r.c_[i + j] = f_->add(r.c_[i + j], f_->mul(c_[i], o.c_[j]));
        }
        r.trim();
        return r;
    }

    Poly scaled(FE s) const {
        if (s.field != f_) throw domain_error("field context mismatch");
        if (s.v == 0) return Poly(f_);
        Poly r(*this);
        for (elem_idx& a : r.c_) a = f_->mul(a, s.v);
        return r;
    }

    // (quotient, remainder) with deg rem < deg divisor.
    std::pair<Poly, Poly> divmod(const Poly& d) const {
        check(d);
        if (d.is_zero()) throw domain_error("polynomial division by zero");
        Poly rem(*this);
        Poly quot(f_);
        int dd = d.deg();
        if (deg() >= dd) quot.c_.assign(static_cast<std::size_t>(deg() - dd) + 1, 0);
        elem_idx li = f_->inv(d.c_.back());
        while (rem.deg() >= dd) {
            std::size_t k = static_cast<std::size_t>(rem.deg() - dd);
            elem_idx fac = f_->mul(rem.c_.back(), li);
            quot.c_[k] = fac;
            for (int i = 0; i <= dd; ++i) {
                std::size_t ri = k + static_cast<std::size_t>(i);
                rem.c_[ri] = f_->sub(rem.c_[ri], f_->mul(fac, d.c_[static_cast<std::size_t>(i)]));
            }
            rem.trim();
        }
        quot.trim();
        return {quot, rem};
    }

    Poly operator/(const Poly& d) const { return divmod(d).first; }
    Poly operator%(const Poly& d) const { return divmod(d).second; }

    FE eval(FE x) const {
        if (x.field != f_) throw domain_error("field context mismatch");
        elem_idx acc = 0;
        for (std::size_t i = c_.size(); i-- > 0;)
            acc = f_->add(f_->mul(acc, x.v), c_[i]);
        return FE{f_, acc};
    }

    Poly compose(const Poly& g) const {
        check(g);
        Poly acc(f_);
        for (std::size_t i = c_.size(); i-- > 0;)
            acc = acc * g + Poly(f_, {c_[i]});
        return acc;
    }

    Poly derivative() const {
        Poly r(f_);
        if (c_.size() < 2) return r;
        r.c_.resize(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) {
            FE k = f_->from_int(static_cast<std::int64_t>(i));
            r.c_[i - 1] = f_->mul(c_[i], k.v);
        }
        r.trim();
        return r;
    }

    Poly monic() const {
        if (is_zero()) throw domain_error("cannot normalize zero polynomial");
        return scaled(inv(lc()));
    }

    // Map coefficients into another context (used to lift F_q[t] into
    // F_{q^2}[t]; the extension embedding keeps indices).
    Poly lifted(const Field& ext) const {
        if (ext.base() != f_) throw domain_error("lift target is not an extension of the coefficient field");
        return Poly(&ext, c_);
    }

private:
    void check(const Poly& o) const {
        if (f_ == nullptr || f_ != o.f_) throw domain_error("field context mismatch");
    }
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    const Field* f_ = nullptr;
    std::vector<elem_idx> c_;
};

inline Poly operator*(FE s, const Poly& p) { return p.scaled(s); }

// Monic gcd by Euclid; gcd(f, 0) = monic(f).
inline Poly gcd_monic(Poly a, Poly b) {
    if (a.is_zero() && b.is_zero()) throw domain_error("gcd(0, 0) undefined");
    while (!b.is_zero()) {
        Poly r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

inline bool coprime(const Poly& a, const Poly& b) { return gcd_monic(a, b).deg() == 0; }

// Resultant via the Euclidean recurrence.  Convention fixed so that
// Res(f, g) = lc(g)^deg(f) * prod f(beta) over the roots beta of g;
// in particular Res(x-a, x-b) = b-a.
inline FE resultant(Poly f, Poly g) {
    if (f.is_zero() || g.is_zero()) throw domain_error("resultant of zero polynomial");
    const Field& F = f.field();
    FE acc = F.one();
    auto sign_flip = [&](int m, int n) {
        if ((m & 1) && (n & 1) && F.characteristic() != 2) acc = -acc;
    };
    if (f.deg() < g.deg()) {
        sign_flip(f.deg(), g.deg());
        std::swap(f, g);
    }
    while (true) {
        if (g.deg() == 0)
            return acc * pow(g.at(0), static_cast<std::uint64_t>(f.deg()));
        Poly r = f % g;
        if (r.is_zero()) return F.zero();
        acc = acc * pow(g.lc(), static_cast<std::uint64_t>(f.deg() - r.deg()));
        sign_flip(r.deg(), g.deg());
        f = std::move(g);
        g = std::move(r);
    }
}

namespace detail {
inline FE ring_int(const FE& like, std::int64_t n) { return like.field->from_int(n); }
inline Poly ring_int(const Poly& like, std::int64_t n) {
    return Poly::constant(like.field().from_int(n));
}
} // namespace detail

// Discriminant of c3 x^3 + c2 x^2 + c1 x + c0 by the classical formula
//   18 c3 c2 c1 c0 - 4 c2^3 c0 + c2^2 c1^2 - 4 c3 c1^3 - 27 c3^2 c0^2,
// valid over any coefficient ring; cross-checked against resultants and the
// resolvent identity in the test suite.  R is FE or Poly.
template <class R>
R cubic_discriminant_in(const R& c3, const R& c2, const R& c1, const R& c0) {
    using detail::ring_int;
    R t18 = ring_int(c3, 18) * c3 * c2 * c1 * c0;
    R t4a = ring_int(c3, -4) * c2 * c2 * c2 * c0;
    R mid = c2 * c2 * c1 * c1;
    R t4b = ring_int(c3, -4) * c3 * c1 * c1 * c1;
    R t27 = ring_int(c3, -27) * c3 * c3 * c0 * c0;
    return t18 + t4a + mid + t4b + t27;
}

inline FE cubic_discriminant(FE c3, FE c2, FE c1, FE c0) {
    if (is_zero(c3)) throw domain_error("cubic discriminant requires degree 3");
    return cubic_discriminant_in(c3, c2, c1, c0);
}

// Quadratic resolvent coefficients of x^3 + a x^2 + b x + c:
//   R2(x) = x^2 + (ab - 3c) x + (a^3 c + b^3 + 9 c^2 - 6 a b c).
template <class R>
std::pair<R, R> quadratic_resolvent(const R& a, const R& b, const R& c) {
    using detail::ring_int;
    R B = a * b + ring_int(a, -3) * c;
    R C = a * a * a * c + b * b * b + ring_int(a, 9) * c * c + ring_int(a, -6) * a * b * c;
    return {B, C};
}

// Decompose Delta = u * r(t)^2 with r monic and u = lc(Delta), if possible.
// Coefficients of r are recovered top-down; the low-order coefficients of the
// square are then a consistency check.  Odd characteristic only.
inline std::optional<std::pair<FE, Poly>> const_square_decompose(const Poly& delta) {
    const Field& F = delta.field();
    if (F.characteristic() == 2)
        throw domain_error("constant-square decomposition requires odd characteristic");
    if (delta.is_zero()) throw domain_error("zero discriminant");
    FE u = delta.lc();
    if (delta.deg() % 2 != 0) return std::nullopt;
    Poly s = delta.monic();
    unsigned m = static_cast<unsigned>(delta.deg()) / 2;
    std::vector<elem_idx> r(m + 1, 0);
    r[m] = 1;
    FE half = inv(F.from_int(2));
    for (unsigned i = m; i-- > 0;) {
        // coefficient of t^(m+i) in r^2 is 2 r_i + sum over j+k = m+i, j,k < m
        FE acc = s.at(m + i);
        for (unsigned j = i + 1; j < m; ++j) {
            unsigned k = m + i - j;
            if (k >= m || k <= i) continue;
            if (k < j) break;
            FE term = FE{&F, r[j]} * FE{&F, r[k]};
            if (j != k) term = term + term;
            acc = acc - term;
        }
        r[i] = (acc * half).v;
    }
    Poly rp(&F, std::move(r));
    if (rp * rp != s) return std::nullopt;
    return std::make_pair(u, rp);
}

// All roots of x^2 + beta x + gamma in the given context, sorted by index.
// Odd characteristic goes through the discriminant; characteristic 2 with
// beta != 0 reduces to the Artin-Schreier equation s^2 + s = gamma/beta^2,
// whose solvability is the absolute trace condition.
inline std::vector<FE> quad_roots(FE beta, FE gamma, const Field& F) {
    if (beta.field != &F || gamma.field != &F)
        throw domain_error("field context mismatch");
    std::vector<FE> out;
    if (F.characteristic() == 2) {
        if (is_zero(beta)) {
            out.push_back(FE{&F, *F.sqrt(gamma.v)});
            return out;
        }
        FE c = gamma / (beta * beta);
        if (F.abs_trace2(c.v) != 0) return out;
        FE s = FE{&F, F.artin_schreier_root(c.v)};
        out.push_back(beta * s);
        out.push_back(beta * s + beta);
    } else {
        FE four = F.from_int(4);
        FE disc = beta * beta - four * gamma;
        auto d = F.sqrt(disc.v);
        if (!d) return out;
        FE half = inv(F.from_int(2));
        FE root = FE{&F, *d};
        out.push_back((-beta + root) * half);
        if (root.v != 0) out.push_back((-beta - root) * half);
    }
    std::sort(out.begin(), out.end(), [](FE a, FE b) { return a.v < b.v; });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace detail {

// Coefficient of t^m in S^2 + B*S + C given a partial assignment of the
// coefficients of S (characteristic 2, so S^2 only feeds even degrees).
struct BoundedRootSearch {
    const Field& F;
    const Poly& B;
    const Poly& C;
    unsigned bound;
    std::vector<std::optional<elem_idx>> s;
    std::vector<Poly>& out;

    void run() {
        int top = std::max(2 * static_cast<int>(bound),
                           std::max(B.deg() + static_cast<int>(bound), C.deg()));
        descend(top);
    }

    void descend(int m) {
        if (m < 0) {
            finish();
            return;
        }
        // collect the equation at degree m
        FE rest = C.at(static_cast<std::size_t>(m));
        std::vector<unsigned> unknowns;
        bool self_square = false;
        if (m % 2 == 0 && static_cast<unsigned>(m / 2) <= bound) {
            unsigned j = static_cast<unsigned>(m / 2);
            if (s[j]) {
                FE v = FE{&F, *s[j]};
                rest = rest + v * v;
            } else {
                unknowns.push_back(j);
                self_square = true;
            }
        }
        for (unsigned j = 0; j <= bound; ++j) {
            int i = m - static_cast<int>(j);
            if (i < 0 || i > B.deg()) continue;
            FE bi = B.at(static_cast<std::size_t>(i));
            if (is_zero(bi)) continue;
            if (s[j]) {
                rest = rest + bi * FE{&F, *s[j]};
            } else if (unknowns.empty() || unknowns.back() != j) {
                unknowns.push_back(j);
            }
        }
        if (unknowns.empty()) {
            if (is_zero(rest)) descend(m - 1);
            return;
        }
        if (unknowns.size() == 1) {
            unsigned j = unknowns[0];
            FE bj = (m - static_cast<int>(j) >= 0)
                        ? B.at(static_cast<std::size_t>(m - static_cast<int>(j)))
                        : F.zero();
            if (self_square && unknowns[0] == static_cast<unsigned>(m / 2)) {
                for (FE root : quad_roots(bj, rest, F)) {
                    s[j] = root.v;
                    descend(m - 1);
                }
                s[j] = std::nullopt;
            } else {
                // linear: bj * s_j = rest
                s[j] = (rest / bj).v;
                descend(m - 1);
                s[j] = std::nullopt;
            }
            return;
        }
        // More than one new unknown in a single equation only happens for
        // degenerate B shapes; fall back to enumerating the highest one.
        unsigned j = *std::max_element(unknowns.begin(), unknowns.end());
        for (std::uint64_t v = 0; v < F.size(); ++v) {
            s[j] = static_cast<elem_idx>(v);
            descend(m);
        }
        s[j] = std::nullopt;
    }

    void finish() {
        std::vector<elem_idx> c(bound + 1, 0);
        for (unsigned j = 0; j <= bound; ++j)
            if (s[j]) c[j] = *s[j];
        Poly cand(&F, std::move(c));
        Poly lhs = cand * cand + B * cand + C;
        if (!lhs.is_zero()) return;
        for (const Poly& p : out)
            if (p == cand) return;
        out.push_back(cand);
    }
};

} // namespace detail

// All S in ctx[t] with deg S <= deg_bound and S^2 + B S + C = 0, found by
// coefficient back-substitution from the top degree downward, each step a
// quadratic (or linear) equation over ctx; every candidate is verified by
// full expansion.  Characteristic 2 only.
inline std::vector<Poly> bounded_poly_root(const Poly& B, const Poly& C,
                                           unsigned deg_bound, const Field& F) {
    if (F.characteristic() != 2)
        throw domain_error("bounded polynomial root solver requires characteristic 2");
    if (B.ctx() != &F || C.ctx() != &F) throw domain_error("field context mismatch");
    std::vector<Poly> out;
    detail::BoundedRootSearch search{F, B, C, deg_bound,
                                     std::vector<std::optional<elem_idx>>(deg_bound + 1),
                                     out};
    search.run();
    std::sort(out.begin(), out.end(), [](const Poly& a, const Poly& b) {
        return a.coeffs() < b.coeffs();
    });
    return out;
}

// Irreducibility for deg <= 4 by root enumeration plus, in degree 4, trial
// division by the monic irreducible quadratics.
inline bool is_irreducible_small(const Poly& f) {
    int d = f.deg();
    if (d > 4) throw domain_error("is_irreducible_small handles degree <= 4 only");
    if (d < 1) return false;
    if (d == 1) return true;
    const Field& F = f.field();
    for (std::uint64_t x = 0; x < F.size(); ++x)
        if (is_zero(f.eval(FE{&F, static_cast<elem_idx>(x)}))) return false;
    if (d <= 3) return true;
    for (std::uint64_t c1 = 0; c1 < F.size(); ++c1)
        for (std::uint64_t c0 = 0; c0 < F.size(); ++c0) {
            Poly q(&F, {static_cast<elem_idx>(c0), static_cast<elem_idx>(c1), 1});
            bool has_root = false;
            for (std::uint64_t x = 0; x < F.size() && !has_root; ++x)
                if (is_zero(q.eval(FE{&F, static_cast<elem_idx>(x)}))) has_root = true;
            if (has_root) continue;
            if ((f % q).is_zero()) return false;
        }
    return true;
}

} // namespace permrat
