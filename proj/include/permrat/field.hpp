#pragma once

// Finite field contexts: F_p, F_{p^k} and relative extensions F_{q^d}.
//
// A Field owns everything needed to compute with the elements of one
// particular construction F = B[z]/(m), where B is either the prime ring
// Z/pZ (absolute context) or another Field (relative extension context).
// Elements are handled as indices 0..q-1: an element with coefficient
// vector (c0, c1, ..., c_{k-1}) over B has index sum(c_i * |B|^i), so index
// order is the coefficient-vector order with the highest power most
// significant, starting at 0.  All canonical choices ("first element
// with...", minimal square roots, default moduli) refer to this order.
//
// Contexts are immutable after construction and can be shared across
// threads.  Elements carry the identity of their owning context; mixing
// contexts is an error, never a coercion.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace permrat {

using elem_idx = std::uint32_t;

class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Violated operation contract (bad input, guard exceeded, ...).
class domain_error : public error {
public:
    explicit domain_error(const std::string& what) : error(what) {}
};

// Text that does not conform to a grammar; position is a 0-based offset.
class parse_error : public error {
public:
    parse_error(const std::string& what, std::size_t position)
        : error(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

// A condition the library guarantees can never happen did happen.
class internal_error : public error {
public:
    explicit internal_error(const std::string& what)
        : error("internal invariant violated: " + what) {}
};

// Two supposedly equivalent decision routes disagreed.
class crosscheck_error : public error {
public:
    explicit crosscheck_error(const std::string& what) : error(what) {}
};

class Field;
using FieldPtr = std::shared_ptr<const Field>;

// Value handle for one field element.  Cheap to copy; the context must
// outlive the handle.
struct FE {
    const Field* field = nullptr;
    elem_idx v = 0;

    bool operator==(const FE& o) const { return field == o.field && v == o.v; }
    bool operator!=(const FE& o) const { return !(*this == o); }
};

namespace detail {

inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

} // namespace detail

class Field : public std::enable_shared_from_this<Field> {
public:
    // --- construction -----------------------------------------------------

    // Absolute context F_{p^k}.  When no modulus is given, the least monic
    // irreducible of degree k over F_p (in index order of the coefficient
    // vector) is selected, so the construction is reproducible.
    static FieldPtr make(std::uint64_t p, unsigned k) {
        return make_impl(p, k, nullptr);
    }

    // modulus: ascending coefficients c0..ck, ck must be 1.
    static FieldPtr make(std::uint64_t p, unsigned k,
                         const std::vector<elem_idx>& modulus) {
        return make_impl(p, k, &modulus);
    }

    // Relative extension F_{B^d} of an existing context, with a trivial
    // embedding of the base (an element of the base is the constant with the
    // same index).
    static FieldPtr extension(FieldPtr base, unsigned d) {
        return extension_impl(std::move(base), d, nullptr);
    }

    static FieldPtr extension(FieldPtr base, unsigned d,
                              const std::vector<elem_idx>& modulus) {
        return extension_impl(std::move(base), d, &modulus);
    }

    // Field spec strings: "p", "p^k" or "p^k:[c0,c1,...,1]".
    static FieldPtr parse_spec(const std::string& spec);

    // --- basic data -------------------------------------------------------

    std::uint64_t characteristic() const { return p_; }
    std::uint64_t size() const { return q_; }
    unsigned degree() const { return deg_; }  // over the base ring
    unsigned abs_degree() const { return abs_deg_; }  // over F_p
    bool is_prime_field() const { return !base_ && deg_ == 1; }
    bool is_extension_ctx() const { return base_ != nullptr; }
    const Field* base() const { return base_.get(); }
    std::uint64_t base_size() const { return bsize_; }
    // Ascending modulus coefficients over the base ring, length degree()+1.
    const std::vector<elem_idx>& modulus() const { return modulus_; }

    std::string spec_string() const {
        std::ostringstream os;
        if (base_) {
            os << base_->spec_string() << " ext deg " << deg_;
        } else {
            os << p_;
            if (deg_ > 1) os << '^' << deg_;
        }
        return os.str();
    }

    std::string describe() const {
        std::ostringstream os;
        os << "F_" << q_;
        if (base_) {
            os << " = (" << base_->describe() << ")[z]/(" << modulus_text()
               << ")";
        } else if (deg_ > 1) {
            os << " = F_" << p_ << "[z]/(" << modulus_text() << ")";
        }
        return os.str();
    }

    // --- element construction ----------------------------------------------

    FE zero() const { return FE{this, 0}; }
    FE one() const { return FE{this, 1}; }

    FE elem(std::uint64_t idx) const {
        if (idx >= q_) throw domain_error("element index out of range");
        return FE{this, static_cast<elem_idx>(idx)};
    }

    // Integer literal, reduced mod p and embedded as a constant.
    FE from_int(std::int64_t n) const {
        std::int64_t r = n % static_cast<std::int64_t>(p_);
        if (r < 0) r += static_cast<std::int64_t>(p_);
        elem_idx d = static_cast<elem_idx>(r);
        return FE{this, base_ ? base_->from_int(n).v : d};
    }

    // Class of z (requires degree >= 2 over the base ring).
    FE gen() const {
        if (deg_ < 2) throw domain_error("context has no generator element");
        return FE{this, static_cast<elem_idx>(bsize_)};
    }

    // Coefficients over the base ring, ascending, length degree().
    std::vector<elem_idx> coeffs(elem_idx a) const {
        std::vector<elem_idx> c(deg_);
        decode(a, c.data());
        return c;
    }

    FE from_coeffs(const std::vector<elem_idx>& c) const {
        if (c.size() > deg_) throw domain_error("too many coefficients");
        std::uint64_t idx = 0;
        for (std::size_t i = c.size(); i-- > 0;) {
            if (c[i] >= bsize_) throw domain_error("coefficient out of range");
            idx = idx * bsize_ + c[i];
        }
        return FE{this, static_cast<elem_idx>(idx)};
    }

    // Residues mod p w.r.t. the full tower basis, ascending, length
    // abs_degree().  For absolute contexts this is the same as coeffs().
    std::vector<elem_idx> abs_coeffs(elem_idx a) const {
        if (!base_) return coeffs(a);
        std::vector<elem_idx> out;
        out.reserve(abs_deg_);
        for (elem_idx d : coeffs(a)) {
            auto sub = base_->abs_coeffs(d);
            out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
    }

    // --- arithmetic on indices ----------------------------------------------

    elem_idx add(elem_idx a, elem_idx b) const {
        if (p_ == 2) return a ^ b;  // digit vectors add without carries
        if (add_tab_) return add_tab_[static_cast<std::size_t>(a) * q_ + b];
        return add_slow(a, b);
    }

    elem_idx neg(elem_idx a) const {
        if (p_ == 2) return a;
        if (neg_tab_) return neg_tab_[a];
        return neg_slow(a);
    }

    elem_idx sub(elem_idx a, elem_idx b) const { return add(a, neg(b)); }

    elem_idx mul(elem_idx a, elem_idx b) const {
        if (mul_tab_) return mul_tab_[static_cast<std::size_t>(a) * q_ + b];
        return mul_slow(a, b);
    }

    elem_idx inv(elem_idx a) const {
        if (a == 0) throw domain_error("division by zero");
        if (inv_tab_) return inv_tab_[a];
        return pow(a, q_ - 2);
    }

    elem_idx div(elem_idx a, elem_idx b) const { return mul(a, inv(b)); }

    elem_idx pow(elem_idx a, std::uint64_t e) const {
        elem_idx r = 1, x = a;
        while (e) {
            if (e & 1) r = mul(r, x);
            x = mul(x, x);
            e >>= 1;
        }
        return r;
    }

    // --- squares ------------------------------------------------------------

    // Even q: squaring is the Frobenius, hence bijective, so everything is a
    // square.  Odd q: Euler's criterion (0 counts as a square).
    bool is_square(elem_idx a) const {
        if (p_ == 2 || a == 0) return true;
        if (!sqrt_tab_.empty()) return sqrt_tab_[a] != kNoSqrt;
        return pow(a, (q_ - 1) / 2) == 1;
    }

    // Minimal square root in index order, if one exists.
    std::optional<elem_idx> sqrt(elem_idx a) const {
        if (p_ == 2) return pow(a, q_ / 2);
        if (!sqrt_tab_.empty()) {
            elem_idx r = sqrt_tab_[a];
            if (r == kNoSqrt) return std::nullopt;
            return r;
        }
        return tonelli_shanks(a);
    }

    // Quadratic character: +1 on nonzero squares, -1 on non-squares, 0 at 0.
    int chi(elem_idx a) const {
        if (a == 0) return 0;
        return is_square(a) ? 1 : -1;
    }

    // --- characteristic-2 structure ------------------------------------------

    // Absolute trace Tr_{F_q/F_2}(a) = a + a^2 + ... + a^{q/2}, as 0 or 1.
    unsigned abs_trace2(elem_idx a) const {
        if (p_ != 2) throw domain_error("abs_trace2 requires characteristic 2");
        elem_idx acc = 0, x = a;
        for (unsigned i = 0; i < abs_deg_; ++i) {
            acc ^= x;
            x = mul(x, x);
        }
        if (acc > 1) throw internal_error("absolute trace not in F_2");
        return acc;
    }

    // Minimal s with s^2 + s = c; requires characteristic 2 and trace 0.
    elem_idx artin_schreier_root(elem_idx c) const {
        if (p_ != 2) throw domain_error("Artin-Schreier root requires characteristic 2");
        if (abs_trace2(c) != 0) throw domain_error("Artin-Schreier equation unsolvable: trace 1");
        // Solve the F_2-linear system using the cached echelon form of
        // s -> s^2 + s on index bits.
        elem_idx rhs = c;
        elem_idx sol = 0;
        for (unsigned r = 0; r < as_rows_.size(); ++r) {
            if (rhs & as_pivot_bit_[r]) {
                rhs ^= as_rows_[r];
                sol ^= as_sol_[r];
            }
        }
        if (rhs != 0) throw internal_error("Artin-Schreier solve failed");
        // Roots are {sol, sol+1}; return the smaller index.
        return std::min(sol, sol ^ 1u);
    }

    // --- relative extension structure ----------------------------------------

    bool in_base(elem_idx a) const {
        require_ext();
        return a < bsize_;
    }

    FE embed(FE a) const {
        require_ext();
        if (a.field != base_.get()) throw domain_error("embed: element not from the base context");
        return FE{this, a.v};
    }

    FE to_base(elem_idx a) const {
        require_ext();
        if (a >= bsize_) throw internal_error("element expected in embedded base field");
        return FE{base_.get(), a};
    }

    // Frobenius of the extension: x -> x^{|B|}.
    elem_idx frobenius(elem_idx a) const {
        require_ext();
        return pow(a, bsize_);
    }

    // Relative trace/norm down to the base: sums/products of the d conjugates
    // x^{|B|^i}.  Results land in the embedded base field by Galois theory;
    // that containment is asserted, not assumed.
    FE rel_trace(elem_idx a) const {
        require_ext();
        elem_idx acc = 0, x = a;
        for (unsigned i = 0; i < deg_; ++i) {
            acc = add(acc, x);
            x = frobenius(x);
        }
        return to_base(acc);
    }

    FE rel_norm(elem_idx a) const {
        require_ext();
        elem_idx acc = 1, x = a;
        for (unsigned i = 0; i < deg_; ++i) {
            acc = mul(acc, x);
            x = frobenius(x);
        }
        return to_base(acc);
    }

    // Lazily built quadratic extension of this context.  The cached context
    // is owned by its base (the back-reference is non-owning, avoiding an
    // ownership cycle) and follows the usual lifetime rule: it must not be
    // used after the base is destroyed.
    FieldPtr ext2() const {
        std::call_once(ext2_once_, [this] {
            ext2_cache_ = extension(FieldPtr(FieldPtr{}, this), 2);
        });
        return ext2_cache_;
    }

    // Ordered stream of all q elements, beginning with 0.
    class ElementRange {
    public:
        class iterator {
        public:
            iterator(const Field* f, std::uint64_t i) : f_(f), i_(i) {}
            FE operator*() const { return FE{f_, static_cast<elem_idx>(i_)}; }
            iterator& operator++() { ++i_; return *this; }
            bool operator!=(const iterator& o) const { return i_ != o.i_; }
        private:
            const Field* f_;
            std::uint64_t i_;
        };
        explicit ElementRange(const Field* f) : f_(f) {}
        iterator begin() const { return iterator(f_, 0); }
        iterator end() const { return iterator(f_, f_->size()); }
    private:
        const Field* f_;
    };

    ElementRange elements() const { return ElementRange(this); }

private:
    static constexpr elem_idx kNoSqrt = 0xffffffffu;

    Field() = default;

    // digit ops over the base ring (residues mod p, or base-field indices)
    elem_idx dadd(elem_idx a, elem_idx b) const {
        return base_ ? base_->add(a, b)
                     : static_cast<elem_idx>((static_cast<std::uint64_t>(a) + b) % p_);
    }
    elem_idx dneg(elem_idx a) const {
        return base_ ? base_->neg(a) : static_cast<elem_idx>(a ? p_ - a : 0);
    }
    elem_idx dsub(elem_idx a, elem_idx b) const { return dadd(a, dneg(b)); }
    elem_idx dmul(elem_idx a, elem_idx b) const {
        return base_ ? base_->mul(a, b)
                     : static_cast<elem_idx>(static_cast<std::uint64_t>(a) * b % p_);
    }
    elem_idx dinv(elem_idx a) const {
        if (base_) return base_->inv(a);
        if (a == 0) throw domain_error("division by zero");
        // Fermat; p is prime.
        std::uint64_t r = 1, x = a, e = p_ - 2;
        while (e) {
            if (e & 1) r = r * x % p_;
            x = x * x % p_;
            e >>= 1;
        }
        return static_cast<elem_idx>(r);
    }

    void decode(elem_idx a, elem_idx* out) const {
        std::uint64_t x = a;
        for (unsigned i = 0; i < deg_; ++i) {
            out[i] = static_cast<elem_idx>(x % bsize_);
            x /= bsize_;
        }
    }

    elem_idx encode(const elem_idx* c) const {
        std::uint64_t idx = 0;
        for (unsigned i = deg_; i-- > 0;) idx = idx * bsize_ + c[i];
        return static_cast<elem_idx>(idx);
    }

    elem_idx add_slow(elem_idx a, elem_idx b) const {
        elem_idx ca[kMaxDeg], cb[kMaxDeg], cr[kMaxDeg];
        decode(a, ca);
        decode(b, cb);
        for (unsigned i = 0; i < deg_; ++i) cr[i] = dadd(ca[i], cb[i]);
        return encode(cr);
    }

    elem_idx neg_slow(elem_idx a) const {
        elem_idx ca[kMaxDeg], cr[kMaxDeg];
        decode(a, ca);
        for (unsigned i = 0; i < deg_; ++i) cr[i] = dneg(ca[i]);
        return encode(cr);
    }

    elem_idx mul_slow(elem_idx a, elem_idx b) const {
        if (deg_ == 1) return dmul(a, b);
        elem_idx ca[kMaxDeg], cb[kMaxDeg];
        elem_idx prod[2 * kMaxDeg] = {0};
        decode(a, ca);
        decode(b, cb);
        for (unsigned i = 0; i < deg_; ++i) {
            if (ca[i] == 0) continue;
            for (unsigned j = 0; j < deg_; ++j)
                prod[i + j] = dadd(prod[i + j], dmul(ca[i], cb[j]));
        }
        // fold z^m for m >= deg using precomputed reduction rows
        for (unsigned m = 2 * deg_ - 2; m >= deg_; --m) {
            elem_idx t = prod[m];
            if (t == 0) continue;
            prod[m] = 0;
            const elem_idx* row = &red_rows_[(m - deg_) * deg_];
            for (unsigned i = 0; i < deg_; ++i)
                prod[i] = dadd(prod[i], dmul(t, row[i]));
        }
        return encode(prod);
    }

    std::optional<elem_idx> tonelli_shanks(elem_idx a) const {
        if (a == 0) return 0;
        if (pow(a, (q_ - 1) / 2) != 1) return std::nullopt;
        std::uint64_t m = q_ - 1;
        unsigned s = 0;
        while ((m & 1) == 0) { m >>= 1; ++s; }
        elem_idx x;
        if (s == 1) {
            x = pow(a, (q_ + 1) / 4);
        } else {
            // first non-square in index order as the auxiliary non-residue
            elem_idx n = 0;
            for (elem_idx c = 2; c < q_; ++c)
                if (pow(c, (q_ - 1) / 2) != 1) { n = c; break; }
            elem_idx z = pow(n, m);
            x = pow(a, (m + 1) / 2);
            elem_idx t = pow(a, m);
            unsigned r = s;
            while (t != 1) {
                unsigned i = 0;
                elem_idx t2 = t;
                while (t2 != 1) { t2 = mul(t2, t2); ++i; }
                elem_idx b = z;
                for (unsigned j = 0; j + i + 1 < r; ++j) b = mul(b, b);
                x = mul(x, b);
                z = mul(b, b);
                t = mul(t, z);
                r = i;
            }
        }
        return std::min(x, neg(x));
    }

    void require_ext() const {
        if (!base_) throw domain_error("operation requires a relative extension context");
    }

    std::string modulus_text() const {
        std::ostringstream os;
        bool first = true;
        for (unsigned i = static_cast<unsigned>(modulus_.size()); i-- > 0;) {
            if (modulus_[i] == 0) continue;
            if (!first) os << '+';
            first = false;
            if (i == 0 || modulus_[i] != 1) os << modulus_[i];
            if (i > 0) {
                if (i == 0 || modulus_[i] != 1) os << '*';
                os << 'z';
                if (i > 1) os << '^' << i;
            }
        }
        if (first) os << '0';
        return os.str();
    }

    // ---- digit-vector polynomial helpers (used for modulus handling) -------
    // Polynomials here are ascending vectors of digits over the base ring.

    struct DPoly {
        std::vector<elem_idx> c;
        int deg() const {
            for (std::size_t i = c.size(); i-- > 0;)
                if (c[i] != 0) return static_cast<int>(i);
            return -1;
        }
        void trim() {
            while (!c.empty() && c.back() == 0) c.pop_back();
        }
    };

    DPoly dp_rem(DPoly a, const DPoly& m) const {
        int dm = m.deg();
        elem_idx lead_inv = dinv(m.c[static_cast<std::size_t>(dm)]);
        while (a.deg() >= dm) {
            int da = a.deg();
            elem_idx f = dmul(a.c[static_cast<std::size_t>(da)], lead_inv);
            for (int i = 0; i <= dm; ++i) {
                std::size_t ai = static_cast<std::size_t>(da - dm + i);
                a.c[ai] = dsub(a.c[ai], dmul(f, m.c[static_cast<std::size_t>(i)]));
            }
            a.trim();
        }
        return a;
    }

    DPoly dp_mulmod(const DPoly& a, const DPoly& b, const DPoly& m) const {
        DPoly p;
        if (a.deg() < 0 || b.deg() < 0) return p;
        p.c.assign(a.c.size() + b.c.size() - 1, 0);
        for (std::size_t i = 0; i < a.c.size(); ++i) {
            if (a.c[i] == 0) continue;
            for (std::size_t j = 0; j < b.c.size(); ++j)
                p.c[i + j] = dadd(p.c[i + j], dmul(a.c[i], b.c[j]));
        }
        p.trim();
        return dp_rem(std::move(p), m);
    }

    // x^(bsize^e) mod m by repeated exponentiation-by-squaring.
    DPoly dp_pow_x_qe(unsigned e, const DPoly& m) const {
        DPoly x;
        x.c = {0, 1};
        x = dp_rem(std::move(x), m);
        // exponent bsize_^e as a uint64 (guarded at construction time)
        std::uint64_t exp = 1;
        for (unsigned i = 0; i < e; ++i) exp *= bsize_;
        // compute x^exp mod m
        DPoly acc;
        acc.c = {1};
        DPoly base_pow = x;
        std::uint64_t k = exp;
        while (k) {
            if (k & 1) acc = dp_mulmod(acc, base_pow, m);
            base_pow = dp_mulmod(base_pow, base_pow, m);
            k >>= 1;
        }
        return acc;
    }

    DPoly dp_gcd(DPoly a, DPoly b) const {
        while (b.deg() >= 0) {
            DPoly r = dp_rem(std::move(a), b);
            a = std::move(b);
            b = std::move(r);
        }
        return a;
    }

    elem_idx dp_eval(const DPoly& f, elem_idx x) const {
        elem_idx acc = 0;
        for (std::size_t i = f.c.size(); i-- > 0;) acc = dadd(dmul(acc, x), f.c[i]);
        return acc;
    }

    bool dp_has_root(const DPoly& f) const {
        for (std::uint64_t x = 0; x < bsize_; ++x)
            if (dp_eval(f, static_cast<elem_idx>(x)) == 0) return true;
        return false;
    }

    bool modulus_irreducible(const DPoly& f) const {
        int d = f.deg();
        if (d < 1) return false;
        if (d == 1) return true;
        if (d <= 3) return !dp_has_root(f);
        if (d == 4) {
            if (dp_has_root(f)) return false;
            // trial division by every monic irreducible quadratic
            DPoly qd;
            qd.c = {0, 0, 1};
            for (std::uint64_t c1 = 0; c1 < bsize_; ++c1)
                for (std::uint64_t c0 = 0; c0 < bsize_; ++c0) {
                    qd.c[0] = static_cast<elem_idx>(c0);
                    qd.c[1] = static_cast<elem_idx>(c1);
                    if (dp_has_root(qd)) continue;
                    DPoly r = dp_rem(f, qd);
                    if (r.deg() < 0) return false;
                }
            return true;
        }
        // Rabin's test for higher degrees.
        for (unsigned ell = 2; ell <= static_cast<unsigned>(d); ++ell) {
            if (static_cast<unsigned>(d) % ell != 0) continue;
            if (!detail::is_prime_u64(ell)) continue;
            DPoly h = dp_pow_x_qe(static_cast<unsigned>(d) / ell, f);
            // h - x
            if (h.c.size() < 2) h.c.resize(2, 0);
            h.c[1] = dsub(h.c[1], 1);
            h.trim();
            DPoly g = dp_gcd(f, h);
            if (g.deg() != 0) return false;
        }
        DPoly h = dp_pow_x_qe(static_cast<unsigned>(d), f);
        if (h.c.size() < 2) h.c.resize(2, 0);
        h.c[1] = dsub(h.c[1], 1);
        h.trim();
        return h.deg() < 0;
    }

    static FieldPtr make_impl(std::uint64_t p, unsigned k,
                              const std::vector<elem_idx>* modulus) {
        if (!detail::is_prime_u64(p))
            throw domain_error(std::to_string(p) + " is not prime");
        if (k < 1) throw domain_error("extension degree must be >= 1");
        auto f = std::shared_ptr<Field>(new Field());
        f->p_ = p;
        f->bsize_ = p;
        f->deg_ = k;
        f->abs_deg_ = k;
        f->finish_construction(modulus);
        return f;
    }

    static FieldPtr extension_impl(FieldPtr base, unsigned d,
                                   const std::vector<elem_idx>* modulus) {
        if (!base) throw domain_error("extension requires a base context");
        if (d < 2) throw domain_error("relative extension degree must be >= 2");
        auto f = std::shared_ptr<Field>(new Field());
        f->base_ = std::move(base);
        f->p_ = f->base_->characteristic();
        f->bsize_ = f->base_->size();
        f->deg_ = d;
        f->abs_deg_ = f->base_->abs_degree() * d;
        f->finish_construction(modulus);
        return f;
    }

    void finish_construction(const std::vector<elem_idx>* modulus) {
        if (deg_ > kMaxDeg) throw domain_error("extension degree too large");
        long double qf = 1.0L;
        for (unsigned i = 0; i < deg_; ++i) qf *= static_cast<long double>(bsize_);
        if (qf > static_cast<long double>(1u << 31))
            throw domain_error("field too large (q must fit in 31 bits)");
        q_ = 1;
        for (unsigned i = 0; i < deg_; ++i) q_ *= bsize_;

        if (modulus) {
            if (modulus->size() != deg_ + 1 || modulus->back() != 1)
                throw domain_error("modulus must be monic of the stated degree");
            for (elem_idx c : *modulus)
                if (c >= bsize_) throw domain_error("modulus coefficient out of range");
            DPoly m;
            m.c.assign(modulus->begin(), modulus->end());
            if (deg_ >= 2 && !modulus_irreducible(m))
                throw domain_error("modulus is reducible");
            modulus_ = *modulus;
        } else {
            modulus_ = default_modulus();
        }

        if (deg_ >= 2) build_reduction_rows();
        build_tables();
        if (p_ == 2) build_artin_schreier();
    }

    // Least monic irreducible of degree deg_ over the base, in index order of
    // the non-leading coefficient vector.
    std::vector<elem_idx> default_modulus() const {
        if (deg_ == 1) return {0, 1};  // z itself; any monic linear works
        DPoly cand;
        cand.c.assign(deg_ + 1, 0);
        cand.c[deg_] = 1;
        for (std::uint64_t idx = 0;; ++idx) {
            if (idx >= q_)
                throw internal_error("no irreducible modulus found");
            std::uint64_t x = idx;
            for (unsigned i = 0; i < deg_; ++i) {
                cand.c[i] = static_cast<elem_idx>(x % bsize_);
                x /= bsize_;
            }
            if (modulus_irreducible(cand))
                return std::vector<elem_idx>(cand.c.begin(), cand.c.end());
        }
    }

    void build_reduction_rows() {
        // red_rows_[m - deg_] = coefficients of z^m reduced mod modulus
        red_rows_.assign(static_cast<std::size_t>(deg_ - 1) * deg_, 0);
        std::vector<elem_idx> cur(deg_);  // z^deg mod m = -(m0 + m1 z + ...)
        for (unsigned i = 0; i < deg_; ++i) cur[i] = dneg(modulus_[i]);
        for (unsigned m = deg_; m <= 2 * deg_ - 2; ++m) {
            std::copy(cur.begin(), cur.end(), red_rows_.begin() + static_cast<std::size_t>(m - deg_) * deg_);
            if (m == 2 * deg_ - 2) break;
            // multiply cur by z and reduce once
            elem_idx carry = cur[deg_ - 1];
            for (unsigned i = deg_ - 1; i > 0; --i) cur[i] = cur[i - 1];
            cur[0] = 0;
            if (carry != 0)
                for (unsigned i = 0; i < deg_; ++i)
                    cur[i] = dadd(cur[i], dmul(carry, dneg(modulus_[i])));
        }
    }

    void build_tables() {
        if (q_ <= kTableLimit) {
            if (p_ != 2) {
                neg_store_.resize(q_);
                for (std::uint64_t a = 0; a < q_; ++a)
                    neg_store_[a] = neg_slow(static_cast<elem_idx>(a));
                neg_tab_ = neg_store_.data();
                add_store_.resize(q_ * q_);
                for (std::uint64_t a = 0; a < q_; ++a)
                    for (std::uint64_t b = a; b < q_; ++b) {
                        elem_idx s = add_slow(static_cast<elem_idx>(a), static_cast<elem_idx>(b));
                        add_store_[a * q_ + b] = s;
                        add_store_[b * q_ + a] = s;
                    }
                add_tab_ = add_store_.data();
            }
            mul_store_.resize(q_ * q_);
            for (std::uint64_t a = 0; a < q_; ++a)
                for (std::uint64_t b = a; b < q_; ++b) {
                    elem_idx s = mul_slow(static_cast<elem_idx>(a), static_cast<elem_idx>(b));
                    mul_store_[a * q_ + b] = s;
                    mul_store_[b * q_ + a] = s;
                }
            mul_tab_ = mul_store_.data();
        }
        if (q_ <= kInvTableLimit) {
            inv_store_.resize(q_);
            inv_store_[0] = 0;  // never read; inv(0) throws first
            for (std::uint64_t a = 1; a < q_; ++a)
                inv_store_[a] = pow(static_cast<elem_idx>(a), q_ - 2);
            inv_tab_ = inv_store_.data();
            if (p_ != 2) {
                sqrt_tab_.assign(q_, kNoSqrt);
                for (std::uint64_t x = 0; x < q_; ++x) {
                    elem_idx sq = mul(static_cast<elem_idx>(x), static_cast<elem_idx>(x));
                    if (sqrt_tab_[sq] == kNoSqrt) sqrt_tab_[sq] = static_cast<elem_idx>(x);
                }
            }
        }
    }

    void build_artin_schreier() {
        // Row-reduce the map s -> s^2 + s over F_2 on index bits.  In
        // characteristic 2 index addition is XOR, so the q_ indices form an
        // F_2-space with basis 1, 2, 4, ...
        unsigned m = abs_deg_;
        std::vector<elem_idx> img(m), pre(m);
        for (unsigned j = 0; j < m; ++j) {
            elem_idx e = static_cast<elem_idx>(1u << j);
            img[j] = mul(e, e) ^ e;
            pre[j] = e;
        }
        as_rows_.clear();
        as_pivot_bit_.clear();
        as_sol_.clear();
        for (unsigned j = 0; j < m; ++j) {
            elem_idx row = img[j], sol = pre[j];
            for (unsigned r = 0; r < as_rows_.size(); ++r)
                if (row & as_pivot_bit_[r]) {
                    row ^= as_rows_[r];
                    sol ^= as_sol_[r];
                }
            if (row == 0) continue;  // kernel direction (s and s+1)
            elem_idx pb = row & ~(row - 1);  // lowest set bit as pivot
            as_rows_.push_back(row);
            as_pivot_bit_.push_back(pb);
            as_sol_.push_back(sol);
        }
        // normalize to eliminate pivots from earlier rows
        for (std::size_t r = as_rows_.size(); r-- > 0;)
            for (std::size_t s = 0; s < r; ++s)
                if (as_rows_[s] & as_pivot_bit_[r]) {
                    as_rows_[s] ^= as_rows_[r];
                    as_sol_[s] ^= as_sol_[r];
                }
    }

    static constexpr unsigned kMaxDeg = 24;
    static constexpr std::uint64_t kTableLimit = 512;      // add/mul tables
    static constexpr std::uint64_t kInvTableLimit = 4096;  // inv/sqrt tables

    std::uint64_t p_ = 0;       // characteristic
    std::uint64_t q_ = 0;       // total cardinality
    std::uint64_t bsize_ = 0;   // cardinality of the base ring
    unsigned deg_ = 0;          // degree over the base ring
    unsigned abs_deg_ = 0;      // degree over F_p
    FieldPtr base_;             // null for absolute contexts
    std::vector<elem_idx> modulus_;
    std::vector<elem_idx> red_rows_;

    std::vector<elem_idx> add_store_, mul_store_, inv_store_, neg_store_;
    std::vector<elem_idx> sqrt_tab_;
    const elem_idx* add_tab_ = nullptr;
    const elem_idx* mul_tab_ = nullptr;
    const elem_idx* inv_tab_ = nullptr;
    const elem_idx* neg_tab_ = nullptr;

    std::vector<elem_idx> as_rows_, as_pivot_bit_, as_sol_;

    mutable std::once_flag ext2_once_;
    mutable FieldPtr ext2_cache_;
};

// --- FE operators -----------------------------------------------------------

namespace detail {
inline const Field* same_ctx(const FE& a, const FE& b) {
    if (a.field == nullptr || a.field != b.field)
        throw domain_error("field context mismatch");
    return a.field;
}
} // namespace detail

inline FE operator+(FE a, FE b) { return FE{detail::same_ctx(a, b), a.field->add(a.v, b.v)}; }
inline FE operator-(FE a, FE b) { return FE{detail::same_ctx(a, b), a.field->sub(a.v, b.v)}; }
inline FE operator*(FE a, FE b) { return FE{detail::same_ctx(a, b), a.field->mul(a.v, b.v)}; }
inline FE operator/(FE a, FE b) { return FE{detail::same_ctx(a, b), a.field->div(a.v, b.v)}; }
inline FE operator-(FE a) { return FE{a.field, a.field->neg(a.v)}; }

inline FE inv(FE a) { return FE{a.field, a.field->inv(a.v)}; }
inline FE pow(FE a, std::uint64_t e) { return FE{a.field, a.field->pow(a.v, e)}; }
inline bool is_zero(FE a) { return a.v == 0; }

inline FieldPtr Field::parse_spec(const std::string& spec) {
    std::size_t i = 0;
    auto read_uint = [&](const char* what) -> std::uint64_t {
        if (i >= spec.size() || !std::isdigit(static_cast<unsigned char>(spec[i])))
            throw parse_error(std::string("expected ") + what, i);
        std::uint64_t v = 0;
        while (i < spec.size() && std::isdigit(static_cast<unsigned char>(spec[i]))) {
            v = v * 10 + static_cast<std::uint64_t>(spec[i] - '0');
            if (v > (1ull << 40)) throw parse_error("number too large", i);
            ++i;
        }
        return v;
    };
    std::uint64_t p = read_uint("prime");
    unsigned k = 1;
    if (i < spec.size() && spec[i] == '^') {
        ++i;
        std::uint64_t kk = read_uint("extension degree");
        if (kk == 0 || kk > 64) throw parse_error("bad extension degree", i);
        k = static_cast<unsigned>(kk);
    }
    if (i == spec.size()) return make(p, k);
    if (spec[i] != ':') throw parse_error("expected ':' or end of field spec", i);
    ++i;
    if (i >= spec.size() || spec[i] != '[') throw parse_error("expected '['", i);
    ++i;
    std::vector<elem_idx> mod;
    while (true) {
        std::uint64_t c = read_uint("modulus coefficient");
        mod.push_back(static_cast<elem_idx>(c));
        if (i < spec.size() && spec[i] == ',') { ++i; continue; }
        break;
    }
    if (i >= spec.size() || spec[i] != ']') throw parse_error("expected ']'", i);
    ++i;
    if (i != spec.size()) throw parse_error("trailing characters in field spec", i);
    for (elem_idx& c : mod) c = static_cast<elem_idx>(c % p);
    return make(p, k, mod);
}

} // namespace permrat
