#pragma once

// Exhaustive census of the monic/monic population: rational functions f/g of
// degree 3 with f, g monic coprime polynomials over F_q (the population the
// counting formulas are stated for; note that this differs from the stored
// den-monic normal form, whose numerator need not be monic).  Shapes
// enumerated: (3,3), (3,2), (3,1), (3,0), (2,3), (1,3), (0,3), with g = 1 as
// the only "monic" constant.  Also: the closed-form counting formulas, the
// Moebius orbit partition of the full degree-3 permutation population, and
// the complete-permutation census.

#include <cstdint>
#include <map>
#include <thread>
#include <unordered_map>
#include <vector>

#include "permrat/classify.hpp"
#include "permrat/field.hpp"
#include "permrat/poly.hpp"
#include "permrat/ratfunc.hpp"

namespace permrat {

enum class CensusMethod { brute, criterion, crosscheck };

inline const char* to_string(CensusMethod m) {
    switch (m) {
        case CensusMethod::brute: return "brute";
        case CensusMethod::criterion: return "criterion";
        case CensusMethod::crosscheck: return "crosscheck";
    }
    return "?";
}

struct ShapeCount {
    int deg_f = 0;
    int deg_g = 0;
    std::uint64_t pairs = 0;    // enumerated (f, g) pairs of this shape
    std::uint64_t coprime = 0;  // pairs with gcd(f, g) = 1
    std::uint64_t perms = 0;    // permutation rational functions among them
};

struct CensusResult {
    std::uint64_t q = 0;
    CensusMethod method = CensusMethod::brute;
    std::vector<ShapeCount> rows;       // fixed shape order as above
    std::uint64_t n_q = 0;              // total permutation count
    std::uint64_t r33_equal_lead = 0;   // |R_{3,3} \ R'_{3,3}| (equal x^2 coefficients)
};

struct CensusGuards {
    std::uint64_t brute_max_q = 11;
    std::uint64_t criterion_max_q = 64;
    std::uint64_t orbit_max_q = 9;
    std::uint64_t complete_max_q = 9;
};

namespace detail {

inline constexpr int kShapes[7][2] = {{3, 3}, {3, 2}, {3, 1}, {3, 0},
                                      {2, 3}, {1, 3}, {0, 3}};

// Monic polynomial of degree d whose non-leading coefficients are the base-q
// digits of m.
inline Poly monic_from_index(const Field& F, int d, std::uint64_t m) {
    std::vector<elem_idx> c(static_cast<std::size_t>(d) + 1, 0);
    for (int i = 0; i < d; ++i) {
        c[static_cast<std::size_t>(i)] = static_cast<elem_idx>(m % F.size());
        m /= F.size();
    }
    c[static_cast<std::size_t>(d)] = 1;
    return Poly(&F, std::move(c));
}

inline std::uint64_t monic_count(const Field& F, int d) {
    std::uint64_t n = 1;
    for (int i = 0; i < d; ++i) n *= F.size();
    return n;
}

// gcd(f, g) == 1 on small stack buffers (degrees <= 3).
inline bool pair_coprime(const Field& F, const Poly& f, const Poly& g) {
    elem_idx a[5], b[5];
    int da = f.deg(), db = g.deg();
    for (int i = 0; i <= da; ++i) a[i] = f.coeffs()[static_cast<std::size_t>(i)];
    for (int i = 0; i <= db; ++i) b[i] = g.coeffs()[static_cast<std::size_t>(i)];
    while (db > 0) {
        // a mod b
        elem_idx li = F.inv(b[db]);
        while (da >= db) {
            elem_idx s = F.mul(a[da], li);
            if (s != 0)
                for (int i = 0; i <= db; ++i)
                    a[da - db + i] = F.sub(a[da - db + i], F.mul(s, b[i]));
            while (da >= 0 && a[da] == 0) --da;
        }
        if (da < 0) return false;  // b divides a, deg b > 0
        for (int i = 0; i <= da; ++i) std::swap(a[i], b[i]);
        std::swap(da, db);
        for (int i = db + 1; i <= da; ++i) a[i] = b[i];
    }
    return db == 0;  // nonzero constant remainder
}

// Brute permutation check straight off the coefficient arrays.
inline bool pair_is_permutation(const Field& F, const Poly& f, const Poly& g,
                                std::vector<char>& seen) {
    const std::uint64_t q = F.size();
    seen.assign(q + 1, 0);
    // image of infinity
    std::size_t slot;
    if (f.deg() > g.deg()) {
        slot = q;
    } else if (f.deg() < g.deg()) {
        slot = 0;
    } else {
        slot = F.div(f.lc().v, g.lc().v);
    }
    seen[slot] = 1;
    const auto& fc = f.coeffs();
    const auto& gc = g.coeffs();
    for (std::uint64_t x = 0; x < q; ++x) {
        elem_idx xv = static_cast<elem_idx>(x);
        elem_idx fv = 0;
        for (std::size_t i = fc.size(); i-- > 0;) fv = F.add(F.mul(fv, xv), fc[i]);
        elem_idx gv = 0;
        for (std::size_t i = gc.size(); i-- > 0;) gv = F.add(F.mul(gv, xv), gc[i]);
        slot = gv == 0 ? q : F.div(fv, gv);
        if (seen[slot]) return false;
        seen[slot] = 1;
    }
    return true;
}

inline bool census_decide(const Field& F, const Poly& f, const Poly& g,
                          CensusMethod method, std::vector<char>& seen) {
    switch (method) {
        case CensusMethod::brute:
            return pair_is_permutation(F, f, g, seen);
        case CensusMethod::criterion:
            return permutation_verdict(RatFunc::from_coprime(f, g),
                                       DecisionMode::criterion);
        case CensusMethod::crosscheck: {
            bool brute = pair_is_permutation(F, f, g, seen);
            bool crit = permutation_verdict(RatFunc::from_coprime(f, g),
                                            DecisionMode::criterion);
            if (brute != crit)
                throw crosscheck_error("census: criterion disagrees with brute force on (" +
                                       format_poly(f) + ")/(" + format_poly(g) + ") over F_" +
                                       std::to_string(F.size()));
            return brute;
        }
    }
    throw internal_error("unreachable census method");
}

struct ShapeSlice {
    int shape = 0;
    std::uint64_t f_begin = 0, f_end = 0;
};

inline void census_worker(const Field& F, CensusMethod method,
                          const std::vector<ShapeSlice>& slices,
                          std::vector<ShapeCount>& rows, std::uint64_t& equal_lead) {
    std::vector<char> seen;
    for (const ShapeSlice& sl : slices) {
        int df = kShapes[sl.shape][0], dg = kShapes[sl.shape][1];
        ShapeCount& row = rows[static_cast<std::size_t>(sl.shape)];
        std::uint64_t ng = monic_count(F, dg);
        std::vector<Poly> gs;
        gs.reserve(ng);
        for (std::uint64_t mg = 0; mg < ng; ++mg) gs.push_back(monic_from_index(F, dg, mg));
        for (std::uint64_t mf = sl.f_begin; mf < sl.f_end; ++mf) {
            Poly f = monic_from_index(F, df, mf);
            for (std::uint64_t mg = 0; mg < ng; ++mg) {
                const Poly& g = gs[mg];
                ++row.pairs;
                if (!pair_coprime(F, f, g)) continue;
                ++row.coprime;
                if (!census_decide(F, f, g, method, seen)) continue;
                ++row.perms;
                if (df == 3 && dg == 3 &&
                    f.coeffs()[2] == g.coeffs()[2])
                    ++equal_lead;
            }
        }
    }
}

} // namespace detail

// Stream every monic coprime pair across the seven shapes in a fixed order;
// fn(f, g) is called for each.
template <class Fn>
void enumerate_pairs(const Field& F, Fn&& fn) {
    for (int s = 0; s < 7; ++s) {
        int df = detail::kShapes[s][0], dg = detail::kShapes[s][1];
        std::uint64_t nf = detail::monic_count(F, df), ng = detail::monic_count(F, dg);
        for (std::uint64_t mf = 0; mf < nf; ++mf) {
            Poly f = detail::monic_from_index(F, df, mf);
            for (std::uint64_t mg = 0; mg < ng; ++mg) {
                Poly g = detail::monic_from_index(F, dg, mg);
                if (detail::pair_coprime(F, f, g)) fn(f, g);
            }
        }
    }
}

// Full census.  Results are independent of the thread count: work is
// partitioned over f-ranges and merged by addition.
inline CensusResult count_permutations(const Field& F,
                                       CensusMethod method = CensusMethod::brute,
                                       const CensusGuards& guards = {},
                                       unsigned threads = 1) {
    std::uint64_t limit = method == CensusMethod::criterion ? guards.criterion_max_q
                                                            : guards.brute_max_q;
    if (F.size() > limit)
        throw domain_error("census guard exceeded: q = " + std::to_string(F.size()) +
                           " > " + std::to_string(limit));
    CensusResult res;
    res.q = F.size();
    res.method = method;
    res.rows.resize(7);
    for (int s = 0; s < 7; ++s) {
        res.rows[static_cast<std::size_t>(s)].deg_f = detail::kShapes[s][0];
        res.rows[static_cast<std::size_t>(s)].deg_g = detail::kShapes[s][1];
    }

    if (threads <= 1) {
        std::vector<detail::ShapeSlice> slices;
        for (int s = 0; s < 7; ++s)
            slices.push_back({s, 0, detail::monic_count(F, detail::kShapes[s][0])});
        detail::census_worker(F, method, slices, res.rows, res.r33_equal_lead);
    } else {
        std::vector<std::vector<detail::ShapeSlice>> work(threads);
        for (int s = 0; s < 7; ++s) {
            std::uint64_t nf = detail::monic_count(F, detail::kShapes[s][0]);
            std::uint64_t chunk = (nf + threads - 1) / threads;
            for (unsigned t = 0; t < threads; ++t) {
                std::uint64_t b = std::min<std::uint64_t>(nf, t * chunk);
                std::uint64_t e = std::min<std::uint64_t>(nf, b + chunk);
                if (b < e) work[t].push_back({s, b, e});
            }
        }
        std::vector<std::vector<ShapeCount>> rows(threads, res.rows);
        std::vector<std::uint64_t> eq(threads, 0);
        std::vector<std::thread> pool;
        std::exception_ptr first_error;
        std::mutex error_mu;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    detail::census_worker(F, method, work[t], rows[t], eq[t]);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(error_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
        for (unsigned t = 0; t < threads; ++t) {
            for (int s = 0; s < 7; ++s) {
                res.rows[static_cast<std::size_t>(s)].pairs += rows[t][static_cast<std::size_t>(s)].pairs;
                res.rows[static_cast<std::size_t>(s)].coprime += rows[t][static_cast<std::size_t>(s)].coprime;
                res.rows[static_cast<std::size_t>(s)].perms += rows[t][static_cast<std::size_t>(s)].perms;
            }
            res.r33_equal_lead += eq[t];
        }
    }

    for (const ShapeCount& row : res.rows) res.n_q += row.perms;
    return res;
}

// Closed-form N_q from the congruence class of q mod 3:
//   3 | q:        (q^4 + q^3 + q^2 + q)/2
//   q = 1 mod 3:  (q^4 - q^2)/2
//   q = 2 mod 3:  (q^4 + 2 q^3 + q^2)/2 = (q^2 + q)^2 / 2
// (the last two are the m = 1, 2 instances of (q^4 + 2(m-1)q^3 + (2m-3)q^2)/2).
inline std::uint64_t formula_Nq(std::uint64_t q) {
    if (q < 2) throw domain_error("q must be a prime power");
    std::uint64_t p = 0;
    for (std::uint64_t d = 2; d * d <= q; ++d)
        if (q % d == 0) { p = d; break; }
    if (p == 0) p = q;  // q prime
    std::uint64_t t = q;
    while (t % p == 0) t /= p;
    if (t != 1) throw domain_error(std::to_string(q) + " is not a prime power");
    if (q > 65536) throw domain_error("q too large for exact 64-bit evaluation");
    std::uint64_t q2 = q * q, q3 = q2 * q, q4 = q3 * q;
    switch (q % 3) {
        case 0: return (q4 + q3 + q2 + q) / 2;
        case 1: return (q4 - q2) / 2;
        default: return (q4 + 2 * q3 + q2) / 2;
    }
}

// --- Moebius orbit partition --------------------------------------------------

struct Orbit {
    std::uint64_t size = 0;
    RatFunc min_rep;  // minimal stored normal form in the orbit
};

struct OrbitTable {
    std::uint64_t q = 0;
    std::uint64_t population = 0;  // all degree-3 permutation rational functions
    std::vector<Orbit> orbits;
};

namespace detail {

// Stored normal form as a fixed-width key (degree <= 3 on both sides).
inline std::array<elem_idx, 8> ratfunc_key(const RatFunc& r) {
    std::array<elem_idx, 8> k{};
    for (std::size_t i = 0; i < 4; ++i) {
        k[i] = i < r.num().coeffs().size() ? r.num().coeffs()[i] : 0;
        k[4 + i] = i < r.den().coeffs().size() ? r.den().coeffs()[i] : 0;
    }
    return k;
}

struct KeyHash {
    std::size_t operator()(const std::array<elem_idx, 8>& k) const {
        std::size_t h = 1469598103934665603ull;
        for (elem_idx v : k) {
            h ^= v;
            h *= 1099511628211ull;
        }
        return h;
    }
};

} // namespace detail

// Orbit partition of the full set of degree-3 permutation rational functions
// under two-sided Moebius composition, computed by breadth-first closure from
// the census population under the generator set
// { x + c, c x (c != 0), 1/x } applied on both sides.
inline OrbitTable equivalence_classes(const Field& F, const CensusGuards& guards = {}) {
    if (F.size() > guards.orbit_max_q)
        throw domain_error("orbit guard exceeded: q = " + std::to_string(F.size()));
    std::vector<RatFunc> seeds;
    {
        std::vector<char> seen;
        enumerate_pairs(F, [&](const Poly& f, const Poly& g) {
            if (detail::pair_is_permutation(F, f, g, seen))
                seeds.push_back(RatFunc::from_coprime(f, g));
        });
    }
    // generators
    std::vector<Mobius> gens;
    for (std::uint64_t c = 1; c < F.size(); ++c)
        gens.push_back(Mobius::translation(FE{&F, static_cast<elem_idx>(c)}));
    for (std::uint64_t c = 2; c < F.size(); ++c)
        gens.push_back(Mobius::scaling(FE{&F, static_cast<elem_idx>(c)}));
    gens.push_back(Mobius::inversion(F));

    std::unordered_map<std::array<elem_idx, 8>, int, detail::KeyHash> orbit_of;
    OrbitTable table;
    table.q = F.size();
    for (const RatFunc& seed : seeds) {
        auto k0 = detail::ratfunc_key(seed);
        if (orbit_of.count(k0)) continue;
        int id = static_cast<int>(table.orbits.size());
        Orbit orb;
        orb.min_rep = seed;
        auto min_key = k0;
        std::vector<RatFunc> frontier{seed};
        orbit_of.emplace(k0, id);
        orb.size = 1;
        while (!frontier.empty()) {
            RatFunc cur = std::move(frontier.back());
            frontier.pop_back();
            for (const Mobius& m : gens) {
                for (Side side : {Side::left, Side::right}) {
                    RatFunc nxt = compose_mobius(cur, m, side);
                    auto k = detail::ratfunc_key(nxt);
                    if (orbit_of.emplace(k, id).second) {
                        ++orb.size;
                        if (k < min_key) {
                            min_key = k;
                            orb.min_rep = nxt;
                        }
                        frontier.push_back(std::move(nxt));
                    }
                }
            }
        }
        table.orbits.push_back(std::move(orb));
    }
    for (const Orbit& o : table.orbits) table.population += o.size;
    std::sort(table.orbits.begin(), table.orbits.end(), [](const Orbit& a, const Orbit& b) {
        return detail::ratfunc_key(a.min_rep) < detail::ratfunc_key(b.min_rep);
    });
    return table;
}

// Independent prediction of the complete census from the classification:
// nothing unless 3 | q, else the monic polynomials x^3 + b x + c with both
// -b and -(b+1) each zero or a non-square.
inline std::vector<RatFunc> predicted_complete_set(const Field& F) {
    std::vector<RatFunc> out;
    if (F.characteristic() != 3) return out;
    auto ok = [&](elem_idx v) {
        elem_idx m = F.neg(v);
        return m == 0 || !F.is_square(m);
    };
    for (std::uint64_t b = 0; b < F.size(); ++b) {
        if (!ok(static_cast<elem_idx>(b))) continue;
        if (!ok(F.add(static_cast<elem_idx>(b), 1))) continue;
        for (std::uint64_t c = 0; c < F.size(); ++c)
            out.push_back(RatFunc::from_poly(
                Poly(&F, {static_cast<elem_idx>(c), static_cast<elem_idx>(b), 0, 1})));
    }
    std::sort(out.begin(), out.end(), [](const RatFunc& a, const RatFunc& b) {
        return detail::ratfunc_key(a) < detail::ratfunc_key(b);
    });
    return out;
}

// Brute-force complete census over the monic/monic population, cross-checked
// in place against the predicted set.
inline std::vector<RatFunc> complete_census(const Field& F, const CensusGuards& guards = {}) {
    if (F.size() > guards.complete_max_q)
        throw domain_error("complete-census guard exceeded: q = " + std::to_string(F.size()));
    std::vector<RatFunc> out;
    std::vector<char> seen;
    enumerate_pairs(F, [&](const Poly& f, const Poly& g) {
        if (!detail::pair_is_permutation(F, f, g, seen)) return;
        RatFunc phi = RatFunc::from_coprime(f, g);
        if (is_complete(phi)) out.push_back(std::move(phi));
    });
    std::sort(out.begin(), out.end(), [](const RatFunc& a, const RatFunc& b) {
        return detail::ratfunc_key(a) < detail::ratfunc_key(b);
    });
    std::vector<RatFunc> predicted = predicted_complete_set(F);
    if (out.size() != predicted.size() ||
        !std::equal(out.begin(), out.end(), predicted.begin()))
        throw crosscheck_error("complete census disagrees with the classification over F_" +
                               std::to_string(F.size()));
    return out;
}

} // namespace permrat
