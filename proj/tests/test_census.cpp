#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "permrat/census.hpp"
#include "permrat/parse.hpp"

using namespace permrat;

TEST_CASE("pair enumeration", "[census]") {
    FieldPtr Fp = Field::make(2, 1);
    const Field& F = *Fp;
    SECTION("q = 2, shape (3,0): all 8 monic cubics paired with g = 1") {
        std::uint64_t count = 0;
        enumerate_pairs(F, [&](const Poly& f, const Poly& g) {
            if (f.deg() == 3 && g.deg() == 0) {
                CHECK(g.is_one());
                ++count;
            }
        });
        CHECK(count == 8);
    }
    SECTION("pairs with a common factor are excluded") {
        enumerate_pairs(F, [&](const Poly& f, const Poly& g) {
            CHECK(gcd_monic(f, g).is_one());
            CHECK(f.lc() == F.one());
            CHECK(g.lc() == F.one());
        });
    }
    SECTION("enumeration is deterministic") {
        std::vector<std::pair<std::vector<elem_idx>, std::vector<elem_idx>>> a, b;
        enumerate_pairs(F, [&](const Poly& f, const Poly& g) {
            a.emplace_back(f.coeffs(), g.coeffs());
        });
        enumerate_pairs(F, [&](const Poly& f, const Poly& g) {
            b.emplace_back(f.coeffs(), g.coeffs());
        });
        CHECK(a == b);
    }
}

TEST_CASE("census counting", "[census]") {
    SECTION("N_2 = 18 with per-shape breakdown") {
        FieldPtr F = Field::make(2, 1);
        CensusResult res = count_permutations(*F, CensusMethod::brute);
        CHECK(res.n_q == 18);
        auto row = [&](int df, int dg) -> const ShapeCount& {
            for (const ShapeCount& r : res.rows)
                if (r.deg_f == df && r.deg_g == dg) return r;
            throw std::logic_error("shape missing");
        };
        CHECK(row(3, 0).perms == 4);   // x^3, x^3+1, x^3+x^2+x, x^3+x^2+x+1
        CHECK(row(3, 2).perms == 2);   // q^2 (q-1)/2
        CHECK(row(3, 1).perms == 0);
        CHECK(row(3, 3).perms == 6);
        CHECK(row(2, 3).perms == row(3, 2).perms);
        CHECK(row(0, 3).perms == row(3, 0).perms);
    }
    SECTION("monic permutation cubic count |R_{3,0}|") {
        // (m-1) q^2 for 3 not dividing q, (q^2+q)/2 for 3 | q
        for (FieldPtr F : {Field::make(2, 1), Field::make(3, 1), Field::make(2, 2),
                           Field::make(5, 1), Field::make(7, 1), Field::make(2, 3),
                           Field::make(3, 2)}) {
            CensusResult res = count_permutations(*F, CensusMethod::brute);
            std::uint64_t q = F->size();
            std::uint64_t r30 = 0;
            for (const ShapeCount& r : res.rows)
                if (r.deg_f == 3 && r.deg_g == 0) r30 = r.perms;
            std::uint64_t expected =
                q % 3 == 0 ? (q * q + q) / 2 : (q % 3 - 1) * q * q;
            CHECK(r30 == expected);
        }
    }
    SECTION("|R_{3,3} \\ R'_{3,3}| = (q-1) |R_{3,0}| for odd q") {
        for (FieldPtr F : {Field::make(3, 1), Field::make(5, 1), Field::make(7, 1),
                           Field::make(3, 2)}) {
            CensusResult res = count_permutations(*F, CensusMethod::brute);
            std::uint64_t r30 = 0;
            for (const ShapeCount& r : res.rows)
                if (r.deg_f == 3 && r.deg_g == 0) r30 = r.perms;
            CHECK(res.r33_equal_lead == (F->size() - 1) * r30);
        }
    }
    SECTION("threaded runs match the single-threaded result") {
        FieldPtr F = Field::make(5, 1);
        CensusResult one = count_permutations(*F, CensusMethod::brute, {}, 1);
        CensusResult two = count_permutations(*F, CensusMethod::brute, {}, 2);
        CensusResult three = count_permutations(*F, CensusMethod::crosscheck, {}, 3);
        REQUIRE(one.rows.size() == two.rows.size());
        for (std::size_t i = 0; i < one.rows.size(); ++i) {
            CHECK(one.rows[i].pairs == two.rows[i].pairs);
            CHECK(one.rows[i].coprime == two.rows[i].coprime);
            CHECK(one.rows[i].perms == two.rows[i].perms);
            CHECK(one.rows[i].perms == three.rows[i].perms);
        }
        CHECK(one.r33_equal_lead == two.r33_equal_lead);
    }
    SECTION("criterion-only census matches the formula beyond the brute guard") {
        FieldPtr F = Field::make(11, 1);
        CensusResult res = count_permutations(*F, CensusMethod::criterion);
        CHECK(res.n_q == formula_Nq(11));  // 8712, no brute force consulted
    }
    SECTION("runtime guards") {
        FieldPtr F = Field::make(13, 1);
        CHECK_THROWS_AS(count_permutations(*F, CensusMethod::brute), domain_error);
        CensusGuards loose;
        loose.brute_max_q = 4;
        CHECK_THROWS_AS(count_permutations(*Field::make(5, 1), CensusMethod::brute, loose),
                        domain_error);
    }
}

TEST_CASE("counting formulas", "[census]") {
    CHECK(formula_Nq(2) == 18);
    CHECK(formula_Nq(3) == 60);
    CHECK(formula_Nq(4) == 120);
    CHECK(formula_Nq(5) == 450);
    CHECK(formula_Nq(7) == 1176);
    CHECK(formula_Nq(8) == 2592);
    CHECK(formula_Nq(9) == 3690);
    CHECK(formula_Nq(11) == formula_Nq(11));
    CHECK_THROWS_AS(formula_Nq(6), domain_error);
    CHECK_THROWS_AS(formula_Nq(12), domain_error);
    CHECK_THROWS_AS(formula_Nq(1), domain_error);
    SECTION("the three congruence branches agree with the unified formula") {
        for (std::uint64_t q : {2ull, 3ull, 4ull, 5ull, 7ull, 8ull, 9ull, 11ull, 13ull,
                                16ull, 25ull, 27ull}) {
            std::uint64_t m = q % 3;
            if (m == 0) {
                CHECK(formula_Nq(q) == (q * q * q * q + q * q * q + q * q + q) / 2);
            } else {
                // (q^4 + 2(m-1) q^3 + (2m-3) q^2)/2 without unsigned underflow
                std::int64_t qi = static_cast<std::int64_t>(q);
                std::int64_t v = qi * qi * qi * qi + 2 * (static_cast<std::int64_t>(m) - 1) * qi * qi * qi +
                                 (2 * static_cast<std::int64_t>(m) - 3) * qi * qi;
                CHECK(formula_Nq(q) == static_cast<std::uint64_t>(v / 2));
            }
        }
    }
}

TEST_CASE("equivalence classes", "[census]") {
    SECTION("q = 2: one class containing x^3") {
        FieldPtr F = Field::make(2, 1);
        OrbitTable table = equivalence_classes(*F);
        REQUIRE(table.orbits.size() == 1);
        CHECK(table.population == (F->size() - 1) * formula_Nq(F->size()));
        ClassReport rep = canonicalize(table.orbits[0].min_rep);
        CHECK(rep.canon->tag == CanonTag::cube);
    }
    SECTION("population is (q-1) N_q: the scalar multiples of the census set") {
        for (FieldPtr F : {Field::make(2, 1), Field::make(3, 1), Field::make(2, 2),
                           Field::make(5, 1)}) {
            OrbitTable table = equivalence_classes(*F);
            CHECK(table.population == (F->size() - 1) * formula_Nq(F->size()));
        }
    }
    SECTION("q = 3: the inseparable and separable classes") {
        FieldPtr F = Field::make(3, 1);
        OrbitTable table = equivalence_classes(*F);
        REQUIRE(table.orbits.size() == 2);
        std::set<CanonTag> tags;
        for (const Orbit& o : table.orbits)
            tags.insert(canonicalize(o.min_rep).canon->tag);
        CHECK(tags == std::set<CanonTag>{CanonTag::char3_cube, CanonTag::char3_linearized});
    }
    SECTION("orbit guard") {
        CHECK_THROWS_AS(equivalence_classes(*Field::make(11, 1)), domain_error);
    }
}

TEST_CASE("complete census", "[census]") {
    SECTION("q = 3: exactly the three translates of x^3") {
        FieldPtr F = Field::make(3, 1);
        std::vector<RatFunc> found = complete_census(*F);
        REQUIRE(found.size() == 3);
        std::set<std::string> names;
        for (const RatFunc& r : found) names.insert(format_ratfunc(r));
        CHECK(names == std::set<std::string>{"x^3", "x^3+1", "x^3+2"});
    }
    SECTION("nothing outside characteristic 3") {
        for (FieldPtr F : {Field::make(2, 1), Field::make(2, 2), Field::make(5, 1)}) {
            CHECK(complete_census(*F).empty());
            CHECK(predicted_complete_set(*F).empty());
        }
    }
    SECTION("prediction matches the x^3+bx+c conditions over F9") {
        FieldPtr Fp = Field::make(3, 2);
        const Field& F = *Fp;
        std::vector<RatFunc> predicted = predicted_complete_set(F);
        for (const RatFunc& r : predicted) {
            CHECK(r.den().is_one());
            CHECK(r.num().deg() == 3);
            CHECK(is_zero(r.num().at(2)));
            FE b = r.num().at(1);
            // both -b and -(b+1) must be zero or non-squares
            auto ok = [&](FE v) { return is_zero(v) || !F.is_square(v.v); };
            CHECK(ok(-b));
            CHECK(ok(-(b + F.one())));
        }
        CHECK(predicted.size() == 18);
    }
}
