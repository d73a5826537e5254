#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "permrat/census.hpp"
#include "permrat/classify.hpp"
#include "permrat/parse.hpp"
#include "permrat/selfcheck.hpp"

using namespace permrat;

namespace {

RatFunc rf(const std::string& text, const Field& F) { return parse_ratfunc(text, F); }

} // namespace

TEST_CASE("quadratic resolvent values", "[classify]") {
    SECTION("x^3 + bx - t has resolvent (3t, b^3 + 9t^2), F5 and F7") {
        for (FieldPtr Fp : {Field::make(5, 1), Field::make(7, 1)}) {
            const Field& F = *Fp;
            for (std::uint64_t b = 0; b < F.size(); ++b) {
                Poly a0 = Poly::zero(F);
                Poly bc = Poly::constant(FE{&F, static_cast<elem_idx>(b)});
                Poly mt(&F, {0, F.neg(1)});
                auto [B, C] = quadratic_resolvent<Poly>(a0, bc, mt);
                CHECK(B == Poly(&F, {0, F.from_int(3).v}));
                FE b3 = pow(FE{&F, static_cast<elem_idx>(b)}, 3);
                CHECK(C == Poly(&F, {b3.v, 0, F.from_int(9).v}));
            }
        }
    }
    SECTION("zero cubic tail") {
        FieldPtr F = Field::make(5, 1);
        auto [B, C] = quadratic_resolvent<FE>(F->zero(), F->zero(), F->zero());
        CHECK(is_zero(B));
        CHECK(is_zero(C));
    }
    SECTION("char-2 pencil resolvent coefficients in closed form") {
        // R2 of x^3 + a2 x^2 + a1 x - t(x^2 + x + b0):
        //   B = t^2 + (a1+a2+b0) t + a1 a2
        //   C = b0 t^4 + (a2 b0 + 1) t^3 + (a1 + a2^2 b0 + b0^2) t^2
        //       + (a1^2 + a2^3 b0) t + a1^3
        for (FieldPtr Fp : {Field::make(2, 1), Field::make(2, 2), Field::make(2, 3)}) {
            const Field& F = *Fp;
            for (std::uint64_t a1v = 0; a1v < F.size(); ++a1v)
                for (std::uint64_t a2v = 0; a2v < F.size(); ++a2v)
                    for (std::uint64_t b0v = 1; b0v < F.size(); ++b0v) {
                        FE a1{&F, static_cast<elem_idx>(a1v)};
                        FE a2{&F, static_cast<elem_idx>(a2v)};
                        FE b0{&F, static_cast<elem_idx>(b0v)};
                        Poly c2(&F, {a2.v, 1});            // a2 - t (char 2)
                        Poly c1(&F, {a1.v, 1});            // a1 - t
                        Poly c0 = Poly(&F, {0, b0.v});     // -t b0
                        auto [B, C] = quadratic_resolvent<Poly>(c2, c1, c0);
                        Poly expB(&F, {(a1 * a2).v, (a1 + a2 + b0).v, 1});
                        Poly expC(&F, {pow(a1, 3).v,
                                       (a1 * a1 + pow(a2, 3) * b0).v,
                                       (a1 + a2 * a2 * b0 + b0 * b0).v,
                                       (a2 * b0 + F.one()).v,
                                       b0.v});
                        CHECK(B == expB);
                        CHECK(C == expC);
                    }
        }
    }
}

TEST_CASE("pencil construction", "[classify]") {
    SECTION("(x^3+3x)/(3x^2+1) over F5 reads off f - t g") {
        FieldPtr Fp = Field::make(5, 1);
        const Field& F = *Fp;
        PencilBuild pb = build_pencil(rf("(x^3+3*x)/(3*x^2+1)", F));
        REQUIRE_FALSE(pb.not_permutation);
        CHECK(pb.f == Poly(&F, {0, 3, 0, 1}));
        CHECK(pb.g == Poly(&F, {1, 0, 3}));
        CHECK(pb.pencil.c2 == Poly(&F, {0, F.neg(3)}));  // -3t
        CHECK(pb.pencil.c1 == Poly::constant(F.from_int(3)));
        CHECK(pb.pencil.c0 == Poly(&F, {0, F.neg(1)}));  // -t
    }
    SECTION("x^3 gives c2 = c1 = 0, c0 = -t") {
        FieldPtr Fp = Field::make(5, 1);
        const Field& F = *Fp;
        PencilBuild pb = build_pencil(rf("x^3", F));
        CHECK(pb.pencil.c2.is_zero());
        CHECK(pb.pencil.c1.is_zero());
        CHECK(pb.pencil.c0 == Poly(&F, {0, F.neg(1)}));
    }
    SECTION("degree-1 denominator is an immediate non-permutation") {
        FieldPtr Fp = Field::make(5, 1);
        const Field& F = *Fp;
        PencilBuild pb = build_pencil(rf("(x^3+1)/(x)", F));
        CHECK(pb.not_permutation);
        CHECK_FALSE(permutation_verdict(rf("(x^3+1)/(x)", F), DecisionMode::criterion));
        CHECK_FALSE(permutation_verdict(rf("(x^3+1)/(x)", F), DecisionMode::brute));
    }
    SECTION("degree-3 denominators are normalized away") {
        FieldPtr Fp = Field::make(5, 1);
        const Field& F = *Fp;
        PencilBuild pb = build_pencil(rf("(x^3+x^2+2)/(x^3+x+1)", F));
        REQUIRE_FALSE(pb.not_permutation);
        CHECK(pb.f.deg() == 3);
        CHECK(pb.g.deg() <= 2);
        CHECK(pb.f.lc() == F.one());
    }
    SECTION("non-cubic inputs rejected") {
        FieldPtr Fp = Field::make(5, 1);
        CHECK_THROWS_AS(build_pencil(rf("x^2", *Fp)), domain_error);
    }
}

TEST_CASE("pencil discriminant", "[classify]") {
    SECTION("x^3 - t over F7: -27 t^2") {
        FieldPtr Fp = Field::make(7, 1);
        const Field& F = *Fp;
        Poly delta = pencil_discriminant(rf("x^3", F));
        CHECK(delta == Poly(&F, {0, 0, F.from_int(-27).v}));
    }
    SECTION("char-3 pencil x^3+ax^2+bx-t: a^3 t + a^2 b^2 - b^3") {
        // The classical discriminant, confirmed against disc(R2) = B^2 - 4C.
        for (FieldPtr Fp : {Field::make(3, 1), Field::make(3, 2)}) {
            const Field& F = *Fp;
            for (std::uint64_t av = 0; av < F.size(); ++av)
                for (std::uint64_t bv = 0; bv < F.size(); ++bv) {
                    FE a{&F, static_cast<elem_idx>(av)}, b{&F, static_cast<elem_idx>(bv)};
                    RatFunc phi(Poly(&F, {0, b.v, a.v, 1}), Poly::constant(F.one()));
                    Poly delta = pencil_discriminant(phi);
                    FE c1 = a * a * a;
                    FE c0 = a * a * b * b - b * b * b;
                    CHECK(delta == Poly(&F, {c0.v, c1.v}));
                    PencilBuild pb = build_pencil(phi);
                    auto [B, C] =
                        quadratic_resolvent<Poly>(pb.pencil.c2, pb.pencil.c1, pb.pencil.c0);
                    CHECK(B * B - F.from_int(4) * C == delta);
                }
        }
    }
    SECTION("fractional family discriminant factors as -4 b2^3 h(t), F5 and F7") {
        // disc(x^3+a2 x^2+a1 x - t(b2 x^2+1)) = -4 b2^3 h(t) with
        // h = t^4 - (3a2/b2) t^3 - ((a1^2 b2^2 + 18 a1 b2 - 12 a2^2 b2 - 27)/(4 b2^3)) t^2
        //       + ((a1^2 a2 b2 + 9 a1 a2 - 2 a2^3)/(2 b2^3)) t + (4 a1^3 - a1^2 a2^2)/(4 b2^3)
        for (FieldPtr Fp : {Field::make(5, 1), Field::make(7, 1)}) {
            const Field& F = *Fp;
            std::mt19937 rng(61);
            for (int i = 0; i < 100; ++i) {
                FE a1{&F, static_cast<elem_idx>(rng() % F.size())};
                FE a2{&F, static_cast<elem_idx>(rng() % F.size())};
                FE b2{&F, static_cast<elem_idx>(1 + rng() % (F.size() - 1))};
                RatFunc phi(Poly(&F, {0, a1.v, a2.v, 1}), Poly(&F, {1, 0, b2.v}));
                if (phi.degree() != 3 || phi.den().deg() != 2) continue;  // reducible pair
                Poly delta = pencil_discriminant(phi);
                FE b2c = pow(b2, 3);
                FE four = F.from_int(4), two = F.from_int(2);
                FE h3 = -(F.from_int(3) * a2 / b2);
                FE h2 = -((a1 * a1 * b2 * b2 + F.from_int(18) * a1 * b2 -
                           F.from_int(12) * a2 * a2 * b2 - F.from_int(27)) /
                          (four * b2c));
                FE h1 = (a1 * a1 * a2 * b2 + F.from_int(9) * a1 * a2 - two * pow(a2, 3)) /
                        (two * b2c);
                FE h0 = (four * pow(a1, 3) - a1 * a1 * a2 * a2) / (four * b2c);
                Poly h(&F, {h0.v, h1.v, h2.v, h3.v, 1});
                CHECK(delta == (-four * b2c) * h);
            }
        }
    }
    SECTION("char 2 rejected") {
        FieldPtr F = Field::make(2, 1);
        CHECK_THROWS_AS(pencil_discriminant(rf("x^3", *F)), domain_error);
    }
}

TEST_CASE("permutation criteria", "[classify]") {
    SECTION("odd: the F5 fractional example and the char-3 linear case") {
        FieldPtr F5 = Field::make(5, 1);
        CHECK(criterion_odd(rf("(x^3+3*x)/(3*x^2+1)", *F5)));
        CHECK_FALSE(criterion_odd(rf("x^3", Field::make(7, 1).operator*())));
        FieldPtr F3 = Field::make(3, 1);
        CHECK(criterion_odd(rf("x^3+x", *F3)));  // -1 = 2 is a non-square mod 3
    }
    SECTION("even: F2 cube over irreducible quadratic; F4 non-example and member") {
        FieldPtr F2 = Field::make(2, 1);
        CHECK(criterion_even(rf("(x^3)/(x^2+x+1)", *F2)));
        FieldPtr F4 = Field::make(2, 2);
        CHECK_FALSE(criterion_even(rf("x^3", *F4)));
        CHECK(criterion_even(rf("(x^3+w*x^2+x)/(x^2+x+w)", *F4)));
    }
    SECTION("characteristic gating") {
        CHECK_THROWS_AS(criterion_odd(rf("x^3", *Field::make(2, 1))), domain_error);
        CHECK_THROWS_AS(criterion_even(rf("x^3", *Field::make(5, 1))), domain_error);
        CHECK_THROWS_AS(criterion_odd(rf("x^3", *Field::make(3, 1))), domain_error);  // inseparable
    }
    SECTION("criterion implies permutation for every q, including q < 13") {
        // sufficiency direction of the decision rule; sampled per field
        for (FieldPtr Fp : {Field::make(3, 1), Field::make(5, 1), Field::make(7, 1),
                            Field::make(2, 2), Field::make(2, 3), Field::make(3, 2)}) {
            const Field& F = *Fp;
            std::mt19937 rng(71);
            int tested = 0;
            while (tested < 200) {
                std::vector<elem_idx> fc(4), gc(1 + rng() % 4);
                for (auto& v : fc) v = static_cast<elem_idx>(rng() % F.size());
                for (auto& v : gc) v = static_cast<elem_idx>(rng() % F.size());
                fc[3] = static_cast<elem_idx>(1 + rng() % (F.size() - 1));
                Poly f(&F, std::move(fc)), g(&F, std::move(gc));
                if (g.is_zero()) continue;
                RatFunc phi(f, g);
                if (phi.degree() != 3 || !is_separable(phi)) continue;
                ++tested;
                bool crit = permutation_verdict(phi, DecisionMode::criterion);
                if (crit) CHECK(is_permutation_bruteforce(phi));
            }
        }
    }
}

TEST_CASE("is_permutation dispatcher", "[classify]") {
    SECTION("inseparable branch over F3") {
        FieldPtr F = Field::make(3, 1);
        ClassReport rep = is_permutation(rf("(x^3+1)/(x^3+2)", *F));
        CHECK(rep.permutation);
        CHECK_FALSE(rep.separable);
        REQUIRE(rep.canon.has_value());
        CHECK(rep.canon->tag == CanonTag::char3_cube);
    }
    SECTION("the F7 example is a permutation; x^3+x over F7 is not") {
        FieldPtr F = Field::make(7, 1);
        CHECK(is_permutation(rf("(x^3+x)/(2*x^2+1)", *F)).permutation);
        CHECK_FALSE(is_permutation(rf("x^3+x", *F)).permutation);
    }
    SECTION("crosscheck mode on assorted inputs") {
        for (FieldPtr Fp : {Field::make(5, 1), Field::make(2, 2), Field::make(3, 2)}) {
            const Field& F = *Fp;
            std::mt19937 rng(83);
            for (int i = 0; i < 60; ++i) {
                std::vector<elem_idx> fc(4), gc(1 + rng() % 4);
                for (auto& v : fc) v = static_cast<elem_idx>(rng() % F.size());
                for (auto& v : gc) v = static_cast<elem_idx>(rng() % F.size());
                Poly f(&F, std::move(fc)), g(&F, std::move(gc));
                if (f.is_zero() || g.is_zero()) continue;
                RatFunc phi(f, g);
                if (phi.degree() != 3) continue;
                CHECK_NOTHROW(is_permutation(phi, DecisionMode::crosscheck));
            }
        }
    }
    SECTION("criterion at q >= 13 agrees with brute force (sampled)") {
        for (FieldPtr Fp : {Field::make(13, 1), Field::make(2, 4)}) {
            const Field& F = *Fp;
            std::mt19937 rng(89);
            int tested = 0;
            while (tested < 150) {
                std::vector<elem_idx> fc(4), gc(1 + rng() % 4);
                for (auto& v : fc) v = static_cast<elem_idx>(rng() % F.size());
                for (auto& v : gc) v = static_cast<elem_idx>(rng() % F.size());
                Poly f(&F, std::move(fc)), g(&F, std::move(gc));
                if (f.is_zero() || g.is_zero()) continue;
                RatFunc phi(f, g);
                if (phi.degree() != 3) continue;
                ++tested;
                CHECK_NOTHROW(is_permutation(phi, DecisionMode::crosscheck));
            }
            // and the known family: (x^3 + (9/b) x)/(b x^2 + 1), -b non-square
            for (std::uint64_t bv = 1; bv < F.size(); ++bv) {
                if (F.characteristic() == 2) break;
                FE b{&F, static_cast<elem_idx>(bv)};
                if (F.is_square(F.neg(b.v))) continue;
                RatFunc phi(Poly(&F, {0, (F.from_int(9) / b).v, 0, 1}),
                            Poly(&F, {1, 0, b.v}));
                CHECK(permutation_verdict(phi, DecisionMode::criterion));
                CHECK(is_permutation_bruteforce(phi));
            }
        }
    }
    SECTION("degree gating") {
        FieldPtr F = Field::make(5, 1);
        CHECK_THROWS_AS(is_permutation(rf("x^2", *F)), domain_error);
    }
}

TEST_CASE("canonicalization", "[classify]") {
    SECTION("q = 5 mod 6: everything separable lands on x^3") {
        FieldPtr F = Field::make(5, 1);
        ClassReport rep = canonicalize(rf("(x^3+3*x)/(3*x^2+1)", *F));
        REQUIRE(rep.canon.has_value());
        CHECK(rep.canon->tag == CanonTag::cube);
        CHECK(rep.canon->representative == rf("x^3", *F));
    }
    SECTION("q = 1 mod 6: fractional representative with first valid b") {
        FieldPtr Fp = Field::make(7, 1);
        const Field& F = *Fp;
        ClassReport rep = canonicalize(rf("(x^3+x)/(2*x^2+1)", F));
        REQUIRE(rep.canon.has_value());
        CHECK(rep.canon->tag == CanonTag::odd_fractional);
        REQUIRE(rep.canon->b.has_value());
        CHECK(rep.canon->b->v == 1);  // -1 = 6 is the first non-square negation
        CHECK(rep.canon->a->v == 2);  // 9/1 mod 7
        CHECK(rep.canon->representative == rf("(x^3+2*x)/(x^2+1)", F));
        // canonicalizing the representative itself is stable
        ClassReport rep2 = canonicalize(rep.canon->representative);
        CHECK(rep2.canon->representative == rep.canon->representative);
    }
    SECTION("char 3: inseparable cube and separable linearized classes") {
        FieldPtr Fp = Field::make(3, 1);
        const Field& F = *Fp;
        ClassReport insep = canonicalize(rf("(x^3+1)/(x^3+2)", F));
        CHECK(insep.canon->tag == CanonTag::char3_cube);
        CHECK(insep.canon->representative == rf("x^3", F));
        ClassReport sep = canonicalize(rf("x^3+x", F));
        CHECK(sep.canon->tag == CanonTag::char3_linearized);
        CHECK(sep.canon->a->v == 1);  // -1 = 2 is a non-square mod 3
        CHECK(sep.canon->representative == rf("x^3+x", F));
    }
    SECTION("q = 4 mod 6: translation onto the first trace-one b0") {
        FieldPtr Fp = Field::make(2, 2);
        const Field& F = *Fp;
        FE w = F.gen();
        REQUIRE(F.abs_trace2(w.v) == 1);
        // member with b0 = w^2 = w+1 (also trace 1)
        FE b0 = w * w;
        FE ib = inv(b0);
        RatFunc phi(Poly(&F, {0, (b0 + ib).v, (F.one() + ib).v, 1}),
                    Poly(&F, {b0.v, 1, 1}));
        ClassReport rep = canonicalize(phi);
        CHECK(rep.canon->tag == CanonTag::even_fractional);
        CHECK(*rep.canon->b == w);  // w precedes w^2 in enumeration order
        CHECK(rep.canon->representative == rf("(x^3+w*x^2+x)/(x^2+x+w)", F));
    }
    SECTION("q = 2 mod 6: even fields land on x^3") {
        for (FieldPtr Fp : {Field::make(2, 1), Field::make(2, 3)}) {
            const Field& F = *Fp;
            RatFunc member = detail::even_fractional_rep(
                *detail::canonical_params(F).b0_star);
            ClassReport rep = canonicalize(member);
            CHECK(rep.canon->tag == CanonTag::cube);
            CHECK(rep.canon->representative == rf("x^3", F));
        }
    }
    SECTION("witnesses recompose exactly and pointwise") {
        for (FieldPtr Fp : {Field::make(3, 1), Field::make(5, 1), Field::make(7, 1),
                            Field::make(2, 2), Field::make(2, 3), Field::make(3, 2),
                            Field::make(13, 1)}) {
            const Field& F = *Fp;
            std::mt19937 rng(101);
            int found = 0;
            while (found < 25) {
                std::vector<elem_idx> fc(4), gc(1 + rng() % 4);
                for (auto& v : fc) v = static_cast<elem_idx>(rng() % F.size());
                for (auto& v : gc) v = static_cast<elem_idx>(rng() % F.size());
                Poly f(&F, std::move(fc)), g(&F, std::move(gc));
                if (f.is_zero() || g.is_zero()) continue;
                RatFunc phi(f, g);
                if (phi.degree() != 3) continue;
                if (!permutation_verdict(phi, DecisionMode::automatic)) continue;
                ++found;
                ClassReport rep = canonicalize(phi);
                REQUIRE(rep.witnesses.has_value());
                RatFunc lhs = compose_mobius(
                    compose_mobius(phi, rep.witnesses->second, Side::right),
                    rep.witnesses->first, Side::left);
                CHECK(lhs == rep.canon->representative);
                for (std::uint64_t x = 0; x <= F.size(); ++x) {
                    ProjPoint p = x < F.size() ? ProjPoint::finite(F.elem(x))
                                               : ProjPoint::at_infinity();
                    CHECK(rep.witnesses->first.apply(phi.eval(rep.witnesses->second.apply(p))) ==
                          rep.canon->representative.eval(p));
                }
            }
        }
    }
    SECTION("representatives themselves pass brute force") {
        for (FieldPtr Fp : {Field::make(2, 1), Field::make(3, 1), Field::make(2, 2),
                            Field::make(5, 1), Field::make(7, 1), Field::make(2, 3),
                            Field::make(3, 2), Field::make(13, 1), Field::make(2, 4)}) {
            const Field& F = *Fp;
            detail::CanonicalParams params = detail::canonical_params(F);
            switch (F.size() % 6) {
                case 1:
                    CHECK(is_permutation_bruteforce(detail::odd_fractional_rep(*params.b_star)));
                    break;
                case 3:
                    CHECK(is_permutation_bruteforce(detail::char3_linearized_rep(*params.a_star)));
                    CHECK(is_permutation_bruteforce(detail::cube_rep(F)));
                    break;
                case 4:
                    CHECK(is_permutation_bruteforce(detail::even_fractional_rep(*params.b0_star)));
                    break;
                default:
                    CHECK(is_permutation_bruteforce(detail::cube_rep(F)));
            }
        }
    }
    SECTION("non-permutations are rejected") {
        FieldPtr F = Field::make(7, 1);
        CHECK_THROWS_AS(canonicalize(rf("x^3", *F)), domain_error);
    }
}

TEST_CASE("the even-characteristic coefficient system", "[classify]") {
    // The canonical family (x^3+a2 x^2+a1 x)/(x^2+x+b0) with Tr(b0) = 1,
    // a1 = b0 + 1/b0, a2 = 1 + 1/b0 factors its resolvent over F_{q^2} as
    // (x - S)(x - S^q) with S = u2 t^2 + u1 t + u0.  The system relating
    // (u0, u1, u2) to (a1, a2, b0) through relative traces and norms:
    for (FieldPtr Fp : {Field::make(2, 1), Field::make(2, 2), Field::make(2, 3),
                        Field::make(2, 4)}) {
        const Field& F = *Fp;
        FieldPtr extp = F.ext2();
        const Field& E = *extp;
        for (std::uint64_t b0v = 0; b0v < F.size(); ++b0v) {
            if (F.abs_trace2(static_cast<elem_idx>(b0v)) != 1) continue;
            FE b0{&F, static_cast<elem_idx>(b0v)};
            FE ib = inv(b0);
            FE a1 = b0 + ib, a2 = F.one() + ib;
            RatFunc phi(Poly(&F, {0, a1.v, a2.v, 1}), Poly(&F, {b0.v, 1, 1}));
            PencilBuild pb = build_pencil(phi);
            auto [B, C] = quadratic_resolvent<Poly>(pb.pencil.c2, pb.pencil.c1, pb.pencil.c0);
            CHECK(bounded_poly_root(B, C, 2, F).empty());
            auto roots = bounded_poly_root(B.lifted(E), C.lifted(E), 2, E);
            REQUIRE(roots.size() == 2);  // S and its conjugate
            for (const Poly& S : roots) {
                FE u0 = S.at(0), u1 = S.at(1), u2 = S.at(2);
                auto tr = [&](FE u) { return E.rel_trace(u.v); };
                auto nm = [&](FE u) { return E.rel_norm(u.v); };
                auto frob = [&](FE u) { return FE{&E, E.frobenius(u.v)}; };
                CHECK(tr(u0) == a1 * a2);
                CHECK(tr(u1) == a1 + a2 + b0);
                CHECK(tr(u2) == F.one());
                CHECK(nm(u0) == pow(a1, 3));
                CHECK(nm(u2) == b0);
                auto down = [&](FE v) {
                    REQUIRE(E.in_base(v.v));
                    return E.to_base(v.v);
                };
                CHECK(down(u0 * frob(u1) + frob(u0) * u1) == a1 * a1 + pow(a2, 3) * b0);
                CHECK(down(u0 * frob(u2) + E.embed(nm(u1)) + frob(u0) * u2) ==
                      a1 + a2 * a2 * b0 + b0 * b0);
                CHECK(down(frob(u1) * u2 + u1 * frob(u2)) == a2 * b0 + F.one());
            }
            // the explicit solution: u2 a root of x^2+x+b0, u1 = u2 + b0,
            // u0 = ((b0+1)^3/b0^2) u2
            auto u2roots = quad_roots(E.one(), E.embed(b0), E);
            REQUIRE(u2roots.size() == 2);
            for (FE u2 : u2roots) {
                CHECK_FALSE(E.in_base(u2.v));
                FE u1 = u2 + E.embed(b0);
                FE coef = E.embed(pow(b0 + F.one(), 3) / (b0 * b0));
                FE u0 = coef * u2;
                Poly S(&E, {u0.v, u1.v, u2.v});
                Poly lhs = S * S + B.lifted(E) * S + C.lifted(E);
                CHECK(lhs.is_zero());
            }
        }
    }
}

TEST_CASE("normalized polynomial classification", "[classify]") {
    FieldPtr F5 = Field::make(5, 1);
    CHECK(classify_normalized_poly(*F5, F5->zero(), std::nullopt));
    CHECK_FALSE(classify_normalized_poly(*F5, F5->from_int(2), std::nullopt));
    FieldPtr F7 = Field::make(7, 1);
    CHECK_FALSE(classify_normalized_poly(*F7, F7->zero(), std::nullopt));  // 7 = 1 mod 3
    FieldPtr F9 = Field::make(3, 2);
    bool found_one = false;
    for (std::uint64_t b = 0; b < 9; ++b) {
        FE be{F9.get(), static_cast<elem_idx>(b)};
        bool expected = b == 0 || !F9->is_square(F9->neg(be.v));
        CHECK(classify_normalized_poly(*F9, F9->zero(), be) == expected);
        found_one |= expected;
        // agrees with brute force on x^3 + b x
        RatFunc phi(Poly(F9.get(), {0, be.v, 0, 1}), Poly::constant(F9->one()));
        CHECK(is_permutation_bruteforce(phi) == expected);
    }
    CHECK(found_one);
    CHECK_THROWS_AS(classify_normalized_poly(*F5, F5->zero(), F5->one()), domain_error);
    CHECK_THROWS_AS(classify_normalized_poly(*F9, F9->zero(), std::nullopt), domain_error);
}

TEST_CASE("complete permutation testing", "[classify]") {
    FieldPtr F3 = Field::make(3, 1);
    CHECK(is_complete(rf("x^3", *F3)));
    FieldPtr F5 = Field::make(5, 1);
    CHECK_FALSE(is_complete(rf("x^3", *F5)));  // x^3+x fails over F5
    FieldPtr F7 = Field::make(7, 1);
    CHECK_FALSE(is_complete(rf("(x^3+x)/(2*x^2+1)", *F7)));
}

TEST_CASE("extension permutation behaviour", "[classify]") {
    FieldPtr Fp = Field::make(7, 1);
    const Field& F = *Fp;
    RatFunc rep = rf("(x^3+2*x)/(x^2+1)", F);
    SECTION("n = 1 is the base-field statement") {
        CHECK(extension_permutation(rep, 1, ExtensionMode::verify));
        CHECK(extension_permutation(rep, 1, ExtensionMode::predict));
    }
    SECTION("odd yes, even no") {
        CHECK(extension_permutation(rep, 3, ExtensionMode::verify));
        CHECK_FALSE(extension_permutation(rep, 2, ExtensionMode::verify));
        CHECK(extension_permutation(rep, 3, ExtensionMode::predict));
        CHECK_FALSE(extension_permutation(rep, 2, ExtensionMode::predict));
    }
    SECTION("guards and scope") {
        CHECK_THROWS_AS(extension_permutation(rep, 5, ExtensionMode::verify), domain_error);
        FieldPtr F2 = Field::make(2, 1);
        RatFunc even = rf("(x^3)/(x^2+x+1)", *F2);
        CHECK_THROWS_AS(extension_permutation(even, 3, ExtensionMode::predict), domain_error);
        CHECK(extension_permutation(even, 3, ExtensionMode::verify));
        FieldPtr F3 = Field::make(3, 1);
        RatFunc insep = rf("(x^3+1)/(x^3+2)", *F3);
        CHECK_THROWS_AS(extension_permutation(insep, 3, ExtensionMode::predict), domain_error);
        CHECK(extension_permutation(insep, 3, ExtensionMode::verify));
    }
    SECTION("a larger odd case: F_2 representative over F_8 and F_4 via towers") {
        FieldPtr F2 = Field::make(2, 1);
        RatFunc even = rf("(x^3)/(x^2+x+1)", *F2);
        CHECK(extension_permutation(even, 3, ExtensionMode::verify));   // F_8: n odd
        CHECK_FALSE(extension_permutation(even, 2, ExtensionMode::verify));  // F_4
        CHECK(extension_permutation(even, 5, ExtensionMode::verify));
        CHECK_FALSE(extension_permutation(even, 12, ExtensionMode::verify));  // 4096 points
    }
}

TEST_CASE("exhaustive canonicalization of the census population", "[classify]") {
    // every permutation pair over the desk-scale fields, witnesses verified
    std::uint64_t total = 0;
    for (std::uint64_t q : {2ull, 3ull, 4ull, 5ull, 7ull, 8ull, 9ull}) {
        FieldPtr F = q == 4   ? Field::make(2, 2)
                     : q == 8 ? Field::make(2, 3)
                     : q == 9 ? Field::make(3, 2)
                              : Field::make(q, 1);
        std::vector<char> seen;
        std::uint64_t n = 0;
        enumerate_pairs(*F, [&](const Poly& f, const Poly& g) {
            if (!permrat::detail::pair_is_permutation(*F, f, g, seen)) return;
            RatFunc phi = RatFunc::from_coprime(f, g);
            ClassReport rep = canonicalize(phi);
            REQUIRE(rep.witnesses.has_value());
            for (std::uint64_t x = 0; x <= F->size(); ++x) {
                ProjPoint p = x < F->size() ? ProjPoint::finite(F->elem(x))
                                            : ProjPoint::at_infinity();
                REQUIRE(rep.witnesses->first.apply(
                            phi.eval(rep.witnesses->second.apply(p))) ==
                        rep.canon->representative.eval(p));
            }
            ++n;
        });
        CHECK(n == formula_Nq(q));
        total += n;
    }
    CHECK(total == 8106);
}

TEST_CASE("scrambled representatives over larger fields", "[classify]") {
    // q >= 13 exercises the criterion path of mode auto; q mod 6 covers all
    // residues; non-prime q exercises extension-field arithmetic throughout
    std::vector<FieldPtr> fields = {
        Field::make(11, 1), Field::make(13, 1), Field::make(2, 4),
        Field::make(5, 2),  Field::make(3, 3),  Field::make(2, 5),
        Field::make(7, 2),  Field::make(3, 4),  Field::make(61, 1),
    };
    for (FieldPtr Fp : fields) {
        const Field& F = *Fp;
        RatFunc rep0 = permrat::detail::field_representative(F);
        REQUIRE(is_permutation_bruteforce(rep0));
        std::mt19937 rng(static_cast<unsigned>(F.size()));
        auto rand_mob = [&]() {
            while (true) {
                FE a{&F, static_cast<elem_idx>(rng() % F.size())};
                FE b{&F, static_cast<elem_idx>(rng() % F.size())};
                FE c{&F, static_cast<elem_idx>(rng() % F.size())};
                FE d{&F, static_cast<elem_idx>(rng() % F.size())};
                if (!is_zero(a * d - b * c)) return Mobius(a, b, c, d);
            }
        };
        for (int i = 0; i < 100; ++i) {
            RatFunc phi = compose_mobius(compose_mobius(rep0, rand_mob(), Side::right),
                                         rand_mob(), Side::left);
            REQUIRE(permutation_verdict(phi, DecisionMode::crosscheck));
            ClassReport r = canonicalize(phi);
            RatFunc recomposed = compose_mobius(
                compose_mobius(phi, r.witnesses->second, Side::right),
                r.witnesses->first, Side::left);
            REQUIRE(recomposed == r.canon->representative);
            if (F.characteristic() != 3) REQUIRE(r.canon->representative == rep0);
        }
        int tested = 0;
        while (tested < 200) {
            std::vector<elem_idx> fc(4), gc(1 + rng() % 4);
            for (auto& v : fc) v = static_cast<elem_idx>(rng() % F.size());
            for (auto& v : gc) v = static_cast<elem_idx>(rng() % F.size());
            Poly f(&F, std::move(fc)), g(&F, std::move(gc));
            if (f.is_zero() || g.is_zero()) continue;
            RatFunc phi(f, g);
            if (phi.degree() != 3) continue;
            ++tested;
            CHECK_NOTHROW(permutation_verdict(phi, DecisionMode::crosscheck));
        }
    }
}
