#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fedq/geometry.hpp"
#include "test_support.hpp"

using namespace fedq;
using R = RationalComplex;
using BF = BaseFunction<R>;
using FS = FnSeries<R>;
using SF = ScalarForm<R>;

namespace {
R rc(long p, long q = 1) { return R::from_ratio(p, q); }

AffineSymplecto<R> rot90() {
    Mat<R> A{{rc(0), rc(-1)}, {rc(1), rc(0)}};
    return AffineSymplecto<R>::euclidean(A, {rc(0), rc(0)});
}
AffineSymplecto<R> minus_id() {
    Mat<R> A{{rc(-1), rc(0)}, {rc(0), rc(-1)}};
    return AffineSymplecto<R>::euclidean(A, {rc(0), rc(0)});
}
// rotation by an angle that is an irrational multiple of pi, exactly in Q(i)
AffineSymplecto<R> rot35() {
    Mat<R> A{{rc(3, 5), rc(-4, 5)}, {rc(4, 5), rc(3, 5)}};
    return AffineSymplecto<R>::euclidean(A, {rc(0), rc(0)});
}
AffineSymplecto<R> torus_translation(const R& u1, const R& u2) {
    return AffineSymplecto<R>::torus(mat_identity<R>(2), {u1, u2});
}

Christoffel<R> random_symmetric_connection(Prng& rng, int deg) {
    std::map<std::array<int, 3>, BF> T;
    for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b)
            for (int c = b; c < 2; ++c) {
                BF f = testgen::random_basefn(rng, Ring::Euclidean, 2, deg, 2);
                int idx[3] = {a, b, c};
                std::sort(idx, idx + 3);
                std::set<std::array<int, 3>> seen;
                do {
                    std::array<int, 3> key{idx[0], idx[1], idx[2]};
                    if (seen.insert(key).second) T[key] = f;
                } while (std::next_permutation(idx, idx + 3));
            }
    return christoffel_from_lowered(Ring::Euclidean, 2, T);
}
}  // namespace

TEST_CASE("exterior derivative") {
    SUBCASE("d of a coordinate is the coordinate differential") {
        SF f = SF::of_series(FS::of(BF::coordinate(Ring::Euclidean, 2, 0), 2));
        SF df = exterior_d(f);
        CHECK(df.comp(Wedge{0}) == FS::constant(Ring::Euclidean, 2, 2, rc(1)));
        CHECK(df.comp(Wedge{1}).is_zero());
    }
    SUBCASE("d of constants vanishes") {
        SF f = SF::of_series(FS::constant(Ring::Torus, 2, 2, rc(7, 3)));
        CHECK(exterior_d(f).is_zero());
    }
    SUBCASE("torus exponentials differentiate frequency-wise") {
        IdxVec m{2, -1};
        SF f = SF::of_series(FS::of(BF::monomial(Ring::Torus, 2, m, rc(1)), 2));
        SF df = exterior_d(f);
        CHECK(df.comp(Wedge{0}) ==
              FS::of(BF::monomial(Ring::Torus, 2, m, R::i() * rc(2)), 2));
        CHECK(df.comp(Wedge{1}) ==
              FS::of(BF::monomial(Ring::Torus, 2, m, R::i() * rc(-1)), 2));
    }
    SUBCASE("d o d = 0 on random forms") {
        Prng rng(61);
        for (int rep = 0; rep < 20; ++rep) {
            Ring ring = rep % 2 == 0 ? Ring::Euclidean : Ring::Torus;
            SF f(ring, 2, rep % 2, 3);
            if (rep % 2 == 0)
                f.add_comp(Wedge{}, testgen::random_series(rng, ring, 2, 3, 3, 3));
            else {
                f.add_comp(Wedge{0}, testgen::random_series(rng, ring, 2, 3, 3, 3));
                f.add_comp(Wedge{1}, testgen::random_series(rng, ring, 2, 3, 3, 3));
            }
            CHECK(exterior_d(exterior_d(f)).is_zero());
        }
    }
    SUBCASE("Leibniz rule on functions") {
        Prng rng(67);
        for (int rep = 0; rep < 10; ++rep) {
            FS f = testgen::random_series(rng, Ring::Torus, 2, 3, 2, 2);
            FS g = testgen::random_series(rng, Ring::Torus, 2, 3, 2, 2);
            SF lhs = exterior_d(SF::of_series(f * g));
            // f dg + g df assembled by scaling components
            SF df = exterior_d(SF::of_series(f)), dg = exterior_d(SF::of_series(g));
            SF rhs(Ring::Torus, 2, 1, lhs.order());
            for (auto& [w, c] : dg.comps()) rhs.add_comp(w, f * c);
            for (auto& [w, c] : df.comps()) rhs.add_comp(w, g * c);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("affine symplectomorphisms") {
    SUBCASE("constructor rejects non-symplectic linear parts") {
        Mat<R> A{{rc(2), rc(0)}, {rc(0), rc(1)}};
        CHECK_THROWS_AS(AffineSymplecto<R>::euclidean(A, {rc(0), rc(0)}),
                        DomainError);
    }
    SUBCASE("torus maps need integral linear parts and unit phases") {
        Mat<R> A{{rc(1, 2), rc(0)}, {rc(0), rc(2)}};
        CHECK_THROWS_AS(AffineSymplecto<R>::torus(A, {rc(1), rc(1)}), DomainError);
        CHECK_THROWS_AS(torus_translation(rc(2), rc(1)), DomainError);
        CHECK_NOTHROW(torus_translation((rc(3) + rc(4) * R::i()) / rc(5), rc(1)));
    }
    SUBCASE("identity pullback is the identity") {
        Prng rng(71);
        auto id = AffineSymplecto<R>::identity(Ring::Euclidean, 1);
        BF f = testgen::random_basefn(rng, Ring::Euclidean, 2, 3, 4);
        CHECK(pullback(id, f) == f);
    }
    SUBCASE("rotation pullback against pointwise evaluation") {
        Prng rng(73);
        for (auto& g : {rot90(), rot35(), minus_id()}) {
            BF f = testgen::random_basefn(rng, Ring::Euclidean, 2, 4, 4);
            BF pf = pullback(g, f);
            for (int rep = 0; rep < 20; ++rep) {
                std::vector<R> p{testgen::small_rational(rng), testgen::small_rational(rng)};
                CHECK(pf.eval(p) == f.eval(g.apply(p)));
            }
        }
    }
    SUBCASE("torus translation acts by characters") {
        R u = (rc(3) + rc(4) * R::i()) / rc(5);
        auto g = torus_translation(u, rc(1));
        IdxVec m{3, 1};
        BF f = BF::monomial(Ring::Torus, 2, m, rc(1));
        BF pf = pullback(g, f);
        REQUIRE(pf.terms().size() == 1);
        CHECK(pf.terms().begin()->first == m);
        CHECK(pf.terms().begin()->second == u * u * u);
    }
    SUBCASE("contravariance of composition") {
        Prng rng(79);
        auto a = rot35(), b = rot90();
        BF f = testgen::random_basefn(rng, Ring::Euclidean, 2, 3, 3);
        CHECK(pullback(a.compose(b), f) == pullback(b, pullback(a, f)));
        auto ta = torus_translation((rc(3) + rc(4) * R::i()) / rc(5), rc(1));
        Mat<R> shear{{rc(1), rc(1)}, {rc(0), rc(1)}};
        auto tb = AffineSymplecto<R>::torus(shear, {rc(1), rc(1)});
        BF h = testgen::random_basefn(rng, Ring::Torus, 2, 2, 3);
        CHECK(pullback(ta.compose(tb), h) == pullback(tb, pullback(ta, h)));
    }
    SUBCASE("pullback commutes with d and preserves omega") {
        Prng rng(83);
        for (auto& g : {rot35(), rot90()}) {
            SF f(Ring::Euclidean, 2, 1, 3);
            f.add_comp(Wedge{0}, testgen::random_series(rng, Ring::Euclidean, 2, 3, 3, 2));
            f.add_comp(Wedge{1}, testgen::random_series(rng, Ring::Euclidean, 2, 3, 3, 2));
            CHECK(exterior_d(pullback(g, f)) == pullback(g, exterior_d(f)));
            SF omega = standard_symplectic_form<R>(Ring::Euclidean, 1, 3);
            CHECK(pullback(g, omega) == omega);
        }
    }
}

TEST_CASE("connection checks") {
    SUBCASE("flat connection passes") {
        Christoffel<R> flat(Ring::Euclidean, 2);
        auto rep = check_symplectic_connection(flat);
        CHECK(rep.torsion_free);
        CHECK(rep.symplectic);
    }
    SUBCASE("asymmetric entry breaks torsion-freeness") {
        Christoffel<R> c(Ring::Euclidean, 2);
        c.add(0, 0, 1, BF::constant(Ring::Euclidean, 2, rc(1)));
        auto rep = check_symplectic_connection(c);
        CHECK_FALSE(rep.torsion_free);
    }
    SUBCASE("random symmetric lowered tensors pass both checks") {
        Prng rng(89);
        for (int rep = 0; rep < 5; ++rep) {
            auto c = random_symmetric_connection(rng, 2);
            auto r = check_symplectic_connection(c);
            CHECK(r.torsion_free);
            CHECK(r.symplectic);
        }
    }
}

TEST_CASE("averaging over finite groups") {
    SUBCASE("invariant input is returned unchanged") {
        // Gamma built from x1^2+x2^2-invariant data under rotation by pi:
        // average first, then re-average.
        Prng rng(97);
        auto act = GroupAction<R>::cyclic(minus_id(), 2);
        auto c = random_symmetric_connection(rng, 2);
        auto avg = average_connection(act, c);
        CHECK(average_connection(act, avg) == avg);
    }
    SUBCASE("even-parity entries cancel under the sign action") {
        // Under x -> -x the symbols transform by three linear-part factors,
        // Gamma'(x) = -Gamma(-x), so entries of even polynomial degree flip
        // sign and average to zero.
        std::map<std::array<int, 3>, BF> T;
        T[{0, 0, 0}] = BF::constant(Ring::Euclidean, 2, rc(2, 3));
        BF x1 = BF::coordinate(Ring::Euclidean, 2, 0);
        T[{1, 1, 1}] = x1 * x1;
        auto c = christoffel_from_lowered(Ring::Euclidean, 2, T);
        auto act = GroupAction<R>::cyclic(minus_id(), 2);
        CHECK(average_connection(act, c).is_zero());
        // odd-degree entries are invariant outright
        std::map<std::array<int, 3>, BF> T2;
        T2[{0, 0, 0}] = x1;
        auto c2 = christoffel_from_lowered(Ring::Euclidean, 2, T2);
        CHECK(average_connection(act, c2) == c2);
    }
    SUBCASE("averages over Z/4 are exactly invariant and torsion-free") {
        Prng rng(101);
        auto act = GroupAction<R>::cyclic(rot90(), 4);
        for (int rep = 0; rep < 5; ++rep) {
            auto c = random_symmetric_connection(rng, 2);
            auto avg = average_connection(act, c);
            for (auto& g : act.maps()) CHECK(pullback(g, avg) == avg);
            CHECK(check_symplectic_connection(avg).torsion_free);
        }
    }
    SUBCASE("infinite groups are rejected") {
        auto act = GroupAction<R>::free_abelian({torus_translation(R::i(), rc(1))});
        Christoffel<R> c(Ring::Torus, 2);
        CHECK_THROWS_AS(average_connection(act, c), DomainError);
    }
}

TEST_CASE("connection obstruction cocycle") {
    Prng rng(103);
    auto act = GroupAction<R>::cyclic(rot90(), 4);

    SUBCASE("invariant connection gives zero") {
        auto c = average_connection(act, random_symmetric_connection(rng, 2));
        auto D = connection_obstruction_cocycle(act, c);
        for (auto& d : D) CHECK(d.is_zero());
    }
    SUBCASE("cocycle identity on all element pairs") {
        auto c = random_symmetric_connection(rng, 2);
        auto D = connection_obstruction_cocycle(act, c);
        for (int a = 0; a < act.size(); ++a)
            for (int b = 0; b < act.size(); ++b) {
                // D(mu o gamma) = gamma^* D(mu) + D(gamma) with gamma=b, mu=a
                auto lhs = D[act.compose_idx(a, b)];
                auto rhs = pullback(act.map_of(b), D[a]) + D[b];
                CHECK(lhs == rhs);
            }
    }
    SUBCASE("averaging trivializes the class for finite groups") {
        auto c = random_symmetric_connection(rng, 2);
        auto avg = average_connection(act, c);
        auto D = connection_obstruction_cocycle(act, avg);
        for (auto& d : D) CHECK(d.is_zero());
        // and D of the original is the coboundary of (avg - c)
        auto Dorig = connection_obstruction_cocycle(act, c);
        Christoffel<R> b = avg - c;
        for (int g = 0; g < act.size(); ++g) {
            auto cob = b - pullback(act.map_of(g), b);
            CHECK(Dorig[g] == cob);
        }
    }
}

TEST_CASE("group action constructors enforce relations") {
    SUBCASE("wrong order is rejected") {
        CHECK_THROWS_AS(GroupAction<R>::cyclic(rot90(), 3), DomainError);
    }
    SUBCASE("non-commuting generators are rejected for free abelian groups") {
        Mat<R> shear{{rc(1), rc(1)}, {rc(0), rc(1)}};
        auto a = AffineSymplecto<R>::torus(shear, {rc(1), rc(1)});
        auto b = torus_translation(rc(1), R::i());  // the shear moves this one
        CHECK_THROWS_AS(GroupAction<R>::free_abelian({a, b}), DomainError);
    }
    SUBCASE("commuting torus translations are accepted") {
        auto a = torus_translation(R::i(), rc(1));
        auto b = torus_translation(rc(1), (rc(3) + rc(4) * R::i()) / rc(5));
        CHECK_NOTHROW(GroupAction<R>::free_abelian({a, b}));
    }
}

TEST_CASE("torus reality flag") {
    BF f(Ring::Torus, 2);
    f.add_term(IdxVec{1, 0}, rc(1, 2) + R::i());
    f.add_term(IdxVec{-1, 0}, rc(1, 2) - R::i());
    CHECK(f.is_real_valued());
    f.add_term(IdxVec{0, 1}, R::i());
    CHECK_FALSE(f.is_real_valued());
}
