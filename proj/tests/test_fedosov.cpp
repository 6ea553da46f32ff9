#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fedq/fedosov.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fedq;
using R = RationalComplex;
using W = WeylElement<R>;
using WF = WeylForm<R>;
using SF = ScalarForm<R>;
using FS = FnSeries<R>;

namespace {

R rc(long p, long q = 1) { return R::from_ratio(p, q); }

BaseFunction<R> bf_const(int dim, const R& c) {
    return BaseFunction<R>::constant(Ring::Euclidean, dim, c);
}

// Exact derivative of a polynomial at a point through symmetric differences
// with Richardson extrapolation; error starts at h^4 terms, so it is exact
// for degree <= 4.
R fd_derivative(const BaseFunction<R>& f, int j, const std::vector<R>& p, const R& h) {
    auto shift = [&](const R& step) {
        auto q = p;
        q[j] += step;
        return f.eval(q);
    };
    R two = rc(2);
    R d1 = (shift(h) - shift(-h)) / (two * h);
    R d2 = (shift(two * h) - shift(-(two * h))) / (two * two * h);
    return (rc(4) * d1 - d2) / rc(3);
}

// Coefficient degrees stay one below the truncation so the contracting
// homotopy has head-room.
WF random_form(Prng& rng, int n, Ring ring, int D, int p, int terms) {
    WF s(n, ring, D, p);
    int d = 2 * n;
    for (int t = 0; t < terms; ++t) {
        Wedge w;
        std::vector<int> pool;
        for (int j = 0; j < d; ++j) pool.push_back(j);
        for (int q = 0; q < p; ++q) {
            int pick = (int)rng.below(pool.size());
            w.push_back(pool[pick]);
            pool.erase(pool.begin() + pick);
        }
        std::sort(w.begin(), w.end());
        s.add_comp(w, testgen::restamped(testgen::random_weyl(rng, n, ring, D - 1, 2), D));
    }
    return s;
}

// A nonflat torsion-free symplectic connection on R^2 from a totally
// symmetric lowered tensor with polynomial entries.
Christoffel<R> sample_connection(int variant = 0) {
    std::map<std::array<int, 3>, BaseFunction<R>> T;
    BaseFunction<R> x1 = BaseFunction<R>::coordinate(Ring::Euclidean, 2, 0);
    BaseFunction<R> x2 = BaseFunction<R>::coordinate(Ring::Euclidean, 2, 1);
    auto set_sym = [&](int a, int b, int c, const BaseFunction<R>& f) {
        std::set<std::array<int, 3>> seen;
        int idx[3] = {a, b, c};
        std::sort(idx, idx + 3);
        do {
            std::array<int, 3> key{idx[0], idx[1], idx[2]};
            if (seen.insert(key).second) T[key] = f;
        } while (std::next_permutation(idx, idx + 3));
    };
    if (variant == 0) {
        set_sym(0, 0, 0, x2.scaled(rc(1, 2)));
        set_sym(0, 0, 1, x1);
    } else {
        set_sym(0, 1, 1, x1 * x2);
        set_sym(1, 1, 1, x1.scaled(rc(2)));
    }
    return christoffel_from_lowered(Ring::Euclidean, 2, T);
}

ScalarForm<R> const_theta_torus(const R& c, int order) {
    ScalarForm<R> th(Ring::Torus, 2, 2, order);
    th.add_comp(Wedge{0, 1}, FnSeries<R>::constant(Ring::Torus, 2, order, c));
    return th;
}

}  // namespace

TEST_CASE("delta basics and nilpotence") {
    int n = 1, D = 6;
    W y1 = W::generator(n, Ring::Euclidean, D, 0);
    W y2 = W::generator(n, Ring::Euclidean, D, 1);

    WF dy1 = delta(WF::of_element(y1));
    CHECK(dy1.comp(Wedge{0}) == W::one(n, Ring::Euclidean, D));
    CHECK(dy1.comp(Wedge{1}).is_zero());

    W fx = W::from_base(BaseFunction<R>::coordinate(Ring::Euclidean, 2, 0), n, D);
    CHECK(delta(WF::of_element(fx)).is_zero());

    WF dy12 = delta(WF::of_element(y1 * y2));
    CHECK(dy12.comp(Wedge{0}) == y2);
    CHECK(dy12.comp(Wedge{1}) == y1);

    Prng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        WF s = random_form(rng, 1, Ring::Euclidean, D, rep % 2, 3);
        CHECK(delta(delta(s)).is_zero());
    }
}

TEST_CASE("contracting homotopy") {
    int n = 1, D = 6;
    SUBCASE("delta_inv of dx1 is y1") {
        WF s(n, Ring::Euclidean, D, 1);
        s.add_comp(Wedge{0}, W::one(n, Ring::Euclidean, D));
        WF r = delta_inv(s);
        CHECK(r.comp(Wedge{}) == W::generator(n, Ring::Euclidean, D, 0));
    }
    SUBCASE("zero on 0-forms") {
        Prng rng(5);
        WF s = random_form(rng, n, Ring::Euclidean, D, 0, 3);
        CHECK(delta_inv(s).is_zero());
    }
    SUBCASE("homotopy identity on random forms") {
        Prng rng(7);
        for (int rep = 0; rep < 50; ++rep) {
            int p = rep % 3;
            int nn = rep % 2 == 0 ? 1 : 2;
            WF s = random_form(rng, nn, rep % 4 < 2 ? Ring::Euclidean : Ring::Torus, D, p, 3);
            WF lhs = delta(delta_inv(s)) + delta_inv(delta(s));
            WF rhs = s - pi00(s);
            CHECK(lhs == rhs);
        }
    }
    SUBCASE("delta_inv o delta_inv = 0") {
        Prng rng(9);
        for (int rep = 0; rep < 10; ++rep) {
            WF s = random_form(rng, 1, Ring::Euclidean, D, 2, 3);
            CHECK(delta_inv(delta_inv(s)).is_zero());
        }
    }
}

TEST_CASE("nabla0") {
    int n = 1, D = 6;
    SUBCASE("flat connection is the coefficient-wise exterior derivative") {
        Prng rng(11);
        Christoffel<R> flat(Ring::Euclidean, 2);
        for (int rep = 0; rep < 10; ++rep) {
            WF s = random_form(rng, n, Ring::Euclidean, D, rep % 2, 3);
            CHECK(nabla0(flat, s) == d_x(s));
        }
    }
    SUBCASE("transport term against the finite-difference oracle") {
        Christoffel<R> c = sample_connection();
        REQUIRE(check_symplectic_connection(c).torsion_free);
        REQUIRE(check_symplectic_connection(c).symplectic);
        Prng rng(13);
        // a = xi_i(x) y^i with polynomial xi of degree <= 3
        BaseFunction<R> xi0 = testgen::random_basefn(rng, Ring::Euclidean, 2, 3, 3);
        BaseFunction<R> xi1 = testgen::random_basefn(rng, Ring::Euclidean, 2, 3, 3);
        W a(n, Ring::Euclidean, D);
        IdxVec e0(2, 0), e1(2, 0);
        e0[0] = 1;
        e1[1] = 1;
        a.add_term(WeylKey{0, e0}, xi0);
        a.add_term(WeylKey{0, e1}, xi1);
        WF na = nabla0(c, WF::of_element(a));
        std::vector<R> p{rc(1, 3), rc(-2, 5)};
        R h = rc(1, 7);
        const BaseFunction<R> xi[2] = {xi0, xi1};
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 2; ++i) {
                // coefficient of y^i dx^j must evaluate to
                // d_j xi_i - Gamma^k_{ji} xi_k at p
                IdxVec ei(2, 0);
                ei[i] = 1;
                BaseFunction<R> got(Ring::Euclidean, 2);
                W naj = na.comp(Wedge{j});
                for (auto& [key, f] : naj.terms())
                    if (key.k == 0 && key.alpha == ei) got = f;
                R expect = fd_derivative(xi[i], j, p, h);
                for (int k = 0; k < 2; ++k) expect -= c.at(k, j, i).eval(p) * xi[k].eval(p);
                CHECK(got.eval(p) == expect);
            }
    }
    SUBCASE("graded Leibniz rule") {
        Christoffel<R> c = sample_connection();
        Prng rng(17);
        for (int rep = 0; rep < 10; ++rep) {
            W a = testgen::random_weyl(rng, n, Ring::Euclidean, D, 3);
            W b = testgen::random_weyl(rng, n, Ring::Euclidean, D, 3);
            WF fa = WF::of_element(a), fb = WF::of_element(b);
            WF lhs = nabla0(c, wedge_mul(fa, fb));
            WF rhs = wedge_mul(nabla0(c, fa), fb) + wedge_mul(fa, nabla0(c, fb));
            CHECK(lhs == rhs);
        }
    }
    SUBCASE("delta anticommutes with nabla0 for torsion-free input") {
        Christoffel<R> c = sample_connection(1);
        Prng rng(19);
        for (int rep = 0; rep < 10; ++rep) {
            WF s = random_form(rng, n, Ring::Euclidean, D, rep % 2, 3);
            CHECK((delta(nabla0(c, s)) + nabla0(c, delta(s))).is_zero());
        }
    }
    SUBCASE("curvature quadratic reproduces nabla0 squared") {
        for (int variant = 0; variant < 2; ++variant) {
            Christoffel<R> c = sample_connection(variant);
            WF rq = curvature_quadratic(c, n, Ring::Euclidean, D);
            Prng rng(23 + variant);
            for (int rep = 0; rep < 5; ++rep) {
                WF s = random_form(rng, n, Ring::Euclidean, D, 0, 3);
                WF lhs = nabla0(c, nabla0(c, s));
                WF rhs = comm_over_ihbar_keep(rq, s, D);
                CHECK(lhs.truncated(D - 2) == rhs.truncated(D - 2));
            }
        }
    }
    SUBCASE("non-symplectic input is rejected") {
        Christoffel<R> bad(Ring::Euclidean, 2);
        bad.add(0, 0, 1, bf_const(2, rc(1)));  // Gamma^0_{01} without symmetry partner
        WF s(1, Ring::Euclidean, 4, 0);
        s.add_comp(Wedge{}, W::one(1, Ring::Euclidean, 4));
        CHECK_THROWS_AS(nabla0(bad, s), DomainError);
    }
}

TEST_CASE("build_fedosov on the flat plane gives r = 0") {
    ChartManifold m{Ring::Euclidean, 1};
    Christoffel<R> flat(Ring::Euclidean, 2);
    SF theta(Ring::Euclidean, 2, 2, 4);
    auto F = build_fedosov(m, flat, theta, 8);
    CHECK(F.r.is_zero());
    CHECK(fedosov_residual(F).is_zero_in_degrees_up_to(7));
    auto rep = curvature_report(F);
    CHECK(rep.central);
    CHECK(rep.prescribed);
}

TEST_CASE("build_fedosov on the torus with constant curvature shift") {
    ChartManifold m{Ring::Torus, 1};
    Christoffel<R> flat(Ring::Torus, 2);
    int D = 8;
    auto F = build_fedosov(m, flat, const_theta_torus(rc(3, 2), D / 2), D);
    CHECK_FALSE(F.r.is_zero());
    CHECK(delta_inv(F.r).is_zero());
    CHECK(fedosov_residual(F).is_zero_in_degrees_up_to(D - 1));
    auto rep = curvature_report(F);
    CHECK(rep.central);
    CHECK(rep.prescribed);

    // leading graded piece is a multiple of y^1 dx^2 - y^2 dx^1
    WF lead = F.r.graded_part(3);
    IdxVec e0(2, 0), e1(2, 0);
    e0[0] = 1;
    e1[1] = 1;
    W c1 = lead.comp(Wedge{1});
    W c0 = lead.comp(Wedge{0});
    REQUIRE(c1.terms().size() == 1);
    CHECK(c1.terms().begin()->first.alpha == e0);
    REQUIRE(c0.terms().size() == 1);
    CHECK(c0.terms().begin()->first.alpha == e1);
    CHECK(c0.terms().begin()->second == -(c1.terms().begin()->second));

    // rebuild is deterministic
    auto F2 = build_fedosov(m, flat, const_theta_torus(rc(3, 2), D / 2), D);
    CHECK(F2.r == F.r);
}

TEST_CASE("build_fedosov with a curved connection") {
    ChartManifold m{Ring::Euclidean, 1};
    int D = 8;
    for (int variant = 0; variant < 2; ++variant) {
        auto F = build_fedosov(m, sample_connection(variant),
                               SF(Ring::Euclidean, 2, 2, D / 2), D);
        CHECK_FALSE(F.r.is_zero());
        CHECK(delta_inv(F.r).is_zero());
        CHECK(fedosov_residual(F).is_zero_in_degrees_up_to(D - 1));
        auto rep = curvature_report(F);
        CHECK(rep.central);
        CHECK(rep.prescribed);
        CHECK(F.r.min_coeff_degree() >= 2);
        // flatness on random sections
        Prng rng(29 + variant);
        for (int s = 0; s < 5; ++s) {
            W sec = testgen::random_weyl(rng, 1, Ring::Euclidean, D, 3);
            WF once = F.nabla_elt(sec);
            WF twice = F.nabla(once);
            CHECK(twice.is_zero_in_degrees_up_to(D - 4));
        }
    }
}

TEST_CASE("theta must be closed") {
    ChartManifold m{Ring::Euclidean, 1};
    Christoffel<R> flat(Ring::Euclidean, 2);
    SF theta(Ring::Euclidean, 2, 2, 2);
    // x^1 dx^1 ^ dx^2 is not closed? d(x1 dx1^dx2) = 0 in 2d; use a 2n=4 case
    ChartManifold m4{Ring::Euclidean, 2};
    Christoffel<R> flat4(Ring::Euclidean, 4);
    SF theta4(Ring::Euclidean, 4, 2, 2);
    theta4.add_comp(Wedge{0, 1},
                    FnSeries<R>::of(BaseFunction<R>::coordinate(Ring::Euclidean, 4, 2), 2));
    CHECK_THROWS_WITH_AS(build_fedosov(m4, flat4, theta4, 4), doctest::Contains("closed"),
                         DomainError);
}

TEST_CASE("flat sections") {
    ChartManifold m{Ring::Euclidean, 1};
    Christoffel<R> flat(Ring::Euclidean, 2);
    int D = 8;
    auto F = build_fedosov(m, flat, SF(Ring::Euclidean, 2, 2, D / 2), D);

    SUBCASE("tau(1) = 1") {
        FS one = FS::constant(Ring::Euclidean, 2, D / 2, rc(1));
        CHECK(tau(F, one) == F.one_elt());
    }
    SUBCASE("tau(x1) = x1 + y1 on the flat plane") {
        FS x1 = FS::of(BaseFunction<R>::coordinate(Ring::Euclidean, 2, 0), D / 2);
        W t = tau(F, x1);
        W expect = W::from_base(BaseFunction<R>::coordinate(Ring::Euclidean, 2, 0), 1, D) +
                   W::generator(1, Ring::Euclidean, D, 0);
        CHECK(t == expect);
    }
    SUBCASE("flat-plane tau is the Taylor expansion f(x+y)") {
        Prng rng(31);
        for (int rep = 0; rep < 10; ++rep) {
            BaseFunction<R> f = testgen::random_basefn(rng, Ring::Euclidean, 2, 4, 4);
            W t = tau(F, FS::of(f, D / 2));
            // Taylor oracle: sum_alpha d^alpha f / alpha! y^alpha
            W expect(1, Ring::Euclidean, D);
            for (int a0 = 0; a0 <= 4; ++a0)
                for (int a1 = 0; a1 + a0 <= 4; ++a1) {
                    BaseFunction<R> df = f;
                    for (int q = 0; q < a0; ++q) df = df.derivative(0);
                    for (int q = 0; q < a1; ++q) df = df.derivative(1);
                    long fact = 1;
                    for (int q = 2; q <= a0; ++q) fact *= q;
                    for (int q = 2; q <= a1; ++q) fact *= q;
                    IdxVec alpha(2, 0);
                    alpha[0] = a0;
                    alpha[1] = a1;
                    expect.add_term(WeylKey{0, alpha}, df.scaled(rc(1, fact)));
                }
            CHECK(t == expect);
        }
    }
    SUBCASE("sigma o tau = id and flatness across builds") {
        std::vector<FedosovConnection<R>> builds;
        builds.push_back(F);
        builds.push_back(build_fedosov(m, sample_connection(0),
                                       SF(Ring::Euclidean, 2, 2, D / 2), D));
        ChartManifold mt{Ring::Torus, 1};
        Christoffel<R> flat_t(Ring::Torus, 2);
        builds.push_back(build_fedosov(mt, flat_t, const_theta_torus(rc(1), D / 2), D));
        Prng rng(37);
        for (auto& B : builds) {
            for (int rep = 0; rep < 5; ++rep) {
                FS f(B.ring(), 2, D / 2);
                for (int k = 0; k <= 2; ++k)
                    f.add(k, testgen::random_basefn(rng, B.ring(), 2, 3, 3));
                W t = tau(B, f);
                CHECK(t.sigma().equals_through(f, D / 2));
                CHECK(flat_residual(B, t).is_zero_in_degrees_up_to(D - 1));
            }
        }
    }
}

TEST_CASE("star product") {
    ChartManifold m{Ring::Euclidean, 1};
    Christoffel<R> flat(Ring::Euclidean, 2);
    int D = 8;
    auto F = build_fedosov(m, flat, SF(Ring::Euclidean, 2, 2, D / 2), D);

    SUBCASE("x1 * x2 - x2 * x1 = i hbar") {
        FS x1 = FS::of(BaseFunction<R>::coordinate(Ring::Euclidean, 2, 0), D / 2);
        FS x2 = FS::of(BaseFunction<R>::coordinate(Ring::Euclidean, 2, 1), D / 2);
        FS comm = star(F, x1, x2) - star(F, x2, x1);
        FS expect(Ring::Euclidean, 2, D / 2);
        expect.add(1, bf_const(2, R::i()));
        CHECK(comm.equals_through(expect, D / 2));
    }
    SUBCASE("normalization 1 * f = f * 1 = f") {
        Prng rng(41);
        for (int rep = 0; rep < 5; ++rep) {
            FS f = testgen::random_series(rng, Ring::Euclidean, 2, D / 2, 3, 3);
            FS one = FS::constant(Ring::Euclidean, 2, D / 2, rc(1));
            CHECK(star(F, one, f).equals_through(f, D / 2));
            CHECK(star(F, f, one).equals_through(f, D / 2));
        }
    }
    SUBCASE("flat-plane star equals the closed-form bidifferential oracle") {
        Prng rng(43);
        for (int rep = 0; rep < 20; ++rep) {
            BaseFunction<R> f = testgen::random_basefn(rng, Ring::Euclidean, 2, 4, 3);
            BaseFunction<R> g = testgen::random_basefn(rng, Ring::Euclidean, 2, 4, 3);
            FS fs = FS::of(f, D / 2), gs = FS::of(g, D / 2);
            FS got = star(F, fs, gs);
            FS expect = oracle::moyal_star(fs, gs, 1, D / 2);
            CHECK(got.equals_through(expect, D / 2));
        }
    }
    SUBCASE("first-order commutator is the Poisson bracket, both rings") {
        std::vector<FedosovConnection<R>> builds;
        builds.push_back(build_fedosov(m, sample_connection(0),
                                       SF(Ring::Euclidean, 2, 2, D / 2), D));
        ChartManifold mt{Ring::Torus, 1};
        Christoffel<R> flat_t(Ring::Torus, 2);
        builds.push_back(build_fedosov(mt, flat_t, const_theta_torus(rc(2), D / 2), D));
        Prng rng(47);
        for (auto& B : builds) {
            for (int rep = 0; rep < 5; ++rep) {
                BaseFunction<R> f = testgen::random_basefn(rng, B.ring(), 2, 2, 3);
                BaseFunction<R> g = testgen::random_basefn(rng, B.ring(), 2, 2, 3);
                FS fs = FS::of(f, D / 2), gs = FS::of(g, D / 2);
                FS comm = star(B, fs, gs) - star(B, gs, fs);
                CHECK(comm.at(0).is_zero());
                CHECK(comm.at(1) == poisson_bracket(f, g, 1).scaled(R::i()));
            }
        }
    }
    SUBCASE("associativity to the reliable order") {
        ChartManifold mt{Ring::Torus, 1};
        Christoffel<R> flat_t(Ring::Torus, 2);
        auto Ft = build_fedosov(mt, flat_t, const_theta_torus(rc(1, 2), D / 2), D);
        Prng rng(53);
        for (int rep = 0; rep < 10; ++rep) {
            auto& B = rep % 2 == 0 ? F : Ft;
            FS f = FS::of(testgen::random_basefn(rng, B.ring(), 2, 2, 2), D / 2);
            FS g = FS::of(testgen::random_basefn(rng, B.ring(), 2, 2, 2), D / 2);
            FS h = FS::of(testgen::random_basefn(rng, B.ring(), 2, 2, 2), D / 2);
            FS lhs = star(B, star(B, f, g), h);
            FS rhs = star(B, f, star(B, g, h));
            CHECK(lhs.equals_through(rhs, D / 2));
        }
    }
    SUBCASE("star inverse contract") {
        Prng rng(59);
        FS f = FS::constant(Ring::Euclidean, 2, D / 2, rc(2));
        f.add(1, testgen::random_basefn(rng, Ring::Euclidean, 2, 2, 2));
        FS g = star_inverse(F, f);
        FS one = FS::constant(Ring::Euclidean, 2, D / 2, rc(1));
        CHECK(star(F, f, g).equals_through(one, D / 2));
        CHECK(star(F, g, f).equals_through(one, D / 2));
    }
}

TEST_CASE("reliable-order comparisons are refused beyond the stamp") {
    FS a(Ring::Euclidean, 2, 3), b(Ring::Euclidean, 2, 5);
    CHECK_THROWS_AS(a.equals_through(b, 4), DomainError);
    CHECK_NOTHROW(a.equals_through(b, 3));
}
