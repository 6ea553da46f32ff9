// Shared random generators for the property suites.
#ifndef FEDQ_TESTS_SUPPORT_HPP
#define FEDQ_TESTS_SUPPORT_HPP

#include "fedq/basefn.hpp"
#include "fedq/prng.hpp"
#include "fedq/weyl.hpp"

namespace fedq::testgen {

inline RationalComplex small_rational(Prng& rng) {
    long p = rng.range(-4, 4);
    long q = rng.range(1, 3);
    long ip = rng.range(-2, 2);
    RationalComplex v = RationalComplex::from_ratio(p, q);
    return v + RationalComplex::i() * RationalComplex::from_ratio(ip, 1);
}

inline BaseFunction<RationalComplex> random_basefn(Prng& rng, Ring ring, int dim, int max_deg,
                                                   int terms) {
    BaseFunction<RationalComplex> f(ring, dim);
    for (int t = 0; t < terms; ++t) {
        IdxVec key(dim, 0);
        int budget = (int)rng.below(uint64_t(max_deg + 1));
        for (int b = 0; b < budget; ++b) {
            int j = (int)rng.below(uint64_t(dim));
            key[j] += (ring == Ring::Torus && rng.below(2)) ? -1 : 1;
        }
        f.add_term(key, small_rational(rng));
    }
    return f;
}

inline WeylElement<RationalComplex> random_weyl(Prng& rng, int n, Ring ring, int trunc,
                                                int terms, bool constant_coeffs = false,
                                                int min_degree = 0) {
    WeylElement<RationalComplex> a(n, ring, trunc);
    for (int t = 0; t < terms; ++t) {
        WeylKey key;
        key.alpha = IdxVec(2 * n, 0);
        int deg = (int)rng.range(min_degree, trunc);
        key.k = (int)rng.below(uint64_t(deg / 2 + 1));
        int ydeg = deg - 2 * key.k;
        for (int b = 0; b < ydeg; ++b) key.alpha[rng.below(uint64_t(2 * n))] += 1;
        BaseFunction<RationalComplex> coef =
            constant_coeffs
                ? BaseFunction<RationalComplex>::constant(ring, 2 * n, small_rational(rng))
                : random_basefn(rng, ring, 2 * n, 2, 2);
        a.add_term(key, coef);
    }
    return a;
}

inline WeylElement<RationalComplex> restamped(const WeylElement<RationalComplex>& a, int trunc) {
    WeylElement<RationalComplex> r(a.n(), a.ring(), trunc);
    for (auto& [key, f] : a.terms()) r.add_term(key, f);
    return r;
}

inline FnSeries<RationalComplex> random_series(Prng& rng, Ring ring, int dim, int order,
                                               int max_deg, int terms_per_order) {
    FnSeries<RationalComplex> f(ring, dim, order);
    for (int k = 0; k <= std::min(order, 2); ++k)
        f.add(k, random_basefn(rng, ring, dim, max_deg, terms_per_order));
    return f;
}

}  // namespace fedq::testgen

#endif
