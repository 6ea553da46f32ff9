// Independent reference computations used by the test suites. These stay
// deliberately naive: the tensor-algebra oracle normal-orders words of the
// free algebra modulo the defining relations, the star oracle expands the
// closed-form bidifferential series on functions directly.
#ifndef FEDQ_TESTS_ORACLES_HPP
#define FEDQ_TESTS_ORACLES_HPP

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "fedq/basefn.hpp"
#include "fedq/prng.hpp"
#include "fedq/weyl.hpp"

namespace fedq::oracle {

using Word = std::vector<int>;

// Element of the tensor algebra over C[hbar]: (hbar power, word) -> scalar,
// truncated by the same grading as the Weyl side (|hbar| = 2, |letter| = 1).
template <class S>
using TensorElt = std::map<std::pair<int, Word>, S>;

template <class S>
void tensor_add(TensorElt<S>& a, int k, const Word& w, const S& c, int trunc) {
    if (c.is_zero()) return;
    if (2 * k + (int)w.size() > trunc) return;
    auto key = std::make_pair(k, w);
    auto it = a.find(key);
    if (it == a.end())
        a.emplace(key, c);
    else {
        it->second += c;
        if (it->second.is_zero()) a.erase(it);
    }
}

// Rewrites y^a y^b -> y^b y^a + i hbar Lambda^{ab} until every word is
// non-decreasing.
template <class S>
TensorElt<S> tensor_normal_order(const TensorElt<S>& in, int n, int trunc) {
    TensorElt<S> done;
    std::vector<std::tuple<int, Word, S>> work;
    for (auto& [key, c] : in) work.emplace_back(key.first, key.second, c);
    FiberPoisson fiber{n};
    while (!work.empty()) {
        auto [k, w, c] = work.back();
        work.pop_back();
        if (c.is_zero()) continue;
        size_t p = 0;
        bool sorted = true;
        for (; p + 1 < w.size(); ++p)
            if (w[p] > w[p + 1]) {
                sorted = false;
                break;
            }
        if (sorted) {
            tensor_add(done, k, w, c, trunc);
            continue;
        }
        Word swapped = w;
        std::swap(swapped[p], swapped[p + 1]);
        work.emplace_back(k, swapped, c);
        int lam = fiber.entry(w[p], w[p + 1]);
        if (lam != 0) {
            Word shorter;
            for (size_t q = 0; q < w.size(); ++q)
                if (q != p && q != p + 1) shorter.push_back(w[q]);
            S cc = c * ScalarOps<S>::i() * ScalarOps<S>::integer(lam);
            if (2 * (k + 1) + (int)shorter.size() <= trunc)
                work.emplace_back(k + 1, shorter, cc);
        }
    }
    return done;
}

template <class S>
TensorElt<S> tensor_mul(const TensorElt<S>& a, const TensorElt<S>& b, int n, int trunc) {
    TensorElt<S> prod;
    for (auto& [ka, ca] : a)
        for (auto& [kb, cb] : b) {
            Word w = ka.second;
            w.insert(w.end(), kb.second.begin(), kb.second.end());
            tensor_add(prod, ka.first + kb.first, w, ca * cb, trunc);
        }
    return tensor_normal_order(prod, n, trunc);
}

// Total symmetrization of the multiset word for a fiber multi-index: the
// linear section identifying the Weyl monomial y^alpha with an element of the
// tensor algebra.
template <class S>
TensorElt<S> tensor_symmetrize(int k, const fedq::IdxVec& alpha, const S& c, int trunc) {
    Word base;
    for (size_t j = 0; j < alpha.size(); ++j)
        for (int q = 0; q < alpha[j]; ++q) base.push_back((int)j);
    std::sort(base.begin(), base.end());
    long total = 1;
    for (size_t j = 2; j <= base.size(); ++j) total *= (long)j;
    long mult = 1;
    for (size_t j = 0; j < alpha.size(); ++j)
        for (int q = 2; q <= alpha[j]; ++q) mult *= q;
    S weight = c * ScalarOps<S>::ratio(mult, total);
    TensorElt<S> out;
    Word w = base;
    do {
        tensor_add(out, k, w, weight, trunc);
    } while (std::next_permutation(w.begin(), w.end()));
    return out;
}

// Lifts a Weyl element with constant coefficients into the tensor algebra and
// normal-orders it.
template <class S>
TensorElt<S> to_tensor(const fedq::WeylElement<S>& a) {
    TensorElt<S> out;
    for (auto& [key, f] : a.terms()) {
        if (!f.is_constant()) throw fedq::DomainError("tensor oracle needs constant coefficients");
        auto sym = tensor_symmetrize(key.k, key.alpha, f.constant_part(), a.truncation());
        for (auto& [kk, c] : sym) tensor_add(out, kk.first, kk.second, c, a.truncation());
    }
    return tensor_normal_order(out, a.n(), a.truncation());
}

template <class S>
bool tensor_equal(const TensorElt<S>& a, const TensorElt<S>& b) {
    TensorElt<S> d = a;
    for (auto& [key, c] : b) {
        auto it = d.find(key);
        if (it == d.end())
            d.emplace(key, -c);
        else {
            it->second -= c;
            if (it->second.is_zero()) d.erase(it);
        }
    }
    for (auto& [key, c] : d)
        if (!c.is_zero()) return false;
    return true;
}

// Closed-form Moyal star product on functions over the flat chart: the same
// contraction combinatorics as the fiber product, but with x-derivatives.
template <class S>
fedq::FnSeries<S> moyal_star(const fedq::FnSeries<S>& f, const fedq::FnSeries<S>& g, int n,
                             int max_order) {
    using BF = fedq::BaseFunction<S>;
    f.compat(g);
    fedq::FnSeries<S> out(f.ring(), f.dim(), std::min({f.order(), g.order(), max_order}));
    const S half_i = ScalarOps<S>::i() / ScalarOps<S>::integer(2);
    for (auto& [kf, cf] : f.coeffs())
        for (auto& [kg, cg] : g.coeffs()) {
            // enumerate contraction counts (m+, m-) up to the hbar budget
            int budget = out.order() - kf - kg;
            if (budget < 0) continue;
            std::function<void(int, fedq::IdxVec&, fedq::IdxVec&)> rec =
                [&](int pos, fedq::IdxVec& mp, fedq::IdxVec& mm) {
                    if (pos == n) {
                        int t = 0, tm = 0;
                        for (int i = 0; i < n; ++i) {
                            t += mp[i] + mm[i];
                            tm += mm[i];
                        }
                        if (t > budget) return;
                        BF df = cf, dg = cg;
                        S factor = ScalarOps<S>::one();
                        for (int j = 0; j < t; ++j) factor *= half_i;
                        if (tm % 2 == 1) factor = -factor;
                        long fact = 1;
                        for (int i = 0; i < n; ++i) {
                            for (int q = 2; q <= mp[i]; ++q) fact *= q;
                            for (int q = 2; q <= mm[i]; ++q) fact *= q;
                        }
                        factor = factor / ScalarOps<S>::integer(fact);
                        for (int i = 0; i < n; ++i) {
                            for (int q = 0; q < mp[i]; ++q) df = df.derivative(i);
                            for (int q = 0; q < mm[i]; ++q) df = df.derivative(n + i);
                            for (int q = 0; q < mm[i]; ++q) dg = dg.derivative(i);
                            for (int q = 0; q < mp[i]; ++q) dg = dg.derivative(n + i);
                        }
                        BF prod = (df * dg).scaled(factor);
                        if (!prod.is_zero()) out.add(kf + kg + t, prod);
                        return;
                    }
                    for (int vp = 0; vp <= budget; ++vp) {
                        mp[pos] = vp;
                        for (int vm = 0; vm + vp <= budget; ++vm) {
                            mm[pos] = vm;
                            rec(pos + 1, mp, mm);
                        }
                        mm[pos] = 0;
                    }
                    mp[pos] = 0;
                };
            fedq::IdxVec mp(n, 0), mm(n, 0);
            rec(0, mp, mm);
        }
    return out;
}

}  // namespace fedq::oracle

#endif
