#ifndef FEDQ_WEYL_HPP
#define FEDQ_WEYL_HPP

#include <climits>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "fedq/basefn.hpp"

namespace fedq {

// Fiber bilinear form with [y^i, y^j] = i hbar Lambda^{ij}. The convention is
// Lambda = J for the standard chart symplectic matrix J = [[0, I], [-I, 0]],
// the single normalization point of the fiber algebra.
struct FiberPoisson {
    int n = 0;  // half-dimension; matrix is 2n x 2n

    // Lambda^{uv} as an integer (+1, -1 or 0).
    int entry(int u, int v) const {
        if (u + n == v) return 1;
        if (v + n == u) return -1;
        return 0;
    }
};

// Key of a stored monomial hbar^k y^alpha. Negative hbar powers are allowed
// as long as the total degree 2k + |alpha| stays non-negative, which admits
// the extended sections arising from lift computations.
struct WeylKey {
    int k = 0;
    IdxVec alpha;

    int total_degree() const {
        int d = 2 * k;
        for (auto a : alpha) d += a;
        return d;
    }
    int y_degree() const {
        int d = 0;
        for (auto a : alpha) d += a;
        return d;
    }
    friend bool operator<(const WeylKey& a, const WeylKey& b) {
        if (a.k != b.k) return a.k < b.k;
        return a.alpha < b.alpha;
    }
    friend bool operator==(const WeylKey& a, const WeylKey& b) {
        return a.k == b.k && a.alpha == b.alpha;
    }
};

template <class S>
class WeylElement {
  public:
    using Terms = std::map<WeylKey, BaseFunction<S>>;

    WeylElement() : n_(0), trunc_(0), ring_(Ring::Euclidean) {}
    WeylElement(int n, Ring ring, int trunc) : n_(n), trunc_(trunc), ring_(ring) {}

    static WeylElement zero(int n, Ring ring, int trunc) { return WeylElement(n, ring, trunc); }
    static WeylElement one(int n, Ring ring, int trunc) {
        WeylElement e(n, ring, trunc);
        e.add_term(WeylKey{0, IdxVec(2 * n, 0)},
                   BaseFunction<S>::constant(ring, 2 * n, ScalarOps<S>::one()));
        return e;
    }
    static WeylElement generator(int n, Ring ring, int trunc, int j) {  // y^j
        WeylElement e(n, ring, trunc);
        IdxVec a(2 * n, 0);
        a[j] = 1;
        e.add_term(WeylKey{0, a}, BaseFunction<S>::constant(ring, 2 * n, ScalarOps<S>::one()));
        return e;
    }
    static WeylElement from_base(const BaseFunction<S>& f, int n, int trunc) {
        WeylElement e(n, f.ring(), trunc);
        e.add_term(WeylKey{0, IdxVec(2 * n, 0)}, f);
        return e;
    }
    static WeylElement from_series(const FnSeries<S>& f, int n, int trunc) {
        WeylElement e(n, f.ring(), trunc);
        for (auto& [k, g] : f.coeffs()) e.add_term(WeylKey{k, IdxVec(2 * n, 0)}, g);
        return e;
    }

    int n() const { return n_; }
    int dim() const { return 2 * n_; }
    int truncation() const { return trunc_; }
    Ring ring() const { return ring_; }
    const Terms& terms() const& { return terms_; }
    const Terms& terms() const&& = delete;
    bool is_zero() const { return terms_.empty(); }

    int min_degree() const {
        int d = INT_MAX;
        for (auto& [key, f] : terms_) d = std::min(d, key.total_degree());
        return d;
    }

    bool is_central() const {  // no y dependence
        for (auto& [key, f] : terms_)
            if (key.y_degree() != 0) return false;
        return true;
    }

    void add_term(const WeylKey& key, const BaseFunction<S>& f) {
        if ((int)key.alpha.size() != 2 * n_) throw DomainError("weyl key has wrong fiber rank");
        if (f.is_zero()) return;
        if (f.ring() != ring_ || f.dim() != 2 * n_)
            throw DomainError("weyl coefficient on the wrong base ring");
        int d = key.total_degree();
        if (d < 0) throw ConsistencyError("weyl monomial of negative total degree");
        if (d > trunc_) return;  // silently truncated
        auto it = terms_.find(key);
        if (it == terms_.end())
            terms_.emplace(key, f);
        else {
            it->second += f;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    void check_compatible(const WeylElement& o) const {
        if (n_ != o.n_) throw DomainError("weyl elements of different dimension");
        if (ring_ != o.ring_) throw DomainError("weyl elements over different base rings");
        if (trunc_ != o.trunc_) throw DomainError("weyl elements with different truncation");
    }

    WeylElement truncated(int d) const {
        WeylElement r(n_, ring_, std::min(d, trunc_));
        for (auto& [key, f] : terms_)
            if (key.total_degree() <= r.trunc_) r.terms_.emplace(key, f);
        return r;
    }

    WeylElement graded_part(int d) const {
        WeylElement r(n_, ring_, trunc_);
        for (auto& [key, f] : terms_)
            if (key.total_degree() == d) r.terms_.emplace(key, f);
        return r;
    }

    WeylElement operator-() const {
        WeylElement r(n_, ring_, trunc_);
        for (auto& [key, f] : terms_) r.terms_.emplace(key, -f);
        return r;
    }
    WeylElement& operator+=(const WeylElement& o) {
        check_compatible(o);
        for (auto& [key, f] : o.terms_) add_term(key, f);
        return *this;
    }
    WeylElement& operator-=(const WeylElement& o) {
        check_compatible(o);
        for (auto& [key, f] : o.terms_) add_term(key, -f);
        return *this;
    }
    friend WeylElement operator+(WeylElement a, const WeylElement& b) { return a += b; }
    friend WeylElement operator-(WeylElement a, const WeylElement& b) { return a -= b; }

    WeylElement scaled(const S& c) const {
        WeylElement r(n_, ring_, trunc_);
        if (c.is_zero()) return r;
        for (auto& [key, f] : terms_) r.terms_.emplace(key, f.scaled(c));
        return r;
    }

    friend bool operator==(const WeylElement& a, const WeylElement& b) {
        if (a.n_ != b.n_ || a.ring_ != b.ring_) return false;
        WeylElement d = a.truncated(std::min(a.trunc_, b.trunc_));
        d -= b.truncated(d.trunc_);
        return d.terms_.empty();
    }
    friend bool operator!=(const WeylElement& a, const WeylElement& b) { return !(a == b); }

    // hbar-degree-0 projection onto y-free monomials: the sigma map.
    FnSeries<S> sigma() const {
        FnSeries<S> s(ring_, 2 * n_, trunc_ / 2);
        for (auto& [key, f] : terms_)
            if (key.y_degree() == 0 && key.k >= 0) s.add(key.k, f);
        return s;
    }

    double sup_norm() const {
        double m = 0;
        for (auto& [key, f] : terms_)
            for (auto& [idx, c] : f.terms()) m = std::max(m, c.abs());
        return m;
    }

  private:
    int n_;
    int trunc_;
    Ring ring_;
    Terms terms_;

    template <class T>
    friend WeylElement<T> weyl_product_impl(const WeylElement<T>&, const WeylElement<T>&, bool);
};

namespace detail {
// Enumerates contraction vectors m (componentwise 0 <= m <= cap), invoking
// fn(m) for each.
inline void for_each_below(const IdxVec& cap, IdxVec& m, size_t pos,
                           const std::function<void(const IdxVec&)>& fn) {
    if (pos == cap.size()) {
        fn(m);
        return;
    }
    for (int v = 0; v <= cap[pos]; ++v) {
        m[pos] = v;
        for_each_below(cap, m, pos + 1, fn);
    }
    m[pos] = 0;
}

template <class S>
S falling_factorial_product(const IdxVec& from, const IdxVec& by) {
    S acc = ScalarOps<S>::one();
    for (size_t j = 0; j < from.size(); ++j)
        for (int v = 0; v < by[j]; ++v) acc *= ScalarOps<S>::integer(from[j] - v);
    return acc;
}

template <class S>
S factorial_vec(const IdxVec& m) {
    S acc = ScalarOps<S>::one();
    for (auto v : m)
        for (int j = 2; j <= v; ++j) acc *= ScalarOps<S>::integer(j);
    return acc;
}
}  // namespace detail

// The fiberwise deformed (Moyal) product, resp. the commutator divided by
// i hbar when comm_over_ihbar is set. The contraction sum runs over pairs
// (m+, m-) of vectors in N^n counting uses of the Lambda entries (i, n+i)
// and (n+i, i).
template <class S>
WeylElement<S> weyl_product_impl(const WeylElement<S>& a, const WeylElement<S>& b,
                                 bool comm_over_ihbar) {
    a.check_compatible(b);
    const int n = a.n();
    WeylElement<S> out(a.n(), a.ring(),
                       comm_over_ihbar ? std::max(a.truncation() - 2, 0) : a.truncation());
    const S half_i = ScalarOps<S>::i() / ScalarOps<S>::integer(2);

    for (auto& [ka, fa] : a.terms()) {
        for (auto& [kb, fb] : b.terms()) {
            IdxVec cap_plus(n), cap_minus(n);
            for (int i = 0; i < n; ++i) {
                cap_plus[i] = std::min(ka.alpha[i], kb.alpha[n + i]);
                cap_minus[i] = std::min(ka.alpha[n + i], kb.alpha[i]);
            }
            BaseFunction<S> coef = fa * fb;
            if (coef.is_zero()) continue;
            IdxVec mp(n, 0);
            detail::for_each_below(cap_plus, mp, 0, [&](const IdxVec& m_plus) {
                IdxVec mm(n, 0);
                detail::for_each_below(cap_minus, mm, 0, [&](const IdxVec& m_minus) {
                    int t = 0, tm = 0;
                    for (int i = 0; i < n; ++i) {
                        t += m_plus[i] + m_minus[i];
                        tm += m_minus[i];
                    }
                    if (comm_over_ihbar && t % 2 == 0) return;

                    WeylKey key;
                    key.k = ka.k + kb.k + t - (comm_over_ihbar ? 1 : 0);
                    key.alpha = IdxVec(2 * n);
                    for (int i = 0; i < n; ++i) {
                        key.alpha[i] = ka.alpha[i] - m_plus[i] + kb.alpha[i] - m_minus[i];
                        key.alpha[n + i] =
                            ka.alpha[n + i] - m_minus[i] + kb.alpha[n + i] - m_plus[i];
                    }
                    if (key.total_degree() > out.truncation()) return;

                    S factor = ScalarOps<S>::one();
                    for (int j = 0; j < t; ++j) factor *= half_i;
                    if (tm % 2 == 1) factor = -factor;
                    // [a,b]/(i hbar): the odd-t terms double and lose one i hbar.
                    if (comm_over_ihbar)
                        factor = factor * ScalarOps<S>::integer(2) / ScalarOps<S>::i();

                    IdxVec da(2 * n), db(2 * n);
                    for (int i = 0; i < n; ++i) {
                        da[i] = m_plus[i];
                        da[n + i] = m_minus[i];
                        db[i] = m_minus[i];
                        db[n + i] = m_plus[i];
                    }
                    factor *= detail::falling_factorial_product<S>(ka.alpha, da);
                    factor *= detail::falling_factorial_product<S>(kb.alpha, db);
                    IdxVec tot(n);
                    for (int i = 0; i < n; ++i) tot[i] = m_plus[i];
                    factor = factor / detail::factorial_vec<S>(tot);
                    for (int i = 0; i < n; ++i) tot[i] = m_minus[i];
                    factor = factor / detail::factorial_vec<S>(tot);

                    out.add_term(key, coef.scaled(factor));
                });
            });
        }
    }
    return out;
}

template <class S>
WeylElement<S> weyl_mul(const WeylElement<S>& a, const WeylElement<S>& b) {
    return weyl_product_impl(a, b, false);
}
template <class S>
WeylElement<S> operator*(const WeylElement<S>& a, const WeylElement<S>& b) {
    return weyl_mul(a, b);
}

// (a o b - b o a) / (i hbar), exact at truncation D - 2. Only odd contraction
// orders contribute, so the division never leaves the algebra.
template <class S>
WeylElement<S> weyl_commutator_over_ihbar(const WeylElement<S>& a, const WeylElement<S>& b) {
    return weyl_product_impl(a, b, true);
}

// e^a for a with every monomial of total degree >= 1.
template <class S>
WeylElement<S> weyl_exp(const WeylElement<S>& a) {
    if (!a.is_zero() && a.min_degree() < 1)
        throw DomainError("weyl exponential needs all monomials of degree >= 1");
    WeylElement<S> acc = WeylElement<S>::one(a.n(), a.ring(), a.truncation());
    WeylElement<S> pow = acc;
    S fact = ScalarOps<S>::one();
    for (int j = 1; j <= a.truncation(); ++j) {
        pow = pow * a;
        if (pow.is_zero()) break;
        fact *= ScalarOps<S>::integer(j);
        acc += pow.scaled(ScalarOps<S>::one() / fact);
    }
    return acc;
}

// Log(u) for u = 1 + v with v of degree >= 1.
template <class S>
WeylElement<S> weyl_log(const WeylElement<S>& u) {
    WeylElement<S> v = u - WeylElement<S>::one(u.n(), u.ring(), u.truncation());
    if (!v.is_zero() && v.min_degree() < 1)
        throw DomainError("weyl logarithm needs u = 1 + (degree >= 1)");
    WeylElement<S> acc = WeylElement<S>::zero(u.n(), u.ring(), u.truncation());
    WeylElement<S> pow = WeylElement<S>::one(u.n(), u.ring(), u.truncation());
    for (int j = 1; j <= u.truncation(); ++j) {
        pow = pow * v;
        if (pow.is_zero()) break;
        acc += pow.scaled(ScalarOps<S>::ratio(j % 2 == 1 ? 1 : -1, j));
    }
    return acc;
}

// Inverse by Neumann series. The degree-0 part must be a single (0,0)-keyed
// coefficient that is a unit of the base ring.
template <class S>
WeylElement<S> weyl_inverse(const WeylElement<S>& u) {
    const int n = u.n();
    BaseFunction<S> lead(u.ring(), 2 * n);
    for (auto& [key, f] : u.terms()) {
        if (key.total_degree() != 0) continue;
        if (key.y_degree() != 0 || key.k != 0)
            throw DomainError("inverse: degree-0 part contains non-constant fiber content");
        lead = f;
    }
    BaseFunction<S> lead_inv(u.ring(), 2 * n);
    if (!base_unit_inverse(lead, lead_inv))
        throw DomainError("inverse: leading (k=0, alpha=0) coefficient is not a unit");
    WeylElement<S> lead_inv_w = WeylElement<S>::from_base(lead_inv, n, u.truncation());
    WeylElement<S> one = WeylElement<S>::one(n, u.ring(), u.truncation());
    WeylElement<S> w = u * lead_inv_w - one;  // degree >= 1
    WeylElement<S> acc = one, pow = one;
    for (int j = 1; j <= u.truncation(); ++j) {
        pow = pow * (-w);
        if (pow.is_zero()) break;
        acc += pow;
    }
    return lead_inv_w * acc;
}

}  // namespace fedq

#endif
