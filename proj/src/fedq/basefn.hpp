#ifndef FEDQ_BASEFN_HPP
#define FEDQ_BASEFN_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedq/scalar.hpp"

namespace fedq {

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Coefficient ring of the base manifold.
//   Euclidean: polynomials on R^{2n}, keys are exponent multi-indices (>= 0).
//   Torus:    finite Fourier sums on T^{2n}, keys are integer frequency vectors.
enum class Ring : uint8_t { Euclidean, Torus };

inline const char* ring_name(Ring r) { return r == Ring::Euclidean ? "euclidean" : "torus"; }

using IdxVec = std::vector<int32_t>;

template <class S>
class BaseFunction {
  public:
    using Terms = std::map<IdxVec, S>;

    BaseFunction() : ring_(Ring::Euclidean), dim_(0) {}
    BaseFunction(Ring ring, int dim) : ring_(ring), dim_(dim) {}

    static BaseFunction constant(Ring ring, int dim, const S& c) {
        BaseFunction f(ring, dim);
        f.add_term(IdxVec(dim, 0), c);
        return f;
    }
    // x^j (euclidean) or e^{i x^j} (torus) depending on the ring.
    static BaseFunction coordinate(Ring ring, int dim, int j) {
        BaseFunction f(ring, dim);
        IdxVec k(dim, 0);
        k[j] = 1;
        f.add_term(k, ScalarOps<S>::one());
        return f;
    }
    static BaseFunction monomial(Ring ring, int dim, const IdxVec& key, const S& c) {
        BaseFunction f(ring, dim);
        f.add_term(key, c);
        return f;
    }

    Ring ring() const { return ring_; }
    int dim() const { return dim_; }
    const Terms& terms() const& { return terms_; }
    const Terms& terms() const&& = delete;
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        if (terms_.empty()) return true;
        return terms_.size() == 1 && terms_.begin()->first == IdxVec(dim_, 0);
    }
    S constant_part() const {
        auto it = terms_.find(IdxVec(dim_, 0));
        return it == terms_.end() ? ScalarOps<S>::zero() : it->second;
    }

    void add_term(const IdxVec& key, const S& c) {
        if ((int)key.size() != dim_) throw DomainError("base-function key has wrong length");
        if (ring_ == Ring::Euclidean)
            for (auto e : key)
                if (e < 0) throw DomainError("negative exponent in polynomial key");
        auto it = terms_.find(key);
        if (it == terms_.end()) {
            if (!c.is_zero()) terms_.emplace(key, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    void check_compatible(const BaseFunction& o) const {
        if (ring_ != o.ring_ || dim_ != o.dim_)
            throw DomainError("base functions live on different manifolds");
    }

    BaseFunction operator-() const {
        BaseFunction r(ring_, dim_);
        for (auto& [k, c] : terms_) r.terms_.emplace(k, -c);
        return r;
    }
    BaseFunction& operator+=(const BaseFunction& o) {
        check_compatible(o);
        for (auto& [k, c] : o.terms_) add_term(k, c);
        return *this;
    }
    BaseFunction& operator-=(const BaseFunction& o) {
        check_compatible(o);
        for (auto& [k, c] : o.terms_) add_term(k, -c);
        return *this;
    }
    friend BaseFunction operator+(BaseFunction a, const BaseFunction& b) { return a += b; }
    friend BaseFunction operator-(BaseFunction a, const BaseFunction& b) { return a -= b; }

    friend BaseFunction operator*(const BaseFunction& a, const BaseFunction& b) {
        a.check_compatible(b);
        BaseFunction r(a.ring_, a.dim_);
        for (auto& [ka, ca] : a.terms_)
            for (auto& [kb, cb] : b.terms_) {
                IdxVec k(a.dim_);
                for (int j = 0; j < a.dim_; ++j) k[j] = ka[j] + kb[j];
                r.add_term(k, ca * cb);
            }
        return r;
    }
    BaseFunction& operator*=(const BaseFunction& o) { return *this = *this * o; }

    BaseFunction scaled(const S& c) const {
        BaseFunction r(ring_, dim_);
        if (c.is_zero()) return r;
        for (auto& [k, v] : terms_) r.add_term(k, v * c);
        return r;
    }

    friend bool operator==(const BaseFunction& a, const BaseFunction& b) {
        if (a.ring_ != b.ring_ || a.dim_ != b.dim_) return false;
        // tolerance-aware for the approximate scalar: compare via difference
        BaseFunction d = a - b;
        return d.terms_.empty() ||
               std::all_of(d.terms_.begin(), d.terms_.end(),
                           [](auto& kv) { return kv.second.is_zero(); });
    }
    friend bool operator!=(const BaseFunction& a, const BaseFunction& b) { return !(a == b); }

    // d/dx^j. Polynomial: power rule. Torus: e^{i m.x} -> i m_j e^{i m.x}.
    BaseFunction derivative(int j) const {
        BaseFunction r(ring_, dim_);
        for (auto& [k, c] : terms_) {
            if (ring_ == Ring::Euclidean) {
                if (k[j] == 0) continue;
                IdxVec kk = k;
                kk[j] -= 1;
                r.add_term(kk, c * ScalarOps<S>::integer(k[j]));
            } else {
                if (k[j] == 0) continue;
                r.add_term(k, c * ScalarOps<S>::i() * ScalarOps<S>::integer(k[j]));
            }
        }
        return r;
    }

    int max_total_degree() const {
        int d = 0;
        for (auto& [k, c] : terms_) {
            int t = 0;
            for (auto e : k) t += (ring_ == Ring::Euclidean ? e : std::abs(e));
            d = std::max(d, t);
        }
        return d;
    }

    // Evaluation. Euclidean: point given by coordinates. Torus: point given by
    // per-coordinate unit phases u_j = e^{i x_j}; e^{i m.x} evaluates to
    // prod u_j^{m_j}.
    S eval(const std::vector<S>& point) const {
        if ((int)point.size() != dim_) throw DomainError("evaluation point has wrong length");
        S acc = ScalarOps<S>::zero();
        for (auto& [k, c] : terms_) {
            S t = c;
            for (int j = 0; j < dim_; ++j) {
                int e = k[j];
                if (e == 0) continue;
                S base = point[j];
                if (e < 0) {
                    base = ScalarOps<S>::one() / base;
                    e = -e;
                }
                for (int q = 0; q < e; ++q) t *= base;
            }
            acc += t;
        }
        return acc;
    }

    // Torus reality check: f real-valued iff c_{-m} = conj(c_m).
    bool is_real_valued() const {
        if (ring_ == Ring::Euclidean) {
            for (auto& [k, c] : terms_)
                if (!c.is_real()) return false;
            return true;
        }
        for (auto& [k, c] : terms_) {
            IdxVec neg(dim_);
            for (int j = 0; j < dim_; ++j) neg[j] = -k[j];
            auto it = terms_.find(neg);
            S mirror = (it == terms_.end()) ? ScalarOps<S>::zero() : it->second;
            if (mirror != c.conj()) return false;
        }
        return true;
    }

  private:
    Ring ring_;
    int dim_;
    Terms terms_;
};

// Formal power series in hbar with base-function coefficients, stamped with
// the order through which the entries are reliable.
template <class S>
class FnSeries {
  public:
    FnSeries() : ring_(Ring::Euclidean), dim_(0), order_(0) {}
    FnSeries(Ring ring, int dim, int order) : ring_(ring), dim_(dim), order_(order) {}

    static FnSeries constant(Ring ring, int dim, int order, const S& c) {
        FnSeries f(ring, dim, order);
        f.set(0, BaseFunction<S>::constant(ring, dim, c));
        return f;
    }
    static FnSeries of(const BaseFunction<S>& f0, int order) {
        FnSeries f(f0.ring(), f0.dim(), order);
        f.set(0, f0);
        return f;
    }

    Ring ring() const { return ring_; }
    int dim() const { return dim_; }
    int order() const { return order_; }
    void restrict_order(int k) { order_ = std::min(order_, k); }

    const std::map<int, BaseFunction<S>>& coeffs() const& { return coeffs_; }
    const std::map<int, BaseFunction<S>>& coeffs() const&& = delete;

    BaseFunction<S> at(int k) const {
        auto it = coeffs_.find(k);
        return it == coeffs_.end() ? BaseFunction<S>(ring_, dim_) : it->second;
    }
    void set(int k, const BaseFunction<S>& f) {
        if (k < 0) throw DomainError("negative hbar power in scalar series");
        if (f.is_zero())
            coeffs_.erase(k);
        else {
            if (f.ring() != ring_ || f.dim() != dim_) throw DomainError("mixed-ring series entry");
            coeffs_[k] = f;
        }
    }
    void add(int k, const BaseFunction<S>& f) { set(k, at(k) + f); }

    bool is_zero_through(int k) const {
        for (auto& [j, f] : coeffs_)
            if (j <= k && !f.is_zero()) return false;
        return true;
    }
    bool is_zero() const { return coeffs_.empty(); }

    FnSeries operator-() const {
        FnSeries r(ring_, dim_, order_);
        for (auto& [k, f] : coeffs_) r.coeffs_[k] = -f;
        return r;
    }
    FnSeries& operator+=(const FnSeries& o) {
        compat(o);
        order_ = std::min(order_, o.order_);
        for (auto& [k, f] : o.coeffs_) add(k, f);
        return *this;
    }
    FnSeries& operator-=(const FnSeries& o) {
        compat(o);
        order_ = std::min(order_, o.order_);
        for (auto& [k, f] : o.coeffs_) add(k, -f);
        return *this;
    }
    friend FnSeries operator+(FnSeries a, const FnSeries& b) { return a += b; }
    friend FnSeries operator-(FnSeries a, const FnSeries& b) { return a -= b; }

    friend FnSeries operator*(const FnSeries& a, const FnSeries& b) {
        a.compat(b);
        FnSeries r(a.ring_, a.dim_, std::min(a.order_, b.order_));
        for (auto& [ka, fa] : a.coeffs_)
            for (auto& [kb, fb] : b.coeffs_) {
                if (ka + kb > r.order_) continue;
                r.add(ka + kb, fa * fb);
            }
        return r;
    }

    FnSeries scaled(const S& c) const {
        FnSeries r(ring_, dim_, order_);
        for (auto& [k, f] : coeffs_) r.set(k, f.scaled(c));
        return r;
    }
    FnSeries shifted(int dk) const {  // multiply by hbar^dk
        FnSeries r(ring_, dim_, order_ + dk);
        for (auto& [k, f] : coeffs_) {
            if (k + dk < 0) throw ConsistencyError("series not divisible by hbar");
            r.coeffs_[k + dk] = f;
        }
        return r;
    }

    // Equality through the shared reliable order.
    friend bool operator==(const FnSeries& a, const FnSeries& b) {
        a.compat(b);
        FnSeries d = a - b;
        return d.is_zero_through(std::min(a.order_, b.order_));
    }
    friend bool operator!=(const FnSeries& a, const FnSeries& b) { return !(a == b); }

    // Equality decided through min(order_, o.order_, k); comparing beyond the
    // reliable order is refused.
    bool equals_through(const FnSeries& o, int k) const {
        compat(o);
        if (k > order_ || k > o.order_)
            throw DomainError("comparison beyond the reliable hbar order");
        FnSeries d = *this - o;
        return d.is_zero_through(k);
    }

    // Multiplicative inverse: the hbar^0 part must be an invertible base
    // function (nonzero constant; on the torus also c*e^{i m.x}).
    FnSeries inverse() const;

    // exp(f) for f with zero hbar^0 term; Log(1+f) likewise.
    FnSeries exp_series() const;
    FnSeries log1p_series() const;  // input g = f - 1 with g starting at hbar^1

    void compat(const FnSeries& o) const {
        if (ring_ != o.ring_ || dim_ != o.dim_)
            throw DomainError("series live on different manifolds");
    }

  private:
    Ring ring_;
    int dim_;
    int order_;
    std::map<int, BaseFunction<S>> coeffs_;
};

// Units of the coefficient ring: nonzero constants, and on the torus also
// c * e^{i m.x}. Returns the inverse if invertible.
template <class S>
bool base_unit_inverse(const BaseFunction<S>& f, BaseFunction<S>& inv) {
    if (f.terms().size() != 1) return false;
    auto& [k, c] = *f.terms().begin();
    bool trivial_key = true;
    for (auto e : k) trivial_key = trivial_key && (e == 0);
    if (f.ring() == Ring::Euclidean && !trivial_key) return false;
    if (c.is_zero()) return false;
    IdxVec neg(k.size());
    for (size_t j = 0; j < k.size(); ++j) neg[j] = -k[j];
    inv = BaseFunction<S>::monomial(f.ring(), f.dim(), neg, ScalarOps<S>::one() / c);
    return true;
}

template <class S>
FnSeries<S> FnSeries<S>::inverse() const {
    BaseFunction<S> lead = at(0), lead_inv(ring_, dim_);
    if (!base_unit_inverse(lead, lead_inv))
        throw DomainError("series leading part is not a unit of the coefficient ring");
    // f = lead (1 + h), h starting at hbar^1
    FnSeries h = (*this * FnSeries::of(lead_inv, order_)) -
                 FnSeries::constant(ring_, dim_, order_, ScalarOps<S>::one());
    FnSeries acc = FnSeries::constant(ring_, dim_, order_, ScalarOps<S>::one());
    FnSeries pow = acc;
    for (int j = 1; j <= order_; ++j) {
        pow = pow * (-h);
        acc += pow;
        if (pow.is_zero()) break;
    }
    return acc * FnSeries::of(lead_inv, order_);
}

template <class S>
FnSeries<S> FnSeries<S>::exp_series() const {
    if (!at(0).is_zero()) throw DomainError("exp of a series with nonzero hbar^0 part");
    FnSeries acc = FnSeries::constant(ring_, dim_, order_, ScalarOps<S>::one());
    FnSeries pow = acc;
    S fact = ScalarOps<S>::one();
    for (int j = 1; j <= order_; ++j) {
        pow = pow * *this;
        fact *= ScalarOps<S>::integer(j);
        acc += pow.scaled(ScalarOps<S>::one() / fact);
        if (pow.is_zero()) break;
    }
    return acc;
}

template <class S>
FnSeries<S> FnSeries<S>::log1p_series() const {
    if (!at(0).is_zero()) throw DomainError("Log(1+f) needs f to start at hbar^1");
    FnSeries acc(ring_, dim_, order_);
    FnSeries pow = FnSeries::constant(ring_, dim_, order_, ScalarOps<S>::one());
    for (int j = 1; j <= order_; ++j) {
        pow = pow * *this;
        S c = ScalarOps<S>::ratio(j % 2 == 1 ? 1 : -1, j);
        acc += pow.scaled(c);
        if (pow.is_zero()) break;
    }
    return acc;
}

}  // namespace fedq

#endif
