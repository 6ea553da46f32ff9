#ifndef FEDQ_SCALARFORM_HPP
#define FEDQ_SCALARFORM_HPP

#include "fedq/basefn.hpp"
#include "fedq/forms.hpp"

namespace fedq {

// Differential form with hbar-series coefficients of base functions; the
// carrier for symplectic forms, curvature representatives theta and values of
// the logarithmic derivative map.
template <class S>
class ScalarForm {
  public:
    using Comps = std::map<Wedge, FnSeries<S>>;

    ScalarForm() : ring_(Ring::Euclidean), dim_(0), p_(0), order_(0) {}
    ScalarForm(Ring ring, int dim, int p, int order)
        : ring_(ring), dim_(dim), p_(p), order_(order) {
        if (p < 0 || p > 3) throw DomainError("scalar form degree out of range 0..3");
    }

    static ScalarForm of_series(const FnSeries<S>& f) {
        ScalarForm r(f.ring(), f.dim(), 0, f.order());
        r.add_comp(Wedge{}, f);
        return r;
    }

    Ring ring() const { return ring_; }
    int dim() const { return dim_; }
    int degree() const { return p_; }
    int order() const { return order_; }
    const Comps& comps() const& { return comps_; }
    const Comps& comps() const&& = delete;
    bool is_zero() const { return comps_.empty(); }

    FnSeries<S> comp(const Wedge& w) const {
        auto it = comps_.find(w);
        return it == comps_.end() ? FnSeries<S>(ring_, dim_, order_) : it->second;
    }

    void add_comp(const Wedge& w, const FnSeries<S>& f) {
        if ((int)w.size() != p_) throw DomainError("wedge length does not match form degree");
        for (size_t r = 0; r + 1 < w.size(); ++r)
            if (w[r] >= w[r + 1]) throw DomainError("wedge indices must be strictly increasing");
        if (f.is_zero()) return;
        if (f.ring() != ring_ || f.dim() != dim_) throw DomainError("form coefficient ring mismatch");
        auto it = comps_.find(w);
        if (it == comps_.end()) {
            FnSeries<S> g = f;
            g.restrict_order(order_);
            comps_.emplace(w, g);
        } else {
            it->second += f;
            if (it->second.is_zero()) comps_.erase(it);
        }
    }

    void check_compatible(const ScalarForm& o) const {
        if (ring_ != o.ring_ || dim_ != o.dim_) throw DomainError("forms on different manifolds");
        if (p_ != o.p_) throw DomainError("forms of different degree");
    }

    ScalarForm operator-() const {
        ScalarForm r(ring_, dim_, p_, order_);
        for (auto& [w, f] : comps_) r.comps_.emplace(w, -f);
        return r;
    }
    ScalarForm& operator+=(const ScalarForm& o) {
        check_compatible(o);
        order_ = std::min(order_, o.order_);
        for (auto& [w, f] : o.comps_) add_comp(w, f);
        return *this;
    }
    ScalarForm& operator-=(const ScalarForm& o) { return *this += -o; }
    friend ScalarForm operator+(ScalarForm a, const ScalarForm& b) { return a += b; }
    friend ScalarForm operator-(ScalarForm a, const ScalarForm& b) { return a -= b; }

    ScalarForm scaled(const S& c) const {
        ScalarForm r(ring_, dim_, p_, order_);
        for (auto& [w, f] : comps_) r.add_comp(w, f.scaled(c));
        return r;
    }
    ScalarForm shifted(int dk) const {  // multiply by hbar^dk
        ScalarForm r(ring_, dim_, p_, order_ + dk);
        for (auto& [w, f] : comps_) r.add_comp(w, f.shifted(dk));
        return r;
    }

    bool is_zero_through(int k) const {
        for (auto& [w, f] : comps_)
            if (!f.is_zero_through(k)) return false;
        return true;
    }

    friend bool operator==(const ScalarForm& a, const ScalarForm& b) {
        ScalarForm d = a;
        d -= b;
        return d.is_zero_through(d.order_);
    }
    friend bool operator!=(const ScalarForm& a, const ScalarForm& b) { return !(a == b); }

    // Embeds into a Weyl-valued form: hbar^k coefficients become (k, alpha=0)
    // monomials. Entries beyond the truncation budget are dropped.
    WeylForm<S> as_weyl(int n, int trunc) const {
        if (dim_ != 2 * n) throw DomainError("dimension mismatch embedding scalar form");
        WeylForm<S> r(n, ring_, trunc, p_);
        for (auto& [w, f] : comps_)
            r.add_comp(w, WeylElement<S>::from_series(f, n, trunc));
        return r;
    }

    // Extracts the central part of a Weyl-valued form; throws if y-dependent
    // content is present (the caller certifies centrality separately).
    static ScalarForm from_weyl_central(const WeylForm<S>& s, int order) {
        ScalarForm r(s.ring(), 2 * s.n(), s.degree(), order);
        for (auto& [w, a] : s.comps()) {
            FnSeries<S> f(s.ring(), 2 * s.n(), order);
            for (auto& [key, g] : a.terms()) {
                if (key.y_degree() != 0)
                    throw ConsistencyError("extracting central part of a non-central form");
                if (key.k < 0) throw ConsistencyError("negative hbar power in central part");
                if (key.k <= order) f.add(key.k, g);
            }
            r.add_comp(w, f);
        }
        return r;
    }

  private:
    Ring ring_;
    int dim_;
    int p_;
    int order_;
    Comps comps_;
};

// Exterior derivative.
template <class S>
ScalarForm<S> exterior_d(const ScalarForm<S>& s) {
    if (s.degree() > 2)
        throw DomainError("exterior derivative is supported through form degree 2");
    ScalarForm<S> r(s.ring(), s.dim(), s.degree() + 1, s.order());
    for (auto& [w, f] : s.comps()) {
        for (int j = 0; j < s.dim(); ++j) {
            FnSeries<S> df(s.ring(), s.dim(), f.order());
            for (auto& [k, g] : f.coeffs()) df.add(k, g.derivative(j));
            if (df.is_zero()) continue;
            Wedge out;
            int sign;
            if (!wedge_insert(j, w, out, sign)) continue;
            r.add_comp(out, sign > 0 ? df : -df);
        }
    }
    return r;
}

template <class S>
bool is_closed(const ScalarForm<S>& s) {
    return exterior_d(s).is_zero_through(s.order());
}

// The standard symplectic form omega = sum_i dx^i ^ dx^{n+i} as a 2-form.
template <class S>
ScalarForm<S> standard_symplectic_form(Ring ring, int n, int order) {
    ScalarForm<S> w(ring, 2 * n, 2, order);
    for (int i = 0; i < n; ++i) {
        Wedge wedge{i, n + i};
        w.add_comp(wedge, FnSeries<S>::constant(ring, 2 * n, order, ScalarOps<S>::one()));
    }
    return w;
}

}  // namespace fedq

#endif
