#ifndef FEDQ_FORMS_HPP
#define FEDQ_FORMS_HPP

#include <array>
#include <map>

#include "fedq/weyl.hpp"

namespace fedq {

// Strictly increasing index tuple labelling dx^{i1} ^ ... ^ dx^{ip}.
using Wedge = IdxVec;

// dx^j ^ dx^I: returns false if j occurs in I, otherwise the sorted wedge and
// the sign of the permutation that sorts it.
inline bool wedge_insert(int j, const Wedge& I, Wedge& out, int& sign) {
    out.clear();
    sign = 1;
    bool placed = false;
    for (size_t r = 0; r < I.size(); ++r) {
        if (I[r] == j) return false;
        if (!placed && I[r] > j) {
            out.push_back(j);
            placed = true;
        }
        if (!placed) sign = -sign;
        out.push_back(I[r]);
    }
    if (!placed) out.push_back(j);
    return true;
}

// Concatenate two wedges, sorting with sign; returns false on a repeat.
inline bool wedge_join(const Wedge& A, const Wedge& B, Wedge& out, int& sign) {
    out = A;
    sign = 1;
    for (int j : B) {
        Wedge next;
        int s;
        // append j at the END of out: j must move left past all larger entries
        // wedge_insert computes dx^j ^ dx^out; appending is out ^ dx^j, which
        // differs by (-1)^{|out|-pos adjustments}; do it directly instead.
        if (!wedge_insert(j, out, next, s)) return false;
        // wedge_insert gives dx^j ^ dx^out; we want dx^out ^ dx^j
        // = (-1)^{|out|} dx^j ^ dx^out.
        if (out.size() % 2 == 1) s = -s;
        sign *= s;
        out = next;
    }
    return true;
}

// Differential form of degree p with Weyl-element coefficients.
template <class S>
class WeylForm {
  public:
    using Comps = std::map<Wedge, WeylElement<S>>;

    WeylForm() : n_(0), trunc_(0), ring_(Ring::Euclidean), p_(0) {}
    WeylForm(int n, Ring ring, int trunc, int p) : n_(n), trunc_(trunc), ring_(ring), p_(p) {}

    static WeylForm of_element(const WeylElement<S>& a) {
        WeylForm f(a.n(), a.ring(), a.truncation(), 0);
        f.add_comp(Wedge{}, a);
        return f;
    }

    int n() const { return n_; }
    Ring ring() const { return ring_; }
    int truncation() const { return trunc_; }
    int degree() const { return p_; }
    const Comps& comps() const& { return comps_; }
    const Comps& comps() const&& = delete;
    bool is_zero() const { return comps_.empty(); }

    WeylElement<S> comp(const Wedge& w) const {
        auto it = comps_.find(w);
        return it == comps_.end() ? WeylElement<S>::zero(n_, ring_, trunc_) : it->second;
    }

    void add_comp(const Wedge& w, const WeylElement<S>& a) {
        if ((int)w.size() != p_) throw DomainError("wedge length does not match form degree");
        for (size_t r = 0; r + 1 < w.size(); ++r)
            if (w[r] >= w[r + 1]) throw DomainError("wedge indices must be strictly increasing");
        if (a.is_zero()) return;
        if (a.n() != n_ || a.ring() != ring_)
            throw DomainError("form coefficient on the wrong fiber");
        auto b = a.truncated(trunc_);
        if (b.is_zero()) return;
        auto it = comps_.find(w);
        if (it == comps_.end())
            comps_.emplace(w, b);
        else {
            it->second += b;
            if (it->second.is_zero()) comps_.erase(it);
        }
    }

    void check_compatible(const WeylForm& o) const {
        if (n_ != o.n_ || ring_ != o.ring_) throw DomainError("forms on different bundles");
        if (p_ != o.p_) throw DomainError("forms of different degree");
    }

    WeylForm operator-() const {
        WeylForm r(n_, ring_, trunc_, p_);
        for (auto& [w, a] : comps_) r.comps_.emplace(w, -a);
        return r;
    }
    WeylForm& operator+=(const WeylForm& o) {
        if (o.is_zero()) return *this;  // zero is degree-agnostic
        if (is_zero() && p_ != o.p_) p_ = o.p_;
        check_compatible(o);
        trunc_ = std::min(trunc_, o.trunc_);
        retruncate();
        for (auto& [w, a] : o.comps_) add_comp(w, a);
        return *this;
    }
    WeylForm& operator-=(const WeylForm& o) { return *this += -o; }
    friend WeylForm operator+(WeylForm a, const WeylForm& b) { return a += b; }
    friend WeylForm operator-(WeylForm a, const WeylForm& b) { return a -= b; }

    WeylForm scaled(const S& c) const {
        WeylForm r(n_, ring_, trunc_, p_);
        for (auto& [w, a] : comps_) r.add_comp(w, a.scaled(c));
        return r;
    }

    WeylForm truncated(int d) const {
        WeylForm r(n_, ring_, std::min(d, trunc_), p_);
        for (auto& [w, a] : comps_) r.add_comp(w, a);
        return r;
    }

    // keep only coefficient monomials of total degree d
    WeylForm graded_part(int d) const {
        WeylForm r(n_, ring_, trunc_, p_);
        for (auto& [w, a] : comps_) r.add_comp(w, a.graded_part(d));
        return r;
    }

    int min_coeff_degree() const {
        int d = INT_MAX;
        for (auto& [w, a] : comps_) d = std::min(d, a.min_degree());
        return d;
    }

    bool is_zero_in_degrees_up_to(int d) const {
        for (auto& [w, a] : comps_)
            for (auto& [key, f] : a.terms())
                if (key.total_degree() <= d && !f.is_zero()) return false;
        return true;
    }

    bool is_central() const {
        for (auto& [w, a] : comps_)
            if (!a.is_central()) return false;
        return true;
    }

    friend bool operator==(const WeylForm& a, const WeylForm& b) {
        WeylForm d = a;
        d -= b;
        return d.comps_.empty();
    }
    friend bool operator!=(const WeylForm& a, const WeylForm& b) { return !(a == b); }

    double sup_norm() const {
        double m = 0;
        for (auto& [w, a] : comps_) m = std::max(m, a.sup_norm());
        return m;
    }

  private:
    void retruncate() {
        for (auto it = comps_.begin(); it != comps_.end();) {
            it->second = it->second.truncated(trunc_);
            it = it->second.is_zero() ? comps_.erase(it) : std::next(it);
        }
    }

    int n_;
    int trunc_;
    Ring ring_;
    int p_;
    Comps comps_;
};

namespace detail {
template <class S>
WeylElement<S> y_derivative(const WeylElement<S>& a, int j) {
    WeylElement<S> r(a.n(), a.ring(), a.truncation());
    for (auto& [key, f] : a.terms()) {
        if (key.alpha[j] == 0) continue;
        WeylKey kk = key;
        kk.alpha[j] -= 1;
        r.add_term(kk, f.scaled(ScalarOps<S>::integer(key.alpha[j])));
    }
    return r;
}

template <class S>
WeylElement<S> y_multiply(const WeylElement<S>& a, int j) {
    WeylElement<S> r(a.n(), a.ring(), a.truncation());
    for (auto& [key, f] : a.terms()) {
        WeylKey kk = key;
        kk.alpha[j] += 1;
        r.add_term(kk, f);
    }
    return r;
}

template <class S>
WeylElement<S> x_derivative(const WeylElement<S>& a, int j) {
    WeylElement<S> r(a.n(), a.ring(), a.truncation());
    for (auto& [key, f] : a.terms()) r.add_term(key, f.derivative(j));
    return r;
}
}  // namespace detail

// delta = dx^j ^ d/dy^j: lowers y-degree, raises form degree.
template <class S>
WeylForm<S> delta(const WeylForm<S>& s) {
    WeylForm<S> r(s.n(), s.ring(), s.truncation(), s.degree() + 1);
    for (auto& [w, a] : s.comps()) {
        for (int j = 0; j < 2 * s.n(); ++j) {
            WeylElement<S> da = detail::y_derivative(a, j);
            if (da.is_zero()) continue;
            Wedge out;
            int sign;
            if (!wedge_insert(j, w, out, sign)) continue;
            r.add_comp(out, sign > 0 ? da : -da);
        }
    }
    return r;
}

// The contracting homotopy: on a monomial of y-degree a and form degree q >= 1
// it contracts one dx into a y with weight 1/(a+q); zero on 0-forms.
template <class S>
WeylForm<S> delta_inv(const WeylForm<S>& s) {
    if (s.degree() == 0) return WeylForm<S>(s.n(), s.ring(), s.truncation(), 0);
    WeylForm<S> r(s.n(), s.ring(), s.truncation(), s.degree() - 1);
    const int q = s.degree();
    for (auto& [w, a] : s.comps()) {
        for (auto& [key, f] : a.terms()) {
            S weight = ScalarOps<S>::one() / ScalarOps<S>::integer(key.y_degree() + q);
            for (int pos = 0; pos < q; ++pos) {
                Wedge rest;
                for (int t = 0; t < q; ++t)
                    if (t != pos) rest.push_back(w[t]);
                WeylKey kk = key;
                kk.alpha[w[pos]] += 1;
                S c = (pos % 2 == 0) ? weight : -weight;
                WeylElement<S> piece(s.n(), s.ring(), s.truncation());
                piece.add_term(kk, f.scaled(c));
                r.add_comp(rest, piece);
            }
        }
    }
    return r;
}

// Projection to (y-degree 0, form degree 0); complements the homotopy
// identity delta o delta_inv + delta_inv o delta = id - pi00.
template <class S>
WeylForm<S> pi00(const WeylForm<S>& s) {
    WeylForm<S> r(s.n(), s.ring(), s.truncation(), s.degree());
    if (s.degree() != 0) return r;
    for (auto& [w, a] : s.comps()) {
        WeylElement<S> kept(s.n(), s.ring(), s.truncation());
        for (auto& [key, f] : a.terms())
            if (key.y_degree() == 0) kept.add_term(key, f);
        r.add_comp(w, kept);
    }
    return r;
}

// Exterior derivative on the x-coordinates of each coefficient.
template <class S>
WeylForm<S> d_x(const WeylForm<S>& s) {
    WeylForm<S> r(s.n(), s.ring(), s.truncation(), s.degree() + 1);
    for (auto& [w, a] : s.comps()) {
        for (int j = 0; j < 2 * s.n(); ++j) {
            WeylElement<S> da = detail::x_derivative(a, j);
            if (da.is_zero()) continue;
            Wedge out;
            int sign;
            if (!wedge_insert(j, w, out, sign)) continue;
            r.add_comp(out, sign > 0 ? da : -da);
        }
    }
    return r;
}

// Coefficient-wise product with wedge of the dx parts:
// (P ^o Q)_{I^J} = P_I o Q_J.
template <class S>
WeylForm<S> wedge_mul(const WeylForm<S>& a, const WeylForm<S>& b) {
    if (a.n() != b.n() || a.ring() != b.ring()) throw DomainError("forms on different bundles");
    WeylForm<S> r(a.n(), a.ring(), std::min(a.truncation(), b.truncation()),
                  a.degree() + b.degree());
    for (auto& [wa, ca] : a.comps())
        for (auto& [wb, cb] : b.comps()) {
            Wedge out;
            int sign;
            if (!wedge_join(wa, wb, out, sign)) continue;
            WeylElement<S> prod = ca.truncated(r.truncation()) * cb.truncated(r.truncation());
            r.add_comp(out, sign > 0 ? prod : -prod);
        }
    return r;
}

// Graded commutator over i hbar: components are the plain commutators of the
// coefficients under dx^I ^ dx^J.
template <class S>
WeylForm<S> comm_over_ihbar(const WeylForm<S>& a, const WeylForm<S>& b) {
    if (a.n() != b.n() || a.ring() != b.ring()) throw DomainError("forms on different bundles");
    int trunc = std::min(a.truncation(), b.truncation());
    WeylForm<S> r(a.n(), a.ring(), std::max(trunc - 2, 0), a.degree() + b.degree());
    for (auto& [wa, ca] : a.comps())
        for (auto& [wb, cb] : b.comps()) {
            Wedge out;
            int sign;
            if (!wedge_join(wa, wb, out, sign)) continue;
            WeylElement<S> c =
                weyl_commutator_over_ihbar(ca.truncated(trunc), cb.truncated(trunc));
            r.add_comp(out, sign > 0 ? c : -c);
        }
    return r;
}

}  // namespace fedq

#endif
