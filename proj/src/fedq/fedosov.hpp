#ifndef FEDQ_FEDOSOV_HPP
#define FEDQ_FEDOSOV_HPP

#include <set>

#include "fedq/geometry.hpp"

namespace fedq {

// nabla0: the symplectic connection acting on Weyl-valued forms,
//   nabla0 s = d_x s - dx^j ^ Gamma^k_{ji} y^i d/dy^k s.
// Agrees with the exterior derivative on y-free coefficients and is a graded
// derivation of the fiber product for torsion-free symplectic input.
template <class S>
WeylForm<S> nabla0(const Christoffel<S>& c, const WeylForm<S>& s, bool check = true) {
    if (check) {
        auto rep = check_symplectic_connection(c);
        if (!rep.torsion_free || !rep.symplectic)
            throw DomainError("nabla0 needs a torsion-free symplectic connection");
    }
    WeylForm<S> out = d_x(s);
    if (c.is_zero()) return out;
    const int d = 2 * s.n();
    for (auto& [w, a] : s.comps()) {
        for (int j = 0; j < d; ++j) {
            Wedge target;
            int sign;
            if (!wedge_insert(j, w, target, sign)) continue;
            WeylElement<S> acc(s.n(), s.ring(), s.truncation());
            for (int k = 0; k < d; ++k) {
                WeylElement<S> da = detail::y_derivative(a, k);
                if (da.is_zero()) continue;
                for (int i = 0; i < d; ++i) {
                    BaseFunction<S> gamma = c.at(k, j, i);
                    if (gamma.is_zero()) continue;
                    WeylElement<S> piece = detail::y_multiply(da, i);
                    WeylElement<S> scaled_piece(s.n(), s.ring(), s.truncation());
                    for (auto& [key, f] : piece.terms())
                        scaled_piece.add_term(key, f * gamma);
                    acc += scaled_piece;
                }
            }
            if (acc.is_zero()) continue;
            out.add_comp(target, sign > 0 ? -acc : acc);
        }
    }
    return out;
}

// Solves for the y-quadratic form Q with (1/i hbar)[Q, y^m] = T^m given the
// y-linear forms T^m; used to express both the curvature of nabla0 and
// differences of connections as inner derivations. Q_{al} = sum_m J_am T^m_l
// and must come out symmetric.
template <class S>
WeylForm<S> quadratic_from_linear_action(const std::vector<WeylForm<S>>& T, int n, Ring ring,
                                         int trunc, int p) {
    const int d = 2 * n;
    WeylForm<S> out(n, ring, trunc, p);
    std::set<Wedge> wedges;
    for (auto& t : T)
        for (auto& [w, a] : t.comps()) wedges.insert(w);
    for (auto& w : wedges) {
        // f[m][l] = coefficient of y^l in T^m at this wedge
        std::vector<std::vector<BaseFunction<S>>> f(
            d, std::vector<BaseFunction<S>>(d, BaseFunction<S>(ring, d)));
        for (int m = 0; m < d; ++m) {
            WeylElement<S> tw = T[m].comp(w);
            for (auto& [key, g] : tw.terms()) {
                if (key.k != 0 || key.y_degree() != 1)
                    throw ConsistencyError("linear action has non-y-linear content");
                for (int l = 0; l < d; ++l)
                    if (key.alpha[l] == 1) f[m][l] += g;
            }
        }
        // Q_{al} = sum_m J[a][m] f[m][l]
        std::vector<std::vector<BaseFunction<S>>> Q(
            d, std::vector<BaseFunction<S>>(d, BaseFunction<S>(ring, d)));
        for (int a = 0; a < d; ++a) {
            if (a < n)
                Q[a] = f[n + a];
            else {
                Q[a] = f[a - n];
                for (auto& e : Q[a]) e = -e;
            }
        }
        for (int a = 0; a < d; ++a)
            for (int l = a + 1; l < d; ++l)
                if (Q[a][l] != Q[l][a])
                    throw ConsistencyError(
                        "connection difference is not an inner fiber derivation");
        WeylElement<S> quad(n, ring, trunc);
        S half = ScalarOps<S>::one() / ScalarOps<S>::integer(2);
        for (int a = 0; a < d; ++a)
            for (int l = 0; l < d; ++l) {
                if (Q[a][l].is_zero()) continue;
                IdxVec alpha(d, 0);
                alpha[a] += 1;
                alpha[l] += 1;
                quad.add_term(WeylKey{0, alpha}, Q[a][l].scaled(half));
            }
        out.add_comp(w, quad);
    }
    return out;
}

// The curvature quadratic R of nabla0: the 2-form with y-quadratic entries
// satisfying nabla0^2 = (1/i hbar)[R, -].
template <class S>
WeylForm<S> curvature_quadratic(const Christoffel<S>& c, int n, Ring ring, int trunc) {
    std::vector<WeylForm<S>> T;
    for (int m = 0; m < 2 * n; ++m) {
        WeylForm<S> ym = WeylForm<S>::of_element(WeylElement<S>::generator(n, ring, trunc, m));
        T.push_back(nabla0(c, nabla0(c, ym, false), false));
    }
    return quadratic_from_linear_action(T, n, ring, trunc, 2);
}

// Divides every monomial by i hbar; total degrees drop by 2 and the hbar
// power may go negative while the degree stays >= 0.
template <class S>
WeylElement<S> divide_by_ihbar(const WeylElement<S>& a) {
    WeylElement<S> out(a.n(), a.ring(), std::max(a.truncation() - 2, 0));
    for (auto& [key, f] : a.terms())
        out.add_term(WeylKey{key.k - 1, key.alpha}, f.scaled(ScalarOps<S>::one() / ScalarOps<S>::i()));
    return out;
}

template <class S>
WeylForm<S> divide_by_ihbar(const WeylForm<S>& s) {
    WeylForm<S> out(s.n(), s.ring(), std::max(s.truncation() - 2, 0), s.degree());
    for (auto& [w, a] : s.comps()) out.add_comp(w, divide_by_ihbar(a));
    return out;
}

// Commutator over i hbar with an explicit output truncation; the engine uses
// this where the degree-by-degree analysis guarantees exactness beyond the
// conservative stamp.
template <class S>
WeylForm<S> comm_over_ihbar_keep(const WeylForm<S>& a, const WeylForm<S>& b, int keep) {
    WeylForm<S> r(a.n(), a.ring(), keep, a.degree() + b.degree());
    for (auto& [wa, ca] : a.comps())
        for (auto& [wb, cb] : b.comps()) {
            Wedge out;
            int sign;
            if (!wedge_join(wa, wb, out, sign)) continue;
            WeylElement<S> lifted_a(a.n(), a.ring(), keep + 2);
            for (auto& [key, f] : ca.terms()) lifted_a.add_term(key, f);
            WeylElement<S> lifted_b(b.n(), b.ring(), keep + 2);
            for (auto& [key, f] : cb.terms()) lifted_b.add_term(key, f);
            WeylElement<S> c = weyl_commutator_over_ihbar(lifted_a, lifted_b);
            r.add_comp(out, sign > 0 ? c : -c);
        }
    return r;
}

// A built Fedosov connection: nabla = -delta + nabla0 + (1/i hbar)[r, -].
template <class S>
struct FedosovConnection {
    ChartManifold manifold;
    Christoffel<S> gamma;
    ScalarForm<S> theta;  // prescribed curvature representative
    int trunc = 0;
    WeylForm<S> r;        // recursion output, 1-form, monomial degrees >= 3
    WeylForm<S> rquad;    // curvature quadratic of gamma

    int n() const { return manifold.n; }
    Ring ring() const { return manifold.kind; }
    int reliable_order() const { return trunc / 2; }

    WeylElement<S> zero_elt() const { return WeylElement<S>::zero(n(), ring(), trunc); }
    WeylElement<S> one_elt() const { return WeylElement<S>::one(n(), ring(), trunc); }

    // nabla on a p-form; the result is reliable through total degree
    // trunc - 2 because of the fiber commutator with r.
    WeylForm<S> nabla(const WeylForm<S>& s) const {
        WeylForm<S> out = -delta(s) + nabla0(gamma, s, false);
        if (!r.is_zero()) out += comm_over_ihbar_keep(r, s, s.truncation());
        return out.truncated(std::max(s.truncation() - 2, 0));
    }
    WeylForm<S> nabla_elt(const WeylElement<S>& a) const {
        return nabla(WeylForm<S>::of_element(a));
    }
};

// Residual of the defining equation
//   delta r = R + nabla0 r + (1/2)(1/i hbar)[r, r] - i hbar theta,
// which must vanish in every total degree <= trunc - 1.
template <class S>
WeylForm<S> fedosov_residual(const FedosovConnection<S>& F) {
    const int D = F.trunc;
    WeylForm<S> theta_w = F.theta.shifted(1).as_weyl(F.n(), D).scaled(ScalarOps<S>::i());
    WeylForm<S> rhs = F.rquad + nabla0(F.gamma, F.r, false) - theta_w;
    rhs += comm_over_ihbar_keep(F.r, F.r, D).scaled(ScalarOps<S>::ratio(1, 2));
    return delta(F.r) - rhs;
}

// Builds the Fedosov connection with prescribed curvature class representative
// theta by the delta^{-1} fixed-point sweep, normalized by delta^{-1} r = 0.
template <class S>
FedosovConnection<S> build_fedosov(const ChartManifold& m, const Christoffel<S>& gamma,
                                   const ScalarForm<S>& theta, int trunc) {
    if (trunc < 2 || trunc % 2 != 0) throw DomainError("truncation degree must be even and >= 2");
    if (theta.degree() != 2) throw DomainError("theta must be a 2-form");
    if (theta.ring() != m.kind || theta.dim() != m.dim())
        throw DomainError("theta lives on the wrong manifold");
    if (gamma.dim() != m.dim() || (!gamma.is_zero() && gamma.ring() != m.kind))
        throw DomainError("connection lives on the wrong manifold");
    auto rep = check_symplectic_connection(gamma);
    if (!rep.torsion_free)
        throw DomainError("connection has torsion: first violating triple (" +
                          std::to_string(rep.violating[0]) + "," +
                          std::to_string(rep.violating[1]) + "," +
                          std::to_string(rep.violating[2]) + ")");
    if (!rep.symplectic)
        throw DomainError("connection is not symplectic: first violating triple (" +
                          std::to_string(rep.violating[0]) + "," +
                          std::to_string(rep.violating[1]) + "," +
                          std::to_string(rep.violating[2]) + ")");
    ScalarForm<S> dtheta = exterior_d(theta);
    if (!dtheta.is_zero_through(theta.order()))
        throw DomainError("theta is not closed");

    FedosovConnection<S> F;
    F.manifold = m;
    F.gamma = gamma;
    F.theta = theta;
    F.trunc = trunc;
    F.rquad = curvature_quadratic(gamma, m.n, m.kind, trunc);
    F.r = WeylForm<S>(m.n, m.kind, trunc, 1);

    WeylForm<S> theta_w = theta.shifted(1).as_weyl(m.n, trunc).scaled(ScalarOps<S>::i());
    for (int d = 3; d <= trunc; ++d) {
        WeylForm<S> rhs = F.rquad + nabla0(gamma, F.r, false) - theta_w;
        rhs += comm_over_ihbar_keep(F.r, F.r, trunc).scaled(ScalarOps<S>::ratio(1, 2));
        F.r += delta_inv(rhs.graded_part(d - 1));
    }

    if (!delta_inv(F.r).is_zero())
        throw ConsistencyError("normalization delta^{-1} r = 0 failed");
    if (!fedosov_residual(F).is_zero_in_degrees_up_to(trunc - 1))
        throw ConsistencyError("fedosov recursion residual is nonzero");
    return F;
}

struct CurvatureReport {
    bool central = false;           // Omega has no y-dependence up to truncation
    bool prescribed = false;        // the central value is omega/(2 i hbar) + theta
    double residual_norm = 0.0;
};

// Splits the curvature defect Omega - omega/(2 i hbar) - theta into its
// y-dependent part (centrality) and central part (prescribed value), both of
// which must vanish in degrees <= trunc - 1.
template <class S>
CurvatureReport curvature_report(const FedosovConnection<S>& F) {
    WeylForm<S> res = fedosov_residual(F);
    WeylForm<S> ypart(F.n(), F.ring(), F.trunc, 2), cpart(F.n(), F.ring(), F.trunc, 2);
    for (auto& [w, a] : res.comps()) {
        WeylElement<S> y(F.n(), F.ring(), F.trunc), c(F.n(), F.ring(), F.trunc);
        for (auto& [key, g] : a.terms())
            (key.y_degree() == 0 ? c : y).add_term(key, g);
        ypart.add_comp(w, y);
        cpart.add_comp(w, c);
    }
    CurvatureReport rep;
    rep.central = ypart.is_zero_in_degrees_up_to(F.trunc - 1);
    rep.prescribed = cpart.is_zero_in_degrees_up_to(F.trunc - 1);
    rep.residual_norm = res.sup_norm();
    return rep;
}

// Residual of flatness on a candidate section: nabla t computed with enough
// head-room to be exact through total degree trunc - 1.
template <class S>
WeylForm<S> flat_residual(const FedosovConnection<S>& F, const WeylElement<S>& t) {
    WeylForm<S> tf = WeylForm<S>::of_element(t);
    WeylForm<S> out = -delta(tf) + nabla0(F.gamma, tf, false);
    if (!F.r.is_zero()) out += comm_over_ihbar_keep(F.r, tf, F.trunc);
    return out;
}

// The flat section through f: the unique tau(f) with sigma(tau(f)) = f and
// nabla tau(f) = 0 up to truncation, built by the contracting homotopy.
template <class S>
WeylElement<S> tau(const FedosovConnection<S>& F, const FnSeries<S>& f) {
    if (f.ring() != F.ring() || f.dim() != 2 * F.n())
        throw DomainError("function lives on the wrong manifold");
    const int D = F.trunc;
    WeylElement<S> t = WeylElement<S>::from_series(f, F.n(), D);
    for (int d = 1; d <= D; ++d) {
        WeylForm<S> tf = WeylForm<S>::of_element(t);
        WeylForm<S> rhs = nabla0(F.gamma, tf, false);
        if (!F.r.is_zero()) rhs += comm_over_ihbar_keep(F.r, tf, D);
        t += delta_inv(rhs.graded_part(d - 1)).comp(Wedge{});
    }
    return t;
}

template <class S>
FnSeries<S> sigma(const WeylElement<S>& a) {
    return a.sigma();
}

// f * g = sigma(tau(f) o tau(g)), reliable through hbar order trunc/2.
template <class S>
FnSeries<S> star(const FedosovConnection<S>& F, const FnSeries<S>& f, const FnSeries<S>& g) {
    FnSeries<S> out = (tau(F, f) * tau(F, g)).sigma();
    out.restrict_order(F.reliable_order());
    return out;
}

// The J-Poisson bracket {f,g} = sum_i (d_i f d_{n+i} g - d_{n+i} f d_i g).
template <class S>
BaseFunction<S> poisson_bracket(const BaseFunction<S>& f, const BaseFunction<S>& g, int n) {
    BaseFunction<S> out(f.ring(), f.dim());
    for (int i = 0; i < n; ++i) {
        out += f.derivative(i) * g.derivative(n + i);
        out -= f.derivative(n + i) * g.derivative(i);
    }
    return out;
}

template <class S>
FnSeries<S> poisson_bracket(const FnSeries<S>& f, const FnSeries<S>& g, int n) {
    FnSeries<S> out(f.ring(), f.dim(), std::min(f.order(), g.order()));
    for (auto& [kf, cf] : f.coeffs())
        for (auto& [kg, cg] : g.coeffs()) {
            if (kf + kg > out.order()) continue;
            out.add(kf + kg, poisson_bracket(cf, cg, n));
        }
    return out;
}

// Star-multiplicative inverse, solved order by order in hbar; the hbar^0 part
// must be a unit of the coefficient ring.
template <class S>
FnSeries<S> star_inverse(const FedosovConnection<S>& F, const FnSeries<S>& f) {
    int N = F.reliable_order();
    BaseFunction<S> lead = f.at(0), lead_inv(f.ring(), f.dim());
    if (!base_unit_inverse(lead, lead_inv))
        throw DomainError("star inverse needs an invertible hbar^0 part");
    FnSeries<S> g = FnSeries<S>::of(lead_inv, N);
    FnSeries<S> one = FnSeries<S>::constant(f.ring(), f.dim(), N, ScalarOps<S>::one());
    for (int m = 1; m <= N; ++m) {
        FnSeries<S> res = star(F, f, g) - one;
        BaseFunction<S> rm = res.at(m);
        if (rm.is_zero()) continue;
        g.add(m, -(rm * lead_inv));
    }
    return g;
}

}  // namespace fedq

#endif
