#ifndef FEDQ_EQUIVARIANCE_HPP
#define FEDQ_EQUIVARIANCE_HPP

#include <string>

#include "fedq/fedosov.hpp"

namespace fedq {

// A certified element of the equivariance group of a Fedosov connection:
// an invertible section U whose logarithmic derivative U^{-1} nabla U is a
// central (y-free) 1-form, cached as beta.
template <class S>
struct GnablaElement {
    WeylElement<S> U;
    WeylElement<S> U_inv;
    ScalarForm<S> beta;  // closed 1-form series, the image under the log-derivative map
};

template <class S>
struct MembershipResult {
    bool member = false;
    GnablaElement<S> elt;
    double residual_norm = 0.0;  // sup norm of the y-dependent part
    WeylKey first_noncentral;    // witness monomial on rejection
    Wedge first_wedge;
};

// Splits a Weyl form into its y-free and y-dependent parts.
template <class S>
std::pair<WeylForm<S>, WeylForm<S>> central_split(const WeylForm<S>& s) {
    WeylForm<S> cpart(s.n(), s.ring(), s.truncation(), s.degree());
    WeylForm<S> ypart(s.n(), s.ring(), s.truncation(), s.degree());
    for (auto& [w, a] : s.comps()) {
        WeylElement<S> c(s.n(), s.ring(), s.truncation()), y(s.n(), s.ring(), s.truncation());
        for (auto& [key, f] : a.terms()) (key.y_degree() == 0 ? c : y).add_term(key, f);
        cpart.add_comp(w, c);
        ypart.add_comp(w, y);
    }
    return {cpart, ypart};
}

// Tests U for membership: the y-dependent part of U^{-1} nabla U must vanish
// up to truncation. On acceptance beta = U^{-1} nabla U is cached, and its
// closedness is certified.
template <class S>
MembershipResult<S> gnabla_membership(const FedosovConnection<S>& F, const WeylElement<S>& U) {
    MembershipResult<S> out;
    WeylElement<S> U_inv = weyl_inverse(U);
    WeylForm<S> nU = F.nabla_elt(U);
    WeylForm<S> beta_form = wedge_mul(WeylForm<S>::of_element(U_inv), nU);
    auto [cpart, ypart] = central_split(beta_form);
    if (!ypart.is_zero()) {
        out.member = false;
        out.residual_norm = ypart.sup_norm();
        for (auto& [w, a] : ypart.comps()) {
            out.first_wedge = w;
            out.first_noncentral = a.terms().begin()->first;
            break;
        }
        return out;
    }
    out.member = true;
    out.elt.U = U;
    out.elt.U_inv = U_inv;
    out.elt.beta = ScalarForm<S>::from_weyl_central(cpart, std::max(F.trunc - 2, 0) / 2);
    if (!is_closed(out.elt.beta))
        throw ConsistencyError("log-derivative of a member is not closed");
    return out;
}

// The log-derivative map on certified members.
template <class S>
ScalarForm<S> dmap(const GnablaElement<S>& g) {
    return g.beta;
}

// e^alpha for a central series alpha with vanishing hbar^0 part; a member
// with dmap = d alpha.
template <class S>
GnablaElement<S> central_witness(const FedosovConnection<S>& F, const FnSeries<S>& alpha) {
    if (!alpha.at(0).is_zero())
        throw DomainError("central witness needs alpha with zero hbar^0 part");
    WeylElement<S> a = WeylElement<S>::from_series(alpha, F.n(), F.trunc);
    auto res = gnabla_membership(F, weyl_exp(a));
    if (!res.member) throw ConsistencyError("central exponential failed membership");
    return res.elt;
}

// A unit of the coefficient ring (nonzero constant, or c e^{i m.x} on the
// torus) as a member; dmap = u^{-1} du.
template <class S>
GnablaElement<S> unit_witness(const FedosovConnection<S>& F, const BaseFunction<S>& u) {
    BaseFunction<S> u_inv(u.ring(), u.dim());
    if (!base_unit_inverse(u, u_inv)) throw DomainError("not a unit of the coefficient ring");
    auto res = gnabla_membership(F, WeylElement<S>::from_base(u, F.n(), F.trunc));
    if (!res.member) throw ConsistencyError("central unit failed membership");
    return res.elt;
}

// On the flat torus, e^{-c.y} is a globally defined member whose
// log-derivative is exactly the constant-coefficient 1-form sum_i c_i dx^i.
template <class S>
GnablaElement<S> harmonic_witness(const FedosovConnection<S>& F, const std::vector<S>& c) {
    if (F.ring() != Ring::Torus)
        throw DomainError("harmonic witness is only available on the torus");
    if (!F.gamma.is_zero() || !F.r.is_zero())
        throw DomainError("harmonic witness needs flat connection data");
    if ((int)c.size() != 2 * F.n()) throw DomainError("covector has wrong length");
    WeylElement<S> a(F.n(), F.ring(), F.trunc);
    for (int i = 0; i < 2 * F.n(); ++i) {
        if (c[i].is_zero()) continue;
        IdxVec alpha(2 * F.n(), 0);
        alpha[i] = 1;
        a.add_term(WeylKey{0, alpha},
                   BaseFunction<S>::constant(F.ring(), 2 * F.n(), -c[i]));
    }
    auto res = gnabla_membership(F, weyl_exp(a));
    if (!res.member) throw ConsistencyError("harmonic witness failed membership");
    ScalarForm<S> expect(F.ring(), 2 * F.n(), 1, res.elt.beta.order());
    for (int i = 0; i < 2 * F.n(); ++i)
        expect.add_comp(Wedge{i},
                        FnSeries<S>::constant(F.ring(), 2 * F.n(), expect.order(), c[i]));
    if (!(res.elt.beta == expect))
        throw ConsistencyError("harmonic witness log-derivative mismatch");
    return res.elt;
}

// Product and inverse inside the group; membership is re-certified.
template <class S>
GnablaElement<S> gnabla_mul(const FedosovConnection<S>& F, const GnablaElement<S>& a,
                            const GnablaElement<S>& b) {
    auto res = gnabla_membership(F, a.U * b.U);
    if (!res.member) throw ConsistencyError("product of members failed membership");
    return res.elt;
}
template <class S>
GnablaElement<S> gnabla_inverse(const FedosovConnection<S>& F, const GnablaElement<S>& a) {
    auto res = gnabla_membership(F, a.U_inv);
    if (!res.member) throw ConsistencyError("inverse of a member failed membership");
    return res.elt;
}

// Two members represent the same class modulo central invertibles iff their
// quotient has no y-dependence.
template <class S>
bool same_central_class(const GnablaElement<S>& a, const GnablaElement<S>& b) {
    return (a.U * b.U_inv).is_central();
}

// Normal form modulo central units: divides out the (k, alpha=0) series when
// its leading part is a unit; returns U unchanged otherwise.
template <class S>
WeylElement<S> central_normal_form(const WeylElement<S>& U) {
    FnSeries<S> z = U.sigma();
    BaseFunction<S> lead = z.at(0), lead_inv(z.ring(), z.dim());
    if (!base_unit_inverse(lead, lead_inv)) return U;
    FnSeries<S> z_inv = z.inverse();
    return WeylElement<S>::from_series(z_inv, U.n(), U.truncation()) * U;
}

// ---- lifting symplectomorphisms ---------------------------------------------

template <class S>
struct LiftResult {
    WeylElement<S> U;      // conjugator: Ad U o gamma^* maps source flats to target flats
    WeylElement<S> U_inv;
    double residual_norm = 0.0;  // defect of the transport equation, degrees <= trunc-2
};

// Solves for U with U^{-1} nabla U = (1/i hbar) w - eta, where w collects the
// difference between the gamma-pullback of the source connection data and the
// target data, and eta is a supplied primitive of gamma^*theta' - theta.
// Source and target default to the same connection.
template <class S>
LiftResult<S> solve_lift(const FedosovConnection<S>& target, const AffineSymplecto<S>& gamma,
                         const ScalarForm<S>* primitive = nullptr,
                         const FedosovConnection<S>* source_ptr = nullptr) {
    const FedosovConnection<S>& source = source_ptr ? *source_ptr : target;
    if (source.ring() != target.ring() || source.n() != target.n() ||
        source.trunc != target.trunc)
        throw DomainError("lift needs connections on the same bundle and truncation");
    if (gamma.ring() != target.ring() || gamma.dim() != 2 * target.n())
        throw DomainError("symplectomorphism acts on the wrong manifold");
    const int D = target.trunc;
    const int n = target.n();
    const Ring ring = target.ring();

    Christoffel<S> gamma_conn = pullback(gamma, source.gamma);
    WeylForm<S> r_pulled = pullback(gamma, source.r);
    ScalarForm<S> theta_pulled = pullback(gamma, source.theta);

    // class preservation: gamma^* theta' - theta must be d(primitive)
    ScalarForm<S> diff = theta_pulled - target.theta;
    ScalarForm<S> eta(ring, 2 * n, 1, diff.order());
    if (primitive) {
        eta = *primitive;
        if (eta.degree() != 1) throw DomainError("primitive must be a 1-form");
        ScalarForm<S> check = exterior_d(eta) - diff;
        if (!check.is_zero_through(std::min(eta.order(), diff.order())))
            throw DomainError("primitive does not satisfy d(eta) = gamma^*theta - theta");
    } else if (!diff.is_zero_through(diff.order())) {
        throw DomainError(
            "gamma does not preserve the curvature representative; supply a primitive");
    }

    // w with (1/i hbar)[w, -] = (pulled nabla) - (target nabla)
    std::vector<WeylForm<S>> V;
    for (int m = 0; m < 2 * n; ++m) {
        WeylForm<S> ym = WeylForm<S>::of_element(WeylElement<S>::generator(n, ring, D, m));
        V.push_back(nabla0(gamma_conn, ym, false) - nabla0(target.gamma, ym, false));
    }
    WeylForm<S> w = quadratic_from_linear_action(V, n, ring, D, 1);
    w += r_pulled - target.r;

    WeylForm<S> rhs_const = divide_by_ihbar(w);  // may carry negative hbar powers
    rhs_const -= eta.as_weyl(n, std::max(D - 2, 0));

    // sweep: U = 1 + delta_inv(nabla0 U + (1/i hbar)[r, U] - U (rhs_const))
    WeylElement<S> U = target.one_elt();
    for (int d = 1; d <= D; ++d) {
        WeylForm<S> uf = WeylForm<S>::of_element(U);
        WeylForm<S> rhs = nabla0(target.gamma, uf, false);
        if (!target.r.is_zero()) rhs += comm_over_ihbar_keep(target.r, uf, D);
        WeylForm<S> prod(n, ring, D, 1);
        for (auto& [w1, coeff] : rhs_const.comps()) {
            WeylElement<S> lifted(n, ring, D);
            for (auto& [key, f] : coeff.terms()) lifted.add_term(key, f);
            prod.add_comp(w1, U * lifted);
        }
        rhs -= prod;
        U += delta_inv(rhs.graded_part(d - 1)).comp(Wedge{});
    }

    // residual of the full transport equation, reliable through D-2
    LiftResult<S> out;
    out.U = U;
    out.U_inv = weyl_inverse(U);
    WeylForm<S> resid = -delta(WeylForm<S>::of_element(U)) +
                        nabla0(target.gamma, WeylForm<S>::of_element(U), false);
    if (!target.r.is_zero())
        resid += comm_over_ihbar_keep(target.r, WeylForm<S>::of_element(U), D);
    for (auto& [w1, coeff] : rhs_const.comps()) {
        WeylElement<S> lifted(n, ring, D);
        for (auto& [key, f] : coeff.terms()) lifted.add_term(key, f);
        resid.add_comp(w1, -(U * lifted));
    }
    if (!resid.is_zero_in_degrees_up_to(D - 2)) {
        out.residual_norm = resid.sup_norm();
        throw ConsistencyError("lift transport equation has nonzero residual");
    }
    return out;
}

// The induced map on quantized functions, T(f) = sigma(U gamma^*(tau'(f)) U^{-1}).
template <class S>
FnSeries<S> lift_apply(const FedosovConnection<S>& target, const FedosovConnection<S>& source,
                       const AffineSymplecto<S>& gamma, const LiftResult<S>& lift,
                       const FnSeries<S>& f) {
    WeylElement<S> t = pullback(gamma, tau(source, f));
    FnSeries<S> out = (lift.U * t * lift.U_inv).sigma();
    out.restrict_order(target.reliable_order());
    return out;
}

// ---- extensions of group actions --------------------------------------------

// Candidate extension A_gamma = Ad U_gamma o gamma^*: one lift per element
// (finite groups) or per generator (Z^k).
template <class S>
struct ExtensionAssignment {
    const FedosovConnection<S>* F = nullptr;
    GroupAction<S> action;
    std::vector<WeylElement<S>> lifts;

    WeylElement<S> apply(int idx, const WeylElement<S>& s) const {
        return lifts[idx] * pullback(action.map_of(idx), s) * weyl_inverse(lifts[idx]);
    }
};

// All lifts equal to 1.
template <class S>
ExtensionAssignment<S> trivial_assignment(const FedosovConnection<S>& F,
                                          const GroupAction<S>& act) {
    ExtensionAssignment<S> e;
    e.F = &F;
    e.action = act;
    int count = act.kind() == GroupKind::Finite ? act.size() : act.rank();
    e.lifts.assign(count, F.one_elt());
    return e;
}

// Extends generator lifts to the whole finite group along breadth-first
// normal forms with the composition rule U_{g o e} = U_e o e^*(U_g).
template <class S>
ExtensionAssignment<S> extend_from_generators(const FedosovConnection<S>& F,
                                              const GroupAction<S>& act,
                                              const std::vector<int>& gen_idx,
                                              const std::vector<WeylElement<S>>& gen_lifts) {
    if (act.kind() != GroupKind::Finite)
        throw DomainError("normal-form extension applies to finite groups");
    ExtensionAssignment<S> e;
    e.F = &F;
    e.action = act;
    int m = act.size();
    e.lifts.assign(m, F.zero_elt());
    std::vector<bool> known(m, false);
    e.lifts[act.identity_idx()] = F.one_elt();
    known[act.identity_idx()] = true;
    bool progress = true;
    while (progress) {
        progress = false;
        for (int b = 0; b < m; ++b) {
            if (!known[b]) continue;
            for (size_t gi = 0; gi < gen_idx.size(); ++gi) {
                int g = gen_idx[gi];
                int target = act.compose_idx(g, b);
                if (known[target]) continue;
                e.lifts[target] = e.lifts[b] * pullback(act.map_of(b), gen_lifts[gi]);
                known[target] = true;
                progress = true;
            }
        }
    }
    for (int b = 0; b < m; ++b)
        if (!known[b]) throw DomainError("generators do not generate the group");
    return e;
}

struct CocycleResidual {
    std::string relation;
    bool central = false;
    double residual_norm = 0.0;
    WeylKey first_noncentral;
};

// Residuals of the homomorphism property: for finite groups the quotient
// U_gamma gamma^*(U_mu) U_{mu o gamma}^{-1} over every pair, for Z^k the
// mismatch of the two composition orders per generator pair. Reports only,
// never throws.
template <class S>
std::vector<CocycleResidual> check_cocycle(const ExtensionAssignment<S>& E) {
    std::vector<CocycleResidual> out;
    auto push = [&](const std::string& label, const WeylElement<S>& q) {
        CocycleResidual res;
        res.relation = label;
        WeylElement<S> ypart(q.n(), q.ring(), q.truncation());
        for (auto& [key, f] : q.terms())
            if (key.y_degree() != 0) ypart.add_term(key, f);
        res.central = ypart.is_zero();
        if (!res.central) {
            res.residual_norm = ypart.sup_norm();
            res.first_noncentral = ypart.terms().begin()->first;
        }
        out.push_back(res);
    };
    const GroupAction<S>& act = E.action;
    if (act.kind() == GroupKind::Finite) {
        int m = act.size();
        for (int g = 0; g < m; ++g)
            for (int u = 0; u < m; ++u) {
                WeylElement<S> lhs = E.lifts[g] * pullback(act.map_of(g), E.lifts[u]);
                WeylElement<S> q = lhs * weyl_inverse(E.lifts[act.compose_idx(u, g)]);
                push("(" + std::to_string(g) + "," + std::to_string(u) + ")", q);
            }
    } else {
        int k = act.rank();
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) {
                WeylElement<S> lhs = E.lifts[i] * pullback(act.map_of(i), E.lifts[j]);
                WeylElement<S> rhs = E.lifts[j] * pullback(act.map_of(j), E.lifts[i]);
                WeylElement<S> q = weyl_inverse(rhs) * lhs;
                push("[g" + std::to_string(i) + ",g" + std::to_string(j) + "]", q);
            }
    }
    return out;
}

// Per-generator cocycle valued in members, used to twist an extension.
template <class S>
struct GnablaCocycle {
    std::vector<GnablaElement<S>> values;  // indexed like the assignment's lifts
};

// Twists A by S: B_gamma = Ad S_gamma o A_gamma. The cocycle must satisfy its
// own relation residuals for E's action (centrality), checked first.
template <class S>
ExtensionAssignment<S> twist_action(const GnablaCocycle<S>& Sc,
                                    const ExtensionAssignment<S>& E) {
    if (Sc.values.size() != E.lifts.size())
        throw DomainError("cocycle and assignment have different index sets");
    ExtensionAssignment<S> twisted;
    twisted.F = E.F;
    twisted.action = E.action;
    for (size_t i = 0; i < E.lifts.size(); ++i)
        twisted.lifts.push_back(Sc.values[i].U * E.lifts[i]);
    // S's own cocycle condition: S_gamma A_gamma(S_mu) S_{mu gamma}^{-1} central
    const GroupAction<S>& act = E.action;
    if (act.kind() == GroupKind::Finite) {
        int m = act.size();
        for (int g = 0; g < m; ++g)
            for (int u = 0; u < m; ++u) {
                WeylElement<S> v = Sc.values[g].U * E.apply(g, Sc.values[u].U) *
                                   weyl_inverse(Sc.values[act.compose_idx(u, g)].U);
                if (!v.is_central())
                    throw DomainError("cocycle fails its relation residual at pair (" +
                                      std::to_string(g) + "," + std::to_string(u) + ")");
            }
    } else {
        int k = act.rank();
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) {
                WeylElement<S> lhs = Sc.values[i].U * E.apply(i, Sc.values[j].U);
                WeylElement<S> rhs = Sc.values[j].U * E.apply(j, Sc.values[i].U);
                if (!(weyl_inverse(rhs) * lhs).is_central())
                    throw DomainError("cocycle fails its commutator residual");
            }
    }
    return twisted;
}

}  // namespace fedq

#endif
