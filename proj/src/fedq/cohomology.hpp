#ifndef FEDQ_COHOMOLOGY_HPP
#define FEDQ_COHOMOLOGY_HPP

#include <string>
#include <vector>

#include "fedq/equivariance.hpp"

namespace fedq {

// ---- simplicial (Cech-nerve) cohomology -------------------------------------

struct SimplicialComplex {
    int vertices = 0;
    std::vector<std::array<int, 2>> edges;      // sorted pairs
    std::vector<std::array<int, 3>> triangles;  // sorted triples

    void validate() const;

    static SimplicialComplex tetrahedron_boundary();
    static SimplicialComplex torus_minimal();  // the 7-vertex triangulation
    static SimplicialComplex from_triangles(int vertices,
                                            const std::vector<std::array<int, 3>>& tris);
};

enum class CoeffRing : uint8_t { Z, C };

struct CohomologyReport {
    // per degree 0..2
    std::array<int, 3> free_rank{0, 0, 0};
    std::array<std::vector<long>, 3> torsion;  // invariant factors > 1 (Z only)
};

CohomologyReport simplicial_cohomology(const SimplicialComplex& K, CoeffRing coeff);

// ---- periods and T^1 classes ------------------------------------------------

// Periods of a closed 1-form over the 2n coordinate cycles of the torus, per
// hbar order, reported in units of 2 pi (the period over cycle i is
// 2 pi * value[i]). A form is integral at hbar^0 when those values lie in iZ,
// i.e. the honest periods lie in 2 pi i Z.
template <class S>
struct PeriodReport {
    std::map<int, std::vector<S>> values;  // hbar order -> per-cycle value
    bool integral_h0 = true;

    friend bool operator==(const PeriodReport& a, const PeriodReport& b) {
        if (a.integral_h0 != b.integral_h0) return false;
        auto nonzero = [](const std::map<int, std::vector<S>>& m) {
            std::map<int, std::vector<S>> out;
            for (auto& [k, v] : m)
                for (auto& c : v)
                    if (!c.is_zero()) {
                        out[k] = v;
                        break;
                    }
            return out;
        };
        return nonzero(a.values) == nonzero(b.values);
    }
};

template <class S>
PeriodReport<S> period_map(const ScalarForm<S>& beta) {
    if (beta.ring() != Ring::Torus) throw DomainError("periods are defined on the torus");
    if (beta.degree() != 1) throw DomainError("periods act on 1-forms");
    if (!is_closed(beta)) throw DomainError("form is not closed");
    PeriodReport<S> out;
    int d = beta.dim();
    for (int k = 0; k <= beta.order(); ++k) {
        std::vector<S> row(d, ScalarOps<S>::zero());
        bool any = false;
        for (int i = 0; i < d; ++i) {
            FnSeries<S> comp = beta.comp(Wedge{i});
            row[i] = comp.at(k).constant_part();  // only the m = 0 mode survives
            any = any || !row[i].is_zero();
        }
        if (any) out.values[k] = row;
    }
    if (out.values.count(0)) {
        for (auto& c : out.values[0]) {
            long m;
            if (!ScalarOps<S>::as_i_times_integer(c, m)) out.integral_h0 = false;
        }
    }
    return out;
}

// Residue class of a scalar modulo i Z: subtracts i*floor(Im c).
template <class S>
S mod_i_lattice(const S& c);

template <>
inline RationalComplex mod_i_lattice(const RationalComplex& c) {
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), c.im().get_num().get_mpz_t(), c.im().get_den().get_mpz_t());
    return RationalComplex(c.re(), c.im() - mpq_class(fl));
}
template <>
inline ApproxComplex mod_i_lattice(const ApproxComplex& c) {
    double im = c.value().imag();
    return ApproxComplex(c.value().real(), im - std::floor(im + ApproxComplex::kEps));
}

// Class descriptor in H^1(M,C)/H^1(M,Z) + hbar H^1(M)[[hbar]]: the hbar^0
// periods reduced modulo the integral lattice, higher orders verbatim.
template <class S>
struct T1Class {
    std::vector<S> h0;                     // reduced modulo i Z, one per cycle
    std::map<int, std::vector<S>> tails;   // hbar order >= 1 -> per-cycle value

    friend bool operator==(const T1Class& a, const T1Class& b) {
        if (a.h0.size() != b.h0.size()) return false;
        for (size_t i = 0; i < a.h0.size(); ++i)
            if (a.h0[i] != b.h0[i]) return false;
        auto nonzero = [](const std::map<int, std::vector<S>>& m) {
            std::map<int, std::vector<S>> out;
            for (auto& [k, v] : m)
                for (auto& c : v)
                    if (!c.is_zero()) {
                        out[k] = v;
                        break;
                    }
            return out;
        };
        return nonzero(a.tails) == nonzero(b.tails);
    }
    friend bool operator!=(const T1Class& a, const T1Class& b) { return !(a == b); }
};

template <class S>
T1Class<S> t1_class(const GnablaElement<S>& g) {
    PeriodReport<S> periods = period_map(g.beta);
    T1Class<S> out;
    int d = g.beta.dim();
    out.h0.assign(d, ScalarOps<S>::zero());
    if (periods.values.count(0))
        for (int i = 0; i < d; ++i) out.h0[i] = mod_i_lattice(periods.values[0][i]);
    for (auto& [k, v] : periods.values)
        if (k >= 1) out.tails[k] = v;
    return out;
}

// ---- fixed-point invariants for Z-actions -----------------------------------

// Evaluates the hbar^0 part of an invertible quantized function at a fixed
// point of the generator. Coboundary-invariant because evaluation at hbar^0
// is a character of the star product there.
template <class S>
S fixed_point_invariant(const AffineSymplecto<S>& gamma, const std::vector<S>& point,
                        const FnSeries<S>& g) {
    std::vector<S> image = gamma.ring() == Ring::Torus ? gamma.apply_phases(point)
                                                       : gamma.apply(point);
    for (size_t i = 0; i < point.size(); ++i)
        if (image[i] != point[i]) throw DomainError("the point is not fixed by the generator");
    S value = g.at(0).eval(point);
    if (value.is_zero()) throw DomainError("cocycle is not invertible at hbar^0");
    return value;
}

// ---- separating report for H^1(Z, -) ----------------------------------------

// Twisted-conjugacy invariants of a candidate cocycle for a one-generator
// action: the T^1 class of its log-derivative (torus) and the fixed-point
// value (when the generator has the supplied fixed point). Identical reports
// are inconclusive; distinct reports certify distinct classes.
template <class S>
struct ZH1Report {
    bool has_t1 = false;
    T1Class<S> t1;
    bool has_fixed_point = false;
    S fixed_value = ScalarOps<S>::zero();

    friend bool operator==(const ZH1Report& a, const ZH1Report& b) {
        if (a.has_t1 != b.has_t1 || a.has_fixed_point != b.has_fixed_point) return false;
        if (a.has_t1 && !(a.t1 == b.t1)) return false;
        if (a.has_fixed_point && a.fixed_value != b.fixed_value) return false;
        return true;
    }
    friend bool operator!=(const ZH1Report& a, const ZH1Report& b) { return !(a == b); }
};

template <class S>
ZH1Report<S> z_h1_invariants(const FedosovConnection<S>& F, const AffineSymplecto<S>& gamma,
                             const GnablaElement<S>& g,
                             const std::vector<S>* fixed_point = nullptr) {
    ZH1Report<S> out;
    if (F.ring() == Ring::Torus) {
        out.has_t1 = true;
        out.t1 = t1_class(g);
    }
    if (fixed_point) {
        out.has_fixed_point = true;
        out.fixed_value = fixed_point_invariant(gamma, *fixed_point, g.U.sigma());
    }
    return out;
}

// ---- group cohomology: central extensions and the connecting map -------------

// A finite group by its multiplication table.
struct FiniteGroup {
    std::vector<std::vector<int>> table;
    int identity = 0;

    int size() const { return (int)table.size(); }
    int mul(int a, int b) const { return table.at(a).at(b); }
    int inv(int a) const;
    void validate() const;

    static FiniteGroup cyclic(int m);
};

// Central extension 0 -> A -> E -> G -> 1 with a Gamma-action on E (and the
// induced ones on A and G). Gamma is finite (table) or Z (single
// automorphism).
struct CentralExtension {
    FiniteGroup A, E, G;
    std::vector<int> inject;   // A -> E
    std::vector<int> project;  // E -> G
    void validate() const;
};

struct GammaOnExtension {
    bool is_z = false;
    FiniteGroup gamma;                        // ignored when is_z
    std::vector<std::vector<int>> action_E;   // per gamma element (or single for Z): E -> E
    void validate(const CentralExtension& ext) const;
    int size() const { return is_z ? 1 : gamma.size(); }
    int act(int gidx, int e) const { return action_E.at(gidx).at(e); }
};

struct H2ClassReport {
    bool trivial = false;
    std::vector<std::vector<int>> cocycle;  // (gamma, mu) -> A (empty for Z)
    std::string note;
};

// The connecting map H^1(Gamma, G) -> H^2(Gamma, A) for a central extension:
// lift the 1-cocycle eta through the projection, take the failure of the lift
// to be a cocycle, certify the 2-cocycle identity, and decide triviality by
// exhaustive coboundary enumeration.
H2ClassReport connecting_map_H2(const CentralExtension& ext, const GammaOnExtension& act,
                                const std::vector<int>& eta);

}  // namespace fedq

#endif
