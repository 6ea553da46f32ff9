#include "fedq/scenario.hpp"

#include <sstream>

#include "fedq/prng.hpp"

namespace fedq {

namespace {

// deterministic sampler shared by the verification panels
template <class S>
S sample_scalar(Prng& rng) {
    S v = ScalarOps<S>::ratio(rng.range(-4, 4), rng.range(1, 3));
    return v + ScalarOps<S>::i() * ScalarOps<S>::ratio(rng.range(-2, 2), 1);
}

template <class S>
BaseFunction<S> sample_basefn(Prng& rng, Ring ring, int dim, int max_deg, int terms) {
    BaseFunction<S> f(ring, dim);
    for (int t = 0; t < terms; ++t) {
        IdxVec key(dim, 0);
        int budget = (int)rng.below(uint64_t(max_deg + 1));
        for (int b = 0; b < budget; ++b) {
            int j = (int)rng.below(uint64_t(dim));
            key[j] += (ring == Ring::Torus && rng.below(2)) ? -1 : 1;
        }
        f.add_term(key, sample_scalar<S>(rng));
    }
    return f;
}

struct ScenarioError {
    std::string pointer;
    std::string message;
};

template <class S>
class Runner {
  public:
    Runner(const json& j, uint64_t seed, int order) : j_(j), seed_(seed), order_(order) {}

    ScenarioResult run(const std::string& command) {
        if (order_ % 2 != 0 || order_ < 2)
            throw InputError("/order", "truncation order must be even and >= 2");
        report_["command"] = command;
        report_["scalar"] = ScalarOps<S>::name;
        report_["order"] = order_;
        report_["seed"] = seed_;
        int code = 0;
        if (command == "star")
            code = cmd_star();
        else if (command == "fedosov-build")
            code = cmd_build();
        else if (command == "flat-section")
            code = cmd_flat_section();
        else if (command == "lift")
            code = cmd_lift();
        else if (command == "cocycle-check")
            code = cmd_cocycle_check();
        else if (command == "dmap")
            code = cmd_dmap();
        else if (command == "witness")
            code = cmd_witness();
        else if (command == "classify")
            code = cmd_classify();
        else
            throw InputError("/command", "unknown command '" + command + "'");
        return ScenarioResult{report_, code};
    }

  private:
    ChartManifold manifold() const {
        if (!j_.contains("manifold")) throw InputError("/manifold", "missing block");
        return manifold_from_json(j_.at("manifold"), "/manifold");
    }

    FedosovConnection<S> build() const {
        ChartManifold m = manifold();
        Christoffel<S> gamma =
            j_.contains("connection")
                ? christoffel_from_json<S>(j_.at("connection"), m.kind, m.dim(), "/connection")
                : Christoffel<S>(m.kind, m.dim());
        ScalarForm<S> theta =
            j_.contains("theta")
                ? scalarform_from_json<S>(j_.at("theta"), m.kind, m.dim(), order_ / 2, 2,
                                          "/theta")
                : ScalarForm<S>(m.kind, m.dim(), 2, order_ / 2);
        try {
            return build_fedosov(m, gamma, theta, order_);
        } catch (const DomainError& e) {
            throw InputError("/theta", e.what());
        }
    }

    FnSeries<S> series_block(const char* key) const {
        ChartManifold m = manifold();
        if (!j_.contains(key)) throw InputError(std::string("/") + key, "missing block");
        return series_from_json<S>(j_.at(key), m.kind, m.dim(), order_ / 2,
                                   std::string("/") + key);
    }

    int cmd_star() {
        auto F = build();
        FnSeries<S> f = series_block("f"), g = series_block("g");
        FnSeries<S> prod = star(F, f, g);
        report_["reliable_order"] = F.reliable_order();
        report_["product"] = series_to_json(prod);
        return 0;
    }

    int cmd_build() {
        auto F = build();
        report_["D"] = F.trunc;
        report_["theta"] = scalarform_to_json(F.theta);
        report_["r_terms"] = weylform_to_json(F.r);
        auto rep = curvature_report(F);
        json certs;
        certs["flatness_residual"] = fedosov_residual(F).is_zero_in_degrees_up_to(F.trunc - 1)
                                         ? 0.0
                                         : fedosov_residual(F).sup_norm();
        certs["delta_inv_r"] = delta_inv(F.r).is_zero() ? 0.0 : delta_inv(F.r).sup_norm();
        certs["curvature_central"] = rep.central;
        certs["curvature_prescribed"] = rep.prescribed;
        report_["certificates"] = certs;
        return 0;
    }

    int cmd_flat_section() {
        auto F = build();
        FnSeries<S> f = series_block("f");
        WeylElement<S> t = tau(F, f);
        report_["tau"] = weyl_to_json(t);
        bool flat = flat_residual(F, t).is_zero_in_degrees_up_to(F.trunc - 1);
        bool roundtrip = t.sigma().equals_through(f, F.reliable_order());
        report_["residual_zero"] = flat;
        report_["sigma_roundtrip"] = roundtrip;
        return flat && roundtrip ? 0 : 2;
    }

    int cmd_lift() {
        auto F = build();
        ChartManifold m = manifold();
        if (!j_.contains("gamma")) throw InputError("/gamma", "missing block");
        AffineSymplecto<S> gamma = symplecto_from_json<S>(j_.at("gamma"), m.kind, "/gamma");

        std::optional<FedosovConnection<S>> source;
        if (j_.contains("source")) {
            const json& s = j_.at("source");
            Christoffel<S> gs =
                s.contains("connection")
                    ? christoffel_from_json<S>(s.at("connection"), m.kind, m.dim(),
                                               "/source/connection")
                    : Christoffel<S>(m.kind, m.dim());
            ScalarForm<S> ths =
                s.contains("theta")
                    ? scalarform_from_json<S>(s.at("theta"), m.kind, m.dim(), order_ / 2, 2,
                                              "/source/theta")
                    : ScalarForm<S>(m.kind, m.dim(), 2, order_ / 2);
            source = build_fedosov(m, gs, ths, order_);
        }
        std::optional<ScalarForm<S>> primitive;
        if (j_.contains("primitive"))
            primitive = scalarform_from_json<S>(j_.at("primitive"), m.kind, m.dim(),
                                                order_ / 2, 1, "/primitive");
        LiftResult<S> lift;
        try {
            lift = solve_lift(F, gamma, primitive ? &*primitive : nullptr,
                              source ? &*source : nullptr);
        } catch (const DomainError& e) {
            throw InputError("/gamma", e.what());
        }
        report_["U"] = weyl_to_json(lift.U);

        // verification panel: conjugated flat sections stay flat and the
        // symbol action is gamma^* mod hbar
        const FedosovConnection<S>& src = source ? *source : F;
        Prng rng(seed_);
        bool ok = true;
        json panel = json::array();
        for (int rep = 0; rep < 5; ++rep) {
            FnSeries<S> f =
                FnSeries<S>::of(sample_basefn<S>(rng, m.kind, m.dim(), 2, 3), order_ / 2);
            WeylElement<S> conj = lift.U * pullback(gamma, tau(src, f)) * lift.U_inv;
            bool flat = flat_residual(F, conj).is_zero_in_degrees_up_to(F.trunc - 3);
            bool symbol = conj.sigma().at(0) == pullback(gamma, f.at(0));
            ok = ok && flat && symbol;
            panel.push_back(json{{"flat", flat}, {"symbol", symbol}});
        }
        report_["panel"] = panel;
        report_["verified"] = ok;
        return ok ? 0 : 2;
    }

    ExtensionAssignment<S> assignment(const FedosovConnection<S>& F,
                                      const GroupAction<S>& act) const {
        ExtensionAssignment<S> E = trivial_assignment(F, act);
        if (j_.contains("assignment")) {
            const json& a = j_.at("assignment");
            if (a.contains("lifts")) {
                const json& lifts = a.at("lifts");
                if ((int)lifts.size() != (int)E.lifts.size())
                    throw InputError("/assignment/lifts", "wrong number of lifts");
                for (size_t i = 0; i < E.lifts.size(); ++i)
                    E.lifts[i] = weyl_from_json<S>(lifts.at(i),
                                                   "/assignment/lifts/" + std::to_string(i));
            } else if (a.contains("generator_lifts")) {
                std::vector<int> idx;
                std::vector<WeylElement<S>> gl;
                int t = 0;
                for (auto& entry : a.at("generator_lifts")) {
                    std::string p = "/assignment/generator_lifts/" + std::to_string(t++);
                    idx.push_back(require_index(entry, p));
                    gl.push_back(weyl_from_json<S>(entry.at("U"), p + "/U"));
                }
                E = extend_from_generators(F, act, idx, gl);
            }
        }
        return E;
    }

    static int require_index(const json& e, const std::string& p) {
        if (!e.contains("index")) throw InputError(p, "missing generator index");
        return e.at("index").get<int>();
    }

    int cmd_cocycle_check() {
        auto F = build();
        ChartManifold m = manifold();
        if (!j_.contains("action")) throw InputError("/action", "missing block");
        GroupAction<S> act = action_from_json<S>(j_.at("action"), m.kind, "/action");
        ExtensionAssignment<S> E = assignment(F, act);
        auto residuals = check_cocycle(E);
        json out = json::array();
        bool all_central = true;
        for (auto& r : residuals) {
            json e;
            e["relation"] = r.relation;
            e["central"] = r.central;
            e["residual_norm"] = r.residual_norm;
            if (!r.central) {
                e["first_noncentral_term"] =
                    json{{"k", r.first_noncentral.k}, {"alpha", r.first_noncentral.alpha}};
                all_central = false;
            }
            out.push_back(e);
        }
        report_["residuals"] = out;
        report_["all_central"] = all_central;
        json lifts = json::array();
        for (auto& u : E.lifts) lifts.push_back(weyl_to_json(u));
        report_["lifts"] = lifts;
        return all_central ? 0 : 2;
    }

    int cmd_dmap() {
        auto F = build();
        if (!j_.contains("u")) throw InputError("/u", "missing block");
        WeylElement<S> u = weyl_from_json<S>(j_.at("u"), "/u");
        MembershipResult<S> res;
        try {
            res = gnabla_membership(F, u);
        } catch (const DomainError& e) {
            throw InputError("/u", e.what());
        }
        report_["member"] = res.member;
        if (!res.member) {
            report_["residual_norm"] = res.residual_norm;
            report_["first_noncentral_term"] =
                json{{"k", res.first_noncentral.k}, {"alpha", res.first_noncentral.alpha}};
            return 2;
        }
        report_["beta"] = scalarform_to_json(res.elt.beta);
        report_["closed"] = true;
        if (F.ring() == Ring::Torus)
            report_["periods"] = period_report_to_json(period_map(res.elt.beta));
        return 0;
    }

    int cmd_witness() {
        auto F = build();
        if (!j_.contains("covector")) throw InputError("/covector", "missing block");
        std::vector<S> c;
        int t = 0;
        for (auto& v : j_.at("covector"))
            c.push_back(scalar_from_json<S>(v, "/covector/" + std::to_string(t++)));
        GnablaElement<S> g;
        try {
            g = harmonic_witness(F, c);
        } catch (const DomainError& e) {
            throw InputError("/covector", e.what());
        }
        report_["U"] = weyl_to_json(g.U);
        report_["beta"] = scalarform_to_json(g.beta);
        report_["periods"] = period_report_to_json(period_map(g.beta));
        return 0;
    }

    // parse one cocycle spec: {"witness":[...]} | {"unit":[monomials]} |
    // {"flat":[series]} | {"element":{weyl}}
    GnablaElement<S> cocycle_spec(const FedosovConnection<S>& F, const json& spec,
                                  const std::string& path) const {
        ChartManifold m = manifold();
        try {
            if (spec.contains("witness")) {
                std::vector<S> c;
                int t = 0;
                for (auto& v : spec.at("witness"))
                    c.push_back(scalar_from_json<S>(v, path + "/witness/" + std::to_string(t++)));
                return harmonic_witness(F, c);
            }
            if (spec.contains("unit"))
                return unit_witness(
                    F, basefn_from_json<S>(spec.at("unit"), m.kind, m.dim(), path + "/unit"));
            if (spec.contains("flat")) {
                FnSeries<S> f = series_from_json<S>(spec.at("flat"), m.kind, m.dim(),
                                                    order_ / 2, path + "/flat");
                auto res = gnabla_membership(F, tau(F, f));
                if (!res.member) throw DomainError("flat section failed membership");
                return res.elt;
            }
            if (spec.contains("element")) {
                auto res =
                    gnabla_membership(F, weyl_from_json<S>(spec.at("element"), path + "/element"));
                if (!res.member) throw DomainError("element rejected by the membership test");
                return res.elt;
            }
        } catch (const DomainError& e) {
            throw InputError(path, e.what());
        }
        throw InputError(path, "cocycle spec needs 'witness', 'unit', 'flat' or 'element'");
    }

    int cmd_classify() {
        auto F = build();
        ChartManifold m = manifold();
        if (!j_.contains("action")) throw InputError("/action", "missing block");
        GroupAction<S> act = action_from_json<S>(j_.at("action"), m.kind, "/action");
        if (act.kind() != GroupKind::FreeAbelian || act.rank() != 1)
            throw InputError("/action", "classification reports need a rank-1 free action");
        const AffineSymplecto<S>& gamma = act.map_of(0);

        std::vector<S> fp;
        bool has_fp = false;
        if (j_.contains("fixed_point")) {
            int t = 0;
            for (auto& v : j_.at("fixed_point"))
                fp.push_back(scalar_from_json<S>(v, "/fixed_point/" + std::to_string(t++)));
            has_fp = true;
        }

        if (!j_.contains("cocycles")) throw InputError("/cocycles", "missing block");
        std::vector<GnablaElement<S>> cocycles;
        int t = 0;
        for (auto& spec : j_.at("cocycles"))
            cocycles.push_back(cocycle_spec(F, spec, "/cocycles/" + std::to_string(t++)));

        Prng rng(seed_);
        int samples = j_.contains("samples") ? j_.at("samples").get<int>() : 3;
        json entries = json::array();
        bool consistent = true;
        std::vector<ZH1Report<S>> reports;
        for (auto& g : cocycles) {
            ZH1Report<S> base = z_h1_invariants(F, gamma, g, has_fp ? &fp : nullptr);
            bool orbit_ok = true;
            for (int s = 0; s < samples; ++s) {
                // twisted conjugate gamma^*(b) g b^{-1} by a random member
                FnSeries<S> f = FnSeries<S>::constant(
                    m.kind, m.dim(), order_ / 2, ScalarOps<S>::integer(1 + (long)rng.below(2)));
                f.add(1, sample_basefn<S>(rng, m.kind, m.dim(), 2, 2));
                WeylElement<S> b = tau(F, f);
                if (F.ring() == Ring::Torus && F.gamma.is_zero() && F.r.is_zero()) {
                    std::vector<S> c{sample_scalar<S>(rng), sample_scalar<S>(rng)};
                    b = b * harmonic_witness(F, c).U;
                }
                WeylElement<S> tw = pullback(gamma, b) * g.U * weyl_inverse(b);
                auto res = gnabla_membership(F, tw);
                if (!res.member) {
                    orbit_ok = false;
                    break;
                }
                ZH1Report<S> twisted =
                    z_h1_invariants(F, gamma, res.elt, has_fp ? &fp : nullptr);
                orbit_ok = orbit_ok && twisted == base;
            }
            consistent = consistent && orbit_ok;
            json e = zh1_report_to_json(base);
            e["orbit_consistent"] = orbit_ok;
            entries.push_back(e);
            reports.push_back(base);
        }
        report_["reports"] = entries;

        json distinct = json::array();
        for (size_t a = 0; a < reports.size(); ++a)
            for (size_t b = a + 1; b < reports.size(); ++b)
                if (!(reports[a] == reports[b]))
                    distinct.push_back(json::array({(int)a, (int)b}));
        report_["distinct_pairs"] = distinct;
        report_["orbit_consistent"] = consistent;
        return consistent ? 0 : 2;
    }

    const json& j_;
    uint64_t seed_;
    int order_;
    json report_;
};

// non-template commands
ScenarioResult run_cech(const json& j) {
    SimplicialComplex K = complex_from_json(
        j.contains("complex") ? j.at("complex") : throw InputError("/complex", "missing block"),
        "/complex");
    CoeffRing coeff = CoeffRing::Z;
    if (j.contains("coefficients")) {
        std::string c = j.at("coefficients").get<std::string>();
        if (c == "Z")
            coeff = CoeffRing::Z;
        else if (c == "C")
            coeff = CoeffRing::C;
        else
            throw InputError("/coefficients", "coefficients must be 'Z' or 'C'");
    }
    json report;
    report["command"] = "cech";
    report["coefficients"] = coeff == CoeffRing::Z ? "Z" : "C";
    try {
        report["cohomology"] = cohomology_report_to_json(simplicial_cohomology(K, coeff));
    } catch (const DomainError& e) {
        throw InputError("/complex", e.what());
    }
    return {report, 0};
}

ScenarioResult run_h2_connect(const json& j) {
    if (!j.contains("extension")) throw InputError("/extension", "missing block");
    CentralExtension ext = extension_from_json(j.at("extension"), "/extension");
    if (!j.contains("gamma_action")) throw InputError("/gamma_action", "missing block");
    GammaOnExtension act = gamma_ext_from_json(j.at("gamma_action"), ext, "/gamma_action");
    if (!j.contains("eta")) throw InputError("/eta", "missing block");
    std::vector<int> eta = j.at("eta").get<std::vector<int>>();
    json report;
    report["command"] = "h2-connect";
    try {
        auto rep = connecting_map_H2(ext, act, eta);
        report["trivial"] = rep.trivial;
        report["note"] = rep.note;
        if (!rep.cocycle.empty()) report["cocycle"] = rep.cocycle;
    } catch (const DomainError& e) {
        throw InputError("/eta", e.what());
    }
    return {report, 0};
}

}  // namespace

ScenarioResult run_scenario(const json& scenario, uint64_t seed_override, int order_override) {
    if (!scenario.is_object()) throw InputError("", "scenario must be a JSON object");
    if (!scenario.contains("command")) throw InputError("/command", "missing command");
    std::string command = scenario.at("command").get<std::string>();

    if (command == "cech") return run_cech(scenario);
    if (command == "h2-connect") return run_h2_connect(scenario);

    uint64_t seed = seed_override != UINT64_MAX
                        ? seed_override
                        : (scenario.contains("seed") ? scenario.at("seed").get<uint64_t>() : 0);
    int order = order_override > 0
                    ? order_override
                    : (scenario.contains("order") ? scenario.at("order").get<int>() : 8);
    std::string scalar =
        scenario.contains("scalar") ? scenario.at("scalar").get<std::string>() : "exact";
    if (scalar != "exact" && scalar != "approx")
        throw InputError("/scalar", "scalar must be 'exact' or 'approx'");
    if (scalar == "approx") {
        Runner<ApproxComplex> r(scenario, seed, order);
        return r.run(command);
    }
    Runner<RationalComplex> r(scenario, seed, order);
    return r.run(command);
}

ScenarioResult run_scenario_text(const std::string& text, uint64_t seed_override,
                                 int order_override) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw InputError("", "scenario file is not valid JSON");
    return run_scenario(j, seed_override, order_override);
}

namespace {
void render(const json& j, const std::string& prefix, std::ostringstream& out) {
    if (j.is_object()) {
        for (auto& [k, v] : j.items()) render(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        if (j.empty()) out << prefix << ": []\n";
        int i = 0;
        for (auto& v : j) render(v, prefix + "[" + std::to_string(i++) + "]", out);
    } else {
        out << prefix << ": " << j.dump() << "\n";
    }
}
}  // namespace

std::string report_to_text(const json& report) {
    std::ostringstream out;
    render(report, "", out);
    return out.str();
}

}  // namespace fedq
