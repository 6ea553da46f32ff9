#include "fedq.h"

#include <cstring>
#include <memory>
#include <string>

#include "fedq/scenario.hpp"

using namespace fedq;

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

}  // namespace

struct fedq_result {
    json report;
    int exit_code = 0;
    mutable std::string json_cache;
    mutable std::string text_cache;
};

// A built connection for either scalar variant.
struct fedq_engine {
    bool approx = false;
    int order = 8;
    std::unique_ptr<FedosovConnection<RationalComplex>> exact;
    std::unique_ptr<FedosovConnection<ApproxComplex>> approx_conn;
    json manifold;
};

extern "C" {

const char* fedq_version(void) { return "fedq 1.0.0"; }

const char* fedq_last_error(void) { return g_last_error.c_str(); }

fedq_status fedq_run_scenario(const char* scenario_json, uint64_t seed_override,
                              int order_override, fedq_result** out) {
    if (!scenario_json || !out) {
        set_error("null argument");
        return FEDQ_E_INPUT;
    }
    *out = nullptr;
    try {
        ScenarioResult res = run_scenario_text(scenario_json, seed_override, order_override);
        auto* r = new fedq_result;
        r->report = std::move(res.report);
        r->exit_code = res.exit_code;
        *out = r;
        return r->exit_code == 2 ? FEDQ_E_FINDINGS : FEDQ_OK;
    } catch (const InputError& e) {
        set_error(e.what());
        return FEDQ_E_INPUT;
    } catch (const ConsistencyError& e) {
        set_error(e.what());
        return FEDQ_E_INTERNAL;
    } catch (const std::exception& e) {
        set_error(e.what());
        return FEDQ_E_INPUT;
    }
}

int fedq_result_exit_code(const fedq_result* r) { return r ? r->exit_code : 1; }

const char* fedq_result_json(const fedq_result* r) {
    if (!r) return "";
    if (r->json_cache.empty()) r->json_cache = r->report.dump(2) + "\n";
    return r->json_cache.c_str();
}

const char* fedq_result_text(const fedq_result* r) {
    if (!r) return "";
    if (r->text_cache.empty()) r->text_cache = report_to_text(r->report);
    return r->text_cache.c_str();
}

void fedq_result_free(fedq_result* r) { delete r; }

fedq_status fedq_engine_create(const char* config_json, fedq_engine** out) {
    if (!config_json || !out) {
        set_error("null argument");
        return FEDQ_E_INPUT;
    }
    *out = nullptr;
    try {
        json j = json::parse(config_json, nullptr, false);
        if (j.is_discarded()) throw InputError("", "config is not valid JSON");
        auto e = std::make_unique<fedq_engine>();
        e->order = j.contains("order") ? j.at("order").get<int>() : 8;
        e->approx = j.contains("scalar") && j.at("scalar").get<std::string>() == "approx";
        ChartManifold m = manifold_from_json(
            j.contains("manifold") ? j.at("manifold") : throw InputError("/manifold", "missing"),
            "/manifold");
        e->manifold = manifold_to_json(m);
        auto build_one = [&](auto tag) {
            using S = decltype(tag);
            Christoffel<S> gamma =
                j.contains("connection")
                    ? christoffel_from_json<S>(j.at("connection"), m.kind, m.dim(),
                                               "/connection")
                    : Christoffel<S>(m.kind, m.dim());
            ScalarForm<S> theta =
                j.contains("theta")
                    ? scalarform_from_json<S>(j.at("theta"), m.kind, m.dim(), e->order / 2, 2,
                                              "/theta")
                    : ScalarForm<S>(m.kind, m.dim(), 2, e->order / 2);
            return build_fedosov(m, gamma, theta, e->order);
        };
        if (e->approx)
            e->approx_conn = std::make_unique<FedosovConnection<ApproxComplex>>(
                build_one(ApproxComplex{}));
        else
            e->exact = std::make_unique<FedosovConnection<RationalComplex>>(
                build_one(RationalComplex{}));
        *out = e.release();
        return FEDQ_OK;
    } catch (const InputError& e) {
        set_error(e.what());
        return FEDQ_E_INPUT;
    } catch (const ConsistencyError& e) {
        set_error(e.what());
        return FEDQ_E_INTERNAL;
    } catch (const std::exception& e) {
        set_error(e.what());
        return FEDQ_E_INPUT;
    }
}

void fedq_engine_free(fedq_engine* e) { delete e; }

}  // extern "C"

namespace {

template <class S>
json describe(const FedosovConnection<S>& F) {
    json out;
    out["D"] = F.trunc;
    out["theta"] = scalarform_to_json(F.theta);
    out["r_terms"] = weylform_to_json(F.r);
    auto rep = curvature_report(F);
    out["certificates"] = {
        {"flatness_residual",
         fedosov_residual(F).is_zero_in_degrees_up_to(F.trunc - 1) ? 0.0
                                                                   : fedosov_residual(F).sup_norm()},
        {"delta_inv_r", delta_inv(F.r).is_zero() ? 0.0 : delta_inv(F.r).sup_norm()},
        {"curvature_central", rep.central},
        {"curvature_prescribed", rep.prescribed}};
    return out;
}

template <class S>
json star_json(const FedosovConnection<S>& F, const json& fj, const json& gj) {
    FnSeries<S> f = series_from_json<S>(fj, F.ring(), 2 * F.n(), F.reliable_order(), "/f");
    FnSeries<S> g = series_from_json<S>(gj, F.ring(), 2 * F.n(), F.reliable_order(), "/g");
    json out;
    out["reliable_order"] = F.reliable_order();
    out["product"] = series_to_json(star(F, f, g));
    return out;
}

template <class S>
json flat_json(const FedosovConnection<S>& F, const json& fj) {
    FnSeries<S> f = series_from_json<S>(fj, F.ring(), 2 * F.n(), F.reliable_order(), "/f");
    json out;
    out["tau"] = weyl_to_json(tau(F, f));
    return out;
}

template <class S>
std::pair<json, int> dmap_json(const FedosovConnection<S>& F, const json& uj) {
    WeylElement<S> u = weyl_from_json<S>(uj, "/u");
    auto res = gnabla_membership(F, u);
    json out;
    out["member"] = res.member;
    if (!res.member) {
        out["residual_norm"] = res.residual_norm;
        out["first_noncentral_term"] =
            json{{"k", res.first_noncentral.k}, {"alpha", res.first_noncentral.alpha}};
        return {out, 2};
    }
    out["beta"] = scalarform_to_json(res.elt.beta);
    if (F.ring() == Ring::Torus)
        out["periods"] = period_report_to_json(period_map(res.elt.beta));
    return {out, 0};
}

template <class Fn>
fedq_status wrap(Fn&& fn, fedq_result** out) {
    *out = nullptr;
    try {
        auto [report, code] = fn();
        auto* r = new fedq_result;
        r->report = std::move(report);
        r->exit_code = code;
        *out = r;
        return code == 2 ? FEDQ_E_FINDINGS : FEDQ_OK;
    } catch (const InputError& e) {
        set_error(e.what());
        return FEDQ_E_INPUT;
    } catch (const ConsistencyError& e) {
        set_error(e.what());
        return FEDQ_E_INTERNAL;
    } catch (const std::exception& e) {
        set_error(e.what());
        return FEDQ_E_INPUT;
    }
}

json parse_or_throw(const char* text, const char* what) {
    if (!text) throw InputError("", std::string("null ") + what);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw InputError("", std::string(what) + " is not valid JSON");
    return j;
}

}  // namespace

extern "C" {

fedq_status fedq_engine_describe(const fedq_engine* e, fedq_result** out) {
    if (!e || !out) {
        set_error("null argument");
        return FEDQ_E_INPUT;
    }
    return wrap(
        [&]() -> std::pair<json, int> {
            return {e->approx ? describe(*e->approx_conn) : describe(*e->exact), 0};
        },
        out);
}

fedq_status fedq_engine_star(const fedq_engine* e, const char* f_json, const char* g_json,
                             fedq_result** out) {
    if (!e || !out) {
        set_error("null argument");
        return FEDQ_E_INPUT;
    }
    return wrap(
        [&]() -> std::pair<json, int> {
            json f = parse_or_throw(f_json, "f"), g = parse_or_throw(g_json, "g");
            return {e->approx ? star_json(*e->approx_conn, f, g) : star_json(*e->exact, f, g),
                    0};
        },
        out);
}

fedq_status fedq_engine_flat_section(const fedq_engine* e, const char* f_json,
                                     fedq_result** out) {
    if (!e || !out) {
        set_error("null argument");
        return FEDQ_E_INPUT;
    }
    return wrap(
        [&]() -> std::pair<json, int> {
            json f = parse_or_throw(f_json, "f");
            return {e->approx ? flat_json(*e->approx_conn, f) : flat_json(*e->exact, f), 0};
        },
        out);
}

fedq_status fedq_engine_dmap(const fedq_engine* e, const char* u_json, fedq_result** out) {
    if (!e || !out) {
        set_error("null argument");
        return FEDQ_E_INPUT;
    }
    return wrap(
        [&]() -> std::pair<json, int> {
            json u = parse_or_throw(u_json, "u");
            return e->approx ? dmap_json(*e->approx_conn, u) : dmap_json(*e->exact, u);
        },
        out);
}

}  // extern "C"
