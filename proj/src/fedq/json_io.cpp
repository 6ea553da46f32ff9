#include "fedq/json_io.hpp"

namespace fedq {

namespace {

const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key))
        throw InputError(path + "/" + key, "missing required field");
    return j.at(key);
}

int require_int(const json& j, const char* key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_number_integer()) throw InputError(path + "/" + key, "expected an integer");
    return v.get<int>();
}

Ring ring_from_string(const std::string& s, const std::string& path) {
    if (s == "euclidean") return Ring::Euclidean;
    if (s == "torus") return Ring::Torus;
    throw InputError(path, "ring must be 'euclidean' or 'torus'");
}

IdxVec idx_from_json(const json& j, int dim, const std::string& path) {
    if (!j.is_array() || (int)j.size() != dim)
        throw InputError(path, "expected an index array of length " + std::to_string(dim));
    IdxVec out;
    for (auto& v : j) {
        if (!v.is_number_integer()) throw InputError(path, "index entries must be integers");
        out.push_back(v.get<int32_t>());
    }
    return out;
}

}  // namespace

// ---- scalars -----------------------------------------------------------------

template <class S>
S scalar_from_json(const json& j, const std::string& path) {
    try {
        if (j.is_string()) return S::parse(j.get<std::string>());
        if (j.is_number_integer()) return ScalarOps<S>::integer(j.get<long>());
        if (j.is_number_float()) {
            if constexpr (std::is_same_v<S, ApproxComplex>)
                return ApproxComplex(j.get<double>(), 0.0);
            throw ScalarError("exact scalars must be given as strings");
        }
    } catch (const ScalarError& e) {
        throw InputError(path, e.what());
    }
    throw InputError(path, "expected a scalar (string or number)");
}

template <class S>
json scalar_to_json(const S& v) {
    return v.str();
}

// ---- base functions ------------------------------------------------------------

template <class S>
BaseFunction<S> basefn_from_json(const json& j, Ring ring, int dim, const std::string& path) {
    if (!j.is_array()) throw InputError(path, "expected an array of monomials");
    BaseFunction<S> f(ring, dim);
    int t = 0;
    for (auto& term : j) {
        std::string p = path + "/" + std::to_string(t++);
        IdxVec idx = idx_from_json(require(term, "idx", p), dim, p + "/idx");
        if (ring == Ring::Euclidean)
            for (auto e : idx)
                if (e < 0) throw InputError(p + "/idx", "polynomial exponents must be >= 0");
        f.add_term(idx, scalar_from_json<S>(require(term, "c", p), p + "/c"));
    }
    return f;
}

template <class S>
json basefn_to_json(const BaseFunction<S>& f) {
    json out = json::array();
    for (auto& [idx, c] : f.terms()) {
        json term;
        term["idx"] = idx;
        term["c"] = scalar_to_json(c);
        out.push_back(term);
    }
    return out;
}

template <class S>
FnSeries<S> series_from_json(const json& j, Ring ring, int dim, int order,
                             const std::string& path) {
    FnSeries<S> f(ring, dim, order);
    if (!j.is_array()) throw InputError(path, "expected an array of hbar layers");
    int t = 0;
    for (auto& layer : j) {
        std::string p = path + "/" + std::to_string(t++);
        int k = require_int(layer, "hbar", p);
        if (k < 0) throw InputError(p + "/hbar", "hbar power must be >= 0");
        f.add(k, basefn_from_json<S>(require(layer, "coef", p), ring, dim, p + "/coef"));
    }
    return f;
}

template <class S>
json series_to_json(const FnSeries<S>& f) {
    json out = json::array();
    for (auto& [k, g] : f.coeffs()) {
        json layer;
        layer["hbar"] = k;
        layer["coef"] = basefn_to_json(g);
        out.push_back(layer);
    }
    return out;
}

// ---- Weyl elements ---------------------------------------------------------------

template <class S>
WeylElement<S> weyl_from_json(const json& j, const std::string& path) {
    int n = require_int(j, "n", path);
    int D = require_int(j, "D", path);
    Ring ring = ring_from_string(require(j, "ring", path).get<std::string>(), path + "/ring");
    WeylElement<S> a(n, ring, D);
    const json& terms = require(j, "terms", path);
    if (!terms.is_array()) throw InputError(path + "/terms", "expected an array");
    int t = 0;
    for (auto& term : terms) {
        std::string p = path + "/terms/" + std::to_string(t++);
        WeylKey key;
        key.k = require_int(term, "k", p);
        key.alpha = idx_from_json(require(term, "alpha", p), 2 * n, p + "/alpha");
        for (auto e : key.alpha)
            if (e < 0) throw InputError(p + "/alpha", "fiber exponents must be >= 0");
        try {
            a.add_term(key, basefn_from_json<S>(require(term, "coef", p), ring, 2 * n,
                                                p + "/coef"));
        } catch (const ConsistencyError& e) {
            throw InputError(p, e.what());
        }
    }
    return a;
}

template <class S>
json weyl_to_json(const WeylElement<S>& a) {
    json out;
    out["n"] = a.n();
    out["D"] = a.truncation();
    out["ring"] = ring_name(a.ring());
    out["terms"] = json::array();
    for (auto& [key, f] : a.terms()) {
        json term;
        term["k"] = key.k;
        term["alpha"] = key.alpha;
        term["coef"] = basefn_to_json(f);
        out["terms"].push_back(term);
    }
    return out;
}

template <class S>
ScalarForm<S> scalarform_from_json(const json& j, Ring ring, int dim, int order, int degree,
                                   const std::string& path) {
    ScalarForm<S> s(ring, dim, degree, order);
    if (j.is_null()) return s;
    if (!j.is_array()) throw InputError(path, "expected an array of wedge components");
    int t = 0;
    for (auto& comp : j) {
        std::string p = path + "/" + std::to_string(t++);
        const json& wj = require(comp, "wedge", p);
        Wedge w;
        for (auto& v : wj) w.push_back(v.get<int32_t>());
        if ((int)w.size() != degree)
            throw InputError(p + "/wedge", "wedge length must equal the form degree");
        s.add_comp(w, series_from_json<S>(require(comp, "coef", p), ring, dim, order,
                                          p + "/coef"));
    }
    return s;
}

template <class S>
json scalarform_to_json(const ScalarForm<S>& s) {
    json out = json::array();
    for (auto& [w, f] : s.comps()) {
        json comp;
        comp["wedge"] = w;
        comp["coef"] = series_to_json(f);
        out.push_back(comp);
    }
    return out;
}

template <class S>
json weylform_to_json(const WeylForm<S>& s) {
    json out = json::array();
    for (auto& [w, a] : s.comps()) {
        json comp;
        comp["wedge"] = w;
        comp["element"] = weyl_to_json(a);
        out.push_back(comp);
    }
    return out;
}

// ---- geometry --------------------------------------------------------------------

ChartManifold manifold_from_json(const json& j, const std::string& path) {
    ChartManifold m;
    m.kind = ring_from_string(require(j, "kind", path).get<std::string>(), path + "/kind");
    m.n = require_int(j, "n", path);
    if (m.n < 1) throw InputError(path + "/n", "half-dimension must be >= 1");
    return m;
}

json manifold_to_json(const ChartManifold& m) {
    return json{{"kind", ring_name(m.kind)}, {"n", m.n}};
}

template <class S>
Christoffel<S> christoffel_from_json(const json& j, Ring ring, int dim,
                                     const std::string& path) {
    Christoffel<S> c(ring, dim);
    if (j.is_null()) return c;
    const json& entries = j.is_object() && j.contains("christoffel") ? j.at("christoffel") : j;
    if (!entries.is_array()) throw InputError(path, "expected an array of christoffel entries");
    int t = 0;
    for (auto& e : entries) {
        std::string p = path + "/" + std::to_string(t++);
        int k = require_int(e, "k", p), i = require_int(e, "i", p), jj = require_int(e, "j", p);
        if (k < 0 || k >= dim || i < 0 || i >= dim || jj < 0 || jj >= dim)
            throw InputError(p, "christoffel index out of range");
        c.add(k, i, jj, basefn_from_json<S>(require(e, "coef", p), ring, dim, p + "/coef"));
    }
    return c;
}

template <class S>
json christoffel_to_json(const Christoffel<S>& c) {
    json entries = json::array();
    for (auto& [key, f] : c.entries()) {
        json e;
        e["k"] = key[0];
        e["i"] = key[1];
        e["j"] = key[2];
        e["coef"] = basefn_to_json(f);
        entries.push_back(e);
    }
    return json{{"christoffel", entries}};
}

template <class S>
AffineSymplecto<S> symplecto_from_json(const json& j, Ring ring, const std::string& path) {
    const json& aj = require(j, "A", path);
    if (!aj.is_array() || aj.empty()) throw InputError(path + "/A", "expected a square matrix");
    int d = (int)aj.size();
    Mat<S> A(d, std::vector<S>(d, ScalarOps<S>::zero()));
    for (int r = 0; r < d; ++r) {
        if (!aj[r].is_array() || (int)aj[r].size() != d)
            throw InputError(path + "/A", "expected a square matrix");
        for (int c = 0; c < d; ++c)
            A[r][c] = scalar_from_json<S>(aj[r][c], path + "/A");
    }
    try {
        if (ring == Ring::Euclidean) {
            std::vector<S> b(d, ScalarOps<S>::zero());
            if (j.contains("b"))
                for (int r = 0; r < d; ++r)
                    b[r] = scalar_from_json<S>(j.at("b").at(r), path + "/b");
            return AffineSymplecto<S>::euclidean(A, b);
        }
        std::vector<S> phases(d, ScalarOps<S>::one());
        if (j.contains("phases"))
            for (int r = 0; r < d; ++r)
                phases[r] = scalar_from_json<S>(j.at("phases").at(r), path + "/phases");
        else if (j.contains("b")) {
            // numeric angles: only available for the approximate scalar
            if constexpr (std::is_same_v<S, ApproxComplex>) {
                for (int r = 0; r < d; ++r) {
                    double angle = j.at("b").at(r).get<double>();
                    phases[r] = ApproxComplex(std::cos(angle), std::sin(angle));
                }
            } else {
                throw InputError(path + "/b",
                                 "exact torus translations take unit 'phases', not angles");
            }
        }
        return AffineSymplecto<S>::torus(A, phases);
    } catch (const DomainError& e) {
        throw InputError(path, e.what());
    }
}

template <class S>
json symplecto_to_json(const AffineSymplecto<S>& g) {
    json out;
    out["A"] = json::array();
    for (auto& row : g.linear()) {
        json r = json::array();
        for (auto& v : row) r.push_back(scalar_to_json(v));
        out["A"].push_back(r);
    }
    if (g.ring() == Ring::Euclidean) {
        json b = json::array();
        for (auto& v : g.translation()) b.push_back(scalar_to_json(v));
        out["b"] = b;
    } else {
        json p = json::array();
        for (auto& v : g.phases()) p.push_back(scalar_to_json(v));
        out["phases"] = p;
    }
    return out;
}

template <class S>
GroupAction<S> action_from_json(const json& j, Ring ring, const std::string& path) {
    const json& group = require(j, "group", path);
    std::string kind = require(group, "kind", path + "/group").get<std::string>();
    try {
        if (kind == "cyclic") {
            int order = require_int(group, "order", path + "/group");
            const json& gens = require(j, "generators", path);
            if (!gens.is_array() || gens.size() != 1)
                throw InputError(path + "/generators", "cyclic actions take one generator");
            return GroupAction<S>::cyclic(
                symplecto_from_json<S>(gens.at(0), ring, path + "/generators/0"), order);
        }
        if (kind == "finite") {
            const json& tj = require(group, "table", path + "/group");
            std::vector<std::vector<int>> table;
            for (auto& row : tj) table.push_back(row.get<std::vector<int>>());
            const json& ej = require(j, "elements", path);
            std::vector<AffineSymplecto<S>> maps;
            int t = 0;
            for (auto& e : ej)
                maps.push_back(
                    symplecto_from_json<S>(e, ring, path + "/elements/" + std::to_string(t++)));
            return GroupAction<S>::finite(std::move(table), std::move(maps));
        }
        if (kind == "free_abelian") {
            const json& gens = require(j, "generators", path);
            std::vector<AffineSymplecto<S>> maps;
            int t = 0;
            for (auto& e : gens)
                maps.push_back(symplecto_from_json<S>(e, ring,
                                                      path + "/generators/" + std::to_string(t++)));
            return GroupAction<S>::free_abelian(std::move(maps));
        }
    } catch (const DomainError& e) {
        throw InputError(path, e.what());
    }
    throw InputError(path + "/group/kind", "kind must be 'cyclic', 'finite' or 'free_abelian'");
}

// ---- cohomology --------------------------------------------------------------------

SimplicialComplex complex_from_json(const json& j, const std::string& path) {
    if (j.is_string()) {
        std::string name = j.get<std::string>();
        if (name == "tetrahedron") return SimplicialComplex::tetrahedron_boundary();
        if (name == "torus7") return SimplicialComplex::torus_minimal();
        throw InputError(path, "unknown built-in complex '" + name + "'");
    }
    SimplicialComplex K;
    K.vertices = require_int(j, "vertices", path);
    if (j.contains("triangles")) {
        std::vector<std::array<int, 3>> tris;
        for (auto& t : j.at("triangles")) {
            auto v = t.get<std::vector<int>>();
            if (v.size() != 3) throw InputError(path + "/triangles", "triangles have 3 vertices");
            tris.push_back({v[0], v[1], v[2]});
        }
        try {
            return SimplicialComplex::from_triangles(K.vertices, tris);
        } catch (const DomainError& e) {
            throw InputError(path, e.what());
        }
    }
    if (j.contains("edges")) {
        for (auto& t : j.at("edges")) {
            auto v = t.get<std::vector<int>>();
            if (v.size() != 2) throw InputError(path + "/edges", "edges have 2 vertices");
            K.edges.push_back({v[0], v[1]});
        }
    }
    try {
        K.validate();
    } catch (const DomainError& e) {
        throw InputError(path, e.what());
    }
    return K;
}

json cohomology_report_to_json(const CohomologyReport& rep) {
    json out;
    for (int d = 0; d <= 2; ++d) {
        json entry;
        entry["free_rank"] = rep.free_rank[d];
        entry["torsion"] = rep.torsion[d];
        out["H" + std::to_string(d)] = entry;
    }
    return out;
}

FiniteGroup finite_group_from_json(const json& j, const std::string& path) {
    FiniteGroup g;
    const json& tj = require(j, "table", path);
    for (auto& row : tj) g.table.push_back(row.get<std::vector<int>>());
    if (j.contains("identity")) g.identity = j.at("identity").get<int>();
    try {
        g.validate();
    } catch (const DomainError& e) {
        throw InputError(path, e.what());
    }
    return g;
}

CentralExtension extension_from_json(const json& j, const std::string& path) {
    CentralExtension ext;
    ext.A = finite_group_from_json(require(j, "A", path), path + "/A");
    ext.E = finite_group_from_json(require(j, "E", path), path + "/E");
    ext.G = finite_group_from_json(require(j, "G", path), path + "/G");
    ext.inject = require(j, "inject", path).get<std::vector<int>>();
    ext.project = require(j, "project", path).get<std::vector<int>>();
    try {
        ext.validate();
    } catch (const DomainError& e) {
        throw InputError(path, e.what());
    }
    return ext;
}

GammaOnExtension gamma_ext_from_json(const json& j, const CentralExtension& ext,
                                     const std::string& path) {
    GammaOnExtension act;
    std::string kind = require(j, "kind", path).get<std::string>();
    if (kind == "z")
        act.is_z = true;
    else if (kind == "finite")
        act.gamma = finite_group_from_json(require(j, "gamma", path), path + "/gamma");
    else
        throw InputError(path + "/kind", "kind must be 'z' or 'finite'");
    if (j.contains("action_E")) {
        for (auto& row : j.at("action_E"))
            act.action_E.push_back(row.get<std::vector<int>>());
    } else {
        // default: trivial action
        std::vector<int> id(ext.E.size());
        for (int e = 0; e < ext.E.size(); ++e) id[e] = e;
        act.action_E.assign(act.size(), id);
    }
    try {
        act.validate(ext);
    } catch (const DomainError& e) {
        throw InputError(path, e.what());
    }
    return act;
}

template <class S>
json period_report_to_json(const PeriodReport<S>& p) {
    json out;
    out["unit"] = "2*pi";
    out["integral_h0"] = p.integral_h0;
    json vals = json::array();
    for (auto& [k, row] : p.values) {
        json layer;
        layer["hbar"] = k;
        json cycles = json::array();
        for (auto& c : row) cycles.push_back(scalar_to_json(c));
        layer["cycles"] = cycles;
        vals.push_back(layer);
    }
    out["values"] = vals;
    return out;
}

template <class S>
json t1_class_to_json(const T1Class<S>& c) {
    json out;
    json h0 = json::array();
    for (auto& v : c.h0) h0.push_back(scalar_to_json(v));
    out["h0_mod_lattice"] = h0;
    json tails = json::array();
    for (auto& [k, row] : c.tails) {
        json layer;
        layer["hbar"] = k;
        json cycles = json::array();
        for (auto& v : row) cycles.push_back(scalar_to_json(v));
        layer["cycles"] = cycles;
        tails.push_back(layer);
    }
    out["tails"] = tails;
    return out;
}

template <class S>
json zh1_report_to_json(const ZH1Report<S>& r) {
    json out;
    if (r.has_t1) out["t1"] = t1_class_to_json(r.t1);
    if (r.has_fixed_point) out["fixed_point_value"] = scalar_to_json(r.fixed_value);
    return out;
}

// ---- explicit instantiations ---------------------------------------------------

#define FEDQ_INSTANTIATE(S)                                                                   \
    template S scalar_from_json<S>(const json&, const std::string&);                         \
    template json scalar_to_json<S>(const S&);                                               \
    template BaseFunction<S> basefn_from_json<S>(const json&, Ring, int, const std::string&);\
    template json basefn_to_json<S>(const BaseFunction<S>&);                                 \
    template FnSeries<S> series_from_json<S>(const json&, Ring, int, int,                    \
                                             const std::string&);                            \
    template json series_to_json<S>(const FnSeries<S>&);                                     \
    template WeylElement<S> weyl_from_json<S>(const json&, const std::string&);              \
    template json weyl_to_json<S>(const WeylElement<S>&);                                    \
    template ScalarForm<S> scalarform_from_json<S>(const json&, Ring, int, int, int,         \
                                                   const std::string&);                      \
    template json scalarform_to_json<S>(const ScalarForm<S>&);                               \
    template json weylform_to_json<S>(const WeylForm<S>&);                                   \
    template Christoffel<S> christoffel_from_json<S>(const json&, Ring, int,                 \
                                                     const std::string&);                    \
    template json christoffel_to_json<S>(const Christoffel<S>&);                             \
    template AffineSymplecto<S> symplecto_from_json<S>(const json&, Ring,                    \
                                                       const std::string&);                  \
    template json symplecto_to_json<S>(const AffineSymplecto<S>&);                           \
    template GroupAction<S> action_from_json<S>(const json&, Ring, const std::string&);      \
    template json period_report_to_json<S>(const PeriodReport<S>&);                          \
    template json t1_class_to_json<S>(const T1Class<S>&);                                    \
    template json zh1_report_to_json<S>(const ZH1Report<S>&);

FEDQ_INSTANTIATE(RationalComplex)
FEDQ_INSTANTIATE(ApproxComplex)
#undef FEDQ_INSTANTIATE

}  // namespace fedq
