#ifndef FEDQ_JSON_IO_HPP
#define FEDQ_JSON_IO_HPP

#include <nlohmann/json.hpp>

#include "fedq/cohomology.hpp"

namespace fedq {

using nlohmann::json;

// Input validation failures carry a JSON-pointer-style path to the offender.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), pointer(path) {}
    std::string pointer;
};

// ---- scalars -----------------------------------------------------------------

template <class S>
S scalar_from_json(const json& j, const std::string& path);
template <class S>
json scalar_to_json(const S& v);

// ---- base functions and series ------------------------------------------------

template <class S>
BaseFunction<S> basefn_from_json(const json& j, Ring ring, int dim, const std::string& path);
template <class S>
json basefn_to_json(const BaseFunction<S>& f);

template <class S>
FnSeries<S> series_from_json(const json& j, Ring ring, int dim, int order,
                             const std::string& path);
template <class S>
json series_to_json(const FnSeries<S>& f);

// ---- Weyl elements and forms ---------------------------------------------------

template <class S>
WeylElement<S> weyl_from_json(const json& j, const std::string& path);
template <class S>
json weyl_to_json(const WeylElement<S>& a);

template <class S>
ScalarForm<S> scalarform_from_json(const json& j, Ring ring, int dim, int order, int degree,
                                   const std::string& path);
template <class S>
json scalarform_to_json(const ScalarForm<S>& s);

template <class S>
json weylform_to_json(const WeylForm<S>& s);

// ---- geometry ------------------------------------------------------------------

ChartManifold manifold_from_json(const json& j, const std::string& path);
json manifold_to_json(const ChartManifold& m);

template <class S>
Christoffel<S> christoffel_from_json(const json& j, Ring ring, int dim,
                                     const std::string& path);
template <class S>
json christoffel_to_json(const Christoffel<S>& c);

template <class S>
AffineSymplecto<S> symplecto_from_json(const json& j, Ring ring, const std::string& path);
template <class S>
json symplecto_to_json(const AffineSymplecto<S>& g);

template <class S>
GroupAction<S> action_from_json(const json& j, Ring ring, const std::string& path);

// ---- cohomology ----------------------------------------------------------------

SimplicialComplex complex_from_json(const json& j, const std::string& path);
json cohomology_report_to_json(const CohomologyReport& rep);

FiniteGroup finite_group_from_json(const json& j, const std::string& path);
CentralExtension extension_from_json(const json& j, const std::string& path);
GammaOnExtension gamma_ext_from_json(const json& j, const CentralExtension& ext,
                                     const std::string& path);

template <class S>
json period_report_to_json(const PeriodReport<S>& p);
template <class S>
json t1_class_to_json(const T1Class<S>& c);
template <class S>
json zh1_report_to_json(const ZH1Report<S>& r);

}  // namespace fedq

#endif
