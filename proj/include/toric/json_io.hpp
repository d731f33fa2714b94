#pragma once

#include <json.hpp>

#include "toric/concave.hpp"
#include "toric/heights.hpp"
#include "toric/ronkin.hpp"

// JSON forms of the library types. Rationals are strings "a/b"; parse
// functions throw SchemaError on malformed input.
namespace toric::io {

using nlohmann::json;

json rational_to_json(const Rational& q);
Rational rational_from_json(const json& j);

json linlog_to_json(const LinLog& x);
LinLog linlog_from_json(const json& j);

// Exact values as {"q": ..., "logs": {...}}, approximations as
// {"approx": x, "err": e}.
json value_to_json(const Value& v);
Value value_from_json(const json& j);

json qpoint_to_json(const QPoint& x);
QPoint qpoint_from_json(const json& j, int rank);
LatticePoint lattice_point_from_json(const json& j, int rank);

json polytope_to_json(const RationalPolytope& p);
RationalPolytope polytope_from_json(const json& j);

json concave_to_json(const ConcaveFn& g);
ConcaveFn concave_from_json(const json& j);

json laurent_to_json(const LaurentPoly& f);
LaurentPoly laurent_from_json(const json& j);

json place_to_json(const PlaceQ& v);
PlaceQ place_from_json(const json& j);

QuadratureSpec quadrature_from_json(const json& j, int default_bits);
json quadrature_to_json(const QuadratureSpec& q);

// {"polytope": P, "metric": "canonical" | "fs" | "custom", "roofs": {"2": g, ...}}
MetrizedToricDivisor divisor_from_json(const json& j);
json divisor_to_json(const MetrizedToricDivisor& d);

json report_to_json(const HeightReport& r);

}  // namespace toric::io
