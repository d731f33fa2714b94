#include "toric/json_io.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "toric/errors.hpp"

namespace toric::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw SchemaError(what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object()) fail(std::string("expected an object with field '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field '") + key + "'");
  return *it;
}

int rank_field(const json& j) {
  const json& r = field(j, "rank");
  if (!r.is_number_integer() || r.get<long>() < 0 || r.get<long>() > 64) fail("'rank' must be a small non-negative integer");
  return r.get<int>();
}

const json& array_field(const json& j, const char* key) {
  const json& a = field(j, key);
  if (!a.is_array()) fail(std::string("'") + key + "' must be an array");
  return a;
}

Integer integer_from_json(const json& j) {
  if (j.is_number_integer()) return Integer(j.get<long>());
  if (j.is_string()) {
    Integer z;
    if (z.set_str(j.get<std::string>(), 10) != 0) fail("bad integer '" + j.get<std::string>() + "'");
    return z;
  }
  fail("expected an integer");
}

}  // namespace

json rational_to_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (!j.is_string()) fail("rationals are strings \"a/b\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
}

json linlog_to_json(const LinLog& x) {
  json logs = json::object();
  for (const auto& [p, c] : x.log_terms()) logs[p.get_str()] = rational_to_json(c);
  return json{{"q", rational_to_json(x.rational_part())}, {"logs", logs}};
}

LinLog linlog_from_json(const json& j) {
  Rational q = j.contains("q") ? rational_from_json(j["q"]) : Rational(0);
  std::vector<LinLog::Term> terms;
  if (j.contains("logs")) {
    const json& logs = j["logs"];
    if (!logs.is_object()) fail("'logs' must be an object prime -> coefficient");
    for (const auto& [k, v] : logs.items()) {
      Integer p;
      if (p.set_str(k, 10) != 0) fail("bad prime key '" + k + "'");
      terms.emplace_back(p, rational_from_json(v));
    }
  }
  try {
    return LinLog::from_parts(q, std::move(terms));
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
}

json value_to_json(const Value& v) {
  if (v.is_exact()) return linlog_to_json(v.center());
  Approx a = v.center().quick_approx();
  double err = v.error() + a.err;
  return json{{"approx", a.value}, {"err", err}};
}

Value value_from_json(const json& j) {
  if (j.is_string() || j.is_number_integer()) return Value(rational_from_json(j));
  if (!j.is_object()) fail("a value is a rational string, a LinLog object or an approximation");
  if (j.contains("approx")) {
    const json& a = j["approx"];
    const json& e = field(j, "err");
    if (!a.is_number() || !e.is_number()) fail("'approx' and 'err' must be numbers");
    double x = a.get<double>(), err = e.get<double>();
    if (!std::isfinite(x) || !std::isfinite(err) || err < 0) fail("approximation must be finite with err >= 0");
    return Value::approx(x, err);
  }
  return Value(linlog_from_json(j));
}

json qpoint_to_json(const QPoint& x) {
  json a = json::array();
  for (const auto& c : x) a.push_back(rational_to_json(c));
  return a;
}

QPoint qpoint_from_json(const json& j, int rank) {
  if (!j.is_array() || static_cast<int>(j.size()) != rank) fail("expected a point with " + std::to_string(rank) + " coordinates");
  QPoint x;
  for (const auto& c : j) x.push_back(rational_from_json(c));
  return x;
}

LatticePoint lattice_point_from_json(const json& j, int rank) {
  if (!j.is_array() || static_cast<int>(j.size()) != rank)
    fail("expected a lattice point with " + std::to_string(rank) + " coordinates");
  LatticePoint m;
  for (const auto& c : j) m.push_back(integer_from_json(c));
  return m;
}

json polytope_to_json(const RationalPolytope& p) {
  json vs = json::array();
  for (const auto& v : p.vertices()) vs.push_back(qpoint_to_json(v));
  return json{{"rank", p.ambient_rank()}, {"vertices", vs}};
}

RationalPolytope polytope_from_json(const json& j) {
  int n = rank_field(j);
  const json& vs = j.contains("vertices") ? array_field(j, "vertices") : array_field(j, "points");
  if (vs.empty()) fail("a polytope needs at least one point");
  std::vector<QPoint> pts;
  for (const auto& v : vs) pts.push_back(qpoint_from_json(v, n));
  return RationalPolytope::hull(n, std::move(pts));
}

json concave_to_json(const ConcaveFn& g) {
  json gs = json::array();
  for (const auto& gen : g.generators())
    gs.push_back(json{{"point", qpoint_to_json(gen.point)}, {"value", value_to_json(gen.value)}});
  return json{{"rank", g.ambient_rank()}, {"generators", gs}};
}

ConcaveFn concave_from_json(const json& j) {
  int n = rank_field(j);
  const json& gs = array_field(j, "generators");
  if (gs.empty()) fail("a concave function needs at least one generator");
  std::vector<Generator> out;
  for (const auto& g : gs) out.push_back({qpoint_from_json(field(g, "point"), n), value_from_json(field(g, "value"))});
  return ConcaveFn(n, std::move(out));
}

json laurent_to_json(const LaurentPoly& f) {
  json ts = json::array();
  for (const auto& t : f.terms()) {
    json e = json::array();
    for (const auto& x : t.exponent) {
      if (x.fits_slong_p()) e.push_back(x.get_si());
      else e.push_back(x.get_str());
    }
    ts.push_back(json{{"exp", e}, {"coef", rational_to_json(t.coef)}});
  }
  return json{{"rank", f.rank()}, {"terms", ts}};
}

LaurentPoly laurent_from_json(const json& j) {
  int n = rank_field(j);
  const json& ts = array_field(j, "terms");
  std::vector<Term> terms;
  for (const auto& t : ts) terms.push_back({lattice_point_from_json(field(t, "exp"), n), rational_from_json(field(t, "coef"))});
  try {
    return LaurentPoly(n, std::move(terms));
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
}

json place_to_json(const PlaceQ& v) { return v.to_string(); }

PlaceQ place_from_json(const json& j) {
  if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "arch")) return PlaceQ::arch();
  Integer p = integer_from_json(j);
  if (!is_prime(p)) fail("place must be \"inf\" or a prime, got " + p.get_str());
  return PlaceQ::prime(p);
}

QuadratureSpec quadrature_from_json(const json& j, int default_bits) {
  QuadratureSpec q;
  q.precision_bits = default_bits;
  if (j.is_null()) return q;
  if (!j.is_object()) fail("'quadrature' must be an object");
  if (j.contains("points_per_axis")) {
    if (!j["points_per_axis"].is_number_integer()) fail("'points_per_axis' must be an integer");
    q.points_per_axis = j["points_per_axis"].get<int>();
  }
  if (j.contains("precision_bits")) {
    if (!j["precision_bits"].is_number_integer()) fail("'precision_bits' must be an integer");
    q.precision_bits = j["precision_bits"].get<int>();
  }
  try {
    q.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  return q;
}

json quadrature_to_json(const QuadratureSpec& q) {
  return json{{"points_per_axis", q.points_per_axis}, {"precision_bits", q.precision_bits}};
}

MetrizedToricDivisor divisor_from_json(const json& j) {
  std::string metric = j.contains("metric") ? j["metric"].get<std::string>() : "canonical";
  if (metric == "fs") {
    int n = j.contains("rank") ? rank_field(j) : polytope_from_json(field(j, "polytope")).ambient_rank();
    MetrizedToricDivisor d = MetrizedToricDivisor::fubini_study(n);
    if (j.contains("polytope") && !(polytope_from_json(j["polytope"]) == d.polytope()))
      fail("the Fubini-Study metric lives on the standard simplex");
    return d;
  }
  if (metric != "canonical" && metric != "custom") fail("metric must be canonical, fs or custom");
  MetrizedToricDivisor d(polytope_from_json(field(j, "polytope")));
  if (metric == "custom") {
    const json& roofs = field(j, "roofs");
    if (!roofs.is_object() || roofs.empty()) fail("custom metrics carry a non-empty object of roofs per place");
    for (const auto& [k, g] : roofs.items()) {
      try {
        d.set_roof(place_from_json(json(k)), concave_from_json(g));
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
    }
  }
  return d;
}

json divisor_to_json(const MetrizedToricDivisor& d) {
  json j{{"polytope", polytope_to_json(d.polytope())}};
  if (d.fs_arch()) {
    j["metric"] = "fs";
  } else if (d.roofs().empty()) {
    j["metric"] = "canonical";
  } else {
    j["metric"] = "custom";
    json roofs = json::object();
    for (const auto& [v, g] : d.roofs()) roofs[v.to_string()] = concave_to_json(g);
    j["roofs"] = roofs;
  }
  return j;
}

json report_to_json(const HeightReport& r) {
  json per = json::array();
  for (const auto& [v, h] : r.per_place) per.push_back(json{{"place", place_to_json(v)}, {"value", value_to_json(h)}});
  json j{{"total", value_to_json(r.total)},
         {"per_place", per},
         {"degree", rational_to_json(r.degree)},
         {"zero_cycle", r.zero_cycle},
         {"quadrature", quadrature_to_json(r.spec.quadrature)},
         {"grid", json{{"k", r.spec.grid.k}}},
         {"fs_k", r.spec.fs_k}};
  if (r.spec.grid.radius) j["grid"]["radius"] = rational_to_json(*r.spec.grid.radius);
  if (r.zero_cycle) j["warnings"] = json::array({"monomial defining polynomial: the cycle is zero"});
  return j;
}

}  // namespace toric::io
