#include "toric/heights.hpp"

#include <algorithm>
#include <stdexcept>

namespace toric {

namespace {

void check_family(const LaurentPoly& f, std::span<const MetrizedToricDivisor> ds, std::size_t expected) {
  if (ds.size() != expected)
    throw std::invalid_argument("expected " + std::to_string(expected) + " divisors, got " + std::to_string(ds.size()));
  for (const auto& d : ds)
    if (d.ambient_rank() != f.rank()) throw std::invalid_argument("divisor rank does not match the polynomial");
}

Rational factorial(int n) {
  Rational f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Rational degree_of_ambient(std::span<const MetrizedToricDivisor> ds) {
  std::vector<RationalPolytope> ps;
  for (const auto& d : ds) ps.push_back(d.polytope());
  return mixed_volume(ps);
}

ConcaveFn dual_ronkin(const LaurentPoly& f, const PlaceQ& v, const HeightSpec& spec) {
  return ronkin_concave_approx(f, v, spec.grid, spec.quadrature, spec.exec);
}

Value rho_at_zero(const LaurentPoly& f, const PlaceQ& v, const HeightSpec& spec) {
  if (v.is_arch()) return -mahler_measure(f, spec.quadrature);
  return tropical_ronkin(f, v.prime()).eval(QPoint(f.rank(), 0));
}

HeightReport finish(HeightReport r) {
  std::sort(r.per_place.begin(), r.per_place.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  r.total = Value();
  for (const auto& [v, h] : r.per_place) r.total += h;
  return r;
}

HeightReport zero_cycle_report(const HeightSpec& spec) {
  HeightReport r;
  r.zero_cycle = true;
  r.spec = spec;
  return r;
}

std::vector<PlaceQ> merge_places(std::vector<PlaceQ> a, const std::vector<PlaceQ>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

// MetrizedToricDivisor

MetrizedToricDivisor::MetrizedToricDivisor(RationalPolytope polytope) : polytope_(std::move(polytope)) {
  if (polytope_.vertices().empty()) throw std::invalid_argument("divisor polytope is empty");
}

MetrizedToricDivisor MetrizedToricDivisor::fubini_study(int n) {
  MetrizedToricDivisor d(RationalPolytope::simplex(n));
  d.fs_arch_ = true;
  return d;
}

MetrizedToricDivisor& MetrizedToricDivisor::set_roof(const PlaceQ& v, ConcaveFn roof) {
  if (!(roof.domain() == polytope_)) throw std::invalid_argument("roof domain differs from the divisor polytope");
  if (v.is_arch()) fs_arch_ = false;
  auto it = std::find_if(roofs_.begin(), roofs_.end(), [&](const auto& r) { return r.first == v; });
  if (it != roofs_.end()) it->second = std::move(roof);
  else roofs_.emplace_back(v, std::move(roof));
  std::sort(roofs_.begin(), roofs_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return *this;
}

bool MetrizedToricDivisor::is_canonical_at(const PlaceQ& v) const {
  if (v.is_arch() && fs_arch_) return false;
  return std::none_of(roofs_.begin(), roofs_.end(), [&](const auto& r) { return r.first == v; });
}

std::vector<PlaceQ> MetrizedToricDivisor::special_places() const {
  std::vector<PlaceQ> out;
  if (fs_arch_) out.push_back(PlaceQ::arch());
  for (const auto& r : roofs_) out.push_back(r.first);
  std::sort(out.begin(), out.end());
  return out;
}

ConcaveFn MetrizedToricDivisor::roof_at(const PlaceQ& v, int fs_k) const {
  for (const auto& r : roofs_)
    if (r.first == v) return r.second;
  if (v.is_arch() && fs_arch_) return fs_roof(ambient_rank(), fs_k);
  return indicator(polytope_);
}

ConcaveFn fs_roof(int n, int k) {
  if (n < 1 || k < 1) throw std::invalid_argument("fs_roof: need n >= 1 and k >= 1");
  auto x_log_x = [](const Rational& x) { return x == 0 ? LinLog() : LinLog::log_abs(x) * x; };
  auto oracle = [&](const QPoint& x) {
    Rational x0 = 1;
    LinLog s;
    for (const auto& xi : x) {
      x0 -= xi;
      s += x_log_x(xi);
    }
    s += x_log_x(x0);
    return Value(s * Rational(-1, 2));
  };
  return sample_concave(oracle, RationalPolytope::simplex(n), k);
}

const Value* HeightReport::at(const PlaceQ& v) const {
  for (const auto& [w, h] : per_place)
    if (w == v) return &h;
  return nullptr;
}

// Degrees and divisors

Rational degree(const LaurentPoly& f, std::span<const MetrizedToricDivisor> ds) {
  check_family(f, ds, static_cast<std::size_t>(std::max(0, f.rank() - 1)));
  std::vector<RationalPolytope> ps;
  for (const auto& d : ds) ps.push_back(d.polytope());
  ps.push_back(newton_polytope(f));
  return mixed_volume(ps);
}

std::vector<std::pair<LatticePoint, Rational>> weil_divisor_at_rays(const LaurentPoly& f,
                                                                    const std::vector<LatticePoint>& rays) {
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (static_cast<int>(rays[i].size()) != f.rank()) throw std::invalid_argument("ray rank mismatch");
    if (!is_primitive(rays[i])) throw std::invalid_argument("ray is not primitive");
    for (std::size_t j = 0; j < i; ++j)
      if (rays[i] == rays[j]) throw std::invalid_argument("repeated ray");
  }
  const RationalPolytope np = newton_polytope(f);
  std::vector<std::pair<LatticePoint, Rational>> out;
  for (const auto& r : rays) out.emplace_back(r, support_value(np, to_q(r)));
  return out;
}

// Heights

std::vector<PlaceQ> active_places(const LaurentPoly& f, std::span<const MetrizedToricDivisor> ds) {
  std::vector<PlaceQ> places{PlaceQ::arch()};
  places = merge_places(std::move(places), bad_primes(f));
  for (const auto& d : ds) places = merge_places(std::move(places), d.special_places());
  return places;
}

Value global_term(const LaurentPoly& f, std::span<const MetrizedToricDivisor> ds, const PlaceQ& v,
                  const HeightSpec& spec) {
  check_family(f, ds, static_cast<std::size_t>(f.rank()));
  std::vector<ConcaveFn> gs;
  for (const auto& d : ds) gs.push_back(d.roof_at(v, spec.fs_k));
  gs.push_back(dual_ronkin(f, v, spec));
  return mixed_integral(gs, spec.exec);
}

Value toric_local_height(const LaurentPoly& f, std::span<const MetrizedToricDivisor> ds, const PlaceQ& v,
                         const HeightSpec& spec) {
  check_family(f, ds, static_cast<std::size_t>(f.rank()));
  if (f.is_monomial()) return Value();
  return global_term(f, ds, v, spec) + rho_at_zero(f, v, spec) * degree_of_ambient(ds);
}

HeightReport global_height(const LaurentPoly& f, std::span<const MetrizedToricDivisor> ds, const HeightSpec& spec) {
  check_family(f, ds, static_cast<std::size_t>(f.rank()));
  if (f.is_monomial()) return zero_cycle_report(spec);
  HeightReport r;
  r.spec = spec;
  r.degree = degree_of_ambient(ds);
  for (const auto& v : active_places(f, ds)) r.per_place.emplace_back(v, global_term(f, ds, v, spec));
  return finish(std::move(r));
}

HeightReport canonical_height(const LaurentPoly& f, std::span<const MetrizedToricDivisor> ds,
                              const HeightSpec& spec) {
  check_family(f, ds, static_cast<std::size_t>(f.rank()));
  for (const auto& d : ds)
    if (!d.is_canonical()) throw std::invalid_argument("canonical_height requires canonical metrics");
  if (f.is_monomial()) return zero_cycle_report(spec);
  HeightReport r;
  r.spec = spec;
  r.degree = degree_of_ambient(ds);
  for (const auto& v : active_places(f, ds)) r.per_place.emplace_back(v, -(rho_at_zero(f, v, spec) * r.degree));
  return finish(std::move(r));
}

HeightReport rho_height(const LaurentPoly& f, const HeightSpec& spec) {
  if (f.is_monomial()) return zero_cycle_report(spec);
  HeightReport r;
  r.spec = spec;
  const int n = f.rank();
  const bool null_np = newton_polytope(f).dimension() < n;
  for (const auto& v : active_places(f, {})) {
    if (null_np) {
      r.per_place.emplace_back(v, Value());
      continue;
    }
    r.per_place.emplace_back(v, integrate(dual_ronkin(f, v, spec)) * factorial(n + 1));
  }
  return finish(std::move(r));
}

HeightReport fs_height(const LaurentPoly& f, const HeightSpec& spec) {
  const int n = f.rank();
  if (n < 1) throw std::invalid_argument("fs_height: rank must be positive");
  if (f.is_monomial()) return zero_cycle_report(spec);
  std::vector<MetrizedToricDivisor> ds(static_cast<std::size_t>(n), MetrizedToricDivisor::fubini_study(n));
  HeightReport r;
  r.spec = spec;
  r.degree = 1;
  r.per_place.emplace_back(PlaceQ::arch(), global_term(f, ds, PlaceQ::arch(), spec));
  for (const auto& p : bad_primes(f)) r.per_place.emplace_back(p, -rho_at_zero(f, p, spec));
  return finish(std::move(r));
}

HeightReport binomial_height_via_projection(const LatticePoint& m, std::span<const MetrizedToricDivisor> ds,
                                            const HeightSpec& spec) {
  if (!is_primitive(m)) throw std::invalid_argument("binomial_height_via_projection: m must be primitive");
  const int n = static_cast<int>(m.size());
  if (ds.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("expected one divisor per rank");
  for (const auto& d : ds)
    if (d.ambient_rank() != n) throw std::invalid_argument("divisor rank does not match m");
  HeightReport r;
  r.spec = spec;
  r.degree = degree_of_ambient(ds);
  std::vector<PlaceQ> places{PlaceQ::arch()};
  for (const auto& d : ds) places = merge_places(std::move(places), d.special_places());
  for (const auto& v : places) {
    std::vector<ConcaveFn> gs;
    for (const auto& d : ds) gs.push_back(d.roof_at(v, spec.fs_k));
    r.per_place.emplace_back(v, mi_segment_projection(m, gs));
  }
  return finish(std::move(r));
}

}  // namespace toric
