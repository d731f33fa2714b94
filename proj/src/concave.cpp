#include "toric/concave.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "toric/detail/hull.hpp"
#include "toric/errors.hpp"

namespace toric {

namespace {

using detail::Hull;
using detail::HullPoint;

Rational factorial(std::size_t k) {
  Rational f = 1;
  for (std::size_t i = 2; i <= k; ++i) f *= static_cast<unsigned long>(i);
  return f;
}

void check_rank(int got, int want) {
  if (got != want) throw std::invalid_argument("rank mismatch");
}

}  // namespace

LinLog dot(const QPoint& a, const LinLogPoint& b) {
  check_rank(static_cast<int>(a.size()), static_cast<int>(b.size()));
  LinLog s;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0) s += b[i] * a[i];
  return s;
}

LinLogPoint to_linlog(const QPoint& x) { return LinLogPoint(x.begin(), x.end()); }

// ConcaveFn

struct ConcaveFn::Data {
  int rank = 0;
  std::vector<Generator> gens;
  RationalPolytope domain;
  double err = 0.0;
  bool exact = true;
  std::vector<AffinePiece> pieces;
  LinLog integral;
};

ConcaveFn::ConcaveFn(int rank, std::vector<Generator> raw, double inherited_error) {
  if (raw.empty()) throw std::invalid_argument("concave function without generators");
  auto d = std::make_shared<Data>();
  d->rank = rank;
  d->err = inherited_error;
  for (const auto& g : raw) {
    check_rank(static_cast<int>(g.point.size()), rank);
    d->err = std::max(d->err, g.value.error());
    d->exact = d->exact && g.value.is_exact();
  }
  d->exact = d->exact && d->err == 0.0;

  // Deduplicate points, keeping the largest value.
  std::sort(raw.begin(), raw.end(), [](const Generator& a, const Generator& b) { return a.point < b.point; });
  std::vector<Generator> pts;
  for (auto& g : raw) {
    if (!pts.empty() && pts.back().point == g.point) {
      Generator& h = pts.back();
      double e = std::max(h.value.error(), g.value.error());
      LinLog c = max(h.value.center(), g.value.center());
      bool ex = h.value.is_exact() && g.value.is_exact();
      h.value = ex ? Value(c) : Value::approx(c, e);
    } else {
      pts.push_back(std::move(g));
    }
  }

  std::vector<QPoint> xs;
  xs.reserve(pts.size());
  for (const auto& g : pts) xs.push_back(g.point);
  d->domain = RationalPolytope::hull(rank, xs);
  const int k = d->domain.dimension();

  if (k == 0) {
    d->gens = {pts[0]};
    d->integral = rank == 0 ? pts[0].value.center() : LinLog();
    d_ = std::move(d);
    return;
  }

  const AffineChart& chart = d->domain.chart();
  std::vector<HullPoint<LinLog>> lifted;
  lifted.reserve(pts.size() + 1);
  HullPoint<LinLog> apex{QPoint(k, 0), LinLog()};
  for (const auto& g : pts) {
    QPoint c = *chart.to_chart(g.point);
    for (int i = 0; i < k; ++i) apex.head[i] += c[i];
    apex.last += g.value.center();
    lifted.push_back({std::move(c), g.value.center()});
  }
  const Rational inv_n(1, static_cast<long>(pts.size()));
  for (auto& x : apex.head) x *= inv_n;
  apex.last = apex.last * inv_n - LinLog(1);
  lifted.push_back(apex);
  const int apex_id = static_cast<int>(pts.size());

  Hull<LinLog> hull(lifted);

  struct Group {
    LinLog constant;
    std::set<int> points;
    Rational volume;
    LinLog integral;
  };
  std::map<LinLogPoint, Group, StructuralLess> groups;
  const Rational simplex_scale = 1 / factorial(static_cast<std::size_t>(k));
  const Rational mean_scale(1, k + 1);
  for (std::size_t f = 0; f < hull.facet_count(); ++f) {
    const auto& hf = hull.facet(f);
    if (sgn(hf.last_normal) <= 0) continue;
    LinLogPoint slope(k);
    for (int i = 0; i < k; ++i) slope[i] = -hf.head_normal[i] / hf.last_normal;
    auto [it, fresh] = groups.try_emplace(std::move(slope));
    Group& g = it->second;
    if (fresh) g.constant = hf.offset / hf.last_normal;
    std::vector<std::vector<Rational>> m;
    LinLog tsum;
    for (int v : hf.vertices) {
      if (v == apex_id) throw InvariantViolation("upper facet through the auxiliary apex");
      g.points.insert(v);
      tsum += lifted[v].last;
      if (v != hf.vertices[0]) m.push_back(lifted[v].head - lifted[hf.vertices[0]].head);
    }
    Rational vol = abs(detail::det(std::move(m))) * simplex_scale;
    g.volume += vol;
    g.integral += tsum * (vol * mean_scale);
  }

  Rational total = 0;
  std::set<int> keep;
  std::vector<std::pair<const LinLogPoint*, std::vector<int>>> region_vertices;
  for (auto& [slope, g] : groups) {
    std::vector<QPoint> cs;
    std::map<QPoint, int> back;
    for (int v : g.points) {
      cs.push_back(lifted[v].head);
      back.emplace(lifted[v].head, v);
    }
    RationalPolytope region = RationalPolytope::hull(k, cs);
    if (region.dimension() != k) throw InvariantViolation("degenerate region of affinity");
    std::vector<int> ids;
    for (const auto& v : region.vertices()) ids.push_back(back.at(v));
    keep.insert(ids.begin(), ids.end());
    region_vertices.emplace_back(&slope, std::move(ids));
    total += g.volume;
  }
  if (total != d->domain.chart_volume()) throw InvariantViolation("regions of affinity do not tile the domain");

  std::map<int, std::size_t> renumber;
  for (int v : keep) {
    renumber[v] = d->gens.size();
    d->gens.push_back(pts[v]);
  }
  for (auto& [slope, ids] : region_vertices) {
    Group& g = groups.at(*slope);
    AffinePiece p{*slope, g.constant, g.volume, g.integral, {}};
    for (int v : ids) p.generators.push_back(renumber.at(v));
    std::sort(p.generators.begin(), p.generators.end());
    if (k == rank) d->integral += g.integral;
    d->pieces.push_back(std::move(p));
  }
  d_ = std::move(d);
}

ConcaveFn canonicalize(int rank, std::vector<Generator> generators) {
  return ConcaveFn(rank, std::move(generators));
}

int ConcaveFn::ambient_rank() const { return d_->rank; }
const std::vector<Generator>& ConcaveFn::generators() const { return d_->gens; }
const RationalPolytope& ConcaveFn::domain() const { return d_->domain; }
double ConcaveFn::error_bound() const { return d_->err; }
bool ConcaveFn::is_exact() const { return d_->exact; }
const std::vector<AffinePiece>& ConcaveFn::pieces() const { return d_->pieces; }
const LinLog& ConcaveFn::center_integral() const { return d_->integral; }

std::optional<LinLog> ConcaveFn::eval_center(const QPoint& x) const {
  check_rank(static_cast<int>(x.size()), d_->rank);
  if (!d_->domain.contains(x)) return std::nullopt;
  if (d_->pieces.empty()) return d_->gens[0].value.center();
  QPoint c = *d_->domain.chart().to_chart(x);
  std::optional<LinLog> best;
  for (const auto& p : d_->pieces) {
    LinLog v = dot(c, p.slope) + p.constant;
    if (!best || compare(v, *best) < 0) best = std::move(v);
  }
  return best;
}

std::optional<Value> ConcaveFn::eval(const QPoint& x) const {
  auto c = eval_center(x);
  if (!c) return std::nullopt;
  if (d_->exact) return Value(std::move(*c));
  return Value::approx(std::move(*c), d_->err);
}

bool operator==(const ConcaveFn& a, const ConcaveFn& b) {
  return a.ambient_rank() == b.ambient_rank() && a.generators() == b.generators();
}

// MinAffineFn

MinAffineFn::MinAffineFn(int rank, std::vector<AffineForm> pieces) : rank_(rank), pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw std::invalid_argument("min-affine function without pieces");
  for (const auto& p : pieces_) check_rank(static_cast<int>(p.slope.size()), rank_);
}

Value MinAffineFn::eval(const QPoint& u) const {
  check_rank(static_cast<int>(u.size()), rank_);
  std::optional<Value> best;
  for (const auto& p : pieces_) {
    Value v = p.constant + Value(dot(p.slope, u));
    best = best ? min(*best, v) : v;
  }
  return *best;
}

Value MinAffineFn::eval(const LinLogPoint& u) const {
  check_rank(static_cast<int>(u.size()), rank_);
  std::optional<Value> best;
  for (const auto& p : pieces_) {
    Value v = p.constant + Value(dot(p.slope, u));
    best = best ? min(*best, v) : v;
  }
  return *best;
}

LinLog MinAffineFn::eval_center(const LinLogPoint& u) const { return eval(u).center(); }

MinAffineFn MinAffineFn::canonical() const { return legendre_dual(legendre_dual_back(*this)); }

MinAffineFn operator+(const MinAffineFn& a, const MinAffineFn& b) {
  check_rank(a.ambient_rank(), b.ambient_rank());
  std::vector<AffineForm> p;
  for (const auto& x : a.pieces())
    for (const auto& y : b.pieces()) p.push_back({x.slope + y.slope, x.constant + y.constant});
  return MinAffineFn(a.ambient_rank(), std::move(p)).canonical();
}

ConcaveFn indicator(const RationalPolytope& q) {
  std::vector<Generator> g;
  for (const auto& v : q.vertices()) g.push_back({v, Value()});
  return ConcaveFn(q.ambient_rank(), std::move(g));
}

MinAffineFn support_fn(const RationalPolytope& q) {
  std::vector<AffineForm> p;
  for (const auto& v : q.vertices()) p.push_back({v, Value()});
  return MinAffineFn(q.ambient_rank(), std::move(p));
}

MinAffineFn legendre_dual(const ConcaveFn& g) {
  std::vector<AffineForm> p;
  for (const auto& x : g.generators()) p.push_back({x.point, -x.value});
  return MinAffineFn(g.ambient_rank(), std::move(p));
}

ConcaveFn legendre_dual_back(const MinAffineFn& h, const std::optional<RationalPolytope>& domain_hint) {
  std::vector<Generator> g;
  double err = 0.0;
  for (const auto& p : h.pieces()) {
    g.push_back({p.slope, -p.constant});
    err = std::max(err, p.constant.error());
  }
  ConcaveFn f(h.ambient_rank(), std::move(g), err);
  if (domain_hint && !(f.domain() == *domain_hint))
    throw std::invalid_argument("legendre_dual_back: stability set differs from the domain hint");
  return f;
}

ConcaveFn sup_convolve(const ConcaveFn& g, const ConcaveFn& h) {
  check_rank(g.ambient_rank(), h.ambient_rank());
  std::vector<Generator> s;
  s.reserve(g.generators().size() * h.generators().size());
  for (const auto& a : g.generators())
    for (const auto& b : h.generators()) s.push_back({a.point + b.point, a.value + b.value});
  return ConcaveFn(g.ambient_rank(), std::move(s), g.error_bound() + h.error_bound());
}

ConcaveFn translate(const ConcaveFn& g, const QPoint& x0) {
  check_rank(static_cast<int>(x0.size()), g.ambient_rank());
  std::vector<Generator> s;
  for (const auto& a : g.generators()) s.push_back({a.point + x0, a.value});
  return ConcaveFn(g.ambient_rank(), std::move(s), g.error_bound());
}

ConcaveFn add_constant(const ConcaveFn& g, const Value& c) {
  std::vector<Generator> s;
  for (const auto& a : g.generators()) s.push_back({a.point, a.value + c});
  return ConcaveFn(g.ambient_rank(), std::move(s), g.error_bound() + c.error());
}

ConcaveFn right_scale(const ConcaveFn& g, const Rational& lambda) {
  if (lambda <= 0) throw std::invalid_argument("right_scale: factor must be positive");
  std::vector<Generator> s;
  for (const auto& a : g.generators()) s.push_back({lambda * a.point, a.value * lambda});
  return ConcaveFn(g.ambient_rank(), std::move(s), g.error_bound() * lambda.get_d() * (1 + 1e-15));
}

ConcaveFn push_forward(const ConcaveFn& g, const LatticeProjection& pi) {
  check_rank(g.ambient_rank(), pi.source_rank);
  std::vector<Generator> s;
  for (const auto& a : g.generators()) s.push_back({pi.apply(a.point), a.value});
  return ConcaveFn(pi.target_rank, std::move(s), g.error_bound());
}

ConcaveFn restrict_to(const ConcaveFn& g, const RationalPolytope& face) {
  std::vector<Generator> s;
  for (const auto& a : g.generators())
    if (face.contains(a.point)) s.push_back(a);
  if (s.empty()) throw std::invalid_argument("restrict_to: face misses the domain");
  return ConcaveFn(g.ambient_rank(), std::move(s), g.error_bound());
}

ConcaveFn sample_concave(const ConcaveOracle& oracle, const RationalPolytope& q, int k) {
  std::vector<QPoint> pts = grid_points(q, k);
  pts.insert(pts.end(), q.vertices().begin(), q.vertices().end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Generator> g;
  g.reserve(pts.size());
  for (auto& x : pts) {
    Value v = oracle(x);
    g.push_back({std::move(x), std::move(v)});
  }
  return ConcaveFn(q.ambient_rank(), std::move(g));
}

}  // namespace toric
