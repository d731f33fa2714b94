#include "toric/polytope.hpp"

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

HullPoint<Rational> as_hull_point(const QPoint& x) {
  HullPoint<Rational> p;
  p.head.assign(x.begin(), x.end() - 1);
  p.last = x.back();
  return p;
}

// Rank of a set of rational vectors.
std::size_t rank_of(std::vector<QPoint> rows) {
  if (rows.empty()) return 0;
  const std::size_t n = rows[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][c] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    for (std::size_t i = r + 1; i < rows.size(); ++i) {
      if (rows[i][c] == 0) continue;
      Rational f = rows[i][c] / rows[r][c];
      for (std::size_t k = c; k < n; ++k) rows[i][k] -= f * rows[r][k];
    }
    ++r;
  }
  return r;
}

Rational factorial(int k) {
  Rational f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

struct FullDimResult {
  std::vector<int> vertex_ids;
  std::vector<Halfspace> halfspaces;
  Rational volume;
};

// Vertices, facets and volume of the hull of full-dimensional points in Q^k.
FullDimResult full_dim_hull(const std::vector<QPoint>& pts, int k) {
  FullDimResult out;
  if (k == 1) {
    int lo = 0, hi = 0;
    for (int i = 1; i < static_cast<int>(pts.size()); ++i) {
      if (pts[i][0] < pts[lo][0]) lo = i;
      if (pts[i][0] > pts[hi][0]) hi = i;
    }
    out.vertex_ids = {lo, hi};
    out.halfspaces = {{lattice_point({1}), pts[lo][0]}, {lattice_point({-1}), -pts[hi][0]}};
    out.volume = pts[hi][0] - pts[lo][0];
    return out;
  }
  std::vector<HullPoint<Rational>> hp;
  hp.reserve(pts.size());
  for (const auto& p : pts) hp.push_back(as_hull_point(p));
  Hull<Rational> hull(hp);

  struct Group {
    Rational offset;
    std::vector<std::size_t> facets;
  };
  std::map<LatticePoint, Group> groups;
  std::map<int, std::set<const LatticePoint*>> incident;
  for (std::size_t f = 0; f < hull.facet_count(); ++f) {
    const auto& hf = hull.facet(f);
    QPoint n(hf.head_normal.begin(), hf.head_normal.end());
    n.push_back(hf.last_normal);
    LatticePoint prim = primitive_direction(n);
    auto [it, fresh] = groups.try_emplace(prim);
    if (fresh) it->second.offset = dot(prim, pts[hf.vertices[0]]);
    it->second.facets.push_back(f);
    for (int v : hf.vertices) incident[v].insert(&it->first);
  }
  for (const auto& [v, normals] : incident) {
    std::vector<QPoint> rows;
    for (const auto* n : normals) rows.push_back(to_q(*n));
    if (rank_of(std::move(rows)) == static_cast<std::size_t>(k)) out.vertex_ids.push_back(v);
  }
  for (const auto& [n, g] : groups) {
    LatticePoint inward = n;
    for (auto& x : inward) x = -x;
    out.halfspaces.push_back({std::move(inward), Rational(-g.offset)});
  }
  int apex = *std::min_element(out.vertex_ids.begin(), out.vertex_ids.end(),
                               [&](int a, int b) { return pts[a] < pts[b]; });
  Rational vol = 0;
  for (std::size_t f = 0; f < hull.facet_count(); ++f) {
    const auto& v = hull.facet(f).vertices;
    if (std::find(v.begin(), v.end(), apex) != v.end()) continue;
    std::vector<std::vector<Rational>> m;
    for (int i : v) m.push_back(pts[i] - pts[apex]);
    vol += abs(detail::det(std::move(m)));
  }
  out.volume = vol / factorial(k);
  return out;
}

}  // namespace

// AffineChart

AffineChart AffineChart::identity(int n) {
  AffineChart c;
  c.n_ = n;
  c.identity_ = true;
  c.origin_.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    QPoint e(n, 0);
    e[i] = 1;
    c.directions_.push_back(std::move(e));
    c.pivots_.push_back(i);
  }
  c.inverse_ = c.directions_;
  return c;
}

AffineChart AffineChart::through(const std::vector<QPoint>& basis_points) {
  if (basis_points.empty()) throw std::invalid_argument("chart through no points");
  AffineChart c;
  c.n_ = static_cast<int>(basis_points[0].size());
  c.origin_ = basis_points[0];
  for (std::size_t i = 1; i < basis_points.size(); ++i) c.directions_.push_back(basis_points[i] - c.origin_);
  const std::size_t k = c.directions_.size();
  // Pick k coordinates on which the directions are independent.
  std::vector<QPoint> rows;
  for (int r = 0; r < c.n_ && c.pivots_.size() < k; ++r) {
    QPoint row(k);
    for (std::size_t j = 0; j < k; ++j) row[j] = c.directions_[j][r];
    rows.push_back(row);
    if (rank_of(rows) == rows.size()) c.pivots_.push_back(r);
    else rows.pop_back();
  }
  if (c.pivots_.size() != k) throw std::invalid_argument("chart points are affinely dependent");
  c.inverse_ = invert(std::move(rows));
  return c;
}

std::optional<QPoint> AffineChart::to_chart(const QPoint& x) const {
  if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("rank mismatch");
  if (identity_) return x;
  const std::size_t k = directions_.size();
  QPoint c(k, 0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) c[i] += inverse_[i][j] * (x[pivots_[j]] - origin_[pivots_[j]]);
  if (from_chart(c) != x) return std::nullopt;
  return c;
}

QPoint AffineChart::from_chart(const QPoint& c) const {
  if (c.size() != directions_.size()) throw std::invalid_argument("chart rank mismatch");
  if (identity_) return c;
  QPoint x = origin_;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (c[j] != 0)
      for (int i = 0; i < n_; ++i) x[i] += c[j] * directions_[j][i];
  return x;
}

// RationalPolytope

struct RationalPolytope::Data {
  int rank = 0;
  int dim = 0;
  std::vector<QPoint> vertices;
  AffineChart chart;
  std::vector<Halfspace> halfspaces;
  Rational chart_volume;
  Rational volume;
};

RationalPolytope RationalPolytope::hull(int rank, std::vector<QPoint> points) {
  if (points.empty()) throw std::invalid_argument("polytope: no points");
  for (const auto& p : points)
    if (static_cast<int>(p.size()) != rank) throw std::invalid_argument("polytope: rank mismatch");
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  auto d = std::make_shared<Data>();
  d->rank = rank;
  std::vector<int> basis;
  if (rank > 0) {
    std::vector<HullPoint<Rational>> hp;
    hp.reserve(points.size());
    for (const auto& p : points) hp.push_back(as_hull_point(p));
    basis = detail::affine_basis(hp, static_cast<std::size_t>(rank) + 1);
  } else {
    basis = {0};
  }
  const int k = static_cast<int>(basis.size()) - 1;
  d->dim = k;
  if (k == 0) {
    d->vertices = {points[basis[0]]};
    d->chart = AffineChart::through({points[basis[0]]});
    d->chart_volume = 1;
    d->volume = rank == 0 ? 1 : 0;
    RationalPolytope p;
    p.d_ = std::move(d);
    return p;
  }
  if (k == rank) {
    d->chart = AffineChart::identity(rank);
  } else {
    std::vector<QPoint> bp;
    for (int i : basis) bp.push_back(points[i]);
    d->chart = AffineChart::through(bp);
  }
  std::vector<QPoint> local;
  local.reserve(points.size());
  for (const auto& p : points) local.push_back(*d->chart.to_chart(p));
  FullDimResult r = full_dim_hull(local, k);
  for (int i : r.vertex_ids) d->vertices.push_back(points[i]);
  std::sort(d->vertices.begin(), d->vertices.end());
  d->halfspaces = std::move(r.halfspaces);
  d->chart_volume = r.volume;
  d->volume = k == rank ? r.volume : Rational(0);
  RationalPolytope p;
  p.d_ = std::move(d);
  return p;
}

RationalPolytope RationalPolytope::simplex(int n) {
  std::vector<QPoint> pts{QPoint(n, 0)};
  for (int i = 0; i < n; ++i) {
    QPoint e(n, 0);
    e[i] = 1;
    pts.push_back(std::move(e));
  }
  return hull(n, std::move(pts));
}

RationalPolytope RationalPolytope::box(const QPoint& lo, const QPoint& hi) {
  const std::size_t n = lo.size();
  std::vector<QPoint> pts;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    QPoint x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1 ? hi[i] : lo[i];
    pts.push_back(std::move(x));
  }
  return hull(static_cast<int>(n), std::move(pts));
}

int RationalPolytope::ambient_rank() const { return d_->rank; }
int RationalPolytope::dimension() const { return d_->dim; }
const std::vector<QPoint>& RationalPolytope::vertices() const { return d_->vertices; }
const Rational& RationalPolytope::volume() const { return d_->volume; }
const Rational& RationalPolytope::chart_volume() const { return d_->chart_volume; }
const AffineChart& RationalPolytope::chart() const { return d_->chart; }
const std::vector<Halfspace>& RationalPolytope::chart_halfspaces() const { return d_->halfspaces; }

bool RationalPolytope::contains(const QPoint& x) const {
  if (static_cast<int>(x.size()) != d_->rank) throw std::invalid_argument("contains: rank mismatch");
  if (d_->dim == 0) return x == d_->vertices[0];
  auto c = d_->chart.to_chart(x);
  if (!c) return false;
  for (const auto& h : d_->halfspaces)
    if (dot(h.normal, *c) < h.offset) return false;
  return true;
}

bool operator==(const RationalPolytope& a, const RationalPolytope& b) {
  return a.ambient_rank() == b.ambient_rank() && a.vertices() == b.vertices();
}

Rational support_value(const RationalPolytope& p, const QPoint& u) {
  Rational best = dot(p.vertices()[0], u);
  for (const auto& v : p.vertices()) best = std::min(best, Rational(dot(v, u)));
  return best;
}

RationalPolytope face(const RationalPolytope& p, const QPoint& u) {
  Rational m = support_value(p, u);
  std::vector<QPoint> pts;
  for (const auto& v : p.vertices())
    if (dot(v, u) == m) pts.push_back(v);
  return RationalPolytope::hull(p.ambient_rank(), std::move(pts));
}

std::vector<FacetData> facets(const RationalPolytope& p) {
  if (p.dimension() != p.ambient_rank() || p.ambient_rank() == 0)
    throw std::invalid_argument("facets: polytope is not full-dimensional");
  std::vector<FacetData> out;
  for (const auto& h : p.chart_halfspaces()) {
    std::vector<QPoint> pts;
    for (const auto& v : p.vertices())
      if (dot(h.normal, v) == h.offset) pts.push_back(v);
    out.push_back({h.normal, h.offset, RationalPolytope::hull(p.ambient_rank(), std::move(pts))});
  }
  return out;
}

RationalPolytope minkowski_sum(const RationalPolytope& a, const RationalPolytope& b) {
  if (a.ambient_rank() != b.ambient_rank()) throw std::invalid_argument("minkowski_sum: rank mismatch");
  std::vector<QPoint> pts;
  pts.reserve(a.vertices().size() * b.vertices().size());
  for (const auto& x : a.vertices())
    for (const auto& y : b.vertices()) pts.push_back(x + y);
  return RationalPolytope::hull(a.ambient_rank(), std::move(pts));
}

RationalPolytope minkowski_sum(std::span<const RationalPolytope> ps) {
  if (ps.empty()) throw std::invalid_argument("minkowski_sum: empty list");
  RationalPolytope s = ps[0];
  for (std::size_t i = 1; i < ps.size(); ++i) s = minkowski_sum(s, ps[i]);
  return s;
}

RationalPolytope dilate(const RationalPolytope& p, const Rational& s) {
  if (s < 0) throw std::invalid_argument("dilate: negative factor");
  std::vector<QPoint> pts;
  for (const auto& v : p.vertices()) pts.push_back(s * v);
  return RationalPolytope::hull(p.ambient_rank(), std::move(pts));
}

Rational mixed_volume(std::span<const RationalPolytope> ps) {
  const std::size_t n = ps.size();
  for (const auto& p : ps)
    if (static_cast<std::size_t>(p.ambient_rank()) != n)
      throw std::invalid_argument("mixed_volume: need n polytopes in rank n");
  if (n == 0) return 1;
  std::vector<RationalPolytope> sums(std::size_t{1} << n);
  Rational mv = 0;
  for (std::size_t mask = 1; mask < sums.size(); ++mask) {
    std::size_t low = static_cast<std::size_t>(__builtin_ctzll(mask));
    std::size_t rest = mask & (mask - 1);
    sums[mask] = rest == 0 ? ps[low] : minkowski_sum(sums[rest], ps[low]);
    int size = __builtin_popcountll(mask);
    if ((n - size) % 2 == 0) mv += sums[mask].volume();
    else mv -= sums[mask].volume();
  }
  return mv;
}

RationalPolytope project(const RationalPolytope& p, const LatticeProjection& pi) {
  if (p.ambient_rank() != pi.source_rank) throw std::invalid_argument("project: rank mismatch");
  std::vector<QPoint> pts;
  for (const auto& v : p.vertices()) pts.push_back(pi.apply(v));
  return RationalPolytope::hull(pi.target_rank, std::move(pts));
}

std::vector<QPoint> grid_points(const RationalPolytope& p, int k) {
  if (k <= 0) throw std::invalid_argument("grid_points: k must be positive");
  const int n = p.ambient_rank();
  if (n == 0) return {QPoint{}};
  std::vector<long> lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    Rational a = p.vertices()[0][i], b = a;
    for (const auto& v : p.vertices()) {
      a = std::min(a, v[i]);
      b = std::max(b, v[i]);
    }
    Integer l, h;
    Rational ka = a * k, kb = b * k;
    mpz_cdiv_q(l.get_mpz_t(), ka.get_num_mpz_t(), ka.get_den_mpz_t());
    mpz_fdiv_q(h.get_mpz_t(), kb.get_num_mpz_t(), kb.get_den_mpz_t());
    lo[i] = l.get_si();
    hi[i] = h.get_si();
  }
  std::vector<QPoint> out;
  std::vector<long> a = lo;
  for (int i = 0; i < n; ++i)
    if (lo[i] > hi[i]) return out;
  for (;;) {
    QPoint x(n);
    for (int i = 0; i < n; ++i) x[i] = Rational(a[i], k), x[i].canonicalize();
    if (p.contains(x)) out.push_back(std::move(x));
    int i = n - 1;
    while (i >= 0 && a[i] == hi[i]) a[i] = lo[i], --i;
    if (i < 0) break;
    ++a[i];
  }
  return out;
}

}  // namespace toric
