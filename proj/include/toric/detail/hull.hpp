#pragma once

// Exact beneath-beyond convex hull in R^d. Points have d-1 rational
// coordinates followed by one coordinate of type Last (Rational or LinLog),
// which is enough for lifted graphs of functions with LinLog values.
// Orientation tests run on a double filter with a rigorous error bound and
// fall back to exact arithmetic when the filter cannot decide.

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "toric/errors.hpp"
#include "toric/exactnum.hpp"

namespace toric::detail {

struct Ball {
  double mid = 0.0;
  double rad = 0.0;
};

inline double grow(double rad, double mid) {
  return (rad + std::fabs(mid) * 0x1p-52) * (1 + 0x1p-50) + 0x1p-1000;
}
inline Ball operator+(Ball a, Ball b) {
  double m = a.mid + b.mid;
  return {m, grow(a.rad + b.rad, m)};
}
inline Ball operator-(Ball a, Ball b) {
  double m = a.mid - b.mid;
  return {m, grow(a.rad + b.rad, m)};
}
inline Ball operator*(Ball a, Ball b) {
  double m = a.mid * b.mid;
  return {m, grow(std::fabs(a.mid) * b.rad + std::fabs(b.mid) * a.rad + a.rad * b.rad, m)};
}
inline int filtered_sign(Ball b) {
  if (b.mid - b.rad > 0) return 1;
  if (b.mid + b.rad < 0) return -1;
  return 0;  // undecided (also for NaN)
}

inline Ball ball_of(const Rational& q) {
  double d = q.get_d();
  return {d, std::fabs(d) * 0x1p-51 + 0x1p-1000};
}
inline Ball ball_of(const LinLog& x) {
  Approx a = x.quick_approx();
  return {a.value, a.err};
}
inline int sign_of(const Rational& q) { return sgn(q); }
inline int sign_of(const LinLog& x) { return x.sign(); }
inline bool is_zero_of(const Rational& q) { return q == 0; }
inline bool is_zero_of(const LinLog& x) { return x.is_zero(); }

// Determinant of a small square rational matrix.
inline Rational det(std::vector<std::vector<Rational>> m) {
  const std::size_t n = m.size();
  Rational d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      d = -d;
    }
    d *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return d;
}

template <class Last>
struct HullPoint {
  std::vector<Rational> head;
  Last last;
};

template <class Last>
struct HullFacet {
  std::vector<int> vertices;       // sorted point indices, d of them
  std::vector<Last> head_normal;   // outward normal, first d-1 components
  Rational last_normal;            // outward normal, last component
  Last offset;                     // normal . x on the facet
};

// Indices of a maximal affinely independent subset, chosen greedily in
// input order. Stops once `limit` points have been found.
template <class Last>
std::vector<int> affine_basis(const std::vector<HullPoint<Last>>& pts, std::size_t limit = SIZE_MAX) {
  std::vector<int> idx;
  if (pts.empty()) return idx;
  idx.push_back(0);
  const std::size_t h = pts[0].head.size();
  struct Row {
    std::vector<Rational> head;
    Last last;
    std::size_t pivot;
  };
  std::vector<Row> rows;
  bool have_last = false;
  for (std::size_t i = 1; i < pts.size() && idx.size() < limit; ++i) {
    Row r{std::vector<Rational>(h), Last(pts[i].last - pts[0].last), 0};
    for (std::size_t k = 0; k < h; ++k) r.head[k] = pts[i].head[k] - pts[0].head[k];
    for (const auto& b : rows) {
      if (r.head[b.pivot] == 0) continue;
      Rational f = r.head[b.pivot] / b.head[b.pivot];
      for (std::size_t k = 0; k < h; ++k) r.head[k] -= f * b.head[k];
      r.last -= Last(b.last * f);
    }
    std::size_t piv = 0;
    while (piv < h && r.head[piv] == 0) ++piv;
    if (piv < h) {
      r.pivot = piv;
      rows.push_back(std::move(r));
      idx.push_back(static_cast<int>(i));
    } else if (!have_last && !is_zero_of(r.last)) {
      have_last = true;
      idx.push_back(static_cast<int>(i));
    }
  }
  return idx;
}

template <class Last>
class Hull {
 public:
  // pts must be full-dimensional in R^d, d = head size + 1.
  explicit Hull(const std::vector<HullPoint<Last>>& pts) : pts_(pts), d_(pts.empty() ? 0 : pts[0].head.size() + 1) {
    if (pts_.empty()) throw std::invalid_argument("hull of no points");
    balls_.reserve(pts_.size());
    for (const auto& p : pts_) {
      std::vector<Ball> b;
      for (const auto& x : p.head) b.push_back(ball_of(x));
      b.push_back(ball_of(p.last));
      balls_.push_back(std::move(b));
    }
    std::vector<int> simplex = affine_basis(pts_, d_ + 1);
    if (simplex.size() != d_ + 1) throw InvariantViolation("hull input is not full-dimensional");
    interior_.head.assign(d_ - 1, 0);
    interior_.last = Last(0);
    for (int i : simplex) {
      for (std::size_t k = 0; k + 1 < d_; ++k) interior_.head[k] += pts_[i].head[k];
      interior_.last += pts_[i].last;
    }
    const Rational inv(1, static_cast<long>(d_ + 1));
    for (auto& x : interior_.head) x *= inv;
    interior_.last = Last(interior_.last * inv);
    for (std::size_t skip = 0; skip <= d_; ++skip) {
      std::vector<int> v;
      for (std::size_t k = 0; k <= d_; ++k)
        if (k != skip) v.push_back(simplex[k]);
      std::sort(v.begin(), v.end());
      add_facet(std::move(v));
    }
    std::vector<char> used(pts_.size(), 0);
    for (int i : simplex) used[i] = 1;
    for (std::size_t i = 0; i < pts_.size(); ++i)
      if (!used[i]) insert(static_cast<int>(i));
    std::erase_if(facets_, [](const Rec& r) { return !r.alive; });
  }

  std::size_t dim() const { return d_; }
  std::size_t facet_count() const { return facets_.size(); }
  const HullFacet<Last>& facet(std::size_t i) const { return facets_[i].f; }
  const std::vector<HullPoint<Last>>& points() const { return pts_; }

  // Exact side of point i relative to facet f (positive = beyond).
  int side(const HullFacet<Last>& f, const HullPoint<Last>& p) const {
    Last s = Last(f.last_normal * p.last) - f.offset;
    for (std::size_t k = 0; k + 1 < d_; ++k) s += Last(f.head_normal[k] * p.head[k]);
    return sign_of(s);
  }

 private:
  struct Rec {
    HullFacet<Last> f;
    std::vector<Ball> nb;  // normal balls, d entries
    Ball ob;
    bool alive = true;
  };

  int side_filtered(const Rec& r, int i) const {
    const auto& b = balls_[i];
    Ball s = r.nb[d_ - 1] * b[d_ - 1] - r.ob;
    for (std::size_t k = 0; k + 1 < d_; ++k) s = s + r.nb[k] * b[k];
    int sg = filtered_sign(s);
    if (sg != 0) return sg;
    return side(r.f, pts_[i]);
  }

  void add_facet(std::vector<int> v) {
    HullFacet<Last> f;
    const auto& p0 = pts_[v[0]];
    const std::size_t m = d_ - 1;  // rows
    std::vector<std::vector<Rational>> head(m, std::vector<Rational>(m));
    std::vector<Last> last(m);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& pi = pts_[v[i + 1]];
      for (std::size_t k = 0; k < m; ++k) head[i][k] = pi.head[k] - p0.head[k];
      last[i] = Last(pi.last - p0.last);
    }
    // Generalized cross product: n_j = (-1)^j det(R without column j).
    f.last_normal = det(head);
    if (m % 2 == 1) f.last_normal = -f.last_normal;
    f.head_normal.assign(m, Last(0));
    for (std::size_t j = 0; j < m; ++j) {
      Last s(0);
      for (std::size_t i = 0; i < m; ++i) {
        if (is_zero_of(last[i])) continue;
        std::vector<std::vector<Rational>> minor;
        for (std::size_t r = 0; r < m; ++r) {
          if (r == i) continue;
          std::vector<Rational> row;
          for (std::size_t k = 0; k < m; ++k)
            if (k != j) row.push_back(head[r][k]);
          minor.push_back(std::move(row));
        }
        Rational c = det(std::move(minor));
        if ((i + m - 1) % 2 == 1) c = -c;
        if (c != 0) s += Last(last[i] * c);
      }
      f.head_normal[j] = (j % 2 == 1) ? Last(-s) : s;
    }
    f.offset = Last(f.last_normal * p0.last);
    for (std::size_t k = 0; k < m; ++k) f.offset += Last(f.head_normal[k] * p0.head[k]);
    int s = side(f, interior_);
    if (s == 0) throw InvariantViolation("degenerate hull facet");
    if (s > 0) {
      f.last_normal = -f.last_normal;
      for (auto& x : f.head_normal) x = Last(-x);
      f.offset = Last(-f.offset);
    }
    Rec r;
    for (const auto& x : f.head_normal) r.nb.push_back(ball_of(x));
    r.nb.push_back(ball_of(f.last_normal));
    r.ob = ball_of(f.offset);
    f.vertices = std::move(v);
    r.f = std::move(f);
    facets_.push_back(std::move(r));
    ++alive_;
  }

  void insert(int i) {
    std::vector<std::size_t> visible;
    for (std::size_t k = 0; k < facets_.size(); ++k)
      if (facets_[k].alive && side_filtered(facets_[k], i) > 0) visible.push_back(k);
    if (visible.empty()) return;
    std::map<std::vector<int>, int> ridges;
    for (std::size_t k : visible) {
      const auto& v = facets_[k].f.vertices;
      for (std::size_t skip = 0; skip < v.size(); ++skip) {
        std::vector<int> r;
        r.reserve(v.size() - 1);
        for (std::size_t t = 0; t < v.size(); ++t)
          if (t != skip) r.push_back(v[t]);
        ++ridges[r];
      }
      facets_[k].alive = false;
      --alive_;
    }
    for (auto& [r, count] : ridges) {
      if (count != 1) continue;
      std::vector<int> v = r;
      v.insert(std::upper_bound(v.begin(), v.end(), i), i);
      add_facet(std::move(v));
    }
    if (facets_.size() > 2 * alive_ + 64) std::erase_if(facets_, [](const Rec& r) { return !r.alive; });
  }

  std::vector<HullPoint<Last>> pts_;
  std::size_t d_;
  std::vector<std::vector<Ball>> balls_;
  HullPoint<Last> interior_;
  std::vector<Rec> facets_;
  std::size_t alive_ = 0;
};

}  // namespace toric::detail
