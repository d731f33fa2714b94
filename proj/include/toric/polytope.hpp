#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "toric/lattice.hpp"

namespace toric {

// An affine coordinate system on the affine span of a point set:
// x = origin + sum_i c_i * directions[i]. Pivot coordinates make the
// inverse map a small rational solve.
class AffineChart {
 public:
  AffineChart() = default;
  // Identity chart on Q^n.
  static AffineChart identity(int n);
  // Chart on the affine span of the given points (affinely independent).
  static AffineChart through(const std::vector<QPoint>& basis_points);

  int ambient_rank() const { return n_; }
  int dim() const { return static_cast<int>(directions_.size()); }
  bool is_identity() const { return identity_; }
  const QPoint& origin() const { return origin_; }
  const std::vector<QPoint>& directions() const { return directions_; }

  // Coordinates of x, or nullopt if x is off the affine span.
  std::optional<QPoint> to_chart(const QPoint& x) const;
  QPoint from_chart(const QPoint& c) const;

 private:
  int n_ = 0;
  bool identity_ = false;
  QPoint origin_;
  std::vector<QPoint> directions_;
  std::vector<int> pivots_;
  std::vector<QPoint> inverse_;  // k x k, inverse of directions on pivot rows
};

// Inequality <normal, x> >= offset with primitive inward normal.
struct Halfspace {
  LatticePoint normal;
  Rational offset;
};

// Convex hull of finitely many points of M_Q, stored by its vertices in
// lexicographic order. Immutable.
class RationalPolytope {
 public:
  RationalPolytope() = default;
  static RationalPolytope hull(int rank, std::vector<QPoint> points);
  static RationalPolytope simplex(int n);  // standard simplex conv(0, e_1, ..., e_n)
  static RationalPolytope box(const QPoint& lo, const QPoint& hi);

  int ambient_rank() const;
  int dimension() const;
  const std::vector<QPoint>& vertices() const;
  // n-dimensional Lebesgue volume (unit cube = 1); 0 if not full-dimensional.
  const Rational& volume() const;
  // Volume relative to the chart of the affine span (lattice-normalized only
  // when the chart comes from a lattice basis).
  const Rational& chart_volume() const;
  const AffineChart& chart() const;
  // Facet inequalities in chart coordinates.
  const std::vector<Halfspace>& chart_halfspaces() const;

  bool contains(const QPoint& x) const;
  friend bool operator==(const RationalPolytope& a, const RationalPolytope& b);

 private:
  struct Data;
  std::shared_ptr<const Data> d_;
};

struct FacetData {
  LatticePoint normal;  // primitive, inward
  Rational offset;      // min over P of <normal, x>
  RationalPolytope face;
};

Rational support_value(const RationalPolytope& p, const QPoint& u);
RationalPolytope face(const RationalPolytope& p, const QPoint& u);
// Facets of a full-dimensional polytope.
std::vector<FacetData> facets(const RationalPolytope& p);
RationalPolytope minkowski_sum(const RationalPolytope& a, const RationalPolytope& b);
RationalPolytope minkowski_sum(std::span<const RationalPolytope> ps);
RationalPolytope dilate(const RationalPolytope& p, const Rational& s);
Rational mixed_volume(std::span<const RationalPolytope> ps);
RationalPolytope project(const RationalPolytope& p, const LatticeProjection& pi);

// Points of p whose coordinates lie in (1/k)Z.
std::vector<QPoint> grid_points(const RationalPolytope& p, int k);

}  // namespace toric
