#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "toric/exactnum.hpp"
#include "toric/lattice.hpp"
#include "toric/polytope.hpp"

namespace toric {

// A point of M_R whose coordinates are LinLog numbers. Slopes of functions
// with logarithmic values live here.
using LinLogPoint = std::vector<LinLog>;

LinLog dot(const QPoint& a, const LinLogPoint& b);
LinLogPoint to_linlog(const QPoint& x);

struct Generator {
  QPoint point;
  Value value;
  friend bool operator==(const Generator& a, const Generator& b) {
    return a.point == b.point && a.value == b.value;
  }
};

// A maximal region of affinity of a concave function, in the coordinates of
// the function's domain chart: value = <slope, c> + constant.
struct AffinePiece {
  LinLogPoint slope;
  LinLog constant;
  Rational volume;                     // chart volume of the region
  LinLog integral;                     // integral of the center function over the region
  std::vector<std::size_t> generators; // indices into ConcaveFn::generators()
};

// Piecewise-affine concave function on a rational polytope: the smallest
// concave function lying above finitely many generators (x_i, t_i). Stored in
// normal form: only vertices of the bounded upper faces of the hypograph.
// Predicates use the exact centers of approximate values; error_bound() is a
// sup-norm bound on the distance to the function the inputs approximate.
class ConcaveFn {
 public:
  ConcaveFn() = default;
  ConcaveFn(int rank, std::vector<Generator> generators, double inherited_error = 0.0);

  int ambient_rank() const;
  const std::vector<Generator>& generators() const;
  const RationalPolytope& domain() const;
  double error_bound() const;
  bool is_exact() const;

  std::optional<Value> eval(const QPoint& x) const;
  // Exact value of the center function.
  std::optional<LinLog> eval_center(const QPoint& x) const;

  // Regions of affinity in chart coordinates of domain().chart(); empty when
  // the domain is a point.
  const std::vector<AffinePiece>& pieces() const;
  // Integral of the center function over the domain (n-dimensional Lebesgue
  // measure on M_R; 0 when the domain is not full-dimensional).
  const LinLog& center_integral() const;

  friend bool operator==(const ConcaveFn& a, const ConcaveFn& b);

 private:
  struct Data;
  std::shared_ptr<const Data> d_;
};

ConcaveFn canonicalize(int rank, std::vector<Generator> generators);

struct AffineForm {
  QPoint slope;
  Value constant;
};

// u -> min over pieces of (<slope, u> + constant), defined on all of N_R.
class MinAffineFn {
 public:
  MinAffineFn() = default;
  MinAffineFn(int rank, std::vector<AffineForm> pieces);

  int ambient_rank() const { return rank_; }
  const std::vector<AffineForm>& pieces() const { return pieces_; }

  Value eval(const QPoint& u) const;
  Value eval(const LinLogPoint& u) const;
  LinLog eval_center(const LinLogPoint& u) const;

  // Drops pieces that never attain the minimum.
  MinAffineFn canonical() const;

 private:
  int rank_ = 0;
  std::vector<AffineForm> pieces_;
};

MinAffineFn operator+(const MinAffineFn& a, const MinAffineFn& b);

ConcaveFn indicator(const RationalPolytope& q);
MinAffineFn support_fn(const RationalPolytope& q);

MinAffineFn legendre_dual(const ConcaveFn& g);
// If a domain hint is given, the dual's domain must equal it.
ConcaveFn legendre_dual_back(const MinAffineFn& h,
                             const std::optional<RationalPolytope>& domain_hint = std::nullopt);

ConcaveFn sup_convolve(const ConcaveFn& g, const ConcaveFn& h);
ConcaveFn translate(const ConcaveFn& g, const QPoint& x0);
ConcaveFn add_constant(const ConcaveFn& g, const Value& c);
ConcaveFn right_scale(const ConcaveFn& g, const Rational& lambda);
ConcaveFn push_forward(const ConcaveFn& g, const LatticeProjection& pi);
// Restriction to a face of the domain.
ConcaveFn restrict_to(const ConcaveFn& g, const RationalPolytope& face);

using ConcaveOracle = std::function<Value(const QPoint&)>;
// Samples at Q ∩ (1/k)Z^n together with the vertices of Q.
ConcaveFn sample_concave(const ConcaveOracle& oracle, const RationalPolytope& q, int k);

}  // namespace toric
