#pragma once

#include <span>
#include <vector>

#include "toric/concave.hpp"
#include "toric/execution.hpp"

namespace toric {

struct Atom {
  LinLogPoint point;  // in N_R, standard-basis identification with M_R
  Rational mass;
};

// Finite signed combination of Dirac masses with distinct points, kept in
// a deterministic order.
class AtomicMeasure {
 public:
  explicit AtomicMeasure(int rank = 0) : rank_(rank) {}

  int ambient_rank() const { return rank_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  void add(const LinLogPoint& point, const Rational& mass);
  AtomicMeasure& operator+=(const AtomicMeasure& o);
  AtomicMeasure& operator*=(const Rational& s);
  Rational total_mass() const;
  // Mass at a point (0 when there is no atom).
  Rational mass_at(const LinLogPoint& point) const;

  friend bool operator==(const AtomicMeasure& a, const AtomicMeasure& b);

 private:
  int rank_;
  std::vector<Atom> atoms_;
};

// M(g^dual): one atom per region of affinity of g, at its slope, with the
// region's volume as mass. Requires a full-dimensional or lower-dimensional
// domain in rank n >= 1; lower-dimensional domains give the zero measure.
AtomicMeasure ma_measure(const ConcaveFn& g);
AtomicMeasure mixed_ma_measure(std::span<const ConcaveFn> gs);

// Integral over the domain; error bound = sup-norm bound times volume.
Value integrate(const ConcaveFn& g);
Value integrate_against(const MinAffineFn& h, const AtomicMeasure& m);

// Mixed integral of n+1 functions in rank n, by the defining
// inclusion-exclusion over sup-convolutions.
Value mixed_integral(std::span<const ConcaveFn> gs, Execution exec = Execution::serial);
// The same quantity by recursion over facets of dom g_1 + ... + dom g_n.
Value mixed_integral_recursive(std::span<const ConcaveFn> gs);
// MI(iota_[0,m], g_1, ..., g_n) computed as MI_P of the push-forwards to the
// quotient by m.
Value mi_segment_projection(const LatticePoint& m, std::span<const ConcaveFn> gs);

// Sup-norm propagation bound for the mixed integral of approximate inputs.
double mixed_integral_error_bound(std::span<const ConcaveFn> gs);

}  // namespace toric
