#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "toric/concave.hpp"
#include "toric/mamixint.hpp"
#include "toric/ronkin.hpp"

namespace toric {

// A toric divisor with an adelic semipositive toric metric, given by its
// polytope and one roof function per place. Places without an explicit roof
// carry the canonical roof, the indicator of the polytope. With fs_arch set,
// the archimedean roof is the Fubini-Study roof, sampled on demand.
class MetrizedToricDivisor {
 public:
  explicit MetrizedToricDivisor(RationalPolytope polytope);
  static MetrizedToricDivisor canonical(RationalPolytope polytope) { return MetrizedToricDivisor(std::move(polytope)); }
  // O(1) on P^n with the Fubini-Study metric at infinity.
  static MetrizedToricDivisor fubini_study(int n);

  // Sets the roof at v; its domain must be the polytope.
  MetrizedToricDivisor& set_roof(const PlaceQ& v, ConcaveFn roof);

  const RationalPolytope& polytope() const { return polytope_; }
  int ambient_rank() const { return polytope_.ambient_rank(); }
  bool fs_arch() const { return fs_arch_; }
  const std::vector<std::pair<PlaceQ, ConcaveFn>>& roofs() const { return roofs_; }
  bool is_canonical_at(const PlaceQ& v) const;
  bool is_canonical() const { return roofs_.empty() && !fs_arch_; }
  // Places with a non-canonical roof, ascending.
  std::vector<PlaceQ> special_places() const;
  ConcaveFn roof_at(const PlaceQ& v, int fs_k) const;

 private:
  RationalPolytope polytope_;
  std::vector<std::pair<PlaceQ, ConcaveFn>> roofs_;
  bool fs_arch_ = false;
};

// -(1/2) sum_{i=0}^n x_i log x_i with x_0 = 1 - x_1 - ... - x_n, sampled
// exactly at (1/k)Z^n ∩ simplex and replaced by the concave hull of the
// samples. Lies below the true roof and increases as k doubles.
ConcaveFn fs_roof(int n, int k);

// Defaults keep the archimedean dual within about 1e-3 of the truth on
// small trinomials; the x-grid error shrinks like 1/k^2.
struct HeightSpec {
  QuadratureSpec quadrature{128};
  DualGrid grid{std::nullopt, 32};
  int fs_k = 16;
  Execution exec = Execution::parallel;
};

struct HeightReport {
  Value total;
  std::vector<std::pair<PlaceQ, Value>> per_place;  // archimedean first, then primes ascending
  Rational degree;    // MV of the divisor polytopes, the degree of the ambient variety
  bool zero_cycle = false;  // f was a monomial
  HeightSpec spec;

  const Value* at(const PlaceQ& v) const;
};

// deg(Z) = MV(Delta_1, ..., Delta_{n-1}, NP(f)) for n - 1 divisors.
Rational degree(const LaurentPoly& f, std::span<const MetrizedToricDivisor> ds);

// Coefficient of each orbit closure V(tau) in div(f) - [V(f)]: Psi_NP(f)(v_tau).
// Rays must be primitive and pairwise non-proportional.
std::vector<std::pair<LatticePoint, Rational>> weil_divisor_at_rays(const LaurentPoly& f,
                                                                    const std::vector<LatticePoint>& rays);

// MI(theta_0,v, ..., theta_{n-1},v, rho_{f,v}^dual) + MV(Delta_0, ..., Delta_{n-1}) rho_{f,v}(0).
Value toric_local_height(const LaurentPoly& f, std::span<const MetrizedToricDivisor> ds, const PlaceQ& v,
                         const HeightSpec& spec = {});

// Places where the local term can be nonzero: infinity, the primes of the
// coefficients and the places with special roofs.
std::vector<PlaceQ> active_places(const LaurentPoly& f, std::span<const MetrizedToricDivisor> ds);

// The local term MI(theta_0,v, ..., theta_{n-1},v, rho_{f,v}^dual); the
// global height sums it over the active places.
Value global_term(const LaurentPoly& f, std::span<const MetrizedToricDivisor> ds, const PlaceQ& v,
                  const HeightSpec& spec = {});
HeightReport global_height(const LaurentPoly& f, std::span<const MetrizedToricDivisor> ds,
                           const HeightSpec& spec = {});

// -MV(Delta_0, ..., Delta_{n-1}) sum_v rho_{f,v}(0); all metrics canonical.
HeightReport canonical_height(const LaurentPoly& f, std::span<const MetrizedToricDivisor> ds,
                              const HeightSpec& spec = {});

// (n+1)! sum_v integral over NP(f) of rho_{f,v}^dual.
HeightReport rho_height(const LaurentPoly& f, const HeightSpec& spec = {});

// Height with respect to n copies of O(1) on P^n with the Fubini-Study
// metric: MI of sampled FS roofs and rho^dual at infinity, -rho_{f,p}(0) at
// primes.
HeightReport fs_height(const LaurentPoly& f, const HeightSpec& spec = {});

// Height of V(chi^m - 1) through the quotient M -> M / Zm:
// sum_v MI_P(pi_* theta_0,v, ..., pi_* theta_{n-1},v).
HeightReport binomial_height_via_projection(const LatticePoint& m, std::span<const MetrizedToricDivisor> ds,
                                            const HeightSpec& spec = {});

}  // namespace toric
