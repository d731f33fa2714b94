#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "toric/concave.hpp"
#include "toric/execution.hpp"
#include "toric/lattice.hpp"
#include "toric/polytope.hpp"

namespace toric {

struct Term {
  LatticePoint exponent;
  Rational coef;
  friend bool operator==(const Term& a, const Term& b) {
    return a.exponent == b.exponent && a.coef == b.coef;
  }
};

// Laurent polynomial with rational coefficients. Terms are kept sorted by
// exponent with equal exponents merged and zero coefficients dropped; at
// least one term must survive.
class LaurentPoly {
 public:
  LaurentPoly(int rank, std::vector<Term> terms);
  static LaurentPoly monomial(LatticePoint m, Rational c = 1);
  // chi^m - 1
  static LaurentPoly binomial(const LatticePoint& m);

  int rank() const { return rank_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_monomial() const { return terms_.size() == 1; }

  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator*(const Rational& c, const LaurentPoly& f);
  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
    return a.rank_ == b.rank_ && a.terms_ == b.terms_;
  }

  std::string to_string() const;

 private:
  int rank_;
  std::vector<Term> terms_;
};

RationalPolytope newton_polytope(const LaurentPoly& f);

// A place of Q: the archimedean one or a prime. Places order with the
// archimedean place first and primes ascending.
class PlaceQ {
 public:
  static PlaceQ arch() { return PlaceQ(); }
  static PlaceQ prime(const Integer& p);

  bool is_arch() const { return p_ == 0; }
  const Integer& prime() const { return p_; }
  std::string to_string() const;

  friend bool operator==(const PlaceQ& a, const PlaceQ& b) { return a.p_ == b.p_; }
  friend std::strong_ordering operator<=>(const PlaceQ& a, const PlaceQ& b) {
    int c = cmp(a.p_, b.p_);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

 private:
  PlaceQ() = default;
  Integer p_;  // 0 for the archimedean place
};

// Places where some coefficient of f is not a unit, ascending.
std::vector<PlaceQ> bad_primes(const LaurentPoly& f);

struct QuadratureSpec {
  int points_per_axis = 256;  // K, a power of two >= 4
  int precision_bits = kDefaultPrecisionBits;
  void validate() const;
};

// One tensor-product rule on the fiber over u: the mean of log|f| over
// theta_j = 2 pi (j + 1/2) / K on each axis.
struct TorusMean {
  double value = 0.0;
  double rounding = 0.0;  // bound on the summation error
  double jitter = 0.0;    // contribution of nodes moved off a zero of f
  std::size_t jittered_nodes = 0;
};

// Blocked kernel: one block per row of the last axis, pairwise sums inside
// blocks and over block sums. The parallel run is bit-identical to the
// serial one.
TorusMean torus_log_mean(const LaurentPoly& f, const std::vector<double>& u, int K,
                         Execution exec = Execution::parallel);
// Straightforward evaluation, term by term with complex exponentials and a
// running sum. Reference for the kernel; agrees to rounding only.
double torus_log_mean_reference(const LaurentPoly& f, const std::vector<double>& u, int K);

// rho_{f,p}(u) = min_m (<m,u> + ord_p(c_m) log p).
MinAffineFn tropical_ronkin(const LaurentPoly& f, const Integer& p);
// min_m (<m,u> - log|c_m|): the archimedean Ronkin function of a monomial or
// binomial, exactly.
MinAffineFn arch_tropical(const LaurentPoly& f);

// Archimedean Ronkin function at u. Monomials and binomials use the exact
// closed form; everything else goes through the quadrature at K and K/2 with
// the difference as a heuristic error bound.
Value arch_ronkin(const LaurentPoly& f, const QPoint& u, const QuadratureSpec& spec = {},
                  Execution exec = Execution::parallel);
// Always the quadrature, no closed-form bypass.
Value arch_ronkin_quadrature(const LaurentPoly& f, const QPoint& u, const QuadratureSpec& spec = {},
                             Execution exec = Execution::parallel);
// rho_{f,v}(u) at any place.
Value ronkin(const LaurentPoly& f, const PlaceQ& v, const QPoint& u, const QuadratureSpec& spec = {});

// Logarithmic Mahler measure. Rank 1 uses Jensen's formula with exact
// rational roots and certified inclusion disks for the others.
Value mahler_measure(const LaurentPoly& f, const QuadratureSpec& spec = {});
// Jensen's formula only, or nullopt if f has rank != 1 or root isolation fails.
std::optional<Value> mahler_jensen(const LaurentPoly& f);

// (max |log|c_m|| + 2) * (lattice diameter of NP(f)), at least 1.
Rational default_radius(const LaurentPoly& f);

struct DualGrid {
  std::optional<Rational> radius;  // default_radius(f) when empty
  int k = 8;
};

// rho_{f,v}^dual on NP(f). Prime places, monomials and binomials are exact.
// Otherwise rho is sampled at (R/k)Z^n ∩ [-R,R]^n and the dual evaluated at
// (1/k)Z^n ∩ NP(f), with log|c_m| at the vertices; the result lies above the
// true dual.
ConcaveFn ronkin_concave_approx(const LaurentPoly& f, const PlaceQ& v, const DualGrid& grid = {},
                                const QuadratureSpec& spec = {}, Execution exec = Execution::parallel);

}  // namespace toric
