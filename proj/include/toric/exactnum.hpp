#pragma once

#include <gmpxx.h>

#include <compare>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace toric {

using Integer = mpz_class;
using Rational = mpq_class;

// Parses "a", "-a/b" or a finite decimal such as "0.25" or "-1.5e-3".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

bool is_prime(const Integer& p);

// Prime factorization of |n| (n != 0), primes ascending.
std::vector<std::pair<Integer, unsigned>> factorize(const Integer& n);

// p-adic valuation of a nonzero rational.
long p_adic_order(const Rational& q, const Integer& p);

Rational rational_from_double(double x);

// A double together with an absolute error bound.
struct Approx {
  double value = 0.0;
  double err = 0.0;
};

inline constexpr int kDefaultPrecisionBits = 64;
inline constexpr int kPrecisionCeilingBits = 4096;

// A real number q + sum_p c_p log p with rational q, c_p and distinct primes
// p. The representation is normalized (primes ascending, no zero
// coefficients), so structural equality is numeric equality.
class LinLog {
 public:
  using Term = std::pair<Integer, Rational>;

  LinLog() = default;
  LinLog(Rational q);  // NOLINT(google-explicit-constructor)
  LinLog(long q) : LinLog(Rational(q)) {}  // NOLINT(google-explicit-constructor)

  static LinLog log_prime(const Integer& p, const Rational& coef = 1);
  // log|q| for nonzero q, by factorization.
  static LinLog log_abs(const Rational& q);
  // Validates primality of every p and normalizes.
  static LinLog from_parts(Rational q, std::vector<Term> terms);

  const Rational& rational_part() const { return q_; }
  const std::vector<Term>& log_terms() const { return terms_; }
  bool is_zero() const { return sgn(q_) == 0 && terms_.empty(); }
  bool is_rational() const { return terms_.empty(); }

  // Sign, decided by a floating filter and then MPFR intervals of doubling
  // precision. Throws PrecisionExhausted past max_bits.
  int sign(int max_bits = kPrecisionCeilingBits) const;

  // Cheap double estimate with a rigorous error bound.
  Approx quick_approx() const;
  // Interval evaluation at the given working precision.
  Approx to_approx(int precision_bits = kDefaultPrecisionBits) const;
  double to_double() const { return quick_approx().value; }

  LinLog& operator+=(const LinLog& o);
  LinLog& operator-=(const LinLog& o);
  LinLog& operator*=(const Rational& s);
  LinLog& operator/=(const Rational& s);
  LinLog operator-() const;

  friend LinLog operator+(LinLog a, const LinLog& b) { return a += b; }
  friend LinLog operator-(LinLog a, const LinLog& b) { return a -= b; }
  friend LinLog operator*(LinLog a, const Rational& s) { return a *= s; }
  friend LinLog operator*(const Rational& s, LinLog a) { return a *= s; }
  friend LinLog operator/(LinLog a, const Rational& s) { return a /= s; }

  friend bool operator==(const LinLog& a, const LinLog& b);
  friend bool operator!=(const LinLog& a, const LinLog& b) { return !(a == b); }

  std::string to_string() const;

 private:
  void normalize();

  Rational q_;
  std::vector<Term> terms_;
};

// Numeric comparison; exact, or throws PrecisionExhausted.
std::strong_ordering compare(const LinLog& a, const LinLog& b,
                             int max_bits = kPrecisionCeilingBits);
const LinLog& min(const LinLog& a, const LinLog& b);
const LinLog& max(const LinLog& a, const LinLog& b);

// Total order on representations, for use as a map key.
struct StructuralLess {
  bool operator()(const LinLog& a, const LinLog& b) const;
  bool operator()(const std::vector<LinLog>& a, const std::vector<LinLog>& b) const;
};

// An exact LinLog, or an approximation: an exact center with an absolute
// error bound. Arithmetic on centers is exact and errors add.
class Value {
 public:
  Value() = default;
  Value(LinLog exact) : center_(std::move(exact)) {}  // NOLINT(google-explicit-constructor)
  Value(Rational q) : center_(std::move(q)) {}  // NOLINT(google-explicit-constructor)
  Value(long q) : center_(Rational(q)) {}  // NOLINT(google-explicit-constructor)

  static Value approx(double value, double err);
  static Value approx(LinLog center, double err);

  bool is_exact() const { return exact_; }
  const LinLog& center() const { return center_; }
  double error() const { return err_; }

  Approx to_approx(int precision_bits = kDefaultPrecisionBits) const;
  double to_double() const { return center_.to_double(); }

  Value& operator+=(const Value& o);
  Value& operator-=(const Value& o);
  Value& operator*=(const Rational& s);
  Value operator-() const;

  friend Value operator+(Value a, const Value& b) { return a += b; }
  friend Value operator-(Value a, const Value& b) { return a -= b; }
  friend Value operator*(Value a, const Rational& s) { return a *= s; }
  friend Value operator*(const Rational& s, Value a) { return a *= s; }

  // Same kind, same center, same error.
  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

  std::string to_string() const;

 private:
  LinLog center_;
  double err_ = 0.0;
  bool exact_ = true;
};

// Ordering of the represented reals. Approximate operands are compared as
// intervals; overlapping intervals throw PrecisionExhausted.
std::strong_ordering compare(const Value& a, const Value& b);
// Pointwise min/max: exact on centers, errors combine by max.
Value min(const Value& a, const Value& b);
Value max(const Value& a, const Value& b);

}  // namespace toric
