#include "toric/exactnum.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "toric/errors.hpp"

namespace toric {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(),
                                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

Integer parse_integer(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw std::invalid_argument("not an integer: " + std::string(s));
  Integer z(std::string(s), 10);
  return neg ? Integer(-z) : z;
}

Rational parse_decimal(std::string_view s) {
  long exp10 = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    exp10 = parse_integer(s.substr(e + 1)).get_si();
    s = s.substr(0, e);
  }
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) ||
        (ip.empty() && fp.empty()))
      throw std::invalid_argument("not a number: " + std::string(s));
    digits = std::string(ip) + std::string(fp);
    exp10 -= static_cast<long>(fp.size());
  } else {
    if (!all_digits(s)) throw std::invalid_argument("not a number: " + std::string(s));
    digits = std::string(s);
  }
  Rational r(Integer(digits, 10));
  Integer ten;
  mpz_ui_pow_ui(ten.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
  if (exp10 >= 0) r *= ten; else r /= ten;
  r.canonicalize();
  return neg ? Rational(-r) : r;
}

Integer pollard_brent(const Integer& n) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  for (unsigned long c = 1;; ++c) {
    Integer y = 2, x, q = 1, g = 1, ys;
    const unsigned long m = 64;
    unsigned long r = 1;
    auto f = [&](const Integer& v) {
      Integer w = v * v + c;
      mpz_mod(w.get_mpz_t(), w.get_mpz_t(), n.get_mpz_t());
      return w;
    };
    do {
      x = y;
      for (unsigned long i = 0; i < r; ++i) y = f(y);
      unsigned long k = 0;
      do {
        ys = y;
        for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          Integer d = x - y;
          q = q * abs(d);
          mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        Integer d = x - ys;
        mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(const Integer& n, std::vector<Integer>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  Integer d = pollard_brent(n);
  factor_into(d, out);
  factor_into(Integer(n / d), out);
}

// [lo, hi] enclosing x at the given precision.
struct MpfrInterval {
  mpfr_t lo, hi;
  explicit MpfrInterval(mpfr_prec_t prec) {
    mpfr_init2(lo, prec);
    mpfr_init2(hi, prec);
    mpfr_set_zero(lo, 1);
    mpfr_set_zero(hi, 1);
  }
  ~MpfrInterval() {
    mpfr_clear(lo);
    mpfr_clear(hi);
  }
  MpfrInterval(const MpfrInterval&) = delete;
  MpfrInterval& operator=(const MpfrInterval&) = delete;
};

void enclose(const LinLog& x, MpfrInterval& out, mpfr_prec_t prec) {
  mpfr_set_q(out.lo, x.rational_part().get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(out.hi, x.rational_part().get_mpq_t(), MPFR_RNDU);
  mpfr_t ld, lu, cd, cu, t;
  mpfr_inits2(prec, ld, lu, cd, cu, t, static_cast<mpfr_ptr>(nullptr));
  for (const auto& [p, c] : x.log_terms()) {
    mpfr_set_z(ld, p.get_mpz_t(), MPFR_RNDD);
    mpfr_log(ld, ld, MPFR_RNDD);
    mpfr_set_z(lu, p.get_mpz_t(), MPFR_RNDU);
    mpfr_log(lu, lu, MPFR_RNDU);
    mpfr_set_q(cd, c.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(cu, c.get_mpq_t(), MPFR_RNDU);
    if (sgn(c) > 0) {
      mpfr_mul(t, cd, ld, MPFR_RNDD);
      mpfr_add(out.lo, out.lo, t, MPFR_RNDD);
      mpfr_mul(t, cu, lu, MPFR_RNDU);
      mpfr_add(out.hi, out.hi, t, MPFR_RNDU);
    } else {
      mpfr_mul(t, cd, lu, MPFR_RNDD);
      mpfr_add(out.lo, out.lo, t, MPFR_RNDD);
      mpfr_mul(t, cu, ld, MPFR_RNDU);
      mpfr_add(out.hi, out.hi, t, MPFR_RNDU);
    }
  }
  mpfr_clears(ld, lu, cd, cu, t, static_cast<mpfr_ptr>(nullptr));
}

double log_of(const Integer& p) {
  long e = 0;
  double d = mpz_get_d_2exp(&e, p.get_mpz_t());
  return std::log(d) + static_cast<double>(e) * std::log(2.0);
}

double up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty rational");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(trim(s.substr(0, slash)));
    Integer den = parse_integer(trim(s.substr(slash + 1)));
    if (den == 0) throw std::invalid_argument("zero denominator: " + std::string(s));
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  if (s.find_first_of(".eE") != std::string_view::npos) return parse_decimal(s);
  return Rational(parse_integer(s));
}

std::string to_string(const Rational& q) { return q.get_str(); }

bool is_prime(const Integer& p) { return p >= 2 && mpz_probab_prime_p(p.get_mpz_t(), 40) > 0; }

std::vector<std::pair<Integer, unsigned>> factorize(const Integer& n) {
  if (n == 0) throw std::invalid_argument("factorize: zero");
  Integer m = abs(n);
  std::vector<Integer> primes;
  for (unsigned long d = 2; d < 10000 && Integer(d) * d <= m; d += (d == 2 ? 1 : 2)) {
    while (mpz_divisible_ui_p(m.get_mpz_t(), d)) {
      primes.emplace_back(d);
      m /= d;
    }
  }
  factor_into(m, primes);
  std::sort(primes.begin(), primes.end());
  std::vector<std::pair<Integer, unsigned>> out;
  for (const auto& p : primes) {
    if (!out.empty() && out.back().first == p) ++out.back().second;
    else out.emplace_back(p, 1);
  }
  return out;
}

long p_adic_order(const Rational& q, const Integer& p) {
  if (q == 0) throw std::invalid_argument("p_adic_order: zero");
  if (!is_prime(p)) throw std::invalid_argument("p_adic_order: not a prime: " + p.get_str());
  Integer t;
  long v = static_cast<long>(mpz_remove(t.get_mpz_t(), q.get_num_mpz_t(), p.get_mpz_t()));
  v -= static_cast<long>(mpz_remove(t.get_mpz_t(), q.get_den_mpz_t(), p.get_mpz_t()));
  return v;
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite double");
  Rational r;
  mpq_set_d(r.get_mpq_t(), x);
  return r;
}

// LinLog

LinLog::LinLog(Rational q) : q_(std::move(q)) { q_.canonicalize(); }

LinLog LinLog::log_prime(const Integer& p, const Rational& coef) {
  if (!is_prime(p)) throw std::invalid_argument("log_prime: not a prime: " + p.get_str());
  LinLog r;
  Rational c = coef;
  c.canonicalize();
  if (c != 0) r.terms_.emplace_back(p, std::move(c));
  return r;
}

LinLog LinLog::log_abs(const Rational& q) {
  if (q == 0) throw std::invalid_argument("log of zero");
  LinLog r;
  for (auto& [p, e] : factorize(q.get_num())) r.terms_.emplace_back(p, Rational(e));
  for (auto& [p, e] : factorize(q.get_den())) r.terms_.emplace_back(p, Rational(-static_cast<long>(e)));
  r.normalize();
  return r;
}

LinLog LinLog::from_parts(Rational q, std::vector<Term> terms) {
  for (const auto& t : terms)
    if (!is_prime(t.first)) throw std::invalid_argument("LinLog: not a prime: " + t.first.get_str());
  LinLog r(std::move(q));
  for (auto& t : terms) t.second.canonicalize();
  r.terms_ = std::move(terms);
  r.normalize();
  return r;
}

void LinLog::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.first < b.first; });
  std::vector<Term> merged;
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().first == t.first) merged.back().second += t.second;
    else merged.push_back(std::move(t));
  }
  std::erase_if(merged, [](const Term& t) { return t.second == 0; });
  terms_ = std::move(merged);
}

LinLog& LinLog::operator+=(const LinLog& o) {
  q_ += o.q_;
  if (o.terms_.empty()) return *this;
  std::vector<Term> out;
  out.reserve(terms_.size() + o.terms_.size());
  auto a = terms_.begin();
  auto b = o.terms_.begin();
  while (a != terms_.end() || b != o.terms_.end()) {
    if (b == o.terms_.end() || (a != terms_.end() && a->first < b->first)) {
      out.push_back(std::move(*a++));
    } else if (a == terms_.end() || b->first < a->first) {
      out.push_back(*b++);
    } else {
      Rational c = a->second + b->second;
      if (c != 0) out.emplace_back(a->first, std::move(c));
      ++a;
      ++b;
    }
  }
  terms_ = std::move(out);
  return *this;
}

LinLog& LinLog::operator-=(const LinLog& o) { return *this += -o; }

LinLog& LinLog::operator*=(const Rational& s0) {
  Rational s = s0;
  s.canonicalize();
  if (s == 0) {
    q_ = 0;
    terms_.clear();
    return *this;
  }
  q_ *= s;
  for (auto& t : terms_) t.second *= s;
  return *this;
}

LinLog& LinLog::operator/=(const Rational& s) {
  if (s == 0) throw std::domain_error("LinLog: division by zero");
  return *this *= Rational(1 / s);
}

LinLog LinLog::operator-() const {
  LinLog r = *this;
  r.q_ = -r.q_;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

bool operator==(const LinLog& a, const LinLog& b) {
  if (a.q_ != b.q_ || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i)
    if (a.terms_[i].first != b.terms_[i].first || a.terms_[i].second != b.terms_[i].second)
      return false;
  return true;
}

Approx LinLog::quick_approx() const {
  double v = q_.get_d();
  double mag = std::fabs(v);
  for (const auto& [p, c] : terms_) {
    double t = c.get_d() * log_of(p);
    v += t;
    mag += std::fabs(t);
  }
  double err = mag * kEps * static_cast<double>(2 * terms_.size() + 2) + 1e-300;
  if (!std::isfinite(v) || !std::isfinite(err)) {
    return {v, std::numeric_limits<double>::infinity()};
  }
  return {v, err};
}

int LinLog::sign(int max_bits) const {
  if (terms_.empty()) return sgn(q_);
  Approx a = quick_approx();
  if (a.value > a.err) return 1;
  if (a.value < -a.err) return -1;
  // Logs of distinct primes are linearly independent over Q, so a normalized
  // nonzero representation is a nonzero real; precision only bounds effort.
  for (int bits = 64; bits <= max_bits; bits *= 2) {
    MpfrInterval iv(bits);
    enclose(*this, iv, bits);
    if (mpfr_sgn(iv.lo) > 0) return 1;
    if (mpfr_sgn(iv.hi) < 0) return -1;
  }
  throw PrecisionExhausted("sign undecided at " + std::to_string(max_bits) + " bits: " + to_string());
}

Approx LinLog::to_approx(int precision_bits) const {
  if (precision_bits < 2) throw std::invalid_argument("precision_bits < 2");
  mpfr_prec_t prec = std::max(precision_bits, 64);
  MpfrInterval iv(prec);
  enclose(*this, iv, prec);
  mpfr_t mid, e1, e2;
  mpfr_inits2(prec + 2, mid, e1, e2, static_cast<mpfr_ptr>(nullptr));
  mpfr_add(mid, iv.lo, iv.hi, MPFR_RNDN);
  mpfr_div_2ui(mid, mid, 1, MPFR_RNDN);
  double m = mpfr_get_d(mid, MPFR_RNDN);
  mpfr_set_d(mid, m, MPFR_RNDN);
  mpfr_sub(e1, iv.hi, mid, MPFR_RNDU);
  mpfr_sub(e2, mid, iv.lo, MPFR_RNDU);
  mpfr_max(e1, e1, e2, MPFR_RNDU);
  double err = mpfr_get_d(e1, MPFR_RNDU);
  mpfr_clears(mid, e1, e2, static_cast<mpfr_ptr>(nullptr));
  return {m, std::max(err, 0.0)};
}

std::string LinLog::to_string() const {
  std::ostringstream os;
  bool first = true;
  if (q_ != 0 || terms_.empty()) {
    os << q_.get_str();
    first = false;
  }
  for (const auto& [p, c] : terms_) {
    Rational a = abs(c);
    if (first) os << (sgn(c) < 0 ? "-" : "");
    else os << (sgn(c) < 0 ? " - " : " + ");
    if (a != 1) os << a.get_str() << "*";
    os << "log(" << p.get_str() << ")";
    first = false;
  }
  return os.str();
}

std::strong_ordering compare(const LinLog& a, const LinLog& b, int max_bits) {
  int s = (a - b).sign(max_bits);
  return s < 0 ? std::strong_ordering::less
               : s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

const LinLog& min(const LinLog& a, const LinLog& b) { return compare(b, a) < 0 ? b : a; }
const LinLog& max(const LinLog& a, const LinLog& b) { return compare(b, a) > 0 ? b : a; }

bool StructuralLess::operator()(const LinLog& a, const LinLog& b) const {
  if (int c = cmp(a.rational_part(), b.rational_part()); c != 0) return c < 0;
  const auto& ta = a.log_terms();
  const auto& tb = b.log_terms();
  if (ta.size() != tb.size()) return ta.size() < tb.size();
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (int c = cmp(ta[i].first, tb[i].first); c != 0) return c < 0;
    if (int c = cmp(ta[i].second, tb[i].second); c != 0) return c < 0;
  }
  return false;
}

bool StructuralLess::operator()(const std::vector<LinLog>& a, const std::vector<LinLog>& b) const {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), *this);
}

// Value

Value Value::approx(double value, double err) {
  return approx(LinLog(rational_from_double(value)), err);
}

Value Value::approx(LinLog center, double err) {
  if (!(err >= 0.0) || !std::isfinite(err)) throw std::invalid_argument("Value: bad error bound");
  Value v(std::move(center));
  v.err_ = err;
  v.exact_ = false;
  return v;
}

Approx Value::to_approx(int precision_bits) const {
  Approx a = center_.to_approx(precision_bits);
  if (!exact_) a.err = up(a.err + err_);
  return a;
}

Value& Value::operator+=(const Value& o) {
  center_ += o.center_;
  exact_ = exact_ && o.exact_;
  if (o.err_ != 0.0) err_ = up(err_ + o.err_);
  return *this;
}

Value& Value::operator-=(const Value& o) { return *this += -o; }

Value& Value::operator*=(const Rational& s) {
  center_ *= s;
  if (err_ != 0.0) err_ = up(err_ * up(Rational(abs(s)).get_d()));
  return *this;
}

Value Value::operator-() const {
  Value v = *this;
  v.center_ = -center_;
  return v;
}

bool operator==(const Value& a, const Value& b) {
  return a.exact_ == b.exact_ && a.err_ == b.err_ && a.center_ == b.center_;
}

std::string Value::to_string() const {
  if (exact_) return center_.to_string();
  std::ostringstream os;
  os.precision(17);
  os << center_.to_double() << " +/- " << err_;
  return os.str();
}

std::strong_ordering compare(const Value& a, const Value& b) {
  double tol = a.error() + b.error();
  if (tol == 0.0) return compare(a.center(), b.center());
  LinLog d = a.center() - b.center();
  Approx x = d.to_approx(kDefaultPrecisionBits);
  double slack = up(tol + x.err);
  if (x.value - slack > 0.0) return std::strong_ordering::greater;
  if (x.value + slack < 0.0) return std::strong_ordering::less;
  throw PrecisionExhausted("approximate values overlap: " + a.to_string() + " vs " + b.to_string());
}

Value min(const Value& a, const Value& b) {
  const LinLog& c = min(a.center(), b.center());
  double e = std::max(a.error(), b.error());
  if (a.is_exact() && b.is_exact()) return Value(c);
  return Value::approx(c, e);
}

Value max(const Value& a, const Value& b) {
  const LinLog& c = max(a.center(), b.center());
  double e = std::max(a.error(), b.error());
  if (a.is_exact() && b.is_exact()) return Value(c);
  return Value::approx(c, e);
}

}  // namespace toric
