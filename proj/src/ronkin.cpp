#include "toric/ronkin.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "toric/errors.hpp"

namespace toric {

namespace {

using cplx = std::complex<double>;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// log|q| in double without factoring.
double log_abs_double(const Rational& q) {
  long en = 0, ed = 0;
  double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
  double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
  return std::log(std::fabs(mn)) - std::log(md) + static_cast<double>(en - ed) * std::numbers::ln2;
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

std::vector<double> to_doubles(const QPoint& u) {
  std::vector<double> d;
  for (const auto& x : u) d.push_back(x.get_d());
  return d;
}

bool is_power_of_two(int k) { return k > 0 && (k & (k - 1)) == 0; }

// Terms scaled so the largest has modulus 1: f = e^shift * sum w_t chi^{m_t}
// on the fiber over u.
struct Scaled {
  std::vector<double> weight;
  double shift = 0.0;
};

Scaled scale_terms(const LaurentPoly& f, const std::vector<double>& u) {
  Scaled s;
  std::vector<double> a;
  for (const auto& t : f.terms()) {
    double x = log_abs_double(t.coef);
    for (std::size_t i = 0; i < u.size(); ++i) x -= t.exponent[i].get_d() * u[i];
    a.push_back(x);
  }
  s.shift = *std::max_element(a.begin(), a.end());
  for (std::size_t t = 0; t < a.size(); ++t)
    s.weight.push_back(sgn(f.terms()[t].coef) * std::exp(a[t] - s.shift));
  return s;
}

// Jitter fractions of a half cell, one per axis.
double jitter_fraction(std::size_t axis, int attempt) {
  double x = (static_cast<double>(axis) + 1.0) * 0.6180339887498949 + attempt * 0.4142135623730951;
  return 0.5 * (0.2 + 0.6 * (x - std::floor(x)));
}

// log|sum w_t e^{i<m_t, theta>}| at an explicit angle vector.
double log_abs_at(const LaurentPoly& f, const Scaled& s, const std::vector<double>& theta) {
  cplx z = 0.0;
  for (std::size_t t = 0; t < f.size(); ++t) {
    double ph = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) ph += f.terms()[t].exponent[i].get_d() * theta[i];
    z += s.weight[t] * std::polar(1.0, ph);
  }
  return 0.5 * std::log(std::norm(z));
}

// ---- univariate polynomials over Q, coefficients low to high ----

using Poly = std::vector<Rational>;

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
  trim(d);
  return d;
}

void divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
  r = a;
  q.assign(std::max(0, degree(a) - degree(b) + 1), Rational(0));
  while (degree(r) >= degree(b) && !r.empty()) {
    int shift = degree(r) - degree(b);
    Rational c = r.back() / b.back();
    q[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) r[i + shift] -= c * b[i];
    r.pop_back();
    trim(r);
  }
  trim(q);
}

Poly quotient(const Poly& a, const Poly& b) {
  Poly q, r;
  divmod(a, b, q, r);
  return q;
}

Poly monic(Poly p) {
  Rational lc = p.back();
  for (auto& c : p) c /= lc;
  return p;
}

Poly gcd(Poly a, Poly b) {
  while (!b.empty()) {
    Poly q, r;
    divmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

Poly minus(Poly a, const Poly& b) {
  if (a.size() < b.size()) a.resize(b.size(), Rational(0));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  trim(a);
  return a;
}

// Yun's square-free decomposition: p = lc * prod_i factors[i]^(i+1).
std::vector<Poly> squarefree(const Poly& p) {
  std::vector<Poly> out;
  Poly d = derivative(p);
  Poly a = gcd(p, d);
  Poly b = quotient(p, a);
  Poly c = quotient(d, a);
  Poly e = minus(c, derivative(b));
  while (degree(b) > 0) {
    Poly g = gcd(b, e);
    out.push_back(g);
    Poly nb = quotient(b, g);
    c = quotient(e, g);
    b = std::move(nb);
    e = minus(c, derivative(b));
  }
  return out;
}

Rational eval(const Poly& p, const Rational& x) {
  Rational s = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * x + *it;
  return s;
}

// Divides by (x - r); r must be a root.
Poly deflate(const Poly& p, const Rational& r) {
  Poly q(p.size() - 1);
  Rational carry = 0;
  for (std::size_t i = p.size() - 1; i-- > 0;) {
    carry = carry * r + p[i + 1];
    q[i] = carry;
  }
  return q;
}

std::vector<Integer> divisors(const Integer& n) {
  std::vector<Integer> ds{1};
  for (const auto& [p, e] : factorize(n)) {
    std::size_t base = ds.size();
    Integer pk = 1;
    for (unsigned k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) ds.push_back(ds[i] * pk);
    }
  }
  return ds;
}

constexpr std::size_t kMaxRootCandidates = 200000;

// Rational roots with multiplicity; p is left with the cofactor.
std::vector<Rational> extract_rational_roots(Poly& p) {
  std::vector<Rational> roots;
  if (degree(p) < 1) return roots;
  Integer l = 1;
  for (const auto& c : p) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  Integer a0 = abs(Integer(p.front() * l)), ad = abs(Integer(p.back() * l));
  std::vector<Integer> num = divisors(a0), den = divisors(ad);
  if (num.size() * den.size() > kMaxRootCandidates) return roots;
  std::vector<Rational> cands;
  for (const auto& a : num)
    for (const auto& b : den) {
      Rational r(a, b);
      r.canonicalize();
      cands.push_back(r);
      cands.push_back(-r);
    }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  for (const auto& r : cands)
    while (degree(p) >= 1 && eval(p, r) == 0) {
      p = deflate(p, r);
      roots.push_back(r);
    }
  return roots;
}

struct RootSum {
  double value = 0.0;
  double err = 0.0;
};

// sum over the roots of a monic square-free polynomial of log max(1, |z|),
// with Weierstrass inclusion disks of radius d |P(z_i) / prod (z_i - z_j)|.
std::optional<RootSum> log_max_root_sum(const Poly& p) {
  const int d = degree(p);
  std::vector<double> a(d + 1);
  for (int i = 0; i <= d; ++i) {
    a[i] = Rational(p[i] / p[d]).get_d();
    if (!std::isfinite(a[i])) return std::nullopt;
  }
  auto horner = [&](cplx z, double& mag) {
    cplx s = 0.0;
    double m = 0.0, az = std::abs(z);
    for (int i = d; i >= 0; --i) {
      s = s * z + a[i];
      m = m * az + std::fabs(a[i]);
    }
    mag = m;
    return s;
  };
  double bound = 0.0;
  for (int i = 0; i < d; ++i) bound = std::max(bound, std::fabs(a[i]));
  bound += 1.0;
  std::vector<cplx> z(d);
  for (int k = 0; k < d; ++k) z[k] = std::polar(0.9 * bound, 2 * std::numbers::pi * k / d + 0.4);
  auto weierstrass = [&](int k, double& mag) {
    cplx den = 1.0;
    for (int j = 0; j < d; ++j)
      if (j != k) den *= z[k] - z[j];
    return std::pair{horner(z[k], mag), den};
  };
  int settled = 0;
  for (int it = 0; it < 2000 && settled < 3; ++it) {
    double worst = 0.0;
    for (int k = 0; k < d; ++k) {
      double mag;
      auto [num, den] = weierstrass(k, mag);
      if (den == 0.0) {
        z[k] += cplx(1e-8, 1e-8) * bound;
        worst = 1.0;
        continue;
      }
      cplx w = num / den;
      z[k] -= w;
      worst = std::max(worst, std::abs(w) / std::max(1.0, std::abs(z[k])));
    }
    if (worst < 4 * kEps) ++settled;
  }
  std::vector<double> radius(d);
  for (int k = 0; k < d; ++k) {
    double mag;
    auto [num, den] = weierstrass(k, mag);
    double slack = (4.0 * d + 4.0) * kEps;
    double residual = std::abs(num) + slack * mag;
    double dn = std::abs(den) * (1 - slack);
    if (!(dn > 0)) return std::nullopt;
    radius[k] = d * residual / dn;
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (std::abs(z[i] - z[j]) <= radius[i] + radius[j]) return std::nullopt;
  RootSum s;
  for (int k = 0; k < d; ++k) {
    double r = std::abs(z[k]);
    double c = std::log(std::max(1.0, r));
    double hi = std::log(std::max(1.0, r + radius[k]));
    double lo = std::log(std::max(1.0, r - radius[k]));
    s.value += c;
    s.err += std::max(hi - c, c - lo) + 2 * kEps * (1 + c);
  }
  return s;
}

}  // namespace

// LaurentPoly

LaurentPoly::LaurentPoly(int rank, std::vector<Term> terms) : rank_(rank) {
  if (rank < 0) throw std::invalid_argument("LaurentPoly: negative rank");
  for (auto& t : terms) {
    if (static_cast<int>(t.exponent.size()) != rank) throw std::invalid_argument("LaurentPoly: exponent rank mismatch");
    t.coef.canonicalize();
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.exponent < b.exponent; });
  for (auto& t : terms) {
    if (!terms_.empty() && terms_.back().exponent == t.exponent) terms_.back().coef += t.coef;
    else terms_.push_back(std::move(t));
  }
  std::erase_if(terms_, [](const Term& t) { return t.coef == 0; });
  if (terms_.empty()) throw std::invalid_argument("LaurentPoly: the zero polynomial is not allowed");
}

LaurentPoly LaurentPoly::monomial(LatticePoint m, Rational c) {
  int n = static_cast<int>(m.size());
  return LaurentPoly(n, {Term{std::move(m), std::move(c)}});
}

LaurentPoly LaurentPoly::binomial(const LatticePoint& m) {
  return LaurentPoly(static_cast<int>(m.size()), {Term{m, 1}, Term{LatticePoint(m.size(), 0), -1}});
}

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.rank_ != b.rank_) throw std::invalid_argument("LaurentPoly: rank mismatch");
  std::vector<Term> t;
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_) {
      LatticePoint e(x.exponent.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = x.exponent[i] + y.exponent[i];
      t.push_back({std::move(e), x.coef * y.coef});
    }
  return LaurentPoly(a.rank_, std::move(t));
}

LaurentPoly operator*(const Rational& c, const LaurentPoly& f) {
  std::vector<Term> t = f.terms_;
  for (auto& x : t) x.coef *= c;
  return LaurentPoly(f.rank_, std::move(t));
}

std::string LaurentPoly::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) os << " + ";
    os << toric::to_string(terms_[i].coef) << "*x^(";
    for (std::size_t j = 0; j < terms_[i].exponent.size(); ++j) os << (j ? "," : "") << terms_[i].exponent[j].get_str();
    os << ")";
  }
  return os.str();
}

RationalPolytope newton_polytope(const LaurentPoly& f) {
  std::vector<QPoint> pts;
  for (const auto& t : f.terms()) pts.push_back(to_q(t.exponent));
  return RationalPolytope::hull(f.rank(), std::move(pts));
}

// PlaceQ

PlaceQ PlaceQ::prime(const Integer& p) {
  if (!is_prime(p)) throw std::invalid_argument("PlaceQ: not a prime: " + p.get_str());
  PlaceQ v;
  v.p_ = p;
  return v;
}

std::string PlaceQ::to_string() const { return is_arch() ? "inf" : p_.get_str(); }

std::vector<PlaceQ> bad_primes(const LaurentPoly& f) {
  std::vector<Integer> ps;
  for (const auto& t : f.terms()) {
    for (const Integer* z : {&t.coef.get_num(), &t.coef.get_den()})
      if (abs(*z) != 1)
        for (const auto& [p, e] : factorize(*z)) ps.push_back(p);
  }
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  std::vector<PlaceQ> out;
  for (const auto& p : ps) out.push_back(PlaceQ::prime(p));
  return out;
}

void QuadratureSpec::validate() const {
  if (points_per_axis < 4 || !is_power_of_two(points_per_axis))
    throw std::invalid_argument("QuadratureSpec: points_per_axis must be a power of two >= 4");
  if (precision_bits < 53) throw std::invalid_argument("QuadratureSpec: precision_bits must be >= 53");
}

// Quadrature

TorusMean torus_log_mean(const LaurentPoly& f, const std::vector<double>& u, int K, Execution exec) {
  const std::size_t n = static_cast<std::size_t>(f.rank());
  if (u.size() != n) throw std::invalid_argument("torus_log_mean: rank mismatch");
  if (K < 2) throw std::invalid_argument("torus_log_mean: need K >= 2");
  const Scaled s = scale_terms(f, u);
  TorusMean out;
  if (n == 0) {
    out.value = s.shift + std::log(std::fabs(s.weight[0]));
    return out;
  }
  const std::size_t nt = f.size();
  const std::int64_t period = 2 * static_cast<std::int64_t>(K);

  // exp(i pi r / K) for r in [0, 2K)
  std::vector<cplx> circle(period);
  for (std::int64_t r = 0; r < period; ++r) circle[r] = std::polar(1.0, std::numbers::pi * static_cast<double>(r) / K);
  // phase[t][i][j] = m_{t,i} (2j+1) mod 2K, so that m_{t,i} theta_j = pi phase / K
  std::vector<std::uint32_t> phase(nt * n * K);
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t i = 0; i < n; ++i) {
      std::int64_t m = mpz_fdiv_ui(f.terms()[t].exponent[i].get_mpz_t(), static_cast<unsigned long>(period));
      for (int j = 0; j < K; ++j)
        phase[(t * n + i) * K + j] = static_cast<std::uint32_t>(m * (2 * j + 1) % period);
    }

  std::size_t rows = 1;
  for (std::size_t i = 0; i + 1 < n; ++i) rows *= static_cast<std::size_t>(K);
  // |S| at or below the rounding level of the sum counts as a zero of f
  double wsum = 0.0;
  for (double w : s.weight) wsum += std::fabs(w);
  const double zero_level = std::pow(8.0 * static_cast<double>(nt) * kEps * wsum, 2);
  std::vector<double> row_sum(rows), row_abs(rows), row_jitter(rows);
  std::vector<std::size_t> row_jittered(rows);

  auto do_row = [&](std::size_t row) {
    std::vector<std::uint32_t> base(nt, 0);
    std::vector<std::size_t> idx(n, 0);
    std::size_t r = row;
    for (std::size_t i = n - 1; i-- > 0;) {
      idx[i] = r % K;
      r /= K;
    }
    for (std::size_t t = 0; t < nt; ++t) {
      std::int64_t b = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) b += phase[(t * n + i) * K + idx[i]];
      base[t] = static_cast<std::uint32_t>(b % period);
    }
    std::vector<double> vals(K), mags(K);
    double jit = 0.0;
    std::size_t njit = 0;
    for (int j = 0; j < K; ++j) {
      cplx z = 0.0;
      for (std::size_t t = 0; t < nt; ++t) {
        std::uint32_t ph = base[t] + phase[(t * n + n - 1) * K + j];
        if (ph >= period) ph -= period;
        z += s.weight[t] * circle[ph];
      }
      double nz = std::norm(z);
      double v;
      if (nz > zero_level) {
        v = 0.5 * std::log(nz);
      } else {
        idx[n - 1] = static_cast<std::size_t>(j);
        std::vector<double> theta(n);
        v = -std::numeric_limits<double>::infinity();
        for (int attempt = 0; attempt < 4 && !std::isfinite(v); ++attempt) {
          for (std::size_t i = 0; i < n; ++i)
            theta[i] = std::numbers::pi * (2.0 * idx[i] + 1.0 + 2.0 * jitter_fraction(i, attempt)) / K;
          v = log_abs_at(f, s, theta);
        }
        if (!std::isfinite(v)) throw InvariantViolation("torus quadrature: jittered node still on the zero set");
        jit += std::fabs(v);
        ++njit;
      }
      vals[j] = v;
      mags[j] = std::fabs(v);
    }
    row_sum[row] = pairwise_sum(vals.data(), vals.size());
    row_abs[row] = pairwise_sum(mags.data(), mags.size());
    row_jitter[row] = jit;
    row_jittered[row] = njit;
  };

  if (exec == Execution::parallel && rows > 1) {
    std::exception_ptr error;
#pragma omp parallel for schedule(static)
    for (std::size_t row = 0; row < rows; ++row) {
      try {
        do_row(row);
      } catch (...) {
#pragma omp critical
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (std::size_t row = 0; row < rows; ++row) do_row(row);
  }

  const double N = static_cast<double>(rows) * K;
  const double mean = pairwise_sum(row_sum.data(), rows) / N;
  const double abs_mean = pairwise_sum(row_abs.data(), rows) / N;
  out.value = s.shift + mean;
  out.rounding = (std::log2(N) + static_cast<double>(nt) + 8.0) * kEps * abs_mean + 2 * kEps * std::fabs(s.shift) +
                 static_cast<double>(nt) * kEps;
  for (std::size_t row = 0; row < rows; ++row) {
    out.jitter += row_jitter[row];
    out.jittered_nodes += row_jittered[row];
  }
  out.jitter /= N;
  return out;
}

double torus_log_mean_reference(const LaurentPoly& f, const std::vector<double>& u, int K) {
  const std::size_t n = static_cast<std::size_t>(f.rank());
  if (u.size() != n) throw std::invalid_argument("torus_log_mean_reference: rank mismatch");
  std::vector<int> idx(n, 0);
  double sum = 0.0;
  std::size_t count = 0;
  for (;;) {
    cplx z = 0.0;
    for (const auto& t : f.terms()) {
      double re = 0.0, im = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double m = t.exponent[i].get_d();
        re -= m * u[i];
        im += m * 2.0 * std::numbers::pi * (idx[i] + 0.5) / K;
      }
      z += t.coef.get_d() * std::exp(cplx(re, im));
    }
    sum += std::log(std::abs(z));
    ++count;
    std::size_t i = n;
    while (i > 0 && ++idx[i - 1] == K) idx[--i] = 0;
    if (i == 0) break;
  }
  return sum / static_cast<double>(count);
}

MinAffineFn tropical_ronkin(const LaurentPoly& f, const Integer& p) {
  if (!is_prime(p)) throw std::invalid_argument("tropical_ronkin: not a prime: " + p.get_str());
  std::vector<AffineForm> pieces;
  for (const auto& t : f.terms()) {
    long ord = p_adic_order(t.coef, p);
    pieces.push_back({to_q(t.exponent), ord == 0 ? Value() : Value(LinLog::log_prime(p, ord))});
  }
  return MinAffineFn(f.rank(), std::move(pieces));
}

MinAffineFn arch_tropical(const LaurentPoly& f) {
  std::vector<AffineForm> pieces;
  for (const auto& t : f.terms()) pieces.push_back({to_q(t.exponent), Value(-LinLog::log_abs(t.coef))});
  return MinAffineFn(f.rank(), std::move(pieces));
}

Value arch_ronkin_quadrature(const LaurentPoly& f, const QPoint& u, const QuadratureSpec& spec, Execution exec) {
  spec.validate();
  if (static_cast<int>(u.size()) != f.rank()) throw std::invalid_argument("arch_ronkin: rank mismatch");
  const auto ud = to_doubles(u);
  const int K = spec.points_per_axis;
  TorusMean fine = torus_log_mean(f, ud, K, exec);
  TorusMean coarse = torus_log_mean(f, ud, K / 2, exec);
  double err = std::fabs(fine.value - coarse.value) + fine.rounding + coarse.rounding + fine.jitter;
  return Value::approx(-fine.value, err);
}

Value arch_ronkin(const LaurentPoly& f, const QPoint& u, const QuadratureSpec& spec, Execution exec) {
  if (static_cast<int>(u.size()) != f.rank()) throw std::invalid_argument("arch_ronkin: rank mismatch");
  if (f.size() <= 2) return arch_tropical(f).eval(u);
  return arch_ronkin_quadrature(f, u, spec, exec);
}

Value ronkin(const LaurentPoly& f, const PlaceQ& v, const QPoint& u, const QuadratureSpec& spec) {
  if (v.is_arch()) return arch_ronkin(f, u, spec);
  return tropical_ronkin(f, v.prime()).eval(u);
}

std::optional<Value> mahler_jensen(const LaurentPoly& f) {
  if (f.rank() != 1) return std::nullopt;
  const Integer lo = f.terms().front().exponent[0];
  Poly p(Integer(f.terms().back().exponent[0] - lo).get_ui() + 1, Rational(0));
  for (const auto& t : f.terms()) p[Integer(t.exponent[0] - lo).get_ui()] = t.coef;
  LinLog exact = LinLog::log_abs(p.back());
  for (const auto& r : extract_rational_roots(p))
    if (abs(r) > 1) exact += LinLog::log_abs(r);
  if (degree(p) < 1) return Value(exact);
  RootSum total;
  auto factors = squarefree(p);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (degree(factors[i]) < 1) continue;
    auto s = log_max_root_sum(factors[i]);
    if (!s) return std::nullopt;
    total.value += static_cast<double>(i + 1) * s->value;
    total.err += static_cast<double>(i + 1) * s->err;
  }
  return Value::approx(exact + LinLog(rational_from_double(total.value)), total.err);
}

Value mahler_measure(const LaurentPoly& f, const QuadratureSpec& spec) {
  if (auto j = mahler_jensen(f)) return *j;
  return -arch_ronkin(f, QPoint(f.rank(), 0), spec);
}

Rational default_radius(const LaurentPoly& f) {
  double big = 0.0;
  for (const auto& t : f.terms()) big = std::max(big, std::fabs(log_abs_double(t.coef)));
  Integer diam = 0;
  for (int i = 0; i < f.rank(); ++i) {
    Integer a = f.terms()[0].exponent[i], b = a;
    for (const auto& t : f.terms()) {
      a = std::min(a, t.exponent[i]);
      b = std::max(b, t.exponent[i]);
    }
    diam = std::max(diam, Integer(b - a));
  }
  Rational r(static_cast<long>(std::ceil((big + 2.0) * std::max(1.0, diam.get_d()))));
  return r;
}

ConcaveFn ronkin_concave_approx(const LaurentPoly& f, const PlaceQ& v, const DualGrid& grid,
                                const QuadratureSpec& spec, Execution exec) {
  const RationalPolytope np = newton_polytope(f);
  if (!v.is_arch()) return legendre_dual_back(tropical_ronkin(f, v.prime()), np);
  if (f.size() <= 2) return legendre_dual_back(arch_tropical(f), np);

  spec.validate();
  const Rational R = grid.radius.value_or(default_radius(f));
  const int k = grid.k;
  if (k < 1 || R <= 0) throw std::invalid_argument("ronkin_concave_approx: need k >= 1 and R > 0");
  const std::size_t n = static_cast<std::size_t>(f.rank());
  const Rational step = R / k;

  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) count *= static_cast<std::size_t>(2 * k + 1);
  std::vector<std::vector<double>> nodes(count, std::vector<double>(n));
  for (std::size_t c = 0; c < count; ++c) {
    std::size_t r = c;
    for (std::size_t i = n; i-- > 0;) {
      long idx = static_cast<long>(r % (2 * k + 1)) - k;
      r /= 2 * k + 1;
      nodes[c][i] = Rational(step * idx).get_d();
    }
  }
  std::vector<double> rho(count), rho_err(count);
  auto eval_node = [&](std::size_t c) {
    QPoint u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = rational_from_double(nodes[c][i]);
    Value r = arch_ronkin_quadrature(f, u, spec, Execution::serial);
    rho[c] = r.to_double();
    rho_err[c] = r.error();
  };
  if (exec == Execution::parallel) {
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t c = 0; c < count; ++c) {
      try {
        eval_node(c);
      } catch (...) {
#pragma omp critical
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (std::size_t c = 0; c < count; ++c) eval_node(c);
  }
  double err = *std::max_element(rho_err.begin(), rho_err.end());

  std::vector<Generator> gens;
  for (const auto& vert : np.vertices()) {
    for (const auto& t : f.terms())
      if (to_q(t.exponent) == vert) gens.push_back({vert, Value(LinLog::log_abs(t.coef))});
  }
  for (const auto& x : grid_points(np, k)) {
    if (std::find(np.vertices().begin(), np.vertices().end(), x) != np.vertices().end()) continue;
    const auto xd = to_doubles(x);
    double best = std::numeric_limits<double>::infinity(), scale = 0.0;
    for (std::size_t c = 0; c < count; ++c) {
      double s = -rho[c];
      for (std::size_t i = 0; i < n; ++i) s += xd[i] * nodes[c][i];
      if (s < best) {
        best = s;
        scale = std::fabs(rho[c]) + R.get_d() * static_cast<double>(n) * 2;
      }
    }
    gens.push_back({x, Value::approx(best, err + (n + 2) * kEps * scale)});
  }
  return ConcaveFn(f.rank(), std::move(gens));
}

}  // namespace toric
