#include "toric/lattice.hpp"

#include <stdexcept>
#include <utility>

namespace toric {

namespace {

void check_same_rank(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("rank mismatch");
}

// Column reduction of a row vector: returns unimodular C with v*C = (g,0,..,0), g >= 0.
IntMatrix column_reduce(const LatticePoint& v, Integer& g) {
  const std::size_t n = v.size();
  IntMatrix c(n, std::vector<Integer>(n, 0));
  for (std::size_t i = 0; i < n; ++i) c[i][i] = 1;
  LatticePoint w = v;
  for (std::size_t j = 1; j < n; ++j) {
    if (w[j] == 0) continue;
    Integer d, a, b;
    mpz_gcdext(d.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t(), w[0].get_mpz_t(), w[j].get_mpz_t());
    Integer p = w[j] / d, q = w[0] / d;
    for (std::size_t i = 0; i < n; ++i) {
      Integer c0 = a * c[i][0] + b * c[i][j];
      Integer cj = -p * c[i][0] + q * c[i][j];
      c[i][0] = std::move(c0);
      c[i][j] = std::move(cj);
    }
    w[0] = d;
    w[j] = 0;
  }
  if (w[0] < 0) {
    for (std::size_t i = 0; i < n; ++i) c[i][0] = -c[i][0];
    w[0] = -w[0];
  }
  g = w[0];
  return c;
}

void axpy_row(std::vector<Integer>& dst, const Integer& s, const std::vector<Integer>& src) {
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] -= s * src[k];
}

}  // namespace

LatticePoint lattice_point(std::initializer_list<long> xs) {
  LatticePoint p;
  for (long x : xs) p.emplace_back(x);
  return p;
}

QPoint q_point(std::initializer_list<long> xs) {
  QPoint p;
  for (long x : xs) p.emplace_back(x);
  return p;
}

QPoint to_q(const LatticePoint& x) {
  QPoint q;
  q.reserve(x.size());
  for (const auto& v : x) q.emplace_back(v);
  return q;
}

Rational dot(const QPoint& a, const QPoint& b) {
  check_same_rank(a.size(), b.size());
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Rational dot(const LatticePoint& a, const QPoint& b) {
  check_same_rank(a.size(), b.size());
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

QPoint operator+(const QPoint& a, const QPoint& b) {
  check_same_rank(a.size(), b.size());
  QPoint r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

QPoint operator-(const QPoint& a, const QPoint& b) {
  check_same_rank(a.size(), b.size());
  QPoint r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

QPoint operator*(const Rational& s, const QPoint& a) {
  QPoint r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

Integer content(const LatticePoint& v) {
  Integer g = 0;
  for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g;
}

bool is_primitive(const LatticePoint& v) { return content(v) == 1; }

LatticePoint primitive_direction(const QPoint& v) {
  Integer l = 1;
  for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  LatticePoint r;
  r.reserve(v.size());
  for (const auto& x : v) r.push_back(Integer(x * l));
  Integer g = content(r);
  if (g == 0) throw std::invalid_argument("primitive_direction: zero vector");
  for (auto& x : r) x /= g;
  return r;
}

IntMatrix hermite_normal_form(IntMatrix a) {
  const std::size_t m = a.size();
  if (m == 0) return a;
  const std::size_t n = a[0].size();
  std::size_t r = 0;
  for (std::size_t col = 0; col < n && r < m; ++col) {
    for (;;) {
      std::size_t best = m;
      for (std::size_t i = r; i < m; ++i)
        if (a[i][col] != 0 && (best == m || abs(a[i][col]) < abs(a[best][col]))) best = i;
      if (best == m) break;
      std::swap(a[r], a[best]);
      bool clean = true;
      for (std::size_t i = r + 1; i < m; ++i) {
        if (a[i][col] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), a[i][col].get_mpz_t(), a[r][col].get_mpz_t());
        axpy_row(a[i], q, a[r]);
        if (a[i][col] != 0) clean = false;
      }
      if (clean) break;
    }
    if (a[r][col] == 0) continue;
    if (a[r][col] < 0)
      for (auto& x : a[r]) x = -x;
    for (std::size_t i = 0; i < r; ++i) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), a[i][col].get_mpz_t(), a[r][col].get_mpz_t());
      axpy_row(a[i], q, a[r]);
    }
    ++r;
  }
  a.resize(r);
  return a;
}

IntMatrix integer_kernel(const LatticePoint& v) {
  Integer g;
  IntMatrix c = column_reduce(v, g);
  IntMatrix rows;
  const std::size_t n = v.size();
  std::size_t first = g == 0 ? 0 : 1;
  for (std::size_t j = first; j < n; ++j) {
    std::vector<Integer> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = c[i][j];
    rows.push_back(std::move(col));
  }
  return hermite_normal_form(std::move(rows));
}

std::vector<QPoint> invert(std::vector<QPoint> a) {
  const std::size_t n = a.size();
  std::vector<QPoint> inv(n, QPoint(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw std::invalid_argument("invert: not square");
    inv[i][i] = 1;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) throw std::invalid_argument("invert: singular matrix");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    Rational s = 1 / a[col][col];
    for (std::size_t k = 0; k < n; ++k) {
      a[col][k] *= s;
      inv[col][k] *= s;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || a[i][col] == 0) continue;
      Rational f = a[i][col];
      for (std::size_t k = 0; k < n; ++k) {
        a[i][k] -= f * a[col][k];
        inv[i][k] -= f * inv[col][k];
      }
    }
  }
  return inv;
}

LatticePoint LatticeProjection::apply(const LatticePoint& x) const {
  check_same_rank(x.size(), static_cast<std::size_t>(source_rank));
  LatticePoint y(target_rank, 0);
  for (int i = 0; i < target_rank; ++i)
    for (int j = 0; j < source_rank; ++j) y[i] += matrix[i][j] * x[j];
  return y;
}

QPoint LatticeProjection::apply(const QPoint& x) const {
  check_same_rank(x.size(), static_cast<std::size_t>(source_rank));
  QPoint y(target_rank, 0);
  for (int i = 0; i < target_rank; ++i)
    for (int j = 0; j < source_rank; ++j) y[i] += matrix[i][j] * x[j];
  return y;
}

QPoint LatticeProjection::lift(const QPoint& y) const {
  check_same_rank(y.size(), static_cast<std::size_t>(target_rank));
  QPoint x(source_rank, 0);
  for (int i = 0; i < source_rank; ++i)
    for (int j = 0; j < target_rank; ++j) x[i] += section[i][j] * y[j];
  return x;
}

LatticeProjection quotient_by_primitive(const LatticePoint& m) {
  if (m.empty() || !is_primitive(m)) throw std::invalid_argument("quotient_by_primitive: m is not primitive");
  const std::size_t n = m.size();
  Integer g;
  IntMatrix c = column_reduce(m, g);
  LatticeProjection pr;
  pr.source_rank = static_cast<int>(n);
  pr.target_rank = static_cast<int>(n - 1);
  pr.matrix = integer_kernel(m);
  std::vector<QPoint> a;
  for (const auto& row : pr.matrix) a.push_back(to_q(row));
  QPoint w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][0];
  a.push_back(w);
  auto inv = invert(std::move(a));
  pr.section.assign(n, std::vector<Integer>(n - 1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j + 1 < n; ++j) pr.section[i][j] = Integer(inv[i][j]);
  return pr;
}

PerpLattice perp_sublattice(const LatticePoint& u) {
  PerpLattice pl;
  QPoint uq = to_q(u);
  pl.normal = primitive_direction(uq);
  const std::size_t n = u.size();
  Integer g;
  IntMatrix c = column_reduce(pl.normal, g);
  IntMatrix k = integer_kernel(pl.normal);
  pl.basis.assign(n, std::vector<Integer>(n - 1));
  std::vector<QPoint> full(n, QPoint(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j + 1 < n; ++j) {
      pl.basis[i][j] = k[j][i];
      full[i][j] = k[j][i];
    }
    full[i][n - 1] = c[i][0];
  }
  auto inv = invert(std::move(full));
  pl.inverse.assign(n, std::vector<Integer>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) pl.inverse[i][j] = Integer(inv[i][j]);
  return pl;
}

QPoint PerpLattice::to_coords(const QPoint& y) const {
  const std::size_t n = normal.size();
  check_same_rank(y.size(), n);
  if (dot(normal, y) != 0) throw std::invalid_argument("to_coords: point not in u-perp");
  QPoint c(n - 1, 0);
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c[i] += inverse[i][j] * y[j];
  return c;
}

QPoint PerpLattice::from_coords(const QPoint& c) const {
  const std::size_t n = normal.size();
  check_same_rank(c.size() + 1, n);
  QPoint y(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j + 1 < n; ++j) y[i] += basis[i][j] * c[j];
  return y;
}

}  // namespace toric
