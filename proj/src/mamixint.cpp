#include "toric/mamixint.hpp"

#include <algorithm>
#include <exception>
#include <optional>
#include <stdexcept>

#include "toric/detail/hull.hpp"
#include "toric/errors.hpp"

namespace toric {

namespace {

std::size_t rank_of_family(std::span<const ConcaveFn> gs) {
  if (gs.empty()) throw std::invalid_argument("empty family");
  const int n = gs[0].ambient_rank();
  for (const auto& g : gs)
    if (g.ambient_rank() != n) throw std::invalid_argument("rank mismatch");
  return static_cast<std::size_t>(n);
}

bool all_exact(std::span<const ConcaveFn> gs) {
  return std::all_of(gs.begin(), gs.end(), [](const ConcaveFn& g) { return g.is_exact(); });
}

Value with_error(LinLog center, bool exact, double err) {
  return exact ? Value(std::move(center)) : Value::approx(std::move(center), err);
}

// g^dual(v) = min_i (<x_i, v> - t_i), on centers.
LinLog dual_center(const ConcaveFn& g, const LinLogPoint& v) {
  std::optional<LinLog> best;
  for (const auto& gen : g.generators()) {
    LinLog x = dot(gen.point, v) - gen.value.center();
    if (!best || compare(x, *best) < 0) best = std::move(x);
  }
  return *best;
}

// Sup-convolutions of all nonempty subfamilies, indexed by bitmask.
std::vector<std::optional<ConcaveFn>> subset_convolutions(std::span<const ConcaveFn> gs, Execution exec) {
  const std::size_t n = gs.size();
  std::vector<std::optional<ConcaveFn>> conv(std::size_t{1} << n);
  for (std::size_t size = 1; size <= n; ++size) {
    std::vector<std::size_t> level;
    for (std::size_t mask = 1; mask < conv.size(); ++mask)
      if (static_cast<std::size_t>(__builtin_popcountll(mask)) == size) level.push_back(mask);
    auto build = [&](std::size_t mask) {
      std::size_t low = static_cast<std::size_t>(__builtin_ctzll(mask));
      std::size_t rest = mask & (mask - 1);
      conv[mask] = rest == 0 ? gs[low] : sup_convolve(*conv[rest], gs[low]);
    };
    if (exec == Execution::parallel && level.size() > 1) {
      std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
      for (std::size_t i = 0; i < level.size(); ++i) {
        try {
          build(level[i]);
        } catch (...) {
#pragma omp critical
          if (!error) error = std::current_exception();
        }
      }
      if (error) std::rethrow_exception(error);
    } else {
      for (std::size_t mask : level) build(mask);
    }
  }
  return conv;
}

LinLog mi_definition_center(std::span<const ConcaveFn> gs, Execution exec) {
  const std::size_t n = gs.size();
  auto conv = subset_convolutions(gs, exec);
  LinLog total;
  for (std::size_t mask = 1; mask < conv.size(); ++mask) {
    std::size_t size = static_cast<std::size_t>(__builtin_popcountll(mask));
    const LinLog& integral = conv[mask]->center_integral();
    if ((n - size) % 2 == 0) total += integral;
    else total -= integral;
  }
  return total;
}

// Primitive normal of the hyperplane spanned by n-1 independent directions.
LatticePoint hyperplane_normal(const std::vector<QPoint>& dirs, std::size_t n) {
  QPoint normal(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Rational>> m;
    for (const auto& d : dirs) {
      std::vector<Rational> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(d[k]);
      m.push_back(std::move(row));
    }
    normal[j] = detail::det(std::move(m));
    if (j % 2 == 1) normal[j] = -normal[j];
  }
  return primitive_direction(normal);
}

// g restricted to its face in direction u, moved into u^perp and written in
// coordinates of the sublattice M(u).
ConcaveFn restrict_to_perp(const ConcaveFn& g, const QPoint& u, const PerpLattice& perp) {
  RationalPolytope f = face(g.domain(), u);
  ConcaveFn r = restrict_to(g, f);
  const QPoint& base = f.vertices()[0];
  std::vector<Generator> gens;
  for (const auto& gen : r.generators()) gens.push_back({perp.to_coords(gen.point - base), gen.value});
  return ConcaveFn(g.ambient_rank() - 1, std::move(gens), g.error_bound());
}

LinLog mi_recursive_center(const std::vector<ConcaveFn>& gs) {
  const std::size_t n = static_cast<std::size_t>(gs[0].ambient_rank());
  if (n == 0) return gs[0].generators()[0].value.center();
  const RationalPolytope& q0 = gs[0].domain();
  std::vector<RationalPolytope> doms;
  for (std::size_t i = 1; i <= n; ++i) doms.push_back(gs[i].domain());
  RationalPolytope q = minkowski_sum(doms);

  auto inner = [&](const LatticePoint& u) {
    PerpLattice perp = perp_sublattice(u);
    QPoint uq = to_q(u);
    std::vector<ConcaveFn> rs;
    for (std::size_t i = 1; i <= n; ++i) rs.push_back(restrict_to_perp(gs[i], uq, perp));
    return mi_recursive_center(rs);
  };

  LinLog first;
  if (q.dimension() == static_cast<int>(n)) {
    for (const auto& f : facets(q)) {
      Rational psi = support_value(q0, to_q(f.normal));
      if (psi == 0) continue;
      first += inner(f.normal) * psi;
    }
  } else if (q.dimension() == static_cast<int>(n) - 1) {
    LatticePoint u = hyperplane_normal(q.chart().directions(), n);
    QPoint uq = to_q(u);
    Rational psi = support_value(q0, uq) + support_value(q0, Rational(-1) * uq);
    if (psi != 0) first = inner(u) * psi;
  }

  std::span<const ConcaveFn> rest(gs.data() + 1, n);
  AtomicMeasure mm = mixed_ma_measure(rest);
  LinLog second;
  for (const auto& a : mm.atoms()) second += dual_center(gs[0], a.point) * a.mass;
  return -first - second;
}

}  // namespace

// AtomicMeasure

void AtomicMeasure::add(const LinLogPoint& point, const Rational& mass) {
  if (static_cast<int>(point.size()) != rank_) throw std::invalid_argument("atom rank mismatch");
  if (mass == 0) return;
  StructuralLess less;
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), point,
                             [&](const Atom& a, const LinLogPoint& p) { return less(a.point, p); });
  if (it != atoms_.end() && it->point == point) {
    it->mass += mass;
    if (it->mass == 0) atoms_.erase(it);
  } else {
    atoms_.insert(it, Atom{point, mass});
  }
}

AtomicMeasure& AtomicMeasure::operator+=(const AtomicMeasure& o) {
  if (o.rank_ != rank_) throw std::invalid_argument("measure rank mismatch");
  for (const auto& a : o.atoms_) add(a.point, a.mass);
  return *this;
}

AtomicMeasure& AtomicMeasure::operator*=(const Rational& s) {
  if (s == 0) atoms_.clear();
  for (auto& a : atoms_) a.mass *= s;
  return *this;
}

Rational AtomicMeasure::total_mass() const {
  Rational t = 0;
  for (const auto& a : atoms_) t += a.mass;
  return t;
}

Rational AtomicMeasure::mass_at(const LinLogPoint& point) const {
  for (const auto& a : atoms_)
    if (a.point == point) return a.mass;
  return 0;
}

bool operator==(const AtomicMeasure& a, const AtomicMeasure& b) {
  if (a.rank_ != b.rank_ || a.atoms_.size() != b.atoms_.size()) return false;
  for (std::size_t i = 0; i < a.atoms_.size(); ++i)
    if (a.atoms_[i].point != b.atoms_[i].point || a.atoms_[i].mass != b.atoms_[i].mass) return false;
  return true;
}

// Measures and integrals

AtomicMeasure ma_measure(const ConcaveFn& g) {
  const int n = g.ambient_rank();
  if (n < 1) throw std::invalid_argument("ma_measure: rank must be positive");
  AtomicMeasure m(n);
  if (g.domain().dimension() < n) return m;
  for (const auto& p : g.pieces()) m.add(p.slope, p.volume);
  return m;
}

AtomicMeasure mixed_ma_measure(std::span<const ConcaveFn> gs) {
  const std::size_t n = rank_of_family(gs);
  if (gs.size() != n) throw std::invalid_argument("mixed_ma_measure: need n functions in rank n");
  auto conv = subset_convolutions(gs, Execution::serial);
  AtomicMeasure total(static_cast<int>(n));
  for (std::size_t mask = 1; mask < conv.size(); ++mask) {
    AtomicMeasure m = ma_measure(*conv[mask]);
    if ((n - static_cast<std::size_t>(__builtin_popcountll(mask))) % 2 == 1) m *= Rational(-1);
    total += m;
  }
  return total;
}

Value integrate(const ConcaveFn& g) {
  const Rational& vol = g.domain().volume();
  double err = g.error_bound() * vol.get_d() * (1 + 1e-12);
  return with_error(g.center_integral(), g.is_exact(), err);
}

Value integrate_against(const MinAffineFn& h, const AtomicMeasure& m) {
  if (h.ambient_rank() != m.ambient_rank()) throw std::invalid_argument("rank mismatch");
  Value total;
  for (const auto& a : m.atoms()) total += h.eval(a.point) * a.mass;
  return total;
}

double mixed_integral_error_bound(std::span<const ConcaveFn> gs) {
  if (all_exact(gs)) return 0.0;
  const std::size_t n = gs.size();
  std::vector<std::optional<RationalPolytope>> sums(std::size_t{1} << n);
  double bound = 0.0;
  for (std::size_t mask = 1; mask < sums.size(); ++mask) {
    std::size_t low = static_cast<std::size_t>(__builtin_ctzll(mask));
    std::size_t rest = mask & (mask - 1);
    sums[mask] = rest == 0 ? gs[low].domain() : minkowski_sum(*sums[rest], gs[low].domain());
    double eps = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) eps += gs[i].error_bound();
    bound += sums[mask]->volume().get_d() * eps;
  }
  return bound * (1 + 1e-12);
}

Value mixed_integral(std::span<const ConcaveFn> gs, Execution exec) {
  const std::size_t n = rank_of_family(gs);
  if (gs.size() != n + 1) throw std::invalid_argument("mixed integral: need n+1 functions in rank n");
  LinLog c = mi_definition_center(gs, exec);
  return with_error(std::move(c), all_exact(gs), mixed_integral_error_bound(gs));
}

Value mixed_integral_recursive(std::span<const ConcaveFn> gs) {
  const std::size_t n = rank_of_family(gs);
  if (gs.size() != n + 1) throw std::invalid_argument("mixed integral: need n+1 functions in rank n");
  LinLog c = mi_recursive_center(std::vector<ConcaveFn>(gs.begin(), gs.end()));
  return with_error(std::move(c), all_exact(gs), mixed_integral_error_bound(gs));
}

Value mi_segment_projection(const LatticePoint& m, std::span<const ConcaveFn> gs) {
  const std::size_t n = rank_of_family(gs);
  if (gs.size() != n || m.size() != n) throw std::invalid_argument("mi_segment_projection: need n functions in rank n");
  LatticeProjection pi = quotient_by_primitive(m);
  std::vector<ConcaveFn> pushed;
  for (const auto& g : gs) pushed.push_back(push_forward(g, pi));
  return mixed_integral(pushed);
}

}  // namespace toric
