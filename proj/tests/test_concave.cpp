#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "toric/concave.hpp"
#include "toric/errors.hpp"

using namespace toric;

namespace {

Rational rat(long a, long b = 1) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

ConcaveFn fn1(std::vector<std::pair<Rational, Value>> g) {
  std::vector<Generator> gs;
  for (auto& [x, t] : g) gs.push_back({QPoint{x}, t});
  return ConcaveFn(1, std::move(gs));
}

ConcaveFn tent() { return fn1({{0, 0}, {1, 0}, {rat(1, 2), rat(1, 2)}}); }

ConcaveFn random_fn(std::mt19937_64& rng, int n, bool with_logs = false) {
  std::uniform_int_distribution<int> c(-3, 3);
  std::uniform_int_distribution<int> cnt(1, 6);
  std::vector<Generator> gs;
  int m = cnt(rng);
  for (int i = 0; i < m; ++i) {
    QPoint x(n);
    for (auto& v : x) v = c(rng);
    Value t = rat(c(rng), 1 + std::abs(c(rng)));
    if (with_logs && rng() % 2) t += Value(LinLog::log_prime(rng() % 2 ? 2 : 3, rat(c(rng), 2)));
    gs.push_back({std::move(x), std::move(t)});
  }
  return ConcaveFn(n, std::move(gs));
}

QPoint random_point_in(std::mt19937_64& rng, const RationalPolytope& p) {
  // random convex combination of vertices
  const auto& vs = p.vertices();
  QPoint x(p.ambient_rank(), 0);
  Rational total = 0;
  std::vector<Rational> w;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    w.emplace_back(static_cast<long>(rng() % 5));
    total += w.back();
  }
  if (total == 0) return vs[0];
  for (std::size_t i = 0; i < vs.size(); ++i) x = x + Rational(w[i] / total) * vs[i];
  return x;
}

}  // namespace

TEST_CASE("canonicalize") {
  auto a = fn1({{0, 0}, {1, 0}, {rat(1, 2), 0}});
  CHECK(a.generators().size() == 2);
  auto b = fn1({{0, 0}, {1, 0}, {rat(1, 2), 1}});
  CHECK(b.generators().size() == 3);
  auto c = fn1({{0, 0}, {1, 0}, {rat(1, 2), -1}});
  CHECK(c == fn1({{0, 0}, {1, 0}}));
  CHECK(*c.eval(QPoint{rat(1, 2)}) == Value(0));
  // duplicate points keep the larger value
  CHECK(fn1({{0, 1}, {0, 2}}).generators()[0].value == Value(2));
  CHECK_THROWS_AS(ConcaveFn(1, {}), std::invalid_argument);
}

TEST_CASE("evaluation") {
  CHECK(*tent().eval(QPoint{rat(1, 4)}) == Value(rat(1, 4)));
  CHECK(*indicator(RationalPolytope::simplex(2)).eval({rat(1, 3), rat(1, 3)}) == Value(0));
  CHECK_FALSE(tent().eval(QPoint{rat(2)}).has_value());
  CHECK_THROWS_AS(tent().eval(q_point({0, 0})), std::invalid_argument);
  // lower-dimensional domain in rank 2
  ConcaveFn seg(2, {{q_point({0, 0}), Value(0)}, {q_point({2, 2}), Value(2)}});
  CHECK(*seg.eval(q_point({1, 1})) == Value(1));
  CHECK_FALSE(seg.eval(q_point({1, 0})).has_value());
  // log-valued generators
  ConcaveFn lg(1, {{q_point({0}), Value(0)}, {q_point({2}), Value(LinLog::log_prime(2, 2))}});
  CHECK(*lg.eval(q_point({1})) == Value(LinLog::log_prime(2)));
}

TEST_CASE("indicator and support function") {
  CHECK(indicator(RationalPolytope::simplex(2)).generators().size() == 3);
  auto psi = support_fn(RationalPolytope::hull(1, {q_point({0}), q_point({1})}));
  CHECK(psi.eval(q_point({-3})) == Value(-3));
  CHECK(psi.eval(q_point({5})) == Value(0));
  auto pt = support_fn(RationalPolytope::hull(2, {q_point({2, -1})}));
  CHECK(pt.eval(q_point({1, 1})) == Value(1));
}

TEST_CASE("legendre duality") {
  auto iota = indicator(RationalPolytope::hull(1, {q_point({0}), q_point({1})}));
  auto d = legendre_dual(iota);
  for (long v = -3; v <= 3; ++v) CHECK(d.eval(q_point({v})) == Value(std::min(0L, v)));
  auto td = legendre_dual(tent());
  for (long a = -6; a <= 6; ++a) {
    Rational v = rat(a, 2);
    Rational want = std::min({Rational(0), v, Rational(v / 2 - rat(1, 2))});
    CHECK(td.eval(QPoint{v}) == Value(want));
  }
  CHECK(legendre_dual_back(td) == tent());
  auto shifted = legendre_dual(add_constant(tent(), 1));
  for (long a = -4; a <= 4; ++a) CHECK(shifted.eval(q_point({a})) == td.eval(q_point({a})) - Value(1));
  CHECK_THROWS_AS(legendre_dual_back(td, RationalPolytope::hull(1, {q_point({5})})), std::invalid_argument);
}

TEST_CASE("sup-convolution and generator operations") {
  auto a = RationalPolytope::simplex(2);
  auto b = RationalPolytope::hull(2, {q_point({0, 0}), q_point({1, 1})});
  CHECK(sup_convolve(indicator(a), indicator(b)) == indicator(minkowski_sum(a, b)));
  auto pt = indicator(RationalPolytope::hull(1, {q_point({3})}));
  CHECK(sup_convolve(tent(), pt) == translate(tent(), q_point({3})));
  auto tt = sup_convolve(tent(), tent());
  CHECK(*tt.eval(q_point({1})) == Value(1));
  CHECK(tt.domain() == RationalPolytope::hull(1, {q_point({0}), q_point({2})}));
  auto iota01 = indicator(RationalPolytope::simplex(1));
  CHECK(translate(iota01, q_point({2})) == indicator(RationalPolytope::hull(1, {q_point({2}), q_point({3})})));
  CHECK(*add_constant(iota01, 1).eval(QPoint{rat(1, 3)}) == Value(1));
  auto rs = right_scale(tent(), 2);
  CHECK(rs.domain() == RationalPolytope::hull(1, {q_point({0}), q_point({2})}));
  CHECK(*rs.eval(q_point({1})) == Value(1));
  CHECK_THROWS_AS(right_scale(tent(), 0), std::invalid_argument);
}

TEST_CASE("push-forward") {
  auto px = quotient_by_primitive(lattice_point({0, 1}));
  CHECK(push_forward(indicator(RationalPolytope::simplex(2)), px) == indicator(RationalPolytope::simplex(1)));
  ConcaveFn g(2, {{q_point({0, 0}), Value(0)}, {q_point({1, 0}), Value(0)}, {q_point({0, 1}), Value(1)}});
  auto pg = push_forward(g, px);
  CHECK(pg == fn1({{0, 1}, {1, 0}}));
  // brute-force fiberwise max on a grid
  for (long a = 0; a <= 8; ++a) {
    Rational x = rat(a, 8);
    LinLog best = *g.eval_center({x, 0});
    for (long b = 0; b <= 8; ++b) {
      QPoint y{x, rat(b, 8)};
      if (auto v = g.eval_center(y)) best = max(best, *v);
    }
    CHECK(*pg.eval_center(QPoint{x}) == best);
  }
  QPoint t = q_point({2, 5});
  CHECK(push_forward(translate(g, t), px) == translate(pg, px.apply(t)));
}

TEST_CASE("sampling") {
  auto theta = [](const QPoint& x) -> Value {
    LinLog s;
    Rational x0 = 1 - x[0];
    for (const Rational& v : {x[0], x0})
      if (v != 0) s += LinLog::log_abs(v) * v;
    return Value(s * rat(-1, 2));
  };
  auto g = sample_concave(theta, RationalPolytope::simplex(1), 2);
  REQUIRE(g.generators().size() == 3);
  CHECK(g.generators()[1].value == Value(LinLog::log_prime(2, rat(1, 2))));
  auto c = sample_concave([](const QPoint&) { return Value(7); }, RationalPolytope::simplex(2), 5);
  CHECK(c == add_constant(indicator(RationalPolytope::simplex(2)), 7));
  auto l = sample_concave([](const QPoint& x) { return Value(x[0] * 3); },
                          RationalPolytope::hull(1, {q_point({0}), q_point({2})}), 4);
  CHECK(l.generators().size() == 2);
}

TEST_CASE("approximate values propagate error bounds") {
  ConcaveFn g(1, {{q_point({0}), Value::approx(0.5, 1e-6)}, {q_point({1}), Value(0)}});
  CHECK_FALSE(g.is_exact());
  auto v = g.eval(QPoint{rat(1, 2)});
  REQUIRE(v);
  CHECK(v->error() == 1e-6);
  CHECK(v->to_double() == doctest::Approx(0.25));
  auto s = sup_convolve(g, g);
  CHECK(s.error_bound() == doctest::Approx(2e-6));
}

TEST_CASE("property: involution, duality of sup-convolution, translation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 120; ++trial) {
    int n = 1 + trial % 3;
    bool logs = trial % 2 == 1;
    auto g = random_fn(rng, n, logs), h = random_fn(rng, n, logs);
    CHECK(legendre_dual_back(legendre_dual(g)) == g);
    auto gh = legendre_dual(sup_convolve(g, h));
    auto dg = legendre_dual(g), dh = legendre_dual(h);
    QPoint x0(n);
    for (auto& v : x0) v = static_cast<long>(rng() % 5) - 2;
    auto dt = legendre_dual(translate(g, x0));
    for (int s = 0; s < 5; ++s) {
      QPoint u(n);
      for (auto& v : u) v = rat(static_cast<long>(rng() % 13) - 6, 1 + static_cast<long>(rng() % 3));
      CHECK(gh.eval(u) == dg.eval(u) + dh.eval(u));
      CHECK(dt.eval(u) == dg.eval(u) + Value(dot(x0, u)));
    }
  }
}

TEST_CASE("property: evaluation is concave and dominated by push-forward") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 120; ++trial) {
    int n = 1 + trial % 3;
    auto g = random_fn(rng, n, trial % 2 == 1);
    for (int s = 0; s < 4; ++s) {
      QPoint x1 = random_point_in(rng, g.domain()), x2 = random_point_in(rng, g.domain());
      Rational t = rat(static_cast<long>(rng() % 5), 4);
      QPoint mid = t * x1 + Rational(1 - t) * x2;
      LinLog lhs = *g.eval_center(mid);
      LinLog rhs = *g.eval_center(x1) * t + *g.eval_center(x2) * Rational(1 - t);
      CHECK(compare(lhs, rhs) >= 0);
      if (n >= 2) {
        auto pi = quotient_by_primitive(n == 3 ? lattice_point({1, 0, 0}) : lattice_point({1, 1}));
        auto pg = push_forward(g, pi);
        CHECK(compare(*pg.eval_center(pi.apply(x1)), *g.eval_center(x1)) >= 0);
      }
    }
    // generators of the canonical form lie on the graph
    for (const auto& gen : g.generators()) CHECK(*g.eval_center(gen.point) == gen.value.center());
  }
}
