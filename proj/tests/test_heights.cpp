#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "support/random_inputs.hpp"
#include "toric/heights.hpp"

using namespace toric;
using toric::testing::rat;

namespace {

constexpr double kMahlerTrinomial = 0.3230659472;
const double kHalfLog2 = 0.5 * std::log(2.0);

LaurentPoly poly(int n, std::vector<std::pair<std::vector<long>, Rational>> ts) {
  std::vector<Term> terms;
  for (auto& [e, c] : ts) {
    LatticePoint m;
    for (long x : e) m.emplace_back(x);
    terms.push_back({std::move(m), c});
  }
  return LaurentPoly(n, std::move(terms));
}

LaurentPoly trinomial() { return poly(2, {{{0, 0}, 1}, {{1, 0}, 1}, {{0, 1}, 1}}); }

std::vector<MetrizedToricDivisor> canonical_simplex(int n, int count) {
  return std::vector<MetrizedToricDivisor>(count, MetrizedToricDivisor::canonical(RationalPolytope::simplex(n)));
}

}  // namespace

TEST_CASE("degrees") {
  auto one = canonical_simplex(2, 1);
  CHECK(degree(trinomial(), one) == 1);
  CHECK(degree(trinomial() * trinomial(), one) == 2);
  CHECK(degree(LaurentPoly::binomial(lattice_point({1})), {}) == 1);
  CHECK_THROWS_AS(degree(trinomial(), {}), std::invalid_argument);
}

TEST_CASE("Weil divisors at rays") {
  std::vector<LatticePoint> rays{lattice_point({1, 0}), lattice_point({0, 1}), lattice_point({-1, -1})};
  auto w = weil_divisor_at_rays(trinomial(), rays);
  CHECK(w[0].second == 0);
  CHECK(w[1].second == 0);
  CHECK(w[2].second == -1);
  auto mono = weil_divisor_at_rays(LaurentPoly::monomial(lattice_point({2, -3})), rays);
  CHECK(mono[0].second == 2);
  CHECK(mono[1].second == -3);
  CHECK(mono[2].second == 1);
  // 0 is a vertex of NP and the rays lie in its dual cone
  auto pos = weil_divisor_at_rays(trinomial(), {lattice_point({1, 0}), lattice_point({1, 2})});
  CHECK(pos[0].second == 0);
  CHECK(pos[1].second == 0);
  CHECK_THROWS_AS(weil_divisor_at_rays(trinomial(), {lattice_point({2, 0})}), std::invalid_argument);
}

TEST_CASE("property: Weil coefficients shift under monomial factors") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 2 + trial % 2;
    std::vector<Term> ts;
    for (int i = 0; i < 3; ++i) {
      LatticePoint e(n);
      for (auto& x : e) x = static_cast<long>(rng() % 5) - 2;
      ts.push_back({e, rat(static_cast<long>(rng() % 5) + 1)});
    }
    LaurentPoly f(n, ts);
    LatticePoint m0 = testing::random_primitive(rng, n);
    std::vector<LatticePoint> rays{testing::random_primitive(rng, n)};
    auto g = LaurentPoly::monomial(m0) * f;
    auto a = weil_divisor_at_rays(f, rays), b = weil_divisor_at_rays(g, rays);
    CHECK(b[0].second == a[0].second + dot(to_q(m0), to_q(rays[0])));
  }
}

TEST_CASE("toric local heights") {
  auto ds = canonical_simplex(2, 2);
  CHECK(toric_local_height(trinomial(), ds, PlaceQ::prime(3)) == Value(0));
  auto f = poly(1, {{{1}, 2}, {{0}, 4}});
  auto d1 = canonical_simplex(1, 1);
  CHECK(global_term(f, d1, PlaceQ::prime(2)) == Value(-LinLog::log_prime(2)));
  CHECK(toric_local_height(f, d1, PlaceQ::prime(2)) == Value(0));
  std::vector<MetrizedToricDivisor> fs{MetrizedToricDivisor::fubini_study(1)};
  HeightSpec spec;
  spec.fs_k = 64;
  Value h = toric_local_height(LaurentPoly::binomial(lattice_point({1})), fs, PlaceQ::arch(), spec);
  CHECK(h.is_exact());
  CHECK(std::fabs(h.to_double() - kHalfLog2) < 1e-2);
  CHECK(h.to_double() <= kHalfLog2);
}

TEST_CASE("global heights") {
  auto b = LaurentPoly::binomial(lattice_point({1, 1}));
  auto r = global_height(b, canonical_simplex(2, 2));
  CHECK(r.total == Value(0));
  for (const auto& [v, h] : r.per_place) CHECK(h == Value(0));

  auto t = global_height(trinomial(), canonical_simplex(2, 2));
  CHECK(t.degree == 1);
  CHECK(std::fabs(t.total.to_double() - kMahlerTrinomial) < 2e-3);
  REQUIRE(t.per_place.size() == 1);
  CHECK(t.per_place[0].first == PlaceQ::arch());

  std::vector<MetrizedToricDivisor> fs{MetrizedToricDivisor::fubini_study(1)};
  HeightSpec spec;
  spec.fs_k = 64;
  auto p = global_height(LaurentPoly::binomial(lattice_point({1})), fs, spec);
  CHECK(std::fabs(p.total.to_double() - kHalfLog2) < 1e-2);

  auto mono = global_height(LaurentPoly::monomial(lattice_point({1, 0}), 3), canonical_simplex(2, 2));
  CHECK(mono.zero_cycle);
  CHECK(mono.total == Value(0));
}

TEST_CASE("canonical heights") {
  auto t = canonical_height(trinomial(), canonical_simplex(2, 2), HeightSpec{QuadratureSpec{1024}});
  CHECK(std::fabs(t.total.to_double() - kMahlerTrinomial) < 1e-4);
  auto x1 = canonical_height(LaurentPoly::binomial(lattice_point({1})), canonical_simplex(1, 1));
  CHECK(x1.total == Value(0));
  auto f = poly(1, {{{1}, 2}, {{0}, 4}});
  auto c = canonical_height(f, canonical_simplex(1, 1));
  CHECK(c.total == Value(LinLog::log_prime(2)));
  CHECK(*c.at(PlaceQ::prime(2)) == Value(-LinLog::log_prime(2)));
  CHECK(global_height(f, canonical_simplex(1, 1)).total == c.total);
  std::vector<MetrizedToricDivisor> fs{MetrizedToricDivisor::fubini_study(1)};
  CHECK_THROWS_AS(canonical_height(f, fs), std::invalid_argument);
}

TEST_CASE("property: canonical height equals the global height with canonical roofs") {
  std::mt19937_64 rng(32);
  HeightSpec spec{QuadratureSpec{256}, DualGrid{std::nullopt, 16}};
  for (int trial = 0; trial < 12; ++trial) {
    int n = 1 + trial % 2;
    std::vector<Term> ts;
    int terms = 2 + static_cast<int>(rng() % 2);
    for (int i = 0; i < terms; ++i) {
      LatticePoint e(n);
      for (auto& x : e) x = static_cast<long>(rng() % 3);
      long c = static_cast<long>(rng() % 13) - 6;
      ts.push_back({e, rat(c == 0 ? 1 : c, 1 + static_cast<long>(rng() % 4))});
    }
    LaurentPoly f(n, ts);
    if (f.is_monomial()) continue;
    std::vector<MetrizedToricDivisor> ds(n, MetrizedToricDivisor::canonical(testing::random_full_polytope(rng, n, 4, 1)));
    auto a = canonical_height(f, ds, spec), b = global_height(f, ds, spec);
    REQUIRE(a.per_place.size() == b.per_place.size());
    for (std::size_t i = 0; i < a.per_place.size(); ++i) {
      const auto& [v, x] = a.per_place[i];
      const auto& y = b.per_place[i].second;
      if (!v.is_arch()) CHECK(x == y);
      else if (x.is_exact() && y.is_exact()) CHECK(x == y);
      else CHECK(std::fabs(x.to_double() - y.to_double()) < 2e-2 * (1 + std::fabs(x.to_double())));
    }
  }
}

TEST_CASE("place support: inactive places contribute zero") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = poly(2, {{{0, 0}, rat(6)}, {{1, 0}, rat(-4, 5)}, {{0, 1}, rat(static_cast<long>(rng() % 3) + 1)}});
    std::vector<MetrizedToricDivisor> ds(2, MetrizedToricDivisor::canonical(testing::random_full_polytope(rng, 2, 4, 1)));
    ds[0].set_roof(PlaceQ::prime(3), testing::random_roof(rng, ds[0].polytope(), testing::ValueKind::linlog));
    auto places = active_places(f, ds);
    CHECK(std::find(places.begin(), places.end(), PlaceQ::prime(7)) == places.end());
    CHECK(global_term(f, ds, PlaceQ::prime(7)) == Value(0));
    CHECK(global_term(f, ds, PlaceQ::prime(11)) == Value(0));
  }
}

TEST_CASE("rho heights") {
  auto b = rho_height(LaurentPoly::binomial(lattice_point({1, 2})));
  CHECK(b.total == Value(0));
  CHECK(rho_height(LaurentPoly::binomial(lattice_point({1}))).total == Value(0));
  auto seg = rho_height(poly(2, {{{0, 0}, 1}, {{1, 1}, 1}, {{2, 2}, 1}}));
  CHECK(seg.total == Value(0));
  auto f = poly(1, {{{1}, 2}, {{0}, 4}});
  CHECK(integrate(ronkin_concave_approx(f, PlaceQ::prime(2))) == Value(LinLog::log_prime(2, rat(-3, 2))));
  auto r = rho_height(f);
  CHECK(*r.at(PlaceQ::prime(2)) == Value(LinLog::log_prime(2, -3)));
  CHECK(*r.at(PlaceQ::arch()) == Value(LinLog::log_prime(2, 3)));
  CHECK(r.total == Value(0));
}

TEST_CASE("property: rho height is invariant under unit monomial factors") {
  std::mt19937_64 rng(34);
  HeightSpec spec{QuadratureSpec{64}, DualGrid{Rational(6), 4}};
  for (int trial = 0; trial < 8; ++trial) {
    auto f = poly(2, {{{0, 0}, rat(2)}, {{1, 0}, rat(-3)}, {{0, 1}, rat(5, 2)}});
    LatticePoint m = testing::random_primitive(rng, 2);
    Rational sign = rng() % 2 ? 1 : -1;
    auto g = sign * (LaurentPoly::monomial(m) * f);
    auto a = rho_height(f, spec), b = rho_height(g, spec);
    REQUIRE(a.per_place.size() == b.per_place.size());
    for (std::size_t i = 1; i < a.per_place.size(); ++i) CHECK(a.per_place[i].second == b.per_place[i].second);
    CHECK(std::fabs(a.total.to_double() - b.total.to_double()) < 1e-6);
  }
}

TEST_CASE("Fubini-Study roofs and heights") {
  auto r = fs_roof(1, 2);
  CHECK(r.generators().size() == 3);
  CHECK(*r.eval(QPoint{rat(1, 2)}) == Value(LinLog::log_prime(2, rat(1, 2))));
  CHECK(r.eval(QPoint{rat(0)})->is_exact());
  double prev = -1;
  for (int k : {8, 16, 32, 64}) {
    HeightSpec spec;
    spec.fs_k = k;
    auto h = fs_height(LaurentPoly::binomial(lattice_point({1})), spec);
    double v = h.total.to_double();
    CHECK(v <= kHalfLog2 + 1e-12);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(std::fabs(prev - kHalfLog2) < 1e-2);
  auto g = fs_height(poly(1, {{{1}, 3}, {{0}, -5}}));
  REQUIRE(g.per_place.size() == 3);
  auto unit = fs_height(poly(1, {{{2}, 1}, {{1}, 3}, {{0}, -5}}));
  for (const auto& [v, h] : unit.per_place)
    if (!v.is_arch()) CHECK(h == Value(0));
}

TEST_CASE("binomial heights through the projection") {
  auto m = lattice_point({1, 2});
  auto proj = binomial_height_via_projection(m, canonical_simplex(2, 2));
  CHECK(proj.total == Value(0));
  CHECK_THROWS_AS(binomial_height_via_projection(lattice_point({2, 2}), canonical_simplex(2, 2)),
                  std::invalid_argument);
}

TEST_CASE("property: projection equals the global height for prime-only roofs") {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 1 + trial % 2;
    LatticePoint m = testing::random_primitive(rng, n);
    std::vector<MetrizedToricDivisor> ds;
    for (int i = 0; i < n; ++i) {
      ds.push_back(MetrizedToricDivisor::canonical(testing::random_full_polytope(rng, n, 4, 1)));
      ds.back().set_roof(PlaceQ::prime(rng() % 2 ? 2 : 3), testing::random_roof(rng, ds.back().polytope(), testing::ValueKind::linlog));
    }
    auto a = binomial_height_via_projection(m, ds);
    auto b = global_height(LaurentPoly::binomial(m), ds);
    CHECK(a.total.is_exact());
    CHECK(a.total == b.total);
  }
}

TEST_CASE("FS binomial height: projection against the main formula") {
  HeightSpec spec;
  spec.fs_k = 16;
  auto m = lattice_point({0, 1});
  std::vector<MetrizedToricDivisor> ds(2, MetrizedToricDivisor::fubini_study(2));
  auto a = binomial_height_via_projection(m, ds, spec);
  auto b = fs_height(LaurentPoly::binomial(m), spec);
  CHECK(std::fabs(a.total.to_double() - b.total.to_double()) < 5e-2);
}

TEST_CASE("property: global height is additive under sup-convolution of roofs") {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 15; ++trial) {
    int n = 1 + trial % 2;
    LatticePoint m = testing::random_primitive(rng, n);
    auto f = LaurentPoly::binomial(m);
    auto q1 = testing::random_full_polytope(rng, n, 3, 1), q2 = testing::random_full_polytope(rng, n, 3, 1);
    PlaceQ v = PlaceQ::prime(5);
    auto t1 = testing::random_roof(rng, q1, testing::ValueKind::linlog), t2 = testing::random_roof(rng, q2, testing::ValueKind::linlog);
    std::vector<MetrizedToricDivisor> rest;
    for (int i = 1; i < n; ++i) rest.push_back(MetrizedToricDivisor::canonical(testing::random_full_polytope(rng, n, 3, 1)));
    auto with = [&](MetrizedToricDivisor d) {
      std::vector<MetrizedToricDivisor> ds{std::move(d)};
      ds.insert(ds.end(), rest.begin(), rest.end());
      return global_height(f, ds).total;
    };
    auto s = sup_convolve(t1, t2);
    Value h12 = with(MetrizedToricDivisor(s.domain()).set_roof(v, s));
    Value h1 = with(MetrizedToricDivisor(q1).set_roof(v, t1));
    Value h2 = with(MetrizedToricDivisor(q2).set_roof(v, t2));
    CHECK(h12 == h1 + h2);
  }
}
