#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "tempered/inequalities.hpp"

using namespace tempered;

namespace {

int int_valuation(long a, long p) {
  if (a == 0) return kInfiniteValuation;
  int v = 0;
  while (a % p == 0) {
    a /= p;
    ++v;
  }
  return v;
}

std::multiset<std::pair<Rational, Rational>> dist_value_pairs(const ExponentFit& fit) {
  std::multiset<std::pair<Rational, Rational>> out;
  for (const auto& s : fit.samples) out.insert({s.log_dist, s.log_value});
  return out;
}

// Residues of y^p mod t^n for y in F_p[t]/t^n, by schoolbook multiplication.
long count_pth_powers(int p, int n) {
  std::set<std::vector<int>> hit;
  long total = 1;
  for (int i = 0; i < n; ++i) total *= p;
  for (long idx = 0; idx < total; ++idx) {
    std::vector<int> y(n);
    long rest = idx;
    for (int i = 0; i < n; ++i, rest /= p) y[i] = static_cast<int>(rest % p);
    std::vector<int> acc(n, 0);
    acc[0] = 1;
    for (int e = 0; e < p; ++e) {
      std::vector<int> next(n, 0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; i + j < n; ++j) next[i + j] = (next[i + j] + acc[i] * y[j]) % p;
      acc = next;
    }
    hit.insert(acc);
  }
  return static_cast<long>(hit.size());
}

bool minors_vanish_at_base(const PadicField& k, const PolyMap& F, const Cell& c) {
  auto x = cell_base(k, c);
  for (const auto& [J, minor] : generalized_gradient(F)) {
    auto v = eval(k, minor, x);
    if (!k.is_zero(v) && k.valuation(v) < c.depth) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("lower envelope takes the smallest value per abscissa") {
  std::vector<std::pair<Rational, Rational>> xy{{0, 0}, {1, 2}, {1, 5}, {2, 4}, {2, 9}};
  auto env = lower_envelope_fit(xy);
  CHECK(env.slope == 2);
  CHECK(env.points == 3);
  CHECK(env.residual == doctest::Approx(0.0));
  CHECK(min_offset(xy, Rational(2)) == 0);
  CHECK(lower_envelope_fit({{1, 3}, {1, 4}}).slope == 0);
}

TEST_CASE("h1 on monomials") {
  PadicField k(5, 20);
  ProbeOptions o;
  o.depth = 3;
  auto lin = h1_probe(k, parse_poly("x0", 1), o);
  CHECK(lin.alpha == 1);
  CHECK(lin.log_c == 0);
  CHECK(lin.violation_margin == 0);
  CHECK_FALSE(lin.empty_locus);

  auto sq = h1_probe(k, parse_poly("x0^2", 1), o);
  CHECK(sq.alpha == 2);
  CHECK(sq.constant() == doctest::Approx(1.0));
  CHECK(sq.samples.size() == 124);
  CHECK(sq.inexact_distances == 0);
  CHECK(sq.refit_violation_rate < 0.01);
  CHECK_FALSE(sq.refit);
}

TEST_CASE("h1 on x(x-1) over Z_5 matches the case analysis") {
  PadicField k(5, 20);
  ProbeOptions o;
  o.depth = 3;
  auto fit = h1_probe(k, parse_poly("x0^2 - x0", 1), o);
  CHECK(fit.alpha == 1);
  CHECK(fit.log_c == 0);
  // One of x, x - 1 is a unit: dist = |f| = 5^-(v(a) + v(a-1)).
  std::multiset<std::pair<Rational, Rational>> oracle;
  for (long a = 0; a < 125; ++a) {
    if (a == 0 || a == 1) continue;
    const int v = std::min(int_valuation(a, 5), 3) + std::min(int_valuation(a - 1, 5), 3);
    oracle.insert({Rational(-v), Rational(-v)});
  }
  CHECK(dist_value_pairs(fit) == oracle);
  for (const auto& s : fit.samples) CHECK(s.log_value >= fit.log_c + fit.alpha * s.log_dist);
}

TEST_CASE("h1 data is unchanged by a unit factor") {
  PadicField k(5, 20);
  ProbeOptions o;
  o.depth = 2;
  auto a = h1_probe(k, parse_poly("x0^2 - x0", 1), o);
  auto b = h1_probe(k, parse_poly("(x0^2 - x0)*(1 + 5*x0)", 1), o);
  CHECK(dist_value_pairs(a) == dist_value_pairs(b));
  CHECK(a.alpha == b.alpha);
  CHECK(a.log_c == b.log_c);
}

TEST_CASE("h1 without zeros reports the constant branch") {
  PadicField k(3, 20);
  ProbeOptions o;
  o.depth = 2;
  auto fit = h1_probe(k, parse_poly("x0^2 + 1", 1), o);
  CHECK(fit.empty_locus);
  CHECK(fit.alpha == 0);
  CHECK(fit.log_c == 0);
}

TEST_CASE("h1 is thread independent") {
  PadicField k(5, 20);
  ProbeOptions o;
  o.depth = 2;
  o.samples = 40;
  auto f = parse_poly("x0^2 - x1^3", 2);
  auto a = h1_probe(k, f, o);
  o.threads = 4;
  auto b = h1_probe(k, f, o);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].point == b.samples[i].point);
    CHECK(a.samples[i].log_dist == b.samples[i].log_dist);
  }
  CHECK(a.alpha == b.alpha);
}

TEST_CASE("h2 on x^2 + 1 over Q_3: |f| = max(|x|^2, 1)") {
  PadicField k(3, 20);
  ProbeOptions o;
  o.depth = 3;
  o.samples = 200;
  auto fit = h2_probe(k, parse_poly("x0^2 + 1", 1), 3, o);
  CHECK(fit.empty_locus);
  CHECK(fit.beta == 0);
  CHECK(fit.log_c == 0);
  for (const auto& s : fit.samples)
    CHECK(s.log_value == std::max(Rational(2 * s.log_norm), Rational(0)));
}

TEST_CASE("h2 on x") {
  PadicField k(5, 20);
  ProbeOptions o;
  o.depth = 3;
  o.samples = 120;
  auto fit = h2_probe(k, parse_poly("x0", 1), 3, o);
  CHECK_FALSE(fit.empty_locus);
  CHECK(fit.alpha == 1);
  CHECK(fit.beta == 0);
  CHECK(fit.log_c == 0);
  CHECK(fit.growth_constant == 2);
  CHECK(fit.growth_violations == 0);
}

TEST_CASE("distance grows at most linearly") {
  PadicField k(5, 20);
  ProbeOptions o;
  o.depth = 2;
  o.samples = 60;
  auto fit = h2_probe(k, parse_poly("x0^2 + x1^2 - 5", 2), 2, o);
  CHECK(fit.growth_constant > 0);
  CHECK(fit.growth_violations == 0);
  for (const auto& s : fit.samples)
    CHECK(s.log_value >= fit.log_c + fit.alpha * s.log_dist - fit.beta * s.log_norm);
}

TEST_CASE("critical cells of x^2 + y^2 and of the cusp") {
  PadicField k(5, 20);
  for (const char* text : {"x0^2 + x1^2", "x0^3 - x1^2"}) {
    CAPTURE(text);
    auto rep = critical_cells(k, PolyMap({parse_poly(text, 2)}), 2);
    REQUIRE(rep.critical.size() == 1);
    CHECK(rep.critical[0].digits == std::vector<Integer>{0, 0});
    CHECK(rep.unresolved.empty());
    REQUIRE(rep.values.size() == 1);
    CHECK(k.is_zero(rep.values[0].base[0]));
  }
}

TEST_CASE("critical cells of x^2 z^2 + y^3 z are the x- and z-axes") {
  PadicField k(5, 20);
  const int depth = 2;
  PolyMap F({parse_poly("x0^2*x2^2 + x1^3*x2", 3)});
  auto rep = critical_cells(k, F, depth, {}, 0);
  std::set<Cell> reported(rep.critical.begin(), rep.critical.end());
  std::set<Cell> upper = reported;
  upper.insert(rep.unresolved.begin(), rep.unresolved.end());
  // Symbolic solve of the three partials: y = z = 0 or x = y = 0.
  std::set<Cell> oracle;
  for (long a = 0; a < 25; ++a) {
    oracle.insert(Cell{{Integer(a), Integer(0), Integer(0)}, depth, 0});
    oracle.insert(Cell{{Integer(0), Integer(0), Integer(a)}, depth, 0});
  }
  for (const auto& c : reported) CHECK(oracle.count(c) == 1);
  for (const auto& c : oracle) CHECK(upper.count(c) == 1);
  for (const auto& c : rep.critical) CHECK(minors_vanish_at_base(k, F, c));
}

TEST_CASE("g-cells lie inside the intersection of the minor trees") {
  PadicField k(5, 20);
  for (const char* text : {"x0^2 + x1^2", "x0^3 - x1^2", "x0*x1"}) {
    CAPTURE(text);
    PolyMap F({parse_poly(text, 2)});
    auto rep = critical_cells(k, F, 2);
    auto inter = minor_intersection_cells(k, F, 2);
    std::set<Cell> both(inter.begin(), inter.end());
    for (const auto& c : rep.critical) CHECK(both.count(c) == 1);
  }
}

TEST_CASE("stability probe") {
  PadicField k(5, 20);
  PolyMap circle({parse_poly("x0^2 + x1^2", 2)});
  auto r2 = critical_cells(k, circle, 2);
  CHECK(stability_probe(k, r2, {Rational(1)}, 0).verdict == "stably-non-critical");
  CHECK(stability_probe(k, r2, {Rational(0)}, 0).verdict == "inconclusive");
  CHECK(stability_probe(k, r2, {Rational(0)}, 5).verdict == "inconclusive");

  // Coarser value cells can only meet more balls.
  auto r1 = critical_cells(k, circle, 1);
  CHECK(stability_probe(k, r1, {Rational(5)}, 1).verdict == "inconclusive");
  CHECK(stability_probe(k, r2, {Rational(5)}, 1).verdict == "stably-non-critical");
  auto r3 = critical_cells(k, circle, 3);
  for (long c : {1, 2, 5, 10, 25, 50, 125})
    for (int s = 0; s <= 3; ++s) {
      CAPTURE(c);
      CAPTURE(s);
      if (stability_probe(k, r1, {Rational(c)}, s).verdict == "stably-non-critical")
        CHECK(stability_probe(k, r2, {Rational(c)}, s).verdict == "stably-non-critical");
      if (stability_probe(k, r2, {Rational(c)}, s).verdict == "stably-non-critical")
        CHECK(stability_probe(k, r3, {Rational(c)}, s).verdict == "stably-non-critical");
    }
}

TEST_CASE("deligne density table against enumeration") {
  for (int p : {2, 3}) {
    CAPTURE(p);
    auto table = deligne_example(p, {3, 4, 6, 8});
    CHECK(deligne_example(p, {4, 6, 8}).strictly_decreasing);
    CHECK(deligne_example(p, {3, 3 + p}, 1L << 22, 0).strictly_decreasing);
    CHECK(table.locus_checked);
    // Not strict from 3 to 4 when p = 3: both give one free digit.
    CHECK(table.strictly_decreasing == (p == 2));
    for (const auto& row : table.rows) {
      CAPTURE(row.n);
      CHECK(row.hit == count_pth_powers(p, row.n));
      // y^p = sum a_i t^(ip): ceil(n/p) free digits.
      CHECK(row.hit == ipow(p, (row.n + p - 1) / p));
    }
  }
  auto two = deligne_example(2, {4});
  CHECK(two.rows[0].density == Rational(1, 4));
  auto three = deligne_example(3, {3});
  CHECK(three.rows[0].density == Rational(1, 9));
  CHECK_THROWS_AS(deligne_example(2, {30}), BudgetExceeded);
}

TEST_CASE("the deligne stability map has no stable window") {
  auto two = deligne_stability(2, 3, 3);
  CHECK_FALSE(two.any_stable);
  CHECK(two.value_cells == 8);
  CHECK(two.critical_cells == 64);
  auto three = deligne_stability(3, 2, 2);
  CHECK_FALSE(three.any_stable);
  CHECK(three.value_cells == 9);
  for (const auto& [name, v] : three.verdicts) CHECK(v.verdict == "inconclusive");
}

TEST_CASE("gradient lower bounds, ultrametric") {
  PadicField k(5, 24);
  GradientOptions o;
  o.radii = {0, 1};
  auto line = gradient_lower_bound(k, PolyMap({parse_poly("x0", 1)}), {Rational(1)}, o);
  REQUIRE_FALSE(line.samples.empty());
  CHECK(line.gamma == 0);
  CHECK(line.log_c == 0);

  o.radii = {0, 1, 2};
  o.samples = 10;
  auto sphere =
      gradient_lower_bound(k, PolyMap({parse_poly("x0^2 + x1^2 + x2^2", 3)}), {Rational(1)}, o);
  REQUIRE(sphere.samples.size() > 5);
  CHECK(sphere.gamma == 0);
  CHECK(std::find(sphere.flags.begin(), sphere.flags.end(), "StabilityUnknown") ==
        sphere.flags.end());
  for (const auto& s : sphere.samples) CHECK(s.log_value >= sphere.log_c - sphere.gamma * s.log_norm);

  auto at_zero =
      gradient_lower_bound(k, PolyMap({parse_poly("x0^2 + x1^2 + x2^2", 3)}), {Rational(0)}, o);
  CHECK(std::find(at_zero.flags.begin(), at_zero.flags.end(), "StabilityUnknown") !=
        at_zero.flags.end());
}

TEST_CASE("cusp witness forces gamma >= 1/3") {
  PolyMap F({parse_poly("x0^2*x2^2 + x1^3*x2", 3)});
  auto pts = cusp_witness({1e3, 1e4, 1e5, 1e6});
  for (const auto& x : pts) {
    const double f = x[0] * x[0] * x[2] * x[2] + x[1] * x[1] * x[1] * x[2];
    CHECK(std::fabs(f + 1.0) <= 1e-9);
  }
  auto fit = real_gradient_fit(F, pts);
  CHECK(fit.gamma.get_d() >= 1.0 / 3.0 - 0.05);
  CHECK(fit.gamma.get_d() <= 1.0 / 3.0 + 0.05);
  for (const auto& s : fit.samples) CHECK(s.log_value >= fit.log_c - fit.gamma * s.log_norm);
}

TEST_CASE("euler bound") {
  PadicField k(5, 24);
  GradientOptions o;
  o.radii = {0, 1};
  auto circle = euler_bound_check(k, parse_poly("x0^2 + x1^2", 2), Rational(1), o);
  CHECK(circle.points > 0);
  CHECK(circle.violations == 0);
  CHECK(circle.min_ratio >= 1.0);

  auto quartic = real_euler_bound_check(parse_poly("x0^4 + x1^4 - x2^4", 3), Rational(1),
                                        {0, 1, 2, 3}, 200, 7);
  CHECK(quartic.points > 100);
  CHECK(quartic.violations == 0);
  CHECK(quartic.constant == 3.0);

  auto linear = real_euler_bound_check(parse_poly("2*x0 - x1", 2), Rational(1), {0, 1}, 50, 3);
  CHECK(linear.violations == 0);
  CHECK_THROWS_AS(real_euler_bound_check(parse_poly("x0^2 + x1", 2), Rational(1), {0}, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("icp classification") {
  auto one = icp_classify({1, 0, 0, 0, 0});
  CHECK(one.label == "case-I");
  REQUIRE(one.has_fit);
  CHECK(one.fit.samples.size() > 50);
  CHECK(one.fit.gamma.get_d() <= 0.1);
  CHECK(icp_classify({0, 1, 0, 0, 0}, false).label == "case-II");
  CHECK(icp_classify({0, 0, 1, 1, 1}).label == "not-ICP");
  CHECK_FALSE(icp_classify({0, 0, 1, 1, 1}).has_fit);
}
