#include <random>
#include <set>

#include "doctest.h"
#include "tempered/lift.hpp"

using namespace tempered;

namespace {

// Residues y mod p^k with y^2 = a mod p^k and y = y0 mod p.
std::vector<long> square_roots_mod(long a, long p, int k, long y0) {
  long mod = 1;
  for (int i = 0; i < k; ++i) mod *= p;
  std::vector<long> out;
  for (long y = 0; y < mod; ++y)
    if ((y * y - a) % mod == 0 && y % p == y0 % p) out.push_back(y);
  return out;
}

// Residue pairs (a, b) mod p^k with f(a, b) = 0 mod p^k by brute force.
template <class F>
std::set<std::pair<long, long>> solutions_mod(F f, long p, int k) {
  long mod = 1;
  for (int i = 0; i < k; ++i) mod *= p;
  std::set<std::pair<long, long>> out;
  for (long a = 0; a < mod; ++a)
    for (long b = 0; b < mod; ++b)
      if (((f(a, b) % mod) + mod) % mod == 0) out.insert({a, b});
  return out;
}

}  // namespace

TEST_CASE("hensel lift of sqrt 2 in Z_7") {
  PadicField k(7, 24);
  PolyMap F({parse_poly("x0^2 - 2", 1)});
  auto two = hensel_lift(k, F, {0}, {k.from_integer(3)}, 2);
  auto three = hensel_lift(k, F, {0}, {k.from_integer(3)}, 3);
  auto oracle2 = square_roots_mod(2, 7, 2, 3);
  auto oracle3 = square_roots_mod(2, 7, 3, 3);
  REQUIRE(oracle2.size() == 1);
  REQUIRE(oracle3.size() == 1);
  CHECK(oracle2[0] == 10);
  CHECK(oracle3[0] == 108);
  CHECK(k.residue(two.point[0], 2) == oracle2[0]);
  CHECK(k.residue(three.point[0], 3) == oracle3[0]);
  CHECK(two.minor == NormValue::ultrametric(7, Rational(0)));
  CHECK(two.contraction_exponent < 0);
}

TEST_CASE("linear lift is exact in one step") {
  PadicField k(5, 20);
  PolyMap F({parse_poly("x0 - 7/3", 1)});
  auto cert = hensel_lift(k, F, {0}, {k.from_integer(4)}, 15);
  CHECK(cert.steps == 1);
  CHECK((cert.point[0] - k.from_rational(Rational(7, 3))).is_zero());
}

TEST_CASE("double root is rejected") {
  PadicField k(5, 20);
  PolyMap F({parse_poly("x0^2", 1)});
  CHECK_THROWS_AS(hensel_lift(k, F, {0}, {k.from_integer(5)}, 8), NoContraction);
}

TEST_CASE("lift of a non-integral start point and a 2x2 system") {
  PadicField k(3, 30);
  // x0*x1 = 1 with x1 frozen at 1/3: x0 -> 3.
  PolyMap F({parse_poly("x0*x1 - 1", 2)});
  auto cert = hensel_lift(k, F, {0}, {k.from_integer(2), k.from_rational(Rational(1, 3))}, 10);
  CHECK(cert.point[0].to_rational() == 3);

  PolyMap G({parse_poly("x0 + x1 - 3", 2), parse_poly("x0*x1 - 2", 2)});
  auto c2 = hensel_lift(k, G, {0, 1}, {k.from_integer(1 + 9), k.from_integer(2 + 27)}, 12);
  CHECK((c2.point[0] - k.from_integer(1)).valuation() >= 12);
  CHECK((c2.point[1] - k.from_integer(2)).valuation() >= 12);
}

TEST_CASE("real Newton lift") {
  RealField r;
  PolyMap F({parse_poly("x0^2 + x1^2 - 1", 2)});
  auto cert = hensel_lift(r, F, {0}, {0.9, 0.3}, 12);
  CHECK(cert.point[0] == doctest::Approx(std::sqrt(1 - 0.09)).epsilon(1e-12));
  CHECK(cert.point[1] == 0.3);
}

TEST_CASE("certified lifts re-verify with exact rationals") {
  std::mt19937_64 rng(9);
  PadicField k(5, 30);
  PolyMap F({parse_poly("x0^3 + 2*x0*x1 - x1^2 + 3", 2)});
  int certified = 0;
  for (int trial = 0; trial < 200; ++trial) {
    long a = static_cast<long>(rng() % 125), b = static_cast<long>(rng() % 125);
    try {
      auto cert = hensel_lift(k, F, {0}, {k.from_integer(a), k.from_integer(b)}, 10);
      std::vector<Rational> x{cert.point[0].to_rational(), cert.point[1].to_rational()};
      Rational value = F.components[0].evaluate(x);
      CHECK(valuation(value, 5) >= 10);
      ++certified;
    } catch (const NoContraction&) {
    }
  }
  CHECK(certified > 20);
}

TEST_CASE("zero_cells examples") {
  PadicField k(5, 20);
  auto tree = zero_cells(k, parse_poly("x0", 1), root_cell(1), 2);
  auto zc = tree.cells_at(2, CellStatus::ZeroBearing);
  REQUIRE(zc.size() == 1);
  CHECK(zc[0].digits[0] == 0);

  auto circle = parse_poly("x0^2 + x1^2 - 1", 2);
  auto t2 = zero_cells(k, circle, root_cell(2), 1);
  auto oracle = solutions_mod([](long a, long b) { return a * a + b * b - 1; }, 5, 1);
  auto got = t2.cells_at(1, CellStatus::ZeroBearing);
  CHECK(got.size() == oracle.size());
  CHECK(oracle.size() == 4);
  for (const auto& c : got)
    CHECK(oracle.count({c.digits[0].get_si(), c.digits[1].get_si()}) == 1);

  PadicField k3(3, 20);
  auto t3 = zero_cells(k3, parse_poly("x0^2 + 1", 1), root_cell(1), 3);
  CHECK(t3.nodes.front().status == CellStatus::Empty);
  CHECK(t3.cells_at(3, CellStatus::ZeroBearing).empty());
  CHECK(t3.unresolved_count() == 0);
}

TEST_CASE("zero_cells at depth 3 matches enumeration for a smooth curve") {
  PadicField k(3, 20);
  auto f = parse_poly("x0^2 - x1^3 - x1 - 1", 2);
  auto tree = zero_cells(k, f, root_cell(2), 3);
  CHECK(tree.unresolved_count() == 0);
  auto oracle = solutions_mod([](long a, long b) { return a * a - b * b * b - b - 1; }, 3, 3);
  // A smooth curve: every residue solution mod 27 lifts, so the depth-3
  // zero-bearing cells are exactly the residue solutions.
  auto got = tree.cells_at(3, CellStatus::ZeroBearing);
  std::set<std::pair<long, long>> got_set;
  for (const auto& c : got) got_set.insert({c.digits[0].get_si(), c.digits[1].get_si()});
  CHECK(got_set == oracle);
}

TEST_CASE("zero-bearing cells at depth N+1 refine those at depth N") {
  PadicField k(5, 20);
  auto f = parse_poly("x0^2 + x1^2 - 1", 2);
  auto tree = zero_cells(k, f, root_cell(2), 3);
  for (int n = 1; n < 3; ++n) {
    auto parents = tree.cells_at(n, CellStatus::ZeroBearing);
    for (const auto& child : tree.cells_at(n + 1, CellStatus::ZeroBearing)) {
      bool found = false;
      for (const auto& p : parents) found = found || cell_contains(p, child, 5);
      CHECK(found);
    }
  }
  auto jsonl = tree.to_jsonl();
  CHECK(jsonl.find("\"status\":\"zero-bearing\"") != std::string::npos);
}

TEST_CASE("dist_to_zero examples") {
  PadicField k(5, 20);
  auto d = dist_to_zero(k, parse_poly("x0", 1), {k.from_integer(5)}, 8);
  CHECK(d.exact);
  CHECK(d.distance == NormValue::ultrametric(5, Rational(1)));

  auto sq = parse_poly("x0^2", 1);
  auto d2 = dist_to_zero(k, sq, {k.from_integer(5)}, 8);
  CHECK(d2.distance == NormValue::ultrametric(5, Rational(1)));
  auto fx = eval(k, sq, {k.from_integer(5)});
  CHECK(fx.valuation() == 2);

  // (1, 5) on x^2 + y^2 = 1: the zero (sqrt(-24), 5) has sqrt(-24) = 1 mod 25,
  // so the distance is 5^-2. Oracle: the depth-2 ball around (1, 5) meets
  // the curve mod 125 and the depth-3 ball does not.
  auto circle = parse_poly("x0^2 + x1^2 - 1", 2);
  auto d3 = dist_to_zero(k, circle, {k.from_integer(1), k.from_integer(5)}, 8);
  auto sols = solutions_mod([](long a, long b) { return a * a + b * b - 1; }, 5, 3);
  bool depth2 = false, depth3 = false;
  for (auto [a, b] : sols) {
    if ((a - 1) % 25 == 0 && (b - 5) % 25 == 0) depth2 = true;
    if ((a - 1) % 125 == 0 && (b - 5) % 125 == 0) depth3 = true;
  }
  CHECK(depth2);
  CHECK(!depth3);
  CHECK(d3.exact);
  CHECK(d3.distance == NormValue::ultrametric(5, Rational(2)));

  auto on = dist_to_zero(k, circle, {k.from_integer(1), k.zero()}, 8);
  CHECK(on.distance.is_zero());

  PadicField k3(3, 20);
  CHECK_THROWS_AS(dist_to_zero(k3, parse_poly("x0^2 + 1", 1), {k3.from_integer(1)}, 4),
                  EmptyLocus);
}

TEST_CASE("dist outside the unit ball") {
  PadicField k(5, 20);
  // Zero at x = 1/5; from x = 0 the distance is 5.
  auto f = parse_poly("5*x0 - 1", 1);
  auto d = dist_to_zero(k, f, {k.zero()}, 6);
  CHECK(d.distance == NormValue::ultrametric(5, Rational(-1)));
  CHECK(d.exact);
}

TEST_CASE("Newton bound dist <= |f|/|f'| at lifted points") {
  std::mt19937_64 rng(4);
  PadicField k(5, 24);
  auto f = parse_poly("x0^3 - x0 + 5", 1);
  for (int trial = 0; trial < 50; ++trial) {
    long a = static_cast<long>(rng() % 625);
    auto x = k.from_integer(a);
    auto fx = eval(k, f, {x});
    auto dfx = eval(k, partial(f, 0), {x});
    if (dfx.is_zero() || fx.valuation() <= 2 * dfx.valuation()) continue;
    auto d = dist_to_zero(k, f, {x}, 10);
    CHECK(d.distance <= NormValue::ultrametric(5, Rational(fx.valuation() - dfx.valuation())));
  }
}

TEST_CASE("Laurent zero cells over F_2((t))") {
  LaurentField k(2, 16);
  // y^2 + y = y(y + 1): roots 0 and 1, both simple.
  auto tree = zero_cells(k, parse_poly("x0^2 + x0", 1), root_cell(1), 3);
  auto cells = tree.cells_at(3, CellStatus::ZeroBearing);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].digits[0] == 0);
  CHECK(cells[1].digits[0] == 1);
}
