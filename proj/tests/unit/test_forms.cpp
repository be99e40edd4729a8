#include <random>

#include "doctest.h"
#include "tempered/forms.hpp"
#include "tempered/lift.hpp"

using namespace tempered;

namespace {

// val_p(nu(x)) / r computed over Q with no field arithmetic.
Rational exact_exponent(const NormForm& nf, const std::vector<Rational>& x) {
  Rational nu = nf.nu.evaluate(x);
  REQUIRE(nu != 0);
  Rational e(valuation(nu, nf.model.p), nf.model.r);
  e.canonicalize();
  return e;
}

// Inverse of a + b s with s^2 = c, by Cramer on [[a, c b], [b, a]] y = e0.
std::vector<Rational> quadratic_inverse_oracle(const Rational& a, const Rational& b,
                                               const Rational& c) {
  Rational det = a * a - c * b * b;
  return {a / det, -b / det};
}

std::vector<Rational> random_vector(std::mt19937_64& rng, int r, long p) {
  std::uniform_int_distribution<int> digit(-12, 12);
  std::uniform_int_distribution<int> shift(0, 2);
  std::vector<Rational> x;
  for (int i = 0; i < r; ++i) {
    Integer scale = ipow(p, shift(rng));
    x.push_back(Rational(Integer(digit(rng)) * scale));
  }
  return x;
}

bool all_zero(const std::vector<Rational>& x) {
  for (const auto& v : x)
    if (v != 0) return false;
  return true;
}

}  // namespace

TEST_CASE("norm form examples") {
  auto five = build_norm_form(5, 2);
  CHECK(five.model.defining_to_string() == "x0^2 - 2");
  CHECK(five.nu == parse_poly("x0^2 - 2*x1^2", 2));

  auto three = build_norm_form(3, 2);
  CHECK(three.nu == parse_poly("x0^2 + x1^2", 2));

  auto one = build_norm_form(7, 1);
  CHECK(one.nu == parse_poly("x0", 1));
}

TEST_CASE("norm form is homogeneous of degree r and multiplication is a commutative ring") {
  std::mt19937_64 rng(11);
  for (auto [p, r] : {std::pair{2, 3}, {3, 3}, {5, 3}, {2, 4}, {3, 4}, {7, 2}}) {
    auto nf = build_norm_form(p, r);
    CHECK(nf.nu.is_homogeneous());
    CHECK(nf.nu.degree() == r);
    std::vector<Rational> unit(r, 0);
    unit[0] = 1;
    for (int trial = 0; trial < 20; ++trial) {
      auto a = random_vector(rng, r, p), b = random_vector(rng, r, p),
           c = random_vector(rng, r, p);
      CHECK(nf.model.multiply(a, b) == nf.model.multiply(b, a));
      CHECK(nf.model.multiply(nf.model.multiply(a, b), c) ==
            nf.model.multiply(a, nf.model.multiply(b, c)));
      CHECK(nf.model.multiply(a, unit) == a);
      // Multiplicativity of the determinant norm, exactly over Q.
      CHECK(nf.nu.evaluate(nf.model.multiply(a, b)) == nf.nu.evaluate(a) * nf.nu.evaluate(b));
    }
  }
}

TEST_CASE("defining polynomials have no roots mod p") {
  for (auto [p, r] : {std::pair{2, 2}, {2, 3}, {3, 2}, {3, 3}, {5, 2}, {5, 3}, {7, 3}}) {
    auto model = build_extension(p, r);
    for (long x = 0; x < p; ++x) {
      Integer v = 0;
      for (int i = r; i >= 0; --i) v = v * x + model.defining[i];
      CHECK(v % p != 0);
    }
  }
}

TEST_CASE("irreducible search cap") {
  // Over F_2 every binomial x^2 + c is a square, so the lexicographic phase
  // runs and p^r = 4 exceeds the cap.
  CHECK_THROWS_AS(build_extension(2, 2, 3), IrreducibleNotFound);
  CHECK(build_extension(2, 2).defining_to_string() == "x0^2 + x0 + 1");
}

TEST_CASE("form_norm examples") {
  PadicField k(5, 20);
  auto nf = build_norm_form(5, 2);
  CHECK(form_norm(k, nf, {k.zero(), k.zero()}).is_zero());
  CHECK(form_norm(k, nf, {k.one(), k.one()}) == NormValue::ultrametric(5, Rational(0)));
  auto n = form_norm(k, nf, {k.from_integer(5), k.from_integer(5)});
  CHECK(n == NormValue::ultrametric(5, Rational(1)));
  CHECK(n == vec_norm(k, Vec<PadicField>{k.from_integer(5), k.from_integer(5)}));
}

TEST_CASE("inverse examples") {
  PadicField k(5, 20);
  auto nf = build_norm_form(5, 2);
  auto inv = extension_inverse(k, nf, {k.one(), k.one()});
  CHECK((inv[0] - k.from_integer(-1)).is_zero());
  CHECK(inv[1].to_rational() == 1);
  CHECK(extension_inverse_exact(nf, {1, 1}) == quadratic_inverse_oracle(1, 1, 2));
  CHECK(extension_inverse_exact(nf, {0, 1}) == std::vector<Rational>{0, Rational(1, 2)});
  CHECK(extension_inverse_exact(nf, {1, 0}) == std::vector<Rational>{1, 0});
  CHECK_THROWS_AS(extension_inverse(k, nf, {k.zero(), k.zero()}), ZeroInverse);
  CHECK_THROWS_AS(extension_inverse_exact(nf, {0, 0}), ZeroInverse);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto x = random_vector(rng, 2, 5);
    if (all_zero(x)) continue;
    CHECK(extension_inverse_exact(nf, x) == quadratic_inverse_oracle(x[0], x[1], 2));
  }
}

TEST_CASE("inverse times element is one in higher degree") {
  std::mt19937_64 rng(5);
  for (auto [p, r] : {std::pair{2, 3}, {3, 4}, {5, 3}}) {
    auto nf = build_norm_form(p, r);
    std::vector<Rational> unit(r, 0);
    unit[0] = 1;
    for (int trial = 0; trial < 20; ++trial) {
      auto x = random_vector(rng, r, p);
      if (all_zero(x)) continue;
      CHECK(nf.model.multiply(x, extension_inverse_exact(nf, x)) == unit);
    }
  }
}

TEST_CASE("star transform examples") {
  auto nf = build_norm_form(5, 2);
  auto one = star_transform(MultiPoly::constant(2, 1), nf);
  CHECK(one.degree == 0);
  CHECK(one.result == MultiPoly::constant(2, 1));
  auto first = star_transform(parse_poly("x0", 2), nf);
  CHECK(first.degree == 1);
  CHECK(first.result == parse_poly("x0", 2));
}

TEST_CASE("star identity at invertible points") {
  std::mt19937_64 rng(17);
  for (auto [p, r] : {std::pair{5, 2}, {3, 3}}) {
    auto nf = build_norm_form(p, r);
    std::vector<MultiPoly> sources = {parse_poly("x0^2 + 3*x1 - 1", r),
                                      parse_poly("x0*x1^2 + x1 + 7", r),
                                      parse_poly("x1^3 - 2*x0", r)};
    for (const auto& f : sources) {
      auto star = star_transform(f, nf);
      for (int trial = 0; trial < 20; ++trial) {
        auto x = random_vector(rng, r, p);
        if (all_zero(x)) continue;
        Rational nu = nf.nu.evaluate(x);
        Rational rhs = f.evaluate(extension_inverse_exact(nf, x));
        for (int e = 0; e < star.degree; ++e) rhs *= nu;
        CHECK(star.result.evaluate(x) == rhs);
      }
    }
  }
}

TEST_CASE("double star on homogeneous forms") {
  std::mt19937_64 rng(23);
  for (auto [p, r] : {std::pair{5, 2}, {2, 3}}) {
    auto nf = build_norm_form(p, r);
    for (const char* text : {"x0^2 - x0*x1 + 3*x1^2", "x0^3 + x1^3", "x0*x1"}) {
      MultiPoly f = parse_poly(text, r);
      const int d = f.degree();
      MultiPoly twice = star_transform(star_transform(f, nf).result, nf).result;
      for (int trial = 0; trial < 100; ++trial) {
        auto x = random_vector(rng, r, p);
        if (all_zero(x)) continue;
        Rational expect = f.evaluate(x);
        Rational nu = nf.nu.evaluate(x);
        for (int e = 0; e < d * (r - 2); ++e) expect *= nu;
        CHECK(twice.evaluate(x) == expect);
      }
    }
  }
}

TEST_CASE("norm axioms exactly") {
  std::mt19937_64 rng(29);
  for (auto [p, r] : {std::pair{5, 2}, {3, 3}, {2, 2}}) {
    auto nf = build_norm_form(p, r);
    for (int trial = 0; trial < 60; ++trial) {
      auto x = random_vector(rng, r, p), y = random_vector(rng, r, p);
      if (all_zero(x) || all_zero(y)) continue;
      std::vector<Rational> sum(r);
      for (int i = 0; i < r; ++i) sum[i] = x[i] + y[i];
      // Norm equals the max norm of the coordinates for an unramified model.
      int min_val = kInfiniteValuation;
      for (const auto& v : x) min_val = std::min(min_val, valuation(v, p));
      CHECK(exact_exponent(nf, x) == min_val);
      if (!all_zero(sum))
        CHECK(exact_exponent(nf, sum) >= std::min(exact_exponent(nf, x), exact_exponent(nf, y)));
      CHECK(exact_exponent(nf, nf.model.multiply(x, y)) ==
            Rational(exact_exponent(nf, x) + exact_exponent(nf, y)));
      Rational c(Integer(3 * p), 7);
      std::vector<Rational> cx(r);
      for (int i = 0; i < r; ++i) cx[i] = c * x[i];
      CHECK(exact_exponent(nf, cx) == Rational(exact_exponent(nf, x) + valuation(c, p)));
    }
  }
}

TEST_CASE("inversion distance identity") {
  std::mt19937_64 rng(31);
  auto nf = build_norm_form(5, 2);
  for (int trial = 0; trial < 100; ++trial) {
    auto x = random_vector(rng, 2, 5), y = random_vector(rng, 2, 5);
    if (all_zero(x) || all_zero(y) || x == y) continue;
    auto xi = extension_inverse_exact(nf, x), yi = extension_inverse_exact(nf, y);
    std::vector<Rational> d{x[0] - y[0], x[1] - y[1]}, di{xi[0] - yi[0], xi[1] - yi[1]};
    CHECK(exact_exponent(nf, d) ==
          exact_exponent(nf, di) + Rational(exact_exponent(nf, x) + exact_exponent(nf, y)));
  }
}

TEST_CASE("form_norm agrees with the exact exponent over Q_p") {
  std::mt19937_64 rng(37);
  PadicField k(3, 30);
  auto nf = build_norm_form(3, 3);
  for (int trial = 0; trial < 30; ++trial) {
    auto x = random_vector(rng, 3, 3);
    if (all_zero(x)) continue;
    Vec<PadicField> xs;
    for (const auto& v : x) xs.push_back(k.from_rational(v));
    CHECK(form_norm(k, nf, xs) == NormValue::ultrametric(3, exact_exponent(nf, x)));
  }
}

TEST_CASE("definiteness at resolution") {
  for (auto [p, r, depth] : {std::tuple{5, 2, 3}, {3, 2, 3}, {2, 3, 3}}) {
    PadicField k(p, 40);
    auto nf = build_norm_form(p, r);
    auto tree = zero_cells(k, nf.nu, root_cell(r), depth);
    auto zeros = tree.cells_at(depth, CellStatus::ZeroBearing);
    REQUIRE(zeros.size() == 1);
    for (const auto& d : zeros[0].digits) CHECK(d == 0);
    CHECK(tree.unresolved_count() == 0);
  }
}

TEST_CASE("zero-locus inversion") {
  PadicField k(5, 40);
  auto nf = build_norm_form(5, 2);
  MultiPoly f = parse_poly("x0^2 + x1 - 3", 2);
  auto star = star_transform(f, nf);
  auto tree = zero_cells(k, f, root_cell(2), 2);
  auto cells = tree.cells_at(2, CellStatus::ZeroBearing);
  REQUIRE(!cells.empty());
  int checked = 0;
  for (const auto& c : cells) {
    Vec<PadicField> x0{k.from_integer(c.digits[0].get_si()), k.from_integer(c.digits[1].get_si())};
    LiftCertificate<PadicField> cert;
    try {
      cert = hensel_lift(k, PolyMap({f}), {1}, x0, 25);
    } catch (const NoContraction&) {
      continue;
    }
    if (vec_norm(k, cert.point).is_zero()) continue;
    auto y = extension_inverse(k, nf, cert.point);
    CHECK(eval(k, star.result, y).valuation() >= 20);
    // The inverse point lifts to a zero of f* as well.
    auto back = hensel_lift(k, PolyMap({star.result}), {1}, y, 15);
    CHECK((back.residual.is_zero() || back.residual.exponent() >= 15));
    ++checked;
  }
  CHECK(checked > 0);
}
