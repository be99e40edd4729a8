#include "tempered/rational.hpp"

#include <cctype>
#include <cmath>

#include "tempered/errors.hpp"

namespace tempered {

Integer ipow(long p, int e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p),
                static_cast<unsigned long>(e));
  return r;
}

Rational rpow(long q, int e) {
  if (e >= 0) return Rational(ipow(q, e));
  Rational r(Integer(1), ipow(q, -e));
  r.canonicalize();
  return r;
}

int valuation(const Integer& n, long p) {
  if (n == 0) return kInfiniteValuation;
  Integer tmp;
  Integer pp(p);
  return static_cast<int>(
      mpz_remove(tmp.get_mpz_t(), n.get_mpz_t(), pp.get_mpz_t()));
}

int valuation(const Rational& x, long p) {
  if (x == 0) return kInfiniteValuation;
  return valuation(x.get_num(), p) - valuation(x.get_den(), p);
}

Integer mod_inverse(const Integer& a, const Integer& m) {
  Integer r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw DivisionByZero("element is not invertible modulo " + m.get_str());
  return r;
}

Integer rational_mod(const Rational& x, const Integer& m) {
  Integer num = x.get_num() % m;
  if (num < 0) num += m;
  Integer r = num * mod_inverse(x.get_den(), m) % m;
  return r;
}

Rational parse_rational(std::string_view text) {
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
  };
  skip();
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  skip();
  auto read_int = [&](Integer& out) {
    std::size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
      ++i;
    if (start == i) throw ParseError("expected integer", start);
    out = Integer(std::string(text.substr(start, i - start)));
  };
  Integer num, den(1);
  read_int(num);
  skip();
  if (i < text.size() && text[i] == '/') {
    ++i;
    skip();
    read_int(den);
    if (den == 0) throw ParseError("zero denominator", i);
  }
  skip();
  if (i != text.size()) throw ParseError("trailing characters", i);
  Rational r(negative ? Integer(-num) : num, den);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& x) { return x.get_str(); }
std::string to_string(const Integer& x) { return x.get_str(); }

double log2_abs(const Rational& x) {
  long en = 0, ed = 0;
  double n = mpz_get_d_2exp(&en, x.get_num_mpz_t());
  double d = mpz_get_d_2exp(&ed, x.get_den_mpz_t());
  return std::log2(std::fabs(n)) - std::log2(std::fabs(d)) +
         static_cast<double>(en - ed);
}

}  // namespace tempered
