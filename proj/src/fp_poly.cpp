#include "tempered/fp_poly.hpp"

#include "tempered/errors.hpp"

namespace tempered::fp {

long mod(long a, long p) {
  long r = a % p;
  return r < 0 ? r + p : r;
}

long inverse(long a, long p) {
  a = mod(a, p);
  if (a == 0) throw DivisionByZero("zero has no inverse in F_p");
  long t = 0, new_t = 1, r = p, new_r = a;
  while (new_r != 0) {
    long q = r / new_r;
    t -= q * new_t;
    std::swap(t, new_t);
    r -= q * new_r;
    std::swap(r, new_r);
  }
  return mod(t, p);
}

Poly trim(Poly f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
  return f;
}

int degree(const Poly& f) { return static_cast<int>(f.size()) - 1; }

Poly add(const Poly& f, const Poly& g, long p) {
  Poly r(std::max(f.size(), g.size()), 0);
  for (std::size_t i = 0; i < f.size(); ++i) r[i] = f[i];
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = mod(r[i] + g[i], p);
  return trim(std::move(r));
}

Poly sub(const Poly& f, const Poly& g, long p) {
  Poly r(std::max(f.size(), g.size()), 0);
  for (std::size_t i = 0; i < f.size(); ++i) r[i] = f[i];
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = mod(r[i] - g[i], p);
  return trim(std::move(r));
}

Poly mul(const Poly& f, const Poly& g, long p) {
  if (f.empty() || g.empty()) return {};
  Poly r(f.size() + g.size() - 1, 0);
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      r[i + j] = (r[i + j] + f[i] * g[j]) % p;
  return trim(std::move(r));
}

Poly rem(const Poly& f, const Poly& g, long p) {
  if (g.empty()) throw DivisionByZero("polynomial remainder by zero");
  Poly r = trim(f);
  long lead_inv = inverse(g.back(), p);
  while (!r.empty() && r.size() >= g.size()) {
    long factor = r.back() * lead_inv % p;
    std::size_t shift = r.size() - g.size();
    for (std::size_t i = 0; i < g.size(); ++i)
      r[shift + i] = mod(r[shift + i] - factor * g[i], p);
    r = trim(std::move(r));
  }
  return r;
}

Poly make_monic(Poly f, long p) {
  f = trim(std::move(f));
  if (f.empty()) return f;
  long inv = inverse(f.back(), p);
  for (auto& c : f) c = c * inv % p;
  return f;
}

Poly gcd(Poly f, Poly g, long p) {
  f = trim(std::move(f));
  g = trim(std::move(g));
  while (!g.empty()) {
    Poly r = rem(f, g, p);
    f = std::move(g);
    g = std::move(r);
  }
  return make_monic(std::move(f), p);
}

Poly powmod(const Poly& base, const Integer& exponent, const Poly& modulus,
            long p) {
  Poly result{1};
  Poly b = rem(base, modulus, p);
  Integer e = exponent;
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) result = rem(mul(result, b, p), modulus, p);
    b = rem(mul(b, b, p), modulus, p);
    e >>= 1;
  }
  return rem(result, modulus, p);
}

bool is_irreducible(const Poly& f, long p) {
  Poly g = trim(f);
  int n = degree(g);
  if (n <= 0) return false;
  if (n == 1) return true;
  Poly x{0, 1};
  Poly power = x;  // x^(p^i) mod g
  for (int i = 1; i <= n / 2; ++i) {
    power = powmod(power, Integer(p), g, p);
    Poly d = gcd(g, sub(power, x, p), p);
    if (degree(d) > 0) return false;
  }
  return true;
}

}  // namespace tempered::fp
