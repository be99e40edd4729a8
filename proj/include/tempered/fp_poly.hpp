#pragma once

#include <vector>

#include "tempered/rational.hpp"

// Dense univariate polynomials over the prime field F_p, coefficients stored
// low degree first and always trimmed. Used to build F_q tables and to find
// defining polynomials of unramified extensions.
namespace tempered::fp {

using Poly = std::vector<long>;

long mod(long a, long p);
long inverse(long a, long p);

Poly trim(Poly f);
int degree(const Poly& f);  // -1 for the zero polynomial
Poly add(const Poly& f, const Poly& g, long p);
Poly sub(const Poly& f, const Poly& g, long p);
Poly mul(const Poly& f, const Poly& g, long p);
Poly rem(const Poly& f, const Poly& g, long p);
Poly make_monic(Poly f, long p);
Poly gcd(Poly f, Poly g, long p);
Poly powmod(const Poly& base, const Integer& exponent, const Poly& modulus,
            long p);

// Ben-Or test: f has no irreducible factor of degree <= deg(f)/2.
bool is_irreducible(const Poly& f, long p);

}  // namespace tempered::fp
