#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace tempered {

using Integer = mpz_class;
using Rational = mpq_class;

// Sentinel valuation for an exact zero. Large enough that adding a few of
// them never overflows an int.
inline constexpr int kInfiniteValuation = 1 << 28;

// p^e as an arbitrary-precision integer (e >= 0).
Integer ipow(long p, int e);

// q^e as an exact rational; e may be negative.
Rational rpow(long q, int e);

// p-adic valuation; kInfiniteValuation for zero.
int valuation(const Integer& n, long p);
int valuation(const Rational& x, long p);

// Inverse of a modulo m; throws DivisionByZero when gcd(a, m) != 1.
Integer mod_inverse(const Integer& a, const Integer& m);

// Non-negative residue of a/b modulo m, requiring gcd(b, m) = 1.
Integer rational_mod(const Rational& x, const Integer& m);

// "3", "-7/2", "+4". Throws ParseError on malformed input.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& x);
std::string to_string(const Integer& x);

// Base-2 log of |x| for positive x without overflow on huge operands.
double log2_abs(const Rational& x);

}  // namespace tempered
