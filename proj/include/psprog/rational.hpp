#ifndef PSPROG_RATIONAL_HPP
#define PSPROG_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace psprog {

// Exact rational numbers.  mpq_class keeps values in lowest terms with a
// positive denominator once canonicalized; every constructor below
// canonicalizes, so the invariant holds for anything built through this
// header.
using Rational = mpq_class;
using Integer = mpz_class;

Rational make_rational(const Integer& num, const Integer& den);
Rational make_rational(long num, long den = 1);

// Accepts "p/q", plain integers, and decimal literals ("1.5" -> 3/2).
// Decimal input is parsed as an exact decimal fraction, never via binary
// floating point.
Rational parse_rational(const std::string& text);

// "p/q", or just "p" when the denominator is 1.
std::string format_rational(const Rational& q);

// Decimal rendering with the given number of significant digits,
// round-to-nearest.  Used for the human-readable CSV columns.
std::string format_decimal(const Rational& q, int significant_digits = 15);

double to_double(const Rational& q);

Integer factorial(unsigned long n);

// Falling factorial (x)_l = x(x-1)...(x-l+1), with (x)_0 = 1.
Rational falling_factorial(const Rational& x, unsigned long l);

// Binomial coefficient (n)_l / l! with the convention C(n,l) = 0 for
// 0 <= n < l.
Rational binomial(long n, long l);

// Stirling number of the second kind S(l,i): the coefficients converting
// monomials into the falling-factorial basis, x^l = sum_i S(l,i) (x)_i.
// Memoized; requires 0 <= i <= l <= 64.
Rational stirling2(int l, int i);

constexpr int kStirlingMax = 64;

}  // namespace psprog

#endif  // PSPROG_RATIONAL_HPP
