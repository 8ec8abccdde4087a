#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace rankorder {

// Exact non-negative integer counts (rank-function counts, DP weights).
using BigCount = mpz_class;

// Exact rational, always kept in canonical form (gcd 1, positive denominator).
using Rational = mpq_class;

// num/den reduced to canonical form. den must be non-zero.
Rational make_rational(const BigCount& num, const BigCount& den);

// "7/18", or "3" for integers.
std::string to_exact_string(const Rational& q);

// Plain decimal notation correctly rounded (half away from zero) to
// `significant_digits`, trailing zeros removed: 5/6 -> "0.833333" at 6 digits.
std::string to_decimal_string(const Rational& q, int significant_digits);

// Inverse of to_exact_string; accepts "a/b" or "a". Throws rankorder::Error.
Rational parse_rational(std::string_view text);

}  // namespace rankorder
