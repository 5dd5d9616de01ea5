#pragma once

// Exact rational and big-integer helpers on top of GMP's C++ interface.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace bw {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Parses "p", "p/q", or a decimal such as "-0.04" / "1e-3" into an exact
/// rational. Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

/// Exact rational value of a finite double.
Rational rational_from_double(double value);

/// Canonical "p" or "p/q" form.
std::string to_string(const Rational& value);

/// Decimal approximation with `digits` significant digits (for reports).
std::string to_decimal(const Rational& value, int digits = 9);

double to_double(const Rational& value);

BigInt floor_int(const Rational& value);
BigInt ceil_int(const Rational& value);

/// Number of bits in the binary representation of a non-negative integer;
/// bit_length(0) == 0.
std::uint64_t bit_length(const BigInt& value);

/// ⌈log2 n⌉ for n ≥ 1, computed exactly.
std::uint64_t ceil_log2(const BigInt& n);

/// 2^k as an exact rational (k may be negative).
Rational pow2(long k);

Rational abs(const Rational& value);

/// x^n for n ≥ 0.
Rational power(const Rational& base, unsigned n);

}  // namespace bw
