#pragma once

// Variable-width fixed-point formats (α integral bits, β fractional bits,
// optional two's-complement sign) with exact quantization.

#include "bitwidth/rational.hpp"

#include <string>
#include <string_view>

namespace bw {

enum class Rounding { Truncate, NearestEven };
enum class Overflow { Saturate, Wrap };

std::string_view to_string(Rounding r);
std::string_view to_string(Overflow o);
Rounding parse_rounding(std::string_view text);
Overflow parse_overflow(std::string_view text);

struct FixedPointFormat {
  int alpha = 0;
  int beta = 0;
  bool is_signed = false;

  FixedPointFormat() = default;
  /// Throws std::invalid_argument unless alpha, beta >= 0 and alpha + beta >= 1.
  FixedPointFormat(int alpha, int beta, bool is_signed);

  int width() const { return alpha + beta; }
  BigInt min_raw() const;
  BigInt max_raw() const;
  Rational min_value() const;
  Rational max_value() const;
  /// One unit in the last place, 2^-beta.
  Rational ulp() const { return pow2(-beta); }

  friend bool operator==(const FixedPointFormat&, const FixedPointFormat&) = default;
};

/// "sQ8.4" / "uQ13.0".
std::string to_string(const FixedPointFormat& f);
FixedPointFormat parse_format(std::string_view text);

struct FixedPointValue {
  FixedPointFormat format;
  BigInt raw;

  Rational value() const;
  /// The α+β bit pattern, most significant bit first.
  std::string bits() const;

  friend bool operator==(const FixedPointValue& a, const FixedPointValue& b) {
    return a.format == b.format && a.raw == b.raw;
  }
};

/// Decodes a bit pattern such as "0101.10" positionally (two's complement
/// for signed formats). The dot is optional; its position must match β.
FixedPointValue from_bits(std::string_view pattern, const FixedPointFormat& f);

/// Rounds x to a multiple of 2^-β and brings it into range. `overflowed`
/// (if given) is set when saturation or wrapping changed the value.
FixedPointValue quantize(const Rational& x, const FixedPointFormat& f,
                         Rounding rounding = Rounding::Truncate,
                         Overflow overflow = Overflow::Saturate, bool* overflowed = nullptr);

FixedPointValue fx_add(const FixedPointValue& a, const FixedPointValue& b,
                       const FixedPointFormat& out, Rounding rounding = Rounding::Truncate,
                       Overflow overflow = Overflow::Saturate);
FixedPointValue fx_sub(const FixedPointValue& a, const FixedPointValue& b,
                       const FixedPointFormat& out, Rounding rounding = Rounding::Truncate,
                       Overflow overflow = Overflow::Saturate);
FixedPointValue fx_mul(const FixedPointValue& a, const FixedPointValue& b,
                       const FixedPointFormat& out, Rounding rounding = Rounding::Truncate,
                       Overflow overflow = Overflow::Saturate);
/// Throws std::domain_error when b is zero.
FixedPointValue fx_div(const FixedPointValue& a, const FixedPointValue& b,
                       const FixedPointFormat& out, Rounding rounding = Rounding::Truncate,
                       Overflow overflow = Overflow::Saturate);

/// Integral bits needed to hold every value of [lo, hi] without overflow:
/// max(⌈log2 ⌈|lo|⌉⌉, ⌈log2(⌊|hi|⌋+1)⌉) + 1 when lo < 0, else ⌈log2(⌊hi⌋+1)⌉.
int alpha_from_range(const Rational& lo, const Rational& hi);

/// Format able to hold [lo, hi] with `beta` fractional bits.
FixedPointFormat format_for_range(const Rational& lo, const Rational& hi, int beta);

}  // namespace bw
