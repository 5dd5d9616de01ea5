#include "bitwidth/fixed_point.hpp"

#include <stdexcept>

namespace bw {

std::string_view to_string(Rounding r) {
  return r == Rounding::Truncate ? "truncate" : "nearest-even";
}

std::string_view to_string(Overflow o) { return o == Overflow::Saturate ? "saturate" : "wrap"; }

Rounding parse_rounding(std::string_view text) {
  if (text == "truncate") return Rounding::Truncate;
  if (text == "nearest-even" || text == "nearest") return Rounding::NearestEven;
  throw std::invalid_argument("unknown rounding mode '" + std::string(text) + "'");
}

Overflow parse_overflow(std::string_view text) {
  if (text == "saturate") return Overflow::Saturate;
  if (text == "wrap") return Overflow::Wrap;
  throw std::invalid_argument("unknown overflow mode '" + std::string(text) + "'");
}

FixedPointFormat::FixedPointFormat(int a, int b, bool s) : alpha(a), beta(b), is_signed(s) {
  if (alpha < 0 || beta < 0 || alpha + beta < 1)
    throw std::invalid_argument("fixed-point format needs alpha, beta >= 0 and alpha + beta >= 1");
}

namespace {

BigInt pow2_int(long k) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(k));
  return r;
}

}  // namespace

BigInt FixedPointFormat::min_raw() const {
  if (!is_signed) return 0;
  return -pow2_int(width() - 1);
}

BigInt FixedPointFormat::max_raw() const {
  if (!is_signed) return pow2_int(width()) - 1;
  return pow2_int(width() - 1) - 1;
}

Rational FixedPointFormat::min_value() const { return Rational(min_raw()) * ulp(); }
Rational FixedPointFormat::max_value() const { return Rational(max_raw()) * ulp(); }

std::string to_string(const FixedPointFormat& f) {
  return std::string(f.is_signed ? "s" : "u") + "Q" + std::to_string(f.alpha) + "." +
         std::to_string(f.beta);
}

FixedPointFormat parse_format(std::string_view text) {
  auto bad = [&] { throw std::invalid_argument("malformed format '" + std::string(text) + "'"); };
  if (text.size() < 5 || (text[0] != 's' && text[0] != 'u') || text[1] != 'Q') bad();
  auto body = text.substr(2);
  auto dot = body.find('.');
  if (dot == std::string_view::npos) bad();
  try {
    size_t used = 0;
    std::string a(body.substr(0, dot)), b(body.substr(dot + 1));
    int alpha = std::stoi(a, &used);
    if (used != a.size()) bad();
    int beta = std::stoi(b, &used);
    if (used != b.size()) bad();
    return FixedPointFormat(alpha, beta, text[0] == 's');
  } catch (const std::logic_error&) {
    bad();
  }
  return {};
}

Rational FixedPointValue::value() const { return Rational(raw) * format.ulp(); }

std::string FixedPointValue::bits() const {
  BigInt pattern = raw;
  if (pattern < 0) pattern += pow2_int(format.width());
  std::string out;
  for (int i = format.width() - 1; i >= 0; --i) {
    out += mpz_tstbit(pattern.get_mpz_t(), static_cast<mp_bitcnt_t>(i)) ? '1' : '0';
    if (i == format.beta && format.beta > 0) out += '.';
  }
  return out;
}

FixedPointValue from_bits(std::string_view pattern, const FixedPointFormat& f) {
  std::string digits;
  int frac = -1;
  for (char c : pattern) {
    if (c == '.') {
      if (frac >= 0) throw std::invalid_argument("bit pattern has two binary points");
      frac = 0;
    } else if (c == '0' || c == '1') {
      digits += c;
      if (frac >= 0) ++frac;
    } else {
      throw std::invalid_argument("bit pattern may contain only 0, 1 and '.'");
    }
  }
  if (static_cast<int>(digits.size()) != f.width() || (frac >= 0 && frac != f.beta))
    throw std::invalid_argument("bit pattern does not match format " + to_string(f));
  // value = Σ b_i 2^(i-β), with the top bit weighted negatively when signed.
  BigInt raw = 0;
  for (size_t k = 0; k < digits.size(); ++k) {
    BigInt weight = pow2_int(static_cast<long>(digits.size() - 1 - k));
    if (digits[k] == '1') raw += (f.is_signed && k == 0) ? BigInt(-weight) : weight;
  }
  return {f, raw};
}

namespace {

BigInt round_scaled(const Rational& scaled, Rounding rounding) {
  BigInt fl = floor_int(scaled);
  if (rounding == Rounding::Truncate) return fl;
  Rational frac = scaled - Rational(fl);
  if (frac > Rational(1, 2)) return fl + 1;
  if (frac < Rational(1, 2)) return fl;
  return mpz_even_p(fl.get_mpz_t()) ? fl : BigInt(fl + 1);
}

}  // namespace

FixedPointValue quantize(const Rational& x, const FixedPointFormat& f, Rounding rounding,
                         Overflow overflow, bool* overflowed) {
  Rational scaled = x * pow2(f.beta);
  BigInt raw = round_scaled(scaled, rounding);
  BigInt lo = f.min_raw(), hi = f.max_raw();
  bool out_of_range = raw < lo || raw > hi;
  if (out_of_range) {
    if (overflow == Overflow::Saturate) {
      raw = raw < lo ? lo : hi;
    } else {
      BigInt m = pow2_int(f.width());
      BigInt r;
      mpz_fdiv_r(r.get_mpz_t(), BigInt(raw - lo).get_mpz_t(), m.get_mpz_t());
      raw = r + lo;
    }
  }
  if (overflowed) *overflowed = out_of_range;
  return {f, raw};
}

FixedPointValue fx_add(const FixedPointValue& a, const FixedPointValue& b,
                       const FixedPointFormat& out, Rounding rounding, Overflow overflow) {
  return quantize(a.value() + b.value(), out, rounding, overflow);
}

FixedPointValue fx_sub(const FixedPointValue& a, const FixedPointValue& b,
                       const FixedPointFormat& out, Rounding rounding, Overflow overflow) {
  return quantize(a.value() - b.value(), out, rounding, overflow);
}

FixedPointValue fx_mul(const FixedPointValue& a, const FixedPointValue& b,
                       const FixedPointFormat& out, Rounding rounding, Overflow overflow) {
  return quantize(a.value() * b.value(), out, rounding, overflow);
}

FixedPointValue fx_div(const FixedPointValue& a, const FixedPointValue& b,
                       const FixedPointFormat& out, Rounding rounding, Overflow overflow) {
  if (b.raw == 0) throw std::domain_error("fixed-point division by zero");
  return quantize(a.value() / b.value(), out, rounding, overflow);
}

int alpha_from_range(const Rational& lo, const Rational& hi) {
  if (lo > hi) throw std::invalid_argument("alpha_from_range: lo > hi");
  auto high_bits = [](const Rational& v) {
    return static_cast<int>(ceil_log2(BigInt(floor_int(abs(v)) + 1)));
  };
  if (lo < 0) {
    BigInt mag = ceil_int(abs(lo));
    int low_bits = static_cast<int>(ceil_log2(mag));
    return std::max(low_bits, high_bits(hi)) + 1;
  }
  return high_bits(hi);
}

FixedPointFormat format_for_range(const Rational& lo, const Rational& hi, int beta) {
  int alpha = alpha_from_range(lo, hi);
  if (alpha + beta < 1) alpha = 1;
  return FixedPointFormat(alpha, beta, lo < 0);
}

}  // namespace bw
