#pragma once

#include "bitwidth/expr.hpp"
#include "bitwidth/rational.hpp"

#include <span>
#include <stdexcept>
#include <string>

namespace bw {

/// Closed interval [lo, hi] with exact rational endpoints.
struct Interval {
  Rational lo;
  Rational hi;

  Interval() = default;
  Interval(Rational l, Rational h);
  static Interval point(const Rational& v) { return {v, v}; }

  bool contains(const Rational& v) const { return lo <= v && v <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool contains_zero() const { return lo <= 0 && 0 <= hi; }
  Rational width() const { return hi - lo; }

  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

/// Raised when a division's denominator interval contains zero.
class DivisionThroughZero : public std::runtime_error {
 public:
  DivisionThroughZero(std::string stage, const Interval& denominator);
  const std::string& stage() const { return stage_; }
  const Interval& denominator() const { return denominator_; }

 private:
  std::string stage_;
  Interval denominator_;
};

Interval hull(const Interval& a, const Interval& b);
Interval intersect(const Interval& a, const Interval& b);

Interval iv_add(const Interval& x, const Interval& y);
Interval iv_sub(const Interval& x, const Interval& y);
Interval iv_mul(const Interval& x, const Interval& y);
/// Throws DivisionThroughZero (with an empty stage name) if 0 ∈ y.
Interval iv_div(const Interval& x, const Interval& y);
Interval iv_pow(const Interval& x, unsigned n);
Interval iv_neg(const Interval& x);
Interval iv_abs(const Interval& x);
/// Comparisons yield [1,1], [0,0] or [0,1].
Interval iv_lt(const Interval& x, const Interval& y);
Interval iv_le(const Interval& x, const Interval& y);
/// Decided conditions pick a branch; otherwise the hull of both branches.
Interval iv_select(const Interval& cond, const Interval& then_value, const Interval& else_value);

/// Applies the rule for `op` to its argument intervals (Const/Ref excluded).
Interval iv_apply(Op op, std::span<const Interval> args, unsigned exponent = 0);

/// Ops policy for `run` over intervals.
struct IntervalOps {
  Interval constant(const Rational& c) const { return Interval::point(c); }
  Interval add(const Interval& a, const Interval& b) const { return iv_add(a, b); }
  Interval sub(const Interval& a, const Interval& b) const { return iv_sub(a, b); }
  Interval mul(const Interval& a, const Interval& b) const { return iv_mul(a, b); }
  Interval div(const Interval& a, const Interval& b) const { return iv_div(a, b); }
  Interval pow(const Interval& a, unsigned n) const { return iv_pow(a, n); }
  Interval neg(const Interval& a) const { return iv_neg(a); }
  Interval abs(const Interval& a) const { return iv_abs(a); }
  Interval select(const Interval& c, const Interval& t, const Interval& e) const {
    return iv_select(c, t, e);
  }
  Interval lt(const Interval& a, const Interval& b) const { return iv_lt(a, b); }
  Interval le(const Interval& a, const Interval& b) const { return iv_le(a, b); }
};

std::string to_string(const Interval& x);

}  // namespace bw
