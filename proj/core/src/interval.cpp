#include "bitwidth/interval.hpp"

#include <algorithm>

namespace bw {

Interval::Interval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
  if (lo > hi) throw std::invalid_argument("interval with lo > hi");
}

DivisionThroughZero::DivisionThroughZero(std::string stage, const Interval& denominator)
    : std::runtime_error("division through zero" +
                         (stage.empty() ? std::string() : " at stage '" + stage + "'") +
                         ": denominator range " + to_string(denominator)),
      stage_(std::move(stage)),
      denominator_(denominator) {}

Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

Interval intersect(const Interval& a, const Interval& b) {
  Rational lo = std::max(a.lo, b.lo);
  Rational hi = std::min(a.hi, b.hi);
  if (lo > hi) throw std::invalid_argument("disjoint intervals have no intersection");
  return {lo, hi};
}

Interval iv_add(const Interval& x, const Interval& y) { return {x.lo + y.lo, x.hi + y.hi}; }

Interval iv_sub(const Interval& x, const Interval& y) { return {x.lo - y.hi, x.hi - y.lo}; }

Interval iv_mul(const Interval& x, const Interval& y) {
  Rational t[4] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
  return {*std::min_element(t, t + 4), *std::max_element(t, t + 4)};
}

Interval iv_div(const Interval& x, const Interval& y) {
  if (y.contains_zero()) throw DivisionThroughZero("", y);
  return iv_mul(x, Interval(Rational(1 / y.hi), Rational(1 / y.lo)));
}

Interval iv_pow(const Interval& x, unsigned n) {
  Rational lo_n = power(x.lo, n);
  Rational hi_n = power(x.hi, n);
  if (n % 2 == 1 || x.lo >= 0) return {lo_n, hi_n};
  if (x.hi < 0) return {hi_n, lo_n};
  return {Rational(0), std::max(lo_n, hi_n)};
}

Interval iv_neg(const Interval& x) { return {-x.hi, -x.lo}; }

Interval iv_abs(const Interval& x) {
  if (x.lo >= 0) return x;
  if (x.hi <= 0) return iv_neg(x);
  return {Rational(0), std::max(Rational(-x.lo), x.hi)};
}

Interval iv_lt(const Interval& x, const Interval& y) {
  if (x.hi < y.lo) return Interval::point(1);
  if (x.lo >= y.hi) return Interval::point(0);
  return {0, 1};
}

Interval iv_le(const Interval& x, const Interval& y) {
  if (x.hi <= y.lo) return Interval::point(1);
  if (x.lo > y.hi) return Interval::point(0);
  return {0, 1};
}

Interval iv_select(const Interval& cond, const Interval& then_value, const Interval& else_value) {
  if (!cond.contains_zero()) return then_value;
  if (cond.lo == 0 && cond.hi == 0) return else_value;
  return hull(then_value, else_value);
}

Interval iv_apply(Op op, std::span<const Interval> args, unsigned exponent) {
  switch (op) {
    case Op::Add: return iv_add(args[0], args[1]);
    case Op::Sub: return iv_sub(args[0], args[1]);
    case Op::Mul: return iv_mul(args[0], args[1]);
    case Op::Div: return iv_div(args[0], args[1]);
    case Op::Pow: return iv_pow(args[0], exponent);
    case Op::Neg: return iv_neg(args[0]);
    case Op::Abs: return iv_abs(args[0]);
    case Op::Select: return iv_select(args[0], args[1], args[2]);
    case Op::Lt: return iv_lt(args[0], args[1]);
    case Op::Le: return iv_le(args[0], args[1]);
    case Op::Const:
    case Op::Ref: break;
  }
  throw std::invalid_argument("iv_apply: leaf op has no interval rule");
}

std::string to_string(const Interval& x) {
  return "[" + to_string(x.lo) + ", " + to_string(x.hi) + "]";
}

}  // namespace bw
