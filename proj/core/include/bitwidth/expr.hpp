#pragma once

// Scalar expression trees used by point-wise stages, plus a flattened
// straight-line form that every evaluator (exact, interval, affine,
// fixed-point, branch-and-bound) runs through a small ops policy.

#include "bitwidth/rational.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace bw {

enum class Op { Const, Ref, Add, Sub, Mul, Div, Pow, Neg, Abs, Select, Lt, Le };

std::string_view op_name(Op op);

struct StageRef {
  std::string stage;
  int di = 0;
  int dj = 0;

  friend bool operator==(const StageRef&, const StageRef&) = default;
  friend auto operator<=>(const StageRef&, const StageRef&) = default;
};

class Expr {
 public:
  static Expr constant(Rational value);
  static Expr ref(std::string stage, int di = 0, int dj = 0);
  static Expr add(Expr a, Expr b);
  static Expr sub(Expr a, Expr b);
  static Expr mul(Expr a, Expr b);
  static Expr div(Expr a, Expr b);
  static Expr pow(Expr base, unsigned n);
  static Expr neg(Expr a);
  static Expr abs(Expr a);
  static Expr select(Expr cond, Expr then_value, Expr else_value);
  static Expr lt(Expr a, Expr b);
  static Expr le(Expr a, Expr b);

  Op op() const { return node_->op; }
  const std::vector<Expr>& args() const { return node_->args; }
  const Rational& value() const { return node_->value; }
  const StageRef& stage_ref() const { return node_->ref; }
  unsigned exponent() const { return node_->exponent; }

  /// Structural equality (same tree shape, ops, constants and references).
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node {
    Op op = Op::Const;
    std::vector<Expr> args;
    Rational value;
    StageRef ref;
    unsigned exponent = 0;
  };
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr make(Op op, std::vector<Expr> args);

  std::shared_ptr<const Node> node_;
};

inline Expr operator+(Expr a, Expr b) { return Expr::add(std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return Expr::sub(std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return Expr::mul(std::move(a), std::move(b)); }
inline Expr operator/(Expr a, Expr b) { return Expr::div(std::move(a), std::move(b)); }
inline Expr operator-(Expr a) { return Expr::neg(std::move(a)); }

/// Maps Mul(r, r) with syntactically identical stage references to Pow(r, 2),
/// bottom-up. Idempotent.
Expr rewrite_squares(const Expr& e);

/// Distinct stage references in depth-first, left-to-right order.
std::vector<StageRef> referenced_stages(const Expr& e);

/// Infix rendering for diagnostics.
std::string to_string(const Expr& e);

/// Flattened expression: instruction i writes slot i.
struct Program {
  struct Instr {
    Op op;
    int a = -1;
    int b = -1;
    int c = -1;
    int index = -1;  // leaf index for Ref, constant index for Const
    unsigned n = 0;
  };
  std::vector<Instr> code;
  std::vector<StageRef> leaves;
  std::vector<Rational> constants;

  int result() const { return static_cast<int>(code.size()) - 1; }
};

/// Compiles `e` into a Program. Identical references share one leaf slot.
Program compile(const Expr& e);

/// Runs `prog` with one value per leaf. `Ops` supplies constant/add/sub/mul/
/// div/pow/neg/abs/select/lt/le over `V`.
template <typename V, typename Ops>
V run(const Program& prog, std::span<const V> leaves, Ops& ops, std::vector<V>& slots) {
  slots.clear();
  slots.reserve(prog.code.size());
  for (const auto& in : prog.code) {
    switch (in.op) {
      case Op::Const: slots.push_back(ops.constant(prog.constants[in.index])); break;
      case Op::Ref: slots.push_back(leaves[in.index]); break;
      case Op::Add: slots.push_back(ops.add(slots[in.a], slots[in.b])); break;
      case Op::Sub: slots.push_back(ops.sub(slots[in.a], slots[in.b])); break;
      case Op::Mul: slots.push_back(ops.mul(slots[in.a], slots[in.b])); break;
      case Op::Div: slots.push_back(ops.div(slots[in.a], slots[in.b])); break;
      case Op::Pow: slots.push_back(ops.pow(slots[in.a], in.n)); break;
      case Op::Neg: slots.push_back(ops.neg(slots[in.a])); break;
      case Op::Abs: slots.push_back(ops.abs(slots[in.a])); break;
      case Op::Select: slots.push_back(ops.select(slots[in.a], slots[in.b], slots[in.c])); break;
      case Op::Lt: slots.push_back(ops.lt(slots[in.a], slots[in.b])); break;
      case Op::Le: slots.push_back(ops.le(slots[in.a], slots[in.b])); break;
    }
  }
  return slots.back();
}

template <typename V, typename Ops>
V run(const Program& prog, std::span<const V> leaves, Ops& ops) {
  std::vector<V> slots;
  return run(prog, leaves, ops, slots);
}

/// Exact rational semantics; comparisons yield 0 or 1, select picks the
/// then-branch on a non-zero condition.
struct ExactOps {
  Rational constant(const Rational& c) const { return c; }
  Rational add(const Rational& a, const Rational& b) const { return a + b; }
  Rational sub(const Rational& a, const Rational& b) const { return a - b; }
  Rational mul(const Rational& a, const Rational& b) const { return a * b; }
  Rational div(const Rational& a, const Rational& b) const;
  Rational pow(const Rational& a, unsigned n) const { return power(a, n); }
  Rational neg(const Rational& a) const { return -a; }
  Rational abs(const Rational& a) const { return bw::abs(a); }
  Rational select(const Rational& c, const Rational& t, const Rational& e) const {
    return c != 0 ? t : e;
  }
  Rational lt(const Rational& a, const Rational& b) const { return a < b ? 1 : 0; }
  Rational le(const Rational& a, const Rational& b) const { return a <= b ? 1 : 0; }
};

}  // namespace bw
