#include "bitwidth/expr.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace bw {

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Const: return "const";
    case Op::Ref: return "ref";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Pow: return "pow";
    case Op::Neg: return "neg";
    case Op::Abs: return "abs";
    case Op::Select: return "select";
    case Op::Lt: return "lt";
    case Op::Le: return "le";
  }
  return "?";
}

Expr Expr::make(Op op, std::vector<Expr> args) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  return Expr(std::move(n));
}

Expr Expr::constant(Rational value) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = std::move(value);
  return Expr(std::move(n));
}

Expr Expr::ref(std::string stage, int di, int dj) {
  auto n = std::make_shared<Node>();
  n->op = Op::Ref;
  n->ref = StageRef{std::move(stage), di, dj};
  return Expr(std::move(n));
}

Expr Expr::add(Expr a, Expr b) { return make(Op::Add, {std::move(a), std::move(b)}); }
Expr Expr::sub(Expr a, Expr b) { return make(Op::Sub, {std::move(a), std::move(b)}); }
Expr Expr::mul(Expr a, Expr b) { return make(Op::Mul, {std::move(a), std::move(b)}); }
Expr Expr::div(Expr a, Expr b) { return make(Op::Div, {std::move(a), std::move(b)}); }
Expr Expr::neg(Expr a) { return make(Op::Neg, {std::move(a)}); }
Expr Expr::abs(Expr a) { return make(Op::Abs, {std::move(a)}); }
Expr Expr::lt(Expr a, Expr b) { return make(Op::Lt, {std::move(a), std::move(b)}); }
Expr Expr::le(Expr a, Expr b) { return make(Op::Le, {std::move(a), std::move(b)}); }

Expr Expr::pow(Expr base, unsigned n) {
  if (n == 0) throw std::invalid_argument("pow exponent must be a positive integer");
  auto node = std::make_shared<Node>();
  node->op = Op::Pow;
  node->args = {std::move(base)};
  node->exponent = n;
  return Expr(std::move(node));
}

Expr Expr::select(Expr cond, Expr then_value, Expr else_value) {
  return make(Op::Select, {std::move(cond), std::move(then_value), std::move(else_value)});
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Const: return a.value() == b.value();
    case Op::Ref: return a.stage_ref() == b.stage_ref();
    case Op::Pow:
      if (a.exponent() != b.exponent()) return false;
      break;
    default: break;
  }
  return a.args() == b.args();
}

Expr rewrite_squares(const Expr& e) {
  if (e.op() == Op::Const || e.op() == Op::Ref) return e;
  std::vector<Expr> args;
  args.reserve(e.args().size());
  for (const auto& a : e.args()) args.push_back(rewrite_squares(a));

  switch (e.op()) {
    case Op::Add: return Expr::add(args[0], args[1]);
    case Op::Sub: return Expr::sub(args[0], args[1]);
    case Op::Mul:
      if (args[0].op() == Op::Ref && args[1].op() == Op::Ref &&
          args[0].stage_ref() == args[1].stage_ref())
        return Expr::pow(args[0], 2);
      return Expr::mul(args[0], args[1]);
    case Op::Div: return Expr::div(args[0], args[1]);
    case Op::Pow: return Expr::pow(args[0], e.exponent());
    case Op::Neg: return Expr::neg(args[0]);
    case Op::Abs: return Expr::abs(args[0]);
    case Op::Select: return Expr::select(args[0], args[1], args[2]);
    case Op::Lt: return Expr::lt(args[0], args[1]);
    case Op::Le: return Expr::le(args[0], args[1]);
    default: return e;
  }
}

namespace {

void collect_refs(const Expr& e, std::vector<StageRef>& out) {
  if (e.op() == Op::Ref) {
    if (std::find(out.begin(), out.end(), e.stage_ref()) == out.end()) out.push_back(e.stage_ref());
    return;
  }
  for (const auto& a : e.args()) collect_refs(a, out);
}

std::string render(const Expr& e) {
  const auto& a = e.args();
  switch (e.op()) {
    case Op::Const: return to_string(e.value());
    case Op::Ref: {
      const auto& r = e.stage_ref();
      if (r.di == 0 && r.dj == 0) return r.stage;
      return r.stage + "(" + std::to_string(r.di) + "," + std::to_string(r.dj) + ")";
    }
    case Op::Add: return "(" + render(a[0]) + " + " + render(a[1]) + ")";
    case Op::Sub: return "(" + render(a[0]) + " - " + render(a[1]) + ")";
    case Op::Mul: return "(" + render(a[0]) + " * " + render(a[1]) + ")";
    case Op::Div: return "(" + render(a[0]) + " / " + render(a[1]) + ")";
    case Op::Pow: return render(a[0]) + "^" + std::to_string(e.exponent());
    case Op::Neg: return "-" + render(a[0]);
    case Op::Abs: return "|" + render(a[0]) + "|";
    case Op::Select:
      return "select(" + render(a[0]) + ", " + render(a[1]) + ", " + render(a[2]) + ")";
    case Op::Lt: return "(" + render(a[0]) + " < " + render(a[1]) + ")";
    case Op::Le: return "(" + render(a[0]) + " <= " + render(a[1]) + ")";
  }
  return "?";
}

struct Compiler {
  Program prog;
  std::map<StageRef, int> leaf_index;

  int emit(const Expr& e) {
    Program::Instr in{e.op()};
    switch (e.op()) {
      case Op::Const:
        in.index = static_cast<int>(prog.constants.size());
        prog.constants.push_back(e.value());
        break;
      case Op::Ref: {
        auto [it, inserted] =
            leaf_index.emplace(e.stage_ref(), static_cast<int>(prog.leaves.size()));
        if (inserted) prog.leaves.push_back(e.stage_ref());
        in.index = it->second;
        break;
      }
      default: {
        const auto& args = e.args();
        if (!args.empty()) in.a = emit(args[0]);
        if (args.size() > 1) in.b = emit(args[1]);
        if (args.size() > 2) in.c = emit(args[2]);
        in.n = e.exponent();
        break;
      }
    }
    prog.code.push_back(in);
    return static_cast<int>(prog.code.size()) - 1;
  }
};

}  // namespace

std::vector<StageRef> referenced_stages(const Expr& e) {
  std::vector<StageRef> out;
  collect_refs(e, out);
  return out;
}

std::string to_string(const Expr& e) { return render(e); }

Program compile(const Expr& e) {
  Compiler c;
  c.emit(e);
  return std::move(c.prog);
}

Rational ExactOps::div(const Rational& a, const Rational& b) const {
  if (b == 0) throw std::domain_error("division by exact zero");
  return a / b;
}

}  // namespace bw
