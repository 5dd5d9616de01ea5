#include "bitwidth/smtlib.hpp"

namespace bw {
namespace {

std::string symbol(const std::string& name) {
  bool plain = !name.empty() && !(name[0] >= '0' && name[0] <= '9');
  for (char c : name)
    if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_'))
      plain = false;
  return plain ? name : "|" + name + "|";
}

std::string definition_term(const ConstraintSystem& cs, const ConstraintSystem::Definition& d) {
  std::vector<std::string> slots;
  slots.reserve(d.program.code.size());
  auto at = [&](int i) -> const std::string& { return slots[static_cast<size_t>(i)]; };
  for (const auto& in : d.program.code) {
    std::string t;
    switch (in.op) {
      case Op::Const: t = smt_real(d.program.constants[static_cast<size_t>(in.index)]); break;
      case Op::Ref:
        t = symbol(cs.vars[static_cast<size_t>(d.leaf_vars[static_cast<size_t>(in.index)])].name);
        break;
      case Op::Add: t = "(+ " + at(in.a) + " " + at(in.b) + ")"; break;
      case Op::Sub: t = "(- " + at(in.a) + " " + at(in.b) + ")"; break;
      case Op::Mul: t = "(* " + at(in.a) + " " + at(in.b) + ")"; break;
      case Op::Div: t = "(/ " + at(in.a) + " " + at(in.b) + ")"; break;
      case Op::Pow: {
        t = "(*";
        for (unsigned k = 0; k < in.n; ++k) t += " " + at(in.a);
        t += ")";
        if (in.n == 1) t = at(in.a);
        break;
      }
      case Op::Neg: t = "(- " + at(in.a) + ")"; break;
      case Op::Abs: t = "(ite (< " + at(in.a) + " 0.0) (- " + at(in.a) + ") " + at(in.a) + ")"; break;
      case Op::Select:
        t = "(ite (not (= " + at(in.a) + " 0.0)) " + at(in.b) + " " + at(in.c) + ")";
        break;
      case Op::Lt: t = "(ite (< " + at(in.a) + " " + at(in.b) + ") 1.0 0.0)"; break;
      case Op::Le: t = "(ite (<= " + at(in.a) + " " + at(in.b) + ") 1.0 0.0)"; break;
    }
    slots.push_back(std::move(t));
  }
  return slots.back();
}

}  // namespace

std::string smt_real(const Rational& value) {
  Rational m = abs(value);
  std::string t;
  if (m.get_den() == 1)
    t = m.get_num().get_str() + ".0";
  else
    t = "(/ " + m.get_num().get_str() + ".0 " + m.get_den().get_str() + ".0)";
  return value < 0 ? "(- " + t + ")" : t;
}

std::string emit_smtlib(const ConstraintSystem& cs, Side side, const Rational& bound) {
  std::string out = "(set-logic QF_NRA)\n";
  for (const auto& v : cs.vars) out += "(declare-const " + symbol(v.name) + " Real)\n";
  for (const auto& v : cs.vars) {
    if (!v.range) continue;
    std::string s = symbol(v.name);
    out += "(assert (<= " + smt_real(v.range->lo) + " " + s + "))\n";
    out += "(assert (<= " + s + " " + smt_real(v.range->hi) + "))\n";
  }
  for (const auto& d : cs.defs)
    out += "(assert (= " + symbol(cs.vars[static_cast<size_t>(d.var)].name) + " " +
           definition_term(cs, d) + "))\n";
  out += std::string("(assert (") + (side == Side::Upper ? ">" : "<") + " " +
         symbol(cs.vars[static_cast<size_t>(cs.objective)].name) + " " + smt_real(bound) + "))\n";
  out += "(check-sat)\n";
  return out;
}

}  // namespace bw
