#include "bitwidth/constraint_system.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace bw {

std::string_view to_string(Side side) { return side == Side::Upper ? "upper" : "lower"; }

DepSet dep_hat(const Pipeline& p, size_t stage) {
  std::set<DepEntry> out;
  std::vector<size_t> stack{stage};
  std::vector<bool> seen(p.size(), false);
  while (!stack.empty()) {
    size_t s = stack.back();
    stack.pop_back();
    if (seen[s]) continue;
    seen[s] = true;
    if (!p.stage(s).is_pointwise()) {
      out.insert({s, 0, 0});
      continue;
    }
    for (size_t pred : p.predecessors(s)) stack.push_back(pred);
  }
  return {out.begin(), out.end()};
}

DepSet dep(const Pipeline& p, size_t stage, int i, int j) {
  std::set<DepEntry> out;
  std::set<DepEntry> visited;
  std::vector<DepEntry> stack{{stage, i, j}};
  while (!stack.empty()) {
    DepEntry e = stack.back();
    stack.pop_back();
    if (!visited.insert(e).second) continue;
    const auto& s = p.stage(e.stage);
    if (s.is_input()) {
      out.insert(e);
    } else if (s.is_pointwise()) {
      for (size_t pred : p.predecessors(e.stage)) stack.push_back({pred, e.di, e.dj});
    } else {
      const auto& k = s.stencil().kernel;
      size_t in = p.predecessors(e.stage)[0];
      int bi = stencil_base(e.di, k.stride[0], k.upsample[0]);
      int bj = stencil_base(e.dj, k.stride[1], k.upsample[1]);
      bool mi = stencil_mirrored(e.di, k.upsample[0]);
      bool mj = stencil_mirrored(e.dj, k.upsample[1]);
      for (int a = -k.half_rows(); a <= k.half_rows(); ++a)
        for (int b = -k.half_cols(); b <= k.half_cols(); ++b)
          if (k.at(mi ? -a : a, mj ? -b : b) != 0) stack.push_back({in, bi + a, bj + b});
    }
  }
  return {out.begin(), out.end()};
}

std::vector<int> ConstraintSystem::sources() const {
  std::vector<int> out;
  for (size_t v = 0; v < vars.size(); ++v)
    if (vars[v].range) out.push_back(static_cast<int>(v));
  return out;
}

std::vector<Interval> ConstraintSystem::source_box() const {
  std::vector<Interval> out;
  for (const auto& v : vars)
    if (v.range) out.push_back(*v.range);
  return out;
}

namespace {

template <typename V, typename Ops>
std::vector<V> evaluate_system(const ConstraintSystem& cs, std::span<const V> source_values,
                               Ops& ops) {
  auto src = cs.sources();
  if (source_values.size() != src.size())
    throw std::invalid_argument("constraint system: wrong number of source values");
  std::vector<V> values(cs.vars.size());
  for (size_t k = 0; k < src.size(); ++k) values[static_cast<size_t>(src[k])] = source_values[k];
  std::vector<V> leaves, slots;
  for (const auto& d : cs.defs) {
    leaves.clear();
    for (int lv : d.leaf_vars) leaves.push_back(values[static_cast<size_t>(lv)]);
    values[static_cast<size_t>(d.var)] = run<V>(d.program, leaves, ops, slots);
  }
  return values;
}

}  // namespace

std::vector<Rational> ConstraintSystem::evaluate(std::span<const Rational> source_values) const {
  ExactOps ops;
  return evaluate_system<Rational>(*this, source_values, ops);
}

std::vector<Interval> ConstraintSystem::evaluate(std::span<const Interval> source_ranges) const {
  IntervalOps ops;
  return evaluate_system<Interval>(*this, source_ranges, ops);
}

ConstraintSystem build_constraints(const Pipeline& p, size_t stage,
                                   std::span<const Interval> prior) {
  // Stages of the cone: everything reachable through point-wise stages.
  std::vector<bool> in_cone(p.size(), false);
  std::vector<size_t> stack{stage};
  while (!stack.empty()) {
    size_t s = stack.back();
    stack.pop_back();
    if (in_cone[s]) continue;
    in_cone[s] = true;
    if (p.stage(s).is_pointwise())
      for (size_t pred : p.predecessors(s)) stack.push_back(pred);
  }

  ConstraintSystem cs;
  std::vector<int> var_of(p.size(), -1);
  // Declaration order is a valid topological order.
  for (size_t s = 0; s < p.size(); ++s) {
    if (!in_cone[s]) continue;
    var_of[s] = static_cast<int>(cs.vars.size());
    ConstraintSystem::Variable v{p.stage(s).name, s, std::nullopt};
    bool is_source = !p.stage(s).is_pointwise();
    if (is_source) {
      if (s >= prior.size()) throw std::invalid_argument("no prior range for source '" + v.name + "'");
      v.range = prior[s];
    }
    cs.vars.push_back(std::move(v));
    if (!is_source) {
      ConstraintSystem::Definition d;
      d.var = var_of[s];
      d.program = p.program(s);
      for (size_t leaf : p.program_leaves(s)) {
        if (var_of[leaf] < 0) throw std::logic_error("constraint system: unordered cone");
        d.leaf_vars.push_back(var_of[leaf]);
      }
      cs.defs.push_back(std::move(d));
    }
  }
  cs.objective = var_of[stage];
  return cs;
}

}  // namespace bw
