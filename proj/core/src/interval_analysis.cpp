#include "bitwidth/interval_analysis.hpp"

#include "bitwidth/fixed_point.hpp"

namespace bw {

StageRange make_stage_range(Interval range) {
  StageRange r;
  r.alpha = alpha_from_range(range.lo, range.hi);
  r.range = std::move(range);
  return r;
}

Interval stencil_range(const StencilKernel& k, const Interval& input) {
  Rational lo = 0, hi = 0;
  for (const auto& c : k.coeffs) {
    if (c > 0) {
      lo += c * input.lo;
      hi += c * input.hi;
    } else if (c < 0) {
      lo += c * input.hi;
      hi += c * input.lo;
    }
  }
  return iv_mul(Interval::point(k.scale), Interval(lo, hi));
}

Interval pointwise_range(const Pipeline& p, size_t index, std::span<const Interval> ranges) {
  const auto& prog = p.program(index);
  std::vector<Interval> leaves;
  leaves.reserve(prog.leaves.size());
  for (size_t s : p.program_leaves(index)) leaves.push_back(ranges[s]);
  IntervalOps ops;
  try {
    return run<Interval>(prog, leaves, ops);
  } catch (const DivisionThroughZero& e) {
    throw DivisionThroughZero(p.stage(index).name, e.denominator());
  }
}

AnalysisResult analyze_interval(const Pipeline& p) {
  AnalysisResult result;
  result.method = "interval";
  std::vector<Interval> ranges(p.size());
  result.stages.resize(p.size());
  for (size_t i : topo_order(p)) {
    const auto& s = p.stage(i);
    if (s.is_input())
      ranges[i] = s.input().range;
    else if (s.is_stencil())
      ranges[i] = stencil_range(s.stencil().kernel, ranges[p.predecessors(i)[0]]);
    else
      ranges[i] = pointwise_range(p, i, ranges);
    result.stages[i] = make_stage_range(ranges[i]);
  }
  return result;
}

}  // namespace bw
