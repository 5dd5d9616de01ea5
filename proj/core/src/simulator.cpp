#include "bitwidth/simulator.hpp"

#include <numeric>

namespace bw {

TypeAssignment make_assignment(const AnalysisResult& ranges, const std::vector<int>& beta,
                               Rounding rounding, Overflow overflow) {
  if (beta.size() != ranges.stages.size())
    throw std::invalid_argument("make_assignment: one beta per stage required");
  TypeAssignment t;
  t.rounding = rounding;
  t.overflow = overflow;
  for (size_t s = 0; s < beta.size(); ++s) {
    const auto& r = ranges.stages[s].range;
    t.formats.push_back(format_for_range(r.lo, r.hi, beta[s]));
  }
  return t;
}

TypeAssignment make_assignment(const AnalysisResult& ranges, int uniform_beta, Rounding rounding,
                               Overflow overflow) {
  return make_assignment(ranges, std::vector<int>(ranges.stages.size(), uniform_beta), rounding,
                         overflow);
}

FixedPointValue SimulationResult::fixed(size_t stage, int i, int j) const {
  const auto& f = types.formats[stage];
  return {f, floor_int(values[stage].at(i, j) * pow2(f.beta))};
}

std::size_t SimulationResult::total_overflows() const {
  return std::accumulate(overflows.begin(), overflows.end(), std::size_t{0});
}

SimulationResult simulate(const Pipeline& p, const TypeAssignment& t, const ImageSample& sample) {
  if (t.formats.size() != p.size())
    throw std::invalid_argument("simulate: type assignment does not cover every stage");
  SimulationResult r;
  r.types = t;
  r.overflows.assign(p.size(), 0);
  ValueHook quantize_stage = [&](size_t s, Rational& v) {
    bool over = false;
    v = quantize(v, t.formats[s], t.rounding, t.overflow, &over).value();
    if (over) ++r.overflows[s];
  };
  r.values = evaluate(p, sample, quantize_stage);
  return r;
}

}  // namespace bw
