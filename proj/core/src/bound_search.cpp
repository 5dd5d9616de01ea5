#include "bitwidth/bound_search.hpp"

#include "bitwidth/interval_analysis.hpp"

#include <tuple>

namespace bw {
namespace {

// The part of the bit count an upper (resp. lower) bound contributes.
std::tuple<bool, std::uint64_t> upper_key(const Rational& x) {
  return {x < 0, ceil_log2(BigInt(floor_int(abs(x)) + 1))};
}

std::tuple<bool, std::uint64_t> lower_key(const Rational& x) {
  if (x >= 0) return {false, 0};
  return {true, ceil_log2(ceil_int(abs(x)))};
}

Rational midpoint_value(const ConstraintSystem& cs) {
  std::vector<Rational> mids;
  for (const auto& r : cs.source_box()) mids.push_back((r.lo + r.hi) / 2);
  return cs.evaluate(std::span<const Rational>(mids))[static_cast<size_t>(cs.objective)];
}

}  // namespace

BoundSearchResult search_bound(const ConstraintSystem& cs, Side side,
                               const BoundSearchConfig& cfg, SolverBackend& backend,
                               const Interval& initial) {
  BoundSearchResult r;
  const bool upper = side == Side::Upper;
  Rational sound = upper ? initial.hi : initial.lo;
  Rational witness;
  try {
    witness = midpoint_value(cs);
  } catch (const std::domain_error&) {
    witness = upper ? initial.lo : initial.hi;
  }
  auto stable = [&] {
    if ((upper ? sound - witness : witness - sound) < cfg.epsilon) return true;
    if (cfg.stop != StopRule::BitwidthStable) return false;
    return upper ? upper_key(sound) == upper_key(witness)
                 : lower_key(sound) == lower_key(witness);
  };
  while (!stable() && r.queries < cfg.max_queries) {
    Rational mid = (sound + witness) / 2;
    SatResult v = backend.check(cs, side, mid);
    ++r.queries;
    if (v == SatResult::Unsat) {
      sound = mid;
    } else {
      if (v == SatResult::Unknown) ++r.unknowns;
      witness = mid;
    }
  }
  r.bound = sound;
  r.witness = witness;
  return r;
}

BoundSearchResult search_bound(const ConstraintSystem& cs, Side side,
                               const BoundSearchConfig& cfg, SolverBackend& backend) {
  Interval iv = cs.evaluate(std::span<const Interval>(cs.source_box()))[static_cast<size_t>(cs.objective)];
  return search_bound(cs, side, cfg, backend, iv);
}

AnalysisResult analyze_smt(const Pipeline& p, SolverBackend& backend, const SmtOptions& options) {
  AnalysisResult result;
  result.method = "smt";
  result.stages.resize(p.size());
  std::vector<Interval> ranges(p.size());
  for (size_t i : topo_order(p)) {
    const auto& s = p.stage(i);
    if (s.is_input()) {
      ranges[i] = s.input().range;
      result.stages[i] = make_stage_range(ranges[i]);
      continue;
    }
    if (s.is_stencil()) {
      ranges[i] = stencil_range(s.stencil().kernel, ranges[p.predecessors(i)[0]]);
      result.stages[i] = make_stage_range(ranges[i]);
      continue;
    }
    ConstraintSystem cs = build_constraints(p, i, ranges);
    Interval initial = cs.evaluate(std::span<const Interval>(cs.source_box()))[static_cast<size_t>(cs.objective)];
    initial = intersect(initial, pointwise_range(p, i, ranges));
    std::string note;
    bool fallback = false;
    auto refine = [&](SolverBackend& b) {
      auto hi = search_bound(cs, Side::Upper, options.search, b, initial);
      auto lo = search_bound(cs, Side::Lower, options.search, b, initial);
      return Interval(lo.bound, hi.bound);
    };
    Interval refined = initial;
    try {
      refined = refine(backend);
    } catch (const SolverError& e) {
      if (options.strict) throw;
      fallback = true;
      note = e.what();
      if (options.fallback) {
        refined = refine(*options.fallback);
        note += "; used " + options.fallback->name();
      } else {
        note += "; kept interval range";
      }
    }
    ranges[i] = refined;
    result.stages[i] = make_stage_range(refined);
    result.stages[i].fallback = fallback;
    result.stages[i].note = note;
  }
  return result;
}

}  // namespace bw
