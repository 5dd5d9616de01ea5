#pragma once

// Branch-and-bound over the source box of a constraint system, using
// outward-rounded interval arithmetic for sound per-box bounds and exact
// rational evaluation for witnesses.

#include "bitwidth/constraint_system.hpp"

#include <cstddef>

namespace bw {

enum class SatResult { Sat, Unsat, Unknown };
std::string_view to_string(SatResult r);

struct BnbOptions {
  Rational epsilon{1, 16};
  std::size_t max_nodes = 200000;
};

struct BnbResult {
  Rational bound;    // sound: no feasible objective value beyond it
  Rational witness;  // attained objective value at some feasible point
  std::size_t nodes = 0;
  bool capped = false;  // node cap hit; bound is sound but may be loose
};

/// Supremum (Upper) or infimum (Lower) of the objective to within epsilon.
BnbResult bnb_bound(const ConstraintSystem& cs, Side side, const BnbOptions& options = {});

/// Decides whether the objective can exceed (Upper) / undercut (Lower)
/// `bound`. Unknown when the node cap is reached first.
SatResult bnb_decide(const ConstraintSystem& cs, Side side, const Rational& bound,
                     std::size_t max_nodes = 200000);

}  // namespace bw
