#pragma once

// Bisection on parametric bound constraints, and the stage-by-stage
// solver-refined range analysis built on it.

#include "bitwidth/analysis.hpp"
#include "bitwidth/solver.hpp"

namespace bw {

enum class StopRule {
  BitwidthStable,  // stop once the bracket ends imply the same bit count
  Width,           // stop only when the bracket is narrower than epsilon
};

struct BoundSearchConfig {
  StopRule stop = StopRule::BitwidthStable;
  Rational epsilon{1, 16};
  int max_queries = 200;
};

struct BoundSearchResult {
  Rational bound;    // sound
  Rational witness;  // the objective is known to reach at least this far
  int queries = 0;
  int unknowns = 0;
};

/// Tightens the sound side of `initial` for `side`. `initial` must be a
/// sound enclosure of the objective.
BoundSearchResult search_bound(const ConstraintSystem& cs, Side side,
                               const BoundSearchConfig& cfg, SolverBackend& backend,
                               const Interval& initial);
/// As above, with the interval enclosure of the system as the bracket.
BoundSearchResult search_bound(const ConstraintSystem& cs, Side side,
                               const BoundSearchConfig& cfg, SolverBackend& backend);

struct SmtOptions {
  BoundSearchConfig search;
  /// Used for a stage when the primary backend throws SolverError.
  SolverBackend* fallback = nullptr;
  /// Rethrow SolverError instead of degrading the stage.
  bool strict = false;
};

/// Inputs keep their declared range, stencils take the interval rule over the
/// refined input range, point-wise stages are refined by bound search.
/// A stage whose search failed keeps its interval range and is flagged.
AnalysisResult analyze_smt(const Pipeline& p, SolverBackend& backend,
                           const SmtOptions& options = {});

}  // namespace bw
