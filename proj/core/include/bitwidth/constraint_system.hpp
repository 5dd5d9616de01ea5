#pragma once

// Per-pixel constraint systems over the pruned dependency cone of a stage.

#include "bitwidth/expr.hpp"
#include "bitwidth/interval.hpp"
#include "bitwidth/pipeline.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bw {

struct DepEntry {
  size_t stage;
  int di = 0;
  int dj = 0;
  friend bool operator==(const DepEntry&, const DepEntry&) = default;
  friend auto operator<=>(const DepEntry&, const DepEntry&) = default;
};

/// Sorted by (stage, di, dj).
using DepSet = std::vector<DepEntry>;

/// Sources of stage `stage` at (0,0) when expansion stops at stencil stages
/// and inputs. An input or stencil stage is its own source.
DepSet dep_hat(const Pipeline& p, size_t stage);

/// Input pixels (stage, row, col) that stage `stage` at (i, j) depends on.
DepSet dep(const Pipeline& p, size_t stage, int i = 0, int j = 0);

enum class Side { Upper, Lower };
std::string_view to_string(Side side);

struct ConstraintSystem {
  struct Variable {
    std::string name;
    size_t stage;
    std::optional<Interval> range;  // present exactly for sources
  };
  struct Definition {
    int var;
    Program program;
    std::vector<int> leaf_vars;  // one variable per program leaf
  };

  std::vector<Variable> vars;
  std::vector<Definition> defs;  // in dependency order
  int objective = 0;

  std::vector<int> sources() const;
  /// Exact values of every variable given one value per source, in
  /// sources() order. Throws std::domain_error on division by zero.
  std::vector<Rational> evaluate(std::span<const Rational> source_values) const;
  /// Interval enclosure of every variable over the source box.
  std::vector<Interval> evaluate(std::span<const Interval> source_ranges) const;
  std::vector<Interval> source_box() const;
};

/// Builds the system for point-wise stage `stage`; `prior` holds a sound
/// range for every stage (only the sources' entries are read).
ConstraintSystem build_constraints(const Pipeline& p, size_t stage,
                                   std::span<const Interval> prior);

}  // namespace bw
