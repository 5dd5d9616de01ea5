#pragma once

// Affine arithmetic: x0 + Σ x_i ε_i with shared noise symbols ε_i ∈ [-1, 1].

#include "bitwidth/analysis.hpp"

#include <cstdint>
#include <map>

namespace bw {

using SymbolId = std::uint64_t;

/// Hands out fresh noise symbols; one per analysis run.
class SymbolCounter {
 public:
  SymbolId fresh() { return next_++; }
  SymbolId issued() const { return next_; }

 private:
  SymbolId next_ = 1;
};

struct AffineForm {
  Rational x0;
  std::map<SymbolId, Rational> terms;  // zero coefficients are never stored

  AffineForm() = default;
  explicit AffineForm(Rational center) : x0(std::move(center)) {}
  /// Form covering [range.lo, range.hi] with a fresh symbol.
  static AffineForm from_interval(const Interval& range, SymbolCounter& symbols);

  bool is_constant() const { return terms.empty(); }
  Rational radius() const;
  Interval to_interval() const;
};

AffineForm aa_add(const AffineForm& a, const AffineForm& b);
AffineForm aa_sub(const AffineForm& a, const AffineForm& b);
AffineForm aa_neg(const AffineForm& a);
AffineForm aa_scale(const AffineForm& a, const Rational& k);
/// The quadratic remainder goes into one fresh symbol of weight rad(a)·rad(b).
AffineForm aa_mul(const AffineForm& a, const AffineForm& b, SymbolCounter& symbols);
AffineForm aa_square(const AffineForm& a, SymbolCounter& symbols);
AffineForm aa_pow(const AffineForm& a, unsigned n, SymbolCounter& symbols);
/// Min-range linearisation of 1/x over `range` (which must exclude 0).
AffineForm aa_reciprocal(const AffineForm& a, const Interval& range, SymbolCounter& symbols);
/// Chord linearisation of |x| over `range`.
AffineForm aa_abs(const AffineForm& a, const Interval& range, SymbolCounter& symbols);

std::string to_string(const AffineForm& f);

/// Per-stage ranges from affine arithmetic over one representative output
/// pixel's dependency cone. Each reported range is also clipped to the
/// interval enclosure carried alongside the form.
AnalysisResult analyze_affine(const Pipeline& p);

}  // namespace bw
