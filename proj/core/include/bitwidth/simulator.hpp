#pragma once

// Bit-exact fixed-point simulation: each stage is computed exactly from its
// (already quantized) inputs and quantized once into its own format.

#include "bitwidth/analysis.hpp"
#include "bitwidth/evaluate.hpp"
#include "bitwidth/fixed_point.hpp"

namespace bw {

struct TypeAssignment {
  std::vector<FixedPointFormat> formats;  // indexed like Pipeline::stages()
  Rounding rounding = Rounding::Truncate;
  Overflow overflow = Overflow::Saturate;
};

/// Formats from per-stage ranges (sign from the range) and per-stage β.
TypeAssignment make_assignment(const AnalysisResult& ranges, const std::vector<int>& beta,
                               Rounding rounding = Rounding::Truncate,
                               Overflow overflow = Overflow::Saturate);
TypeAssignment make_assignment(const AnalysisResult& ranges, int uniform_beta,
                               Rounding rounding = Rounding::Truncate,
                               Overflow overflow = Overflow::Saturate);

struct SimulationResult {
  StagePlanes values;                // decoded fixed-point values
  std::vector<std::size_t> overflows;  // saturation/wrap events per stage
  TypeAssignment types;

  FixedPointValue fixed(size_t stage, int i, int j) const;
  std::size_t total_overflows() const;
};

SimulationResult simulate(const Pipeline& p, const TypeAssignment& t, const ImageSample& sample);

}  // namespace bw
