#pragma once

#include "bitwidth/analysis.hpp"

#include <span>

namespace bw {

/// Range of a stencil output given its input range; taps are independent.
Interval stencil_range(const StencilKernel& k, const Interval& input);

/// Range of point-wise stage `index` given a range for every stage.
/// Throws DivisionThroughZero naming the stage.
Interval pointwise_range(const Pipeline& p, size_t index, std::span<const Interval> ranges);

/// Topological interval propagation over the whole pipeline.
AnalysisResult analyze_interval(const Pipeline& p);

}  // namespace bw
