#pragma once

// Per-stage range results shared by every analysis.

#include "bitwidth/interval.hpp"
#include "bitwidth/pipeline.hpp"

#include <string>
#include <vector>

namespace bw {

struct StageRange {
  Interval range;
  int alpha = 0;
  /// Set when the preferred method failed and a weaker one supplied the range.
  bool fallback = false;
  std::string note;
};

struct AnalysisResult {
  std::string method;  // "interval", "affine", "smt"
  std::vector<StageRange> stages;  // indexed like Pipeline::stages()

  const StageRange& at(const Pipeline& p, const std::string& name) const {
    return stages[p.index_of(name)];
  }
  std::vector<Interval> ranges() const {
    std::vector<Interval> out;
    out.reserve(stages.size());
    for (const auto& s : stages) out.push_back(s.range);
    return out;
  }
};

StageRange make_stage_range(Interval range);

}  // namespace bw
