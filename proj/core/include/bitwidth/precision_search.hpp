#pragma once

// Greedy fractional-bit search: a uniform β by bisection, then one
// reverse-topological pass shrinking each stage's β on its own.

#include "bitwidth/quality.hpp"
#include "bitwidth/simulator.hpp"

#include <map>

namespace bw {

class TargetUnreachable : public std::runtime_error {
 public:
  TargetUnreachable(int beta_max, double best_quality);
  int beta_max() const { return beta_max_; }
  double best_quality() const { return best_; }

 private:
  int beta_max_;
  double best_;
};

/// Quality of a β assignment on a fixed calibration set, memoized.
class QualityEvaluator {
 public:
  QualityEvaluator(const Pipeline& p, AnalysisResult ranges, std::vector<ImageSample> samples,
                   Metric metric, Rounding rounding = Rounding::Truncate,
                   Overflow overflow = Overflow::Saturate);

  double quality(const std::vector<int>& beta);
  double quality(int uniform_beta) { return quality(std::vector<int>(pipeline_.size(), uniform_beta)); }

  const Pipeline& pipeline() const { return pipeline_; }
  Metric metric() const { return metric_; }
  /// Distinct assignments simulated so far.
  std::size_t evaluations() const { return cache_.size(); }

 private:
  const Pipeline& pipeline_;
  AnalysisResult ranges_;
  std::vector<ImageSample> samples_;
  Metric metric_;
  Rounding rounding_;
  Overflow overflow_;
  std::vector<StagePlanes> reference_;
  std::map<std::vector<int>, double> cache_;
};

struct BetaAssignment {
  std::vector<int> beta;  // indexed like Pipeline::stages()
  double quality = 0;
  int uniform_beta = 0;
};

/// Smallest uniform β in [0, beta_max] meeting the target; the returned β
/// has itself been evaluated. Throws TargetUnreachable.
int uniform_beta_search(QualityEvaluator& eval, const QualityTarget& target, int beta_max = 16);

/// Per-stage bisection in reverse topological order, each in [0, current β].
BetaAssignment refine_beta(QualityEvaluator& eval, const QualityTarget& target, int uniform_beta);

/// Both steps.
BetaAssignment search_beta(QualityEvaluator& eval, const QualityTarget& target, int beta_max = 16);

std::vector<std::pair<int, double>> quality_curve(QualityEvaluator& eval, int beta_lo, int beta_hi);

}  // namespace bw
