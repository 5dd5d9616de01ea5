#include "bitwidth/precision_search.hpp"

#include "bitwidth/rational.hpp"

namespace bw {

TargetUnreachable::TargetUnreachable(int beta_max, double best_quality)
    : std::runtime_error("quality target not reachable at beta_max = " + std::to_string(beta_max) +
                         " (best quality " + std::to_string(best_quality) + ")"),
      beta_max_(beta_max),
      best_(best_quality) {}

QualityEvaluator::QualityEvaluator(const Pipeline& p, AnalysisResult ranges,
                                   std::vector<ImageSample> samples, Metric metric,
                                   Rounding rounding, Overflow overflow)
    : pipeline_(p),
      ranges_(std::move(ranges)),
      samples_(std::move(samples)),
      metric_(metric),
      rounding_(rounding),
      overflow_(overflow) {
  if (samples_.empty()) throw std::invalid_argument("quality evaluation needs at least one sample");
  for (const auto& s : samples_) reference_.push_back(eval_reference(pipeline_, s));
}

double QualityEvaluator::quality(const std::vector<int>& beta) {
  if (auto it = cache_.find(beta); it != cache_.end()) return it->second;
  TypeAssignment t = make_assignment(ranges_, beta, rounding_, overflow_);
  std::vector<StagePlanes> test;
  for (const auto& s : samples_) test.push_back(simulate(pipeline_, t, s).values);
  double q = pipeline_quality(pipeline_, metric_, reference_, test);
  cache_.emplace(beta, q);
  return q;
}

int uniform_beta_search(QualityEvaluator& eval, const QualityTarget& target, int beta_max) {
  if (beta_max < 0) throw std::invalid_argument("beta_max must be >= 0");
  double top = eval.quality(beta_max);
  if (!target.met(top)) throw TargetUnreachable(beta_max, top);
  if (target.met(eval.quality(0))) return 0;
  // Invariant: lo fails, hi meets the target (both evaluated).
  int lo = 0, hi = beta_max;
  while (hi - lo > 1) {
    int mid = lo + (hi - lo) / 2;
    if (target.met(eval.quality(mid)))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

BetaAssignment refine_beta(QualityEvaluator& eval, const QualityTarget& target, int uniform_beta) {
  const Pipeline& p = eval.pipeline();
  BetaAssignment a;
  a.uniform_beta = uniform_beta;
  a.beta.assign(p.size(), uniform_beta);
  if (!target.met(eval.quality(a.beta)))
    throw std::invalid_argument("refine_beta: the uniform starting point misses the target");
  auto order = topo_order(p);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    size_t s = *it;
    int hi = a.beta[s];
    if (hi == 0) continue;
    auto met_at = [&](int b) {
      auto trial = a.beta;
      trial[s] = b;
      return target.met(eval.quality(trial));
    };
    if (met_at(0)) {
      a.beta[s] = 0;
      continue;
    }
    int lo = 0;
    while (hi - lo > 1) {
      int mid = lo + (hi - lo) / 2;
      if (met_at(mid))
        hi = mid;
      else
        lo = mid;
    }
    a.beta[s] = hi;
  }
  a.quality = eval.quality(a.beta);
  return a;
}

BetaAssignment search_beta(QualityEvaluator& eval, const QualityTarget& target, int beta_max) {
  return refine_beta(eval, target, uniform_beta_search(eval, target, beta_max));
}

std::vector<std::pair<int, double>> quality_curve(QualityEvaluator& eval, int beta_lo, int beta_hi) {
  std::vector<std::pair<int, double>> out;
  for (int b = beta_lo; b <= beta_hi; ++b) out.emplace_back(b, eval.quality(b));
  return out;
}

}  // namespace bw
