#pragma once

// Exact-rational evaluation of a pipeline on concrete images.

#include "bitwidth/image.hpp"

#include <functional>

namespace bw {

using StagePlanes = std::vector<Plane<Rational>>;

/// Undersized image, out-of-range pixel, or division by exact zero; names
/// the stage (and pixel, when there is one).
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(std::string stage, const std::string& message);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Applied to every computed stage value before it is stored.
using ValueHook = std::function<void(size_t stage, Rational& value)>;

/// Every stage over its interior domain (see stage_domains).
StagePlanes evaluate(const Pipeline& p, const ImageSample& sample, const ValueHook& hook = {});

inline StagePlanes eval_reference(const Pipeline& p, const ImageSample& sample) {
  return evaluate(p, sample);
}

/// Branch taken by the top-level select of point-wise stage `stage`:
/// 1 where the condition holds, 0 elsewhere.
Plane<int> select_branches(const Pipeline& p, size_t stage, const StagePlanes& planes);

}  // namespace bw
