#pragma once

// Application quality metrics comparing a fixed-point run with the exact
// reference. All metrics look at interior pixels only.

#include "bitwidth/evaluate.hpp"

#include <string>
#include <string_view>

namespace bw {

enum class Metric {
  Corners,  // corner classification accuracy, percent (higher is better)
  Mask,     // misclassified fraction at the select stage (lower is better)
  Psnr,     // dB (higher is better)
  Aae,      // average angular error of the flow, degrees (lower is better)
};

Metric parse_metric(std::string_view name);
std::string_view to_string(Metric m);
bool higher_is_better(Metric m);

struct QualityTarget {
  Metric metric = Metric::Psnr;
  double value = 0;  // threshold; +inf allowed for PSNR

  bool met(double quality) const;
};

/// Percentage of pixels whose corner/non-corner label (response > threshold)
/// differs between ref and test.
double corner_misclassification(const Plane<Rational>& ref, const Plane<Rational>& test,
                                const Rational& threshold = 0);

struct MaskedMetrics {
  double misclassified = 0;  // fraction of pixels whose branch differs
  double rms = 0;            // over pixels whose branch agrees
};

MaskedMetrics masked_metrics(const Plane<int>& ref_sel, const Plane<int>& test_sel,
                             const Plane<Rational>& ref_val, const Plane<Rational>& test_val);

/// +inf when the planes are identical.
double psnr(const Plane<Rational>& ref, const Plane<Rational>& test, double peak = 255.0);

/// Mean angle in degrees between (u, v, 1) vectors.
double aae(const Plane<Rational>& ref_u, const Plane<Rational>& ref_v,
           const Plane<Rational>& test_u, const Plane<Rational>& test_v);

/// Pooled quality of `metric` over several samples. Uses the last stage
/// (corners, psnr), the last select stage (mask) or the last two stages as
/// (u, v) (aae).
double pipeline_quality(const Pipeline& p, Metric metric, const std::vector<StagePlanes>& ref,
                        const std::vector<StagePlanes>& test);

}  // namespace bw
