#include "bitwidth/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bw {

Metric parse_metric(std::string_view name) {
  if (name == "corners") return Metric::Corners;
  if (name == "mask") return Metric::Mask;
  if (name == "psnr") return Metric::Psnr;
  if (name == "aae") return Metric::Aae;
  throw std::invalid_argument("unknown metric '" + std::string(name) +
                              "' (expected corners, mask, psnr or aae)");
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::Corners: return "corners";
    case Metric::Mask: return "mask";
    case Metric::Psnr: return "psnr";
    case Metric::Aae: return "aae";
  }
  return "";
}

bool higher_is_better(Metric m) { return m == Metric::Corners || m == Metric::Psnr; }

bool QualityTarget::met(double quality) const {
  return higher_is_better(metric) ? quality >= value : quality <= value;
}

namespace {

template <typename A, typename B>
void check_dims(const Plane<A>& a, const Plane<B>& b) {
  if (!(a.domain == b.domain)) throw std::invalid_argument("quality metric: plane dimensions differ");
}

struct CornerCounts {
  size_t differ = 0, total = 0;
};

CornerCounts corner_counts(const Plane<Rational>& ref, const Plane<Rational>& test,
                           const Rational& threshold) {
  check_dims(ref, test);
  CornerCounts c;
  for (size_t k = 0; k < ref.size(); ++k)
    if ((ref.data[k] > threshold) != (test.data[k] > threshold)) ++c.differ;
  c.total = ref.size();
  return c;
}

struct MaskCounts {
  size_t differ = 0, total = 0, agree = 0;
  double sq = 0;
};

MaskCounts mask_counts(const Plane<int>& ref_sel, const Plane<int>& test_sel,
                       const Plane<Rational>& ref_val, const Plane<Rational>& test_val) {
  check_dims(ref_sel, test_sel);
  check_dims(ref_val, test_val);
  check_dims(ref_sel, ref_val);
  MaskCounts c;
  c.total = ref_sel.size();
  for (size_t k = 0; k < ref_sel.size(); ++k) {
    if (ref_sel.data[k] != test_sel.data[k]) {
      ++c.differ;
    } else {
      double d = to_double(Rational(ref_val.data[k] - test_val.data[k]));
      c.sq += d * d;
      ++c.agree;
    }
  }
  return c;
}

Rational squared_error(const Plane<Rational>& ref, const Plane<Rational>& test) {
  check_dims(ref, test);
  Rational sum = 0;
  for (size_t k = 0; k < ref.size(); ++k) {
    Rational d = ref.data[k] - test.data[k];
    sum += d * d;
  }
  return sum;
}

double psnr_from(const Rational& sq, size_t n, double peak) {
  if (sq == 0) return std::numeric_limits<double>::infinity();
  double mse = to_double(sq) / static_cast<double>(n);
  return 10.0 * std::log10(peak * peak / mse);
}

double angle_sum(const Plane<Rational>& ref_u, const Plane<Rational>& ref_v,
                 const Plane<Rational>& test_u, const Plane<Rational>& test_v) {
  check_dims(ref_u, ref_v);
  check_dims(ref_u, test_u);
  check_dims(ref_u, test_v);
  double sum = 0;
  for (size_t k = 0; k < ref_u.size(); ++k) {
    if (ref_u.data[k] == test_u.data[k] && ref_v.data[k] == test_v.data[k]) continue;
    double u = to_double(ref_u.data[k]), v = to_double(ref_v.data[k]);
    double tu = to_double(test_u.data[k]), tv = to_double(test_v.data[k]);
    double c = (u * tu + v * tv + 1.0) / std::sqrt((u * u + v * v + 1.0) * (tu * tu + tv * tv + 1.0));
    sum += std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / std::numbers::pi;
  }
  return sum;
}

size_t last_select_stage(const Pipeline& p) {
  for (size_t s = p.size(); s-- > 0;)
    if (p.stage(s).is_pointwise() && p.stage(s).pointwise().expr.op() == Op::Select) return s;
  throw std::invalid_argument("mask metric needs a stage whose expression is a select");
}

}  // namespace

double corner_misclassification(const Plane<Rational>& ref, const Plane<Rational>& test,
                                const Rational& threshold) {
  auto c = corner_counts(ref, test, threshold);
  return c.total == 0 ? 0.0 : 100.0 * static_cast<double>(c.differ) / static_cast<double>(c.total);
}

MaskedMetrics masked_metrics(const Plane<int>& ref_sel, const Plane<int>& test_sel,
                             const Plane<Rational>& ref_val, const Plane<Rational>& test_val) {
  auto c = mask_counts(ref_sel, test_sel, ref_val, test_val);
  MaskedMetrics m;
  if (c.total > 0) m.misclassified = static_cast<double>(c.differ) / static_cast<double>(c.total);
  if (c.agree > 0) m.rms = std::sqrt(c.sq / static_cast<double>(c.agree));
  return m;
}

double psnr(const Plane<Rational>& ref, const Plane<Rational>& test, double peak) {
  return psnr_from(squared_error(ref, test), ref.size(), peak);
}

double aae(const Plane<Rational>& ref_u, const Plane<Rational>& ref_v,
           const Plane<Rational>& test_u, const Plane<Rational>& test_v) {
  if (ref_u.size() == 0) return 0.0;
  return angle_sum(ref_u, ref_v, test_u, test_v) / static_cast<double>(ref_u.size());
}

double pipeline_quality(const Pipeline& p, Metric metric, const std::vector<StagePlanes>& ref,
                        const std::vector<StagePlanes>& test) {
  if (ref.size() != test.size() || ref.empty())
    throw std::invalid_argument("pipeline_quality: sample counts differ or are zero");
  size_t last = p.size() - 1;
  switch (metric) {
    case Metric::Corners: {
      size_t differ = 0, total = 0;
      for (size_t k = 0; k < ref.size(); ++k) {
        auto c = corner_counts(ref[k][last], test[k][last], 0);
        differ += c.differ;
        total += c.total;
      }
      return 100.0 - 100.0 * static_cast<double>(differ) / static_cast<double>(total);
    }
    case Metric::Mask: {
      size_t s = last_select_stage(p);
      size_t differ = 0, total = 0;
      for (size_t k = 0; k < ref.size(); ++k) {
        auto c = mask_counts(select_branches(p, s, ref[k]), select_branches(p, s, test[k]),
                             ref[k][s], test[k][s]);
        differ += c.differ;
        total += c.total;
      }
      return static_cast<double>(differ) / static_cast<double>(total);
    }
    case Metric::Psnr: {
      Rational sq = 0;
      size_t n = 0;
      for (size_t k = 0; k < ref.size(); ++k) {
        sq += squared_error(ref[k][last], test[k][last]);
        n += ref[k][last].size();
      }
      return psnr_from(sq, n, 255.0);
    }
    case Metric::Aae: {
      if (p.size() < 2) throw std::invalid_argument("aae metric needs two flow stages");
      double sum = 0;
      size_t n = 0;
      for (size_t k = 0; k < ref.size(); ++k) {
        sum += angle_sum(ref[k][last - 1], ref[k][last], test[k][last - 1], test[k][last]);
        n += ref[k][last].size();
      }
      return sum / static_cast<double>(n);
    }
  }
  return 0;
}

}  // namespace bw
