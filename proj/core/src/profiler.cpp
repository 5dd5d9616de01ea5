#include "bitwidth/profiler.hpp"

#include "bitwidth/fixed_point.hpp"

#include <algorithm>

namespace bw {

Interval StageProfile::observed_hull() const {
  Interval h = observed.at(0);
  for (const auto& o : observed) h = hull(h, o);
  return h;
}

ProfileStats profile(const Pipeline& p, const std::vector<ImageSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("profile: empty sample set");
  ProfileStats stats;
  stats.stages.resize(p.size());
  // Per stage, per sample: histogram of per-pixel bit counts.
  std::vector<std::vector<std::vector<size_t>>> hist(p.size());
  std::vector<std::vector<size_t>> pixel_count(p.size());
  for (const auto& sample : samples) {
    stats.sample_ids.push_back(sample.id);
    StagePlanes planes = eval_reference(p, sample);
    for (size_t s = 0; s < p.size(); ++s) {
      const auto& data = planes[s].data;
      auto [mn, mx] = std::minmax_element(data.begin(), data.end());
      Interval range(*mn, *mx);
      auto& sp = stats.stages[s];
      sp.observed.push_back(range);
      sp.alpha_per_sample.push_back(alpha_from_range(range.lo, range.hi));
      std::vector<size_t> h;
      for (const auto& v : data) {
        auto b = static_cast<size_t>(alpha_from_range(v, v));
        if (h.size() <= b) h.resize(b + 1, 0);
        ++h[b];
      }
      hist[s].push_back(std::move(h));
      pixel_count[s].push_back(data.size());
    }
  }
  const auto n = static_cast<long>(samples.size());
  for (size_t s = 0; s < p.size(); ++s) {
    auto& sp = stats.stages[s];
    sp.alpha_max = *std::max_element(sp.alpha_per_sample.begin(), sp.alpha_per_sample.end());
    long sum = 0;
    for (int a : sp.alpha_per_sample) sum += a;
    sp.alpha_avg = static_cast<int>((2 * sum + n) / (2 * n));
    // Exact accumulation keeps the result independent of sample order.
    for (int b = 0; b <= sp.alpha_max; ++b) {
      Rational total = 0;
      for (size_t k = 0; k < hist[s].size(); ++k) {
        size_t below = 0;
        for (size_t c = 0; c < hist[s][k].size() && c <= static_cast<size_t>(b); ++c) below += hist[s][k][c];
        Rational frac(static_cast<long>(below), static_cast<long>(pixel_count[s][k]));
        frac.canonicalize();
        total += frac;
      }
      sp.cumulative.push_back(to_double(total / n));
    }
  }
  return stats;
}

std::vector<std::pair<int, double>> cumulative_distribution(const Pipeline& p,
                                                            const ProfileStats& stats,
                                                            const std::string& stage) {
  if (!p.has_stage(stage)) throw std::invalid_argument("unknown stage '" + stage + "'");
  const auto& sp = stats.stages.at(p.index_of(stage));
  std::vector<std::pair<int, double>> out;
  for (size_t b = 0; b < sp.cumulative.size(); ++b) out.emplace_back(static_cast<int>(b), sp.cumulative[b]);
  return out;
}

}  // namespace bw
