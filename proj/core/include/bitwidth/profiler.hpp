#pragma once

// Empirical per-stage bit requirements from running sample images.

#include "bitwidth/evaluate.hpp"

#include <string>
#include <utility>
#include <vector>

namespace bw {

struct StageProfile {
  std::vector<int> alpha_per_sample;  // α_i^s, in sample order
  std::vector<Interval> observed;     // per-sample min/max
  int alpha_max = 0;
  int alpha_avg = 0;  // mean of alpha_per_sample, rounded half up
  /// cumulative[b] = mean over samples of the fraction of pixels whose own
  /// value needs at most b integral bits; b runs 0..alpha_max.
  std::vector<double> cumulative;

  Interval observed_hull() const;
};

struct ProfileStats {
  std::vector<std::string> sample_ids;
  std::vector<StageProfile> stages;  // indexed like Pipeline::stages()
};

/// Throws std::invalid_argument on an empty sample set.
ProfileStats profile(const Pipeline& p, const std::vector<ImageSample>& samples);

/// (bits, fraction) pairs for the named stage, ending at (alpha_max, 1.0).
std::vector<std::pair<int, double>> cumulative_distribution(const Pipeline& p,
                                                            const ProfileStats& stats,
                                                            const std::string& stage);

}  // namespace bw
