#pragma once

#include "bitwidth/image.hpp"
#include "bitwidth/pipeline.hpp"

#include <random>
#include <string>
#include <vector>

namespace bw::fixtures {

/// Independent uniform pixels in [0, 255].
inline Image noise_image(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> px(0, 255);
  Image img(rows, cols);
  for (int& v : img.pixels) v = px(rng);
  return img;
}

/// Alternating 0/255 blocks of side `block`; drives stencils to their extremes.
inline Image checker_image(int rows, int cols, int block, bool invert = false) {
  Image img(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      img.at(i, j) = (((i / block) + (j / block)) % 2 == 0) != invert ? 255 : 0;
  return img;
}

/// `count` samples cycling through noise, synthetic texture and checkerboards.
inline std::vector<ImageSample> mixed_samples(const Pipeline& p, int count, int size,
                                              std::uint64_t seed) {
  std::vector<ImageSample> out;
  for (int k = 0; k < count; ++k) {
    std::uint64_t s = seed + static_cast<std::uint64_t>(k);
    Image img;
    switch (k % 4) {
      case 0:
      case 1: img = noise_image(size, size, s); break;
      case 2: img = synthesize(size, size, s); break;
      default: img = checker_image(size, size, 1 + (k / 4) % 3, (k / 4) % 2 == 1); break;
    }
    out.push_back(make_sample(p, img, "s" + std::to_string(k)));
  }
  return out;
}

inline std::vector<ImageSample> synthetic_samples(const Pipeline& p, int count, int size,
                                                  std::uint64_t seed) {
  std::vector<ImageSample> out;
  for (int k = 0; k < count; ++k) {
    std::uint64_t s = seed + static_cast<std::uint64_t>(k);
    out.push_back(make_sample(p, synthesize(size, size, s), "syn" + std::to_string(s)));
  }
  return out;
}

}  // namespace bw::fixtures
