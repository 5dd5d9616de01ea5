#pragma once

// Built-in benchmark pipelines: Harris corner detection, unsharp mask,
// down/up sampling and Horn-Schunck optical flow with k unrolled iterations.

#include "bitwidth/pipeline.hpp"

#include <string>
#include <string_view>

namespace bw {

enum class BenchmarkKind { HCD, USM, DUS, OF };

struct BenchmarkId {
  BenchmarkKind kind = BenchmarkKind::HCD;
  int iterations = 0;  // OF only

  friend bool operator==(const BenchmarkId&, const BenchmarkId&) = default;
};

/// Accepts "hcd", "usm", "dus", "of" (4 iterations) and "of:<k>".
BenchmarkId parse_benchmark(std::string_view text);
std::string to_string(const BenchmarkId& id);

Pipeline build(const BenchmarkId& id, int rows = 256, int cols = 256);

Pipeline build_hcd(int rows = 256, int cols = 256);
Pipeline build_usm(int rows = 256, int cols = 256);
Pipeline build_dus(int rows = 256, int cols = 256);
Pipeline build_of(int iterations, int rows = 256, int cols = 256);

/// Stage names of the V_x chain V_x0, Av_x0, Common0, V_x1, ... of OF(k).
std::vector<std::string> of_vx_chain(int iterations);

}  // namespace bw
