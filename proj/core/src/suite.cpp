#include "bitwidth/suite.hpp"

#include <charconv>
#include <stdexcept>

namespace bw {
namespace {

Rational q(long p, long d = 1) {
  Rational r(p, d);
  r.canonicalize();
  return r;
}

StencilKernel kernel(int rows, int cols, std::initializer_list<long> coeffs, Rational scale) {
  StencilKernel k;
  k.rows = rows;
  k.cols = cols;
  for (long c : coeffs) k.coeffs.push_back(q(c));
  k.scale = std::move(scale);
  return k;
}

Expr ref(const char* s) { return Expr::ref(s); }
Expr c(long p, long d = 1) { return Expr::constant(q(p, d)); }

Stage image(const char* name) { return make_input(name, Interval(0, 255)); }

StencilKernel sobel_x() { return kernel(3, 3, {-1, 0, 1, -2, 0, 2, -1, 0, 1}, q(1, 12)); }
StencilKernel sobel_y() { return kernel(3, 3, {-1, -2, -1, 0, 0, 0, 1, 2, 1}, q(1, 12)); }

}  // namespace

BenchmarkId parse_benchmark(std::string_view text) {
  if (text == "hcd") return {BenchmarkKind::HCD, 0};
  if (text == "usm") return {BenchmarkKind::USM, 0};
  if (text == "dus") return {BenchmarkKind::DUS, 0};
  if (text == "of") return {BenchmarkKind::OF, 4};
  if (text.substr(0, 3) == "of:") {
    int k = -1;
    auto digits = text.substr(3);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && k >= 0)
      return {BenchmarkKind::OF, k};
  }
  throw std::invalid_argument("unknown benchmark '" + std::string(text) +
                              "' (expected hcd, usm, dus or of:<k>)");
}

std::string to_string(const BenchmarkId& id) {
  switch (id.kind) {
    case BenchmarkKind::HCD: return "hcd";
    case BenchmarkKind::USM: return "usm";
    case BenchmarkKind::DUS: return "dus";
    case BenchmarkKind::OF: return "of:" + std::to_string(id.iterations);
  }
  return "";
}

Pipeline build(const BenchmarkId& id, int rows, int cols) {
  switch (id.kind) {
    case BenchmarkKind::HCD: return build_hcd(rows, cols);
    case BenchmarkKind::USM: return build_usm(rows, cols);
    case BenchmarkKind::DUS: return build_dus(rows, cols);
    case BenchmarkKind::OF: return build_of(id.iterations, rows, cols);
  }
  throw std::invalid_argument("unknown benchmark");
}

Pipeline build_hcd(int rows, int cols) {
  auto box = kernel(3, 3, {1, 1, 1, 1, 1, 1, 1, 1, 1}, q(1));
  std::vector<Stage> s;
  s.push_back(image("img"));
  s.push_back(make_stencil("Ix", "img", sobel_x()));
  s.push_back(make_stencil("Iy", "img", sobel_y()));
  s.push_back(make_pointwise("Ixx", Expr::pow(ref("Ix"), 2)));
  s.push_back(make_pointwise("Ixy", ref("Ix") * ref("Iy")));
  s.push_back(make_pointwise("Iyy", Expr::pow(ref("Iy"), 2)));
  s.push_back(make_stencil("Sxx", "Ixx", box));
  s.push_back(make_stencil("Sxy", "Ixy", box));
  s.push_back(make_stencil("Syy", "Iyy", box));
  s.push_back(make_pointwise("det", ref("Sxx") * ref("Syy") - ref("Sxy") * ref("Sxy")));
  s.push_back(make_pointwise("trace", ref("Sxx") + ref("Syy")));
  s.push_back(make_pointwise("harris", ref("det") - c(1, 25) * (ref("trace") * ref("trace"))));
  return Pipeline("hcd", rows, cols, std::move(s));
}

Pipeline build_usm(int rows, int cols) {
  std::vector<Stage> s;
  s.push_back(image("img"));
  s.push_back(make_stencil("blurx", "img", kernel(1, 5, {1, 4, 6, 4, 1}, q(1, 16))));
  s.push_back(make_stencil("blury", "blurx", kernel(5, 1, {1, 4, 6, 4, 1}, q(1, 16))));
  s.push_back(make_pointwise("sharpen", c(2) * ref("img") - ref("blury")));
  // Flat regions keep the original pixel; edges take the sharpened value.
  s.push_back(make_pointwise(
      "mask", Expr::select(Expr::lt(Expr::abs(ref("img") - ref("blury")), c(51, 20)), ref("img"),
                           ref("sharpen"))));
  return Pipeline("usm", rows, cols, std::move(s));
}

Pipeline build_dus(int rows, int cols) {
  // The 4-tap down filter and 2-tap up filter are zero-padded to odd size.
  auto dx = kernel(1, 5, {1, 3, 3, 1, 0}, q(1, 8));
  dx.stride = {1, 2};
  auto dy = kernel(5, 1, {1, 3, 3, 1, 0}, q(1, 8));
  dy.stride = {2, 1};
  auto ux = kernel(1, 3, {1, 3, 0}, q(1, 4));
  ux.upsample = {1, 2};
  auto uy = kernel(3, 1, {1, 3, 0}, q(1, 4));
  uy.upsample = {2, 1};
  std::vector<Stage> s;
  s.push_back(image("img"));
  s.push_back(make_stencil("Dx", "img", dx));
  s.push_back(make_stencil("Dy", "Dx", dy));
  s.push_back(make_stencil("Ux", "Dy", ux));
  s.push_back(make_stencil("Uy", "Ux", uy));
  return Pipeline("dus", rows, cols, std::move(s));
}

Pipeline build_of(int iterations, int rows, int cols) {
  if (iterations < 0) throw std::invalid_argument("optical flow iteration count must be >= 0");
  auto cross = kernel(3, 3, {0, 1, 0, 1, 0, 1, 0, 1, 0}, q(1, 4));
  std::vector<Stage> s;
  s.push_back(image("img1"));
  s.push_back(image("img2"));
  s.push_back(make_pointwise("It", ref("img2") - ref("img1")));
  s.push_back(make_stencil("Ix", "img1", sobel_x()));
  s.push_back(make_stencil("Iy", "img1", sobel_y()));
  s.push_back(make_pointwise("Ixx", Expr::pow(ref("Ix"), 2)));
  s.push_back(make_pointwise("Iyy", Expr::pow(ref("Iy"), 2)));
  // Smoothness weight 2, squared.
  s.push_back(make_pointwise("denom", c(4) + ref("Ixx") + ref("Iyy")));
  s.push_back(make_pointwise("Common_x", ref("Ix") / ref("denom")));
  s.push_back(make_pointwise("Common_y", ref("Iy") / ref("denom")));
  s.push_back(make_pointwise("Vx0", -(ref("It") * ref("Common_x"))));
  s.push_back(make_pointwise("Vy0", -(ref("It") * ref("Common_y"))));
  for (int k = 0; k < iterations; ++k) {
    auto n = std::to_string(k);
    auto n1 = std::to_string(k + 1);
    s.push_back(make_stencil("Avx" + n, "Vx" + n, cross));
    s.push_back(make_stencil("Avy" + n, "Vy" + n, cross));
    Expr avx = Expr::ref("Avx" + n), avy = Expr::ref("Avy" + n), common = Expr::ref("Common" + n);
    s.push_back(make_pointwise("Common" + n, ref("Ix") * avx + ref("Iy") * avy + ref("It")));
    s.push_back(make_pointwise("Vx" + n1, avx - common * ref("Common_x")));
    s.push_back(make_pointwise("Vy" + n1, avy - common * ref("Common_y")));
  }
  return Pipeline("of", rows, cols, std::move(s));
}

std::vector<std::string> of_vx_chain(int iterations) {
  std::vector<std::string> out{"Vx0"};
  for (int k = 0; k < iterations; ++k) {
    auto n = std::to_string(k);
    out.push_back("Avx" + n);
    out.push_back("Common" + n);
    out.push_back("Vx" + std::to_string(k + 1));
  }
  return out;
}

}  // namespace bw
