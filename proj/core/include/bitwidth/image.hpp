#pragma once

// Grayscale images, per-stage value planes, and image I/O.

#include "bitwidth/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace bw {

/// Values of one stage over its domain, addressed in stage coordinates.
template <typename T>
struct Plane {
  Rect domain;
  std::vector<T> data;

  Plane() = default;
  explicit Plane(Rect d) : domain(d), data(static_cast<size_t>(d.rows()) * static_cast<size_t>(d.cols())) {}

  T& at(int i, int j) { return data[index(i, j)]; }
  const T& at(int i, int j) const { return data[index(i, j)]; }
  size_t size() const { return data.size(); }

 private:
  size_t index(int i, int j) const {
    return static_cast<size_t>(i - domain.r0) * static_cast<size_t>(domain.cols()) +
           static_cast<size_t>(j - domain.c0);
  }
};

struct Image {
  int rows = 0;
  int cols = 0;
  std::vector<int> pixels;  // row-major

  Image() = default;
  Image(int r, int c, int fill = 0)
      : rows(r), cols(c), pixels(static_cast<size_t>(r) * static_cast<size_t>(c), fill) {}
  int& at(int i, int j) { return pixels[static_cast<size_t>(i) * static_cast<size_t>(cols) + static_cast<size_t>(j)]; }
  int at(int i, int j) const { return pixels[static_cast<size_t>(i) * static_cast<size_t>(cols) + static_cast<size_t>(j)]; }
  friend bool operator==(const Image&, const Image&) = default;
};

/// One stimulus: an image per input stage, in declaration order.
struct ImageSample {
  std::string id;
  std::vector<Image> inputs;
};

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary (P5) or ASCII (P2) 8-bit PGM.
Image read_pgm(const std::filesystem::path& path);
Image parse_pgm(const std::string& bytes);
void write_pgm(const std::filesystem::path& path, const Image& img);
std::string format_pgm(const Image& img);
/// [[row0...], [row1...], ...]
Image parse_json_image(const std::string& text);
/// Every *.pgm file in `dir`, sorted by file name.
std::vector<std::filesystem::path> list_pgm(const std::filesystem::path& dir);

/// Reproducible textured image (value noise, several octaves) in [0, 255].
Image synthesize(int rows, int cols, std::uint64_t seed);
/// out(i, j) = in(i, j - dx), clamping at the border.
Image shift_horizontal(const Image& img, int dx);

/// Builds a sample for `p`: the image feeds every input stage except that a
/// second input gets a one-pixel horizontal shift of the first.
ImageSample make_sample(const Pipeline& p, const Image& img, std::string id);

}  // namespace bw
