#include "bitwidth/image.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace bw {
namespace {

// Skips whitespace and '#' comments in a PGM header.
void skip_space(const std::string& s, size_t& pos) {
  while (pos < s.size()) {
    if (s[pos] == '#') {
      while (pos < s.size() && s[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(s[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
}

int read_int(const std::string& s, size_t& pos) {
  skip_space(s, pos);
  size_t start = pos;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
  if (start == pos) throw ImageError("malformed PGM: expected an integer");
  return std::stoi(s.substr(start, pos - start));
}

}  // namespace

Image parse_pgm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    throw ImageError("not a P2/P5 PGM file");
  bool binary = bytes[1] == '5';
  size_t pos = 2;
  int cols = read_int(bytes, pos);
  int rows = read_int(bytes, pos);
  int maxval = read_int(bytes, pos);
  if (rows <= 0 || cols <= 0) throw ImageError("PGM dimensions must be positive");
  if (maxval <= 0 || maxval > 255) throw ImageError("only 8-bit PGM images are supported");
  Image img(rows, cols);
  if (binary) {
    ++pos;  // single whitespace byte after maxval
    if (bytes.size() < pos + img.pixels.size()) throw ImageError("truncated PGM pixel data");
    for (size_t k = 0; k < img.pixels.size(); ++k)
      img.pixels[k] = static_cast<unsigned char>(bytes[pos + k]);
  } else {
    for (auto& px : img.pixels) px = read_int(bytes, pos);
  }
  for (int px : img.pixels)
    if (px > maxval) throw ImageError("PGM pixel exceeds maxval");
  return img;
}

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_pgm(ss.str());
  } catch (const ImageError& e) {
    throw ImageError(path.string() + ": " + e.what());
  }
}

std::string format_pgm(const Image& img) {
  std::string out = "P5\n" + std::to_string(img.cols) + " " + std::to_string(img.rows) + "\n255\n";
  for (int px : img.pixels) out += static_cast<char>(static_cast<unsigned char>(std::clamp(px, 0, 255)));
  return out;
}

void write_pgm(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageError("cannot write " + path.string());
  out << format_pgm(img);
}

Image parse_json_image(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ImageError(std::string("malformed JSON image: ") + e.what());
  }
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
    throw ImageError("JSON image must be a non-empty array of rows");
  Image img(static_cast<int>(j.size()), static_cast<int>(j[0].size()));
  for (int i = 0; i < img.rows; ++i) {
    const auto& row = j[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != img.cols)
      throw ImageError("JSON image rows must have equal length");
    for (int c = 0; c < img.cols; ++c) {
      if (!row[static_cast<size_t>(c)].is_number_integer())
        throw ImageError("JSON image pixels must be integers");
      img.at(i, c) = row[static_cast<size_t>(c)].get<int>();
    }
  }
  return img;
}

std::vector<std::filesystem::path> list_pgm(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) throw ImageError("not a directory: " + dir.string());
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".pgm") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

Image synthesize(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> acc(static_cast<size_t>(rows) * static_cast<size_t>(cols), 0.0);
  double amplitude = 1.0;
  for (int cell = 8; cell >= 1; cell /= 2) {
    int gr = rows / cell + 2, gc = cols / cell + 2;
    std::vector<double> lattice(static_cast<size_t>(gr) * static_cast<size_t>(gc));
    for (auto& v : lattice) v = unit(rng);
    auto g = [&](int a, int b) { return lattice[static_cast<size_t>(a) * static_cast<size_t>(gc) + static_cast<size_t>(b)]; };
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        double y = static_cast<double>(i) / cell, x = static_cast<double>(j) / cell;
        int y0 = static_cast<int>(y), x0 = static_cast<int>(x);
        double ty = y - y0, tx = x - x0;
        // Smoothstep keeps the lattice seams invisible.
        ty = ty * ty * (3 - 2 * ty);
        tx = tx * tx * (3 - 2 * tx);
        double top = g(y0, x0) * (1 - tx) + g(y0, x0 + 1) * tx;
        double bot = g(y0 + 1, x0) * (1 - tx) + g(y0 + 1, x0 + 1) * tx;
        acc[static_cast<size_t>(i) * static_cast<size_t>(cols) + static_cast<size_t>(j)] +=
            amplitude * (top * (1 - ty) + bot * ty);
      }
    }
    amplitude *= 0.85;
  }
  // Stretch to the full 8-bit range.
  auto [mn, mx] = std::minmax_element(acc.begin(), acc.end());
  double lo = *mn, span = std::max(*mx - *mn, 1e-12);
  Image img(rows, cols);
  for (size_t k = 0; k < acc.size(); ++k)
    img.pixels[k] = std::clamp(static_cast<int>(std::lround(255.0 * (acc[k] - lo) / span)), 0, 255);
  return img;
}

Image shift_horizontal(const Image& img, int dx) {
  Image out(img.rows, img.cols);
  for (int i = 0; i < img.rows; ++i)
    for (int j = 0; j < img.cols; ++j) out.at(i, j) = img.at(i, std::clamp(j - dx, 0, img.cols - 1));
  return out;
}

ImageSample make_sample(const Pipeline& p, const Image& img, std::string id) {
  ImageSample s{std::move(id), {}};
  auto inputs = p.inputs();
  for (size_t k = 0; k < inputs.size(); ++k)
    s.inputs.push_back(k == 0 ? img : shift_horizontal(img, static_cast<int>(k)));
  return s;
}

}  // namespace bw
