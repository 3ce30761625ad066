#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "eaten/errors.hpp"
#include "eaten/tensor.hpp"

namespace eaten {

// Grayscale image, row-major, values in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> px;

  Image() = default;
  Image(int w, int h, double fill = 0.0)
      : width(w), height(h), px(static_cast<size_t>(w) * h, fill) {}

  double& at(int x, int y) { return px[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const { return px[static_cast<size_t>(y) * width + x]; }

  bool inside(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

  TensorPtr to_tensor() const {
    auto t = make_tensor({height, width, 1});
    t->data = px;
    return t;
  }
};

// On-disk raster format "EIG1": 4 magic bytes, then width and height as
// little-endian uint32, then width*height bytes of row-major 8-bit gray
// (pixel byte = round(value * 255)).
inline std::vector<unsigned char> image_to_bytes(const Image& img) {
  std::vector<unsigned char> out;
  out.reserve(12 + img.px.size());
  out.insert(out.end(), {'E', 'I', 'G', '1'});
  auto put_u32 = [&out](uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
  };
  put_u32(static_cast<uint32_t>(img.width));
  put_u32(static_cast<uint32_t>(img.height));
  for (double v : img.px) {
    const double c = std::clamp(v, 0.0, 1.0);
    out.push_back(static_cast<unsigned char>(std::lround(c * 255.0)));
  }
  return out;
}

inline Image image_from_bytes(const std::vector<unsigned char>& bytes, const std::string& what) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "EIG1", 4) != 0)
    throw IoError("not an EIG1 image: " + what);
  auto get_u32 = [&bytes](size_t off) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(bytes[off + i]) << (8 * i);
    return v;
  };
  const uint32_t w = get_u32(4), h = get_u32(8);
  if (bytes.size() != 12 + static_cast<size_t>(w) * h)
    throw IoError("truncated EIG1 image: " + what);
  Image img(static_cast<int>(w), static_cast<int>(h));
  for (size_t i = 0; i < img.px.size(); ++i) img.px[i] = bytes[12 + i] / 255.0;
  return img;
}

inline void write_image(const std::string& path, const Image& img) {
  const auto bytes = image_to_bytes(img);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed: " + path);
}

inline Image read_image(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  return image_from_bytes(bytes, path);
}

}  // namespace eaten
