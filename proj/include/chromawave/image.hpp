#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "chromawave/error.hpp"

namespace chromawave {

/// Row-major 2D raster. Pixel (x, y) lives at data[y * width + x].
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {
    if (width < 0 || height < 0) throw Error(ErrorKind::invalid_argument, "negative raster size");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const T& at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

struct SrgbPixel {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const SrgbPixel&, const SrgbPixel&) = default;
};

struct JzazbzPixel {
  double jz = 0.0;
  double az = 0.0;
  double bz = 0.0;
};

using SrgbImage = Raster<SrgbPixel>;
using RealRaster = Raster<double>;

/// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct Rect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }
  bool empty() const noexcept { return x1 <= x0 || y1 <= y0; }
  bool contains(int x, int y) const noexcept { return x >= x0 && x < x1 && y >= y0 && y < y1; }

  friend bool operator==(const Rect&, const Rect&) = default;
};

enum class Source { block, stripe, colorgram, cifar10 };

const char* to_string(Source s) noexcept;
Source source_from_string(const std::string& s);

struct ImageRecord {
  std::string id;
  SrgbImage pixels;
  Rect central;  // region used by every color metric
  Source source = Source::colorgram;
};

/// "RRGGBB" upper-case hex.
std::string to_hex(SrgbPixel p);
SrgbPixel from_hex(const std::string& hex);

}  // namespace chromawave
