#pragma once

#include <array>

#include "chromawave/image.hpp"

namespace chromawave::colorspace {

/// sRGB electro-optical transfer function, 8-bit code -> linear intensity in [0, 1].
double srgb_to_linear(std::uint8_t code) noexcept;

/// Linear sRGB (D65) -> CIE XYZ with Y = 1 for reference white.
std::array<double, 3> linear_rgb_to_xyz(double r, double g, double b) noexcept;

/// sRGB -> JzAzBz (Safdar et al. 2017), reference white at 100 cd/m^2.
JzazbzPixel rgb_to_jzazbz(SrgbPixel p) noexcept;

/// Relative luminance from linear RGB, Rec. 709 weights.
double luminance(SrgbPixel p) noexcept;

Raster<JzazbzPixel> image_to_jzazbz(const SrgbImage& img);
RealRaster to_grayscale(const SrgbImage& img);

/// Per-axis extent of the sRGB cube in JzAzBz, from a full 256^3 scan.
/// tests/unit/test_colorspace.cpp re-derives these.
struct GamutRange {
  double min;
  double max;
  double midpoint() const noexcept { return 0.5 * (min + max); }
};

inline constexpr GamutRange kJzRange{0.0, 0.1671735529864959};
inline constexpr GamutRange kAzRange{-0.09286167571571322, 0.10900425466836208};
inline constexpr GamutRange kBzRange{-0.15632011039989122, 0.11522917352709072};

}  // namespace chromawave::colorspace
