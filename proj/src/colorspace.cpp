#include "chromawave/colorspace.hpp"

#include <algorithm>
#include <cmath>

namespace chromawave::colorspace {
namespace {

// Safdar et al. (2017) constants.
constexpr double kB = 1.15;
constexpr double kG = 0.66;
constexpr double kC1 = 3424.0 / 4096.0;
constexpr double kC2 = 2413.0 / 128.0;
constexpr double kC3 = 2392.0 / 128.0;
constexpr double kN = 2610.0 / 16384.0;
constexpr double kP = 1.7 * 2523.0 / 32.0;
constexpr double kD = -0.56;
constexpr double kD0 = 1.6295499532821566e-11;

// Absolute luminance of sRGB white, cd/m^2.
constexpr double kWhiteLuminance = 100.0;

struct LinearLut {
  std::array<double, 256> v{};
  LinearLut() {
    for (int i = 0; i < 256; ++i) {
      const double c = i / 255.0;
      v[i] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
    }
  }
};

const LinearLut& lut() {
  static const LinearLut table;
  return table;
}

double perceptual_quantizer(double x) {
  const double t = std::pow(std::max(x, 0.0) / 10000.0, kN);
  return std::pow((kC1 + kC2 * t) / (1.0 + kC3 * t), kP);
}

void require_nonempty(const SrgbImage& img) {
  if (img.empty()) throw Error(ErrorKind::degenerate_input, "empty raster");
}

}  // namespace

double srgb_to_linear(std::uint8_t code) noexcept { return lut().v[code]; }

std::array<double, 3> linear_rgb_to_xyz(double r, double g, double b) noexcept {
  return {0.4124564 * r + 0.3575761 * g + 0.1804375 * b,
          0.2126729 * r + 0.7151522 * g + 0.0721750 * b,
          0.0193339 * r + 0.1191920 * g + 0.9503041 * b};
}

JzazbzPixel rgb_to_jzazbz(SrgbPixel p) noexcept {
  auto [x, y, z] = linear_rgb_to_xyz(srgb_to_linear(p.r), srgb_to_linear(p.g), srgb_to_linear(p.b));
  x *= kWhiteLuminance;
  y *= kWhiteLuminance;
  z *= kWhiteLuminance;

  const double xp = kB * x - (kB - 1.0) * z;
  const double yp = kG * y - (kG - 1.0) * x;

  const double l = 0.41478972 * xp + 0.579999 * yp + 0.0146480 * z;
  const double m = -0.2015100 * xp + 1.120649 * yp + 0.0531008 * z;
  const double s = -0.0166008 * xp + 0.264800 * yp + 0.6684799 * z;

  const double lp = perceptual_quantizer(l);
  const double mp = perceptual_quantizer(m);
  const double sp = perceptual_quantizer(s);

  const double iz = 0.5 * lp + 0.5 * mp;
  JzazbzPixel out;
  out.az = 3.524000 * lp - 4.066708 * mp + 0.542708 * sp;
  out.bz = 0.199076 * lp + 1.096799 * mp - 1.295875 * sp;
  out.jz = (1.0 + kD) * iz / (1.0 + kD * iz) - kD0;
  return out;
}

double luminance(SrgbPixel p) noexcept {
  return 0.2126 * srgb_to_linear(p.r) + 0.7152 * srgb_to_linear(p.g) +
         0.0722 * srgb_to_linear(p.b);
}

Raster<JzazbzPixel> image_to_jzazbz(const SrgbImage& img) {
  require_nonempty(img);
  Raster<JzazbzPixel> out(img.width(), img.height());
  // Synthetic stimuli are long runs of one color; skip the PQ evaluation on repeats.
  SrgbPixel last = img.data().front();
  JzazbzPixel last_out = rgb_to_jzazbz(last);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const SrgbPixel p = img.data()[i];
    if (!(p == last)) {
      last = p;
      last_out = rgb_to_jzazbz(p);
    }
    out.data()[i] = last_out;
  }
  return out;
}

RealRaster to_grayscale(const SrgbImage& img) {
  require_nonempty(img);
  RealRaster out(img.width(), img.height());
  std::transform(img.data().begin(), img.data().end(), out.data().begin(),
                 [](SrgbPixel p) { return std::clamp(luminance(p), 0.0, 1.0); });
  return out;
}

}  // namespace chromawave::colorspace
