#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "chromawave/embedding.hpp"
#include "chromawave/image.hpp"

namespace chromawave::scattering {

/// Frequency-domain Morlet filter bank for circular convolution on a fixed
/// raster size.
///
/// Scale index j runs 0..J-1 (scale 2^j): Gaussian width sigma_j = 0.8 * 2^j,
/// center frequency xi_j = (3 pi / 4) / 2^j, envelope slant 4 / L. Orientation
/// index l runs 0..L-1 with wave-vector angle theta_l = l * pi / L measured
/// from the column (x) axis toward the row (y) axis, so theta_0 responds to
/// vertical stripes. Band-pass responses are real, have an exactly zero DC
/// bin and unit peak magnitude; the low-pass has unit DC gain.
///
/// Immutable after construction and safe to share between threads.
class FilterBank {
 public:
  FilterBank(int width, int height, int J = 5, int L = 4);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int scales() const noexcept { return J_; }
  int orientations() const noexcept { return L_; }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }

  double sigma(int j) const noexcept;
  double center_frequency(int j) const noexcept;
  double theta(int l) const noexcept;
  double slant() const noexcept;
  double lowpass_sigma() const noexcept { return sigma(J_ - 1); }

  /// Frequency response of psi_{j,l}; bin (kx, ky) at index ky * width + kx.
  std::span<const double> psi(int j, int l) const;
  std::span<const double> phi() const { return phi_; }

  struct Plans;
  const Plans& plans() const noexcept { return *plans_; }

 private:
  int width_;
  int height_;
  int J_;
  int L_;
  std::vector<std::vector<double>> psi_;  // [j * L + l]
  std::vector<double> phi_;
  std::shared_ptr<const Plans> plans_;
};

/// Orientation-averaged coefficients of one channel.
struct ScatteringCoeffs {
  double s0 = 0.0;
  std::vector<double> s1;  // J values
  std::vector<double> s2;  // J(J-1)/2 values, (j1, j2) with j1 < j2 in lexicographic order

  /// s0, s1..., s2... ; 1 + J + J(J-1)/2 values.
  std::vector<double> flatten() const;
  static std::size_t count(int J) noexcept { return 1 + J + J * (J - 1) / 2; }
};

/// Number of scattering paths before orientation averaging: 1 + JL + L^2 J(J-1)/2.
std::size_t raw_path_count(int J, int L) noexcept;

/// Index of (j1, j2), j1 < j2, inside ScatteringCoeffs::s2.
std::size_t second_order_index(int j1, int j2, int J) noexcept;

ScatteringCoeffs scatter_channel(const RealRaster& channel, const FilterBank& bank);

/// Spatial mean of |x * psi_{j,l}| * phi before orientation averaging, [j][l].
std::vector<std::vector<double>> first_order_responses(const RealRaster& channel, const FilterBank& bank);

/// rgb scatters sRGB code values scaled to [0, 1]; rgb_linear decodes them first.
enum class ColorMode { jzazbz, rgb, rgb_linear, grayscale };

const char* to_string(ColorMode m) noexcept;
ColorMode color_mode_from_string(const std::string& s);
int channel_count(ColorMode m) noexcept;

/// Real-valued channels fed to the transform: Jz/Az/Bz, R/G/B, or luminance.
std::vector<RealRaster> channels(const SrgbImage& img, ColorMode mode);

Embedding embed(const ImageRecord& img, ColorMode mode, const FilterBank& bank);

/// Builds one bank per distinct raster size on demand; thread-safe.
class FilterBankCache {
 public:
  FilterBankCache(int J = 5, int L = 4) : J_(J), L_(L) {}
  std::shared_ptr<const FilterBank> get(int width, int height);

 private:
  int J_;
  int L_;
  std::mutex mutex_;
  std::map<std::pair<int, int>, std::shared_ptr<const FilterBank>> banks_;
};

/// Embeds a dataset with a worker pool; output order follows input order.
/// Byte-identical images are scattered once.
std::vector<Embedding> embed_all(std::span<const ImageRecord> images, ColorMode mode, int J = 5, int L = 4,
                                 unsigned threads = 1);

enum class ShuffleScope { global, per_column };

/// Permutes the central-region pixels uniformly at random, either across the
/// whole region or within each column; the border is untouched.
ImageRecord shuffle_pixels(const ImageRecord& img, ShuffleScope scope, std::uint64_t seed);

}  // namespace chromawave::scattering
