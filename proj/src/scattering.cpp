#include "chromawave/scattering.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <unordered_map>

#include "chromawave/colorspace.hpp"
#include "chromawave/parallel.hpp"

namespace chromawave::scattering {
namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftwBuffer {
 public:
  explicit FftwBuffer(std::size_t n) : n_(n), data_(fftw_alloc_complex(n)) {
    if (!data_) throw std::bad_alloc();
  }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  ~FftwBuffer() { fftw_free(data_); }

  fftw_complex* get() noexcept { return data_; }
  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_;
  fftw_complex* data_;
};

// Periodized 2D Gabor (xi > 0) or Gaussian envelope (xi = 0) sampled on the
// raster grid, origin at pixel (0, 0).
std::vector<std::complex<double>> periodized_gabor(int width, int height, double sigma, double theta,
                                                   double xi, double slant) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double sl2 = slant * slant;
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const double qa = (c * c + s * s * sl2) * inv;
  const double qb = c * s * (1.0 - sl2) * inv;
  const double qd = (s * s + c * c * sl2) * inv;
  // exp(-q) underflows to zero well before this.
  constexpr double kCutoff = 760.0;

  std::vector<std::complex<double>> out(static_cast<std::size_t>(width) * height);
  for (int row = 0; row < height; ++row) {
    const int y0 = row <= height / 2 ? row : row - height;
    for (int col = 0; col < width; ++col) {
      const int x0 = col <= width / 2 ? col : col - width;
      std::complex<double> acc = 0.0;
      for (int ey = -2; ey <= 2; ++ey) {
        const double y = y0 + static_cast<double>(ey) * height;
        for (int ex = -2; ex <= 2; ++ex) {
          const double x = x0 + static_cast<double>(ex) * width;
          const double q = qa * x * x + 2.0 * qb * x * y + qd * y * y;
          if (q > kCutoff) continue;
          const double phase = xi * (x * c + y * s);
          acc += std::exp(-q) * std::complex<double>(std::cos(phase), std::sin(phase));
        }
      }
      out[static_cast<std::size_t>(row) * width + col] = acc;
    }
  }
  return out;
}

std::vector<double> real_spectrum(std::vector<std::complex<double>> spatial, int width, int height) {
  const std::size_t n = spatial.size();
  FftwBuffer in(n), out(n);
  for (std::size_t i = 0; i < n; ++i) {
    in.get()[i][0] = spatial[i].real();
    in.get()[i][1] = spatial[i].imag();
  }
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_2d(height, width, in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  // The filters are Hermitian in space, so the transform is real up to rounding.
  std::vector<double> re(n);
  for (std::size_t i = 0; i < n; ++i) re[i] = out.get()[i][0];
  return re;
}

double mean_modulus(const fftw_complex* z, std::size_t n, double scale) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::sqrt(z[i][0] * z[i][0] + z[i][1] * z[i][1]);
  return acc * scale / static_cast<double>(n);
}

void multiply(const fftw_complex* spectrum, std::span<const double> filter, fftw_complex* out) {
  const std::size_t n = filter.size();
  for (std::size_t i = 0; i < n; ++i) {
    out[i][0] = spectrum[i][0] * filter[i];
    out[i][1] = spectrum[i][1] * filter[i];
  }
}

}  // namespace

struct FilterBank::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  Plans(int width, int height) {
    const std::size_t n = static_cast<std::size_t>(width) * height;
    FftwBuffer a(n), b(n);
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_2d(height, width, a.get(), b.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft_2d(height, width, a.get(), b.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
};

FilterBank::FilterBank(int width, int height, int J, int L) : width_(width), height_(height), J_(J), L_(L) {
  if (J < 1 || L < 1) throw Error(ErrorKind::invalid_argument, "J and L must be >= 1");
  const int min_side = 1 << J;
  if (width < min_side || height < min_side) {
    throw Error(ErrorKind::invalid_argument, "raster " + std::to_string(width) + "x" + std::to_string(height) +
                                                 " is smaller than the largest filter scale 2^J = " +
                                                 std::to_string(min_side));
  }

  psi_.reserve(static_cast<std::size_t>(J) * L);
  for (int j = 0; j < J; ++j) {
    for (int l = 0; l < L; ++l) {
      auto wave = periodized_gabor(width, height, sigma(j), theta(l), center_frequency(j), slant());
      const auto envelope = periodized_gabor(width, height, sigma(j), theta(l), 0.0, slant());
      std::complex<double> wave_sum = 0.0, env_sum = 0.0;
      for (std::size_t i = 0; i < wave.size(); ++i) {
        wave_sum += wave[i];
        env_sum += envelope[i];
      }
      const std::complex<double> k = wave_sum / env_sum;
      for (std::size_t i = 0; i < wave.size(); ++i) wave[i] -= k * envelope[i];

      auto spectrum = real_spectrum(std::move(wave), width, height);
      spectrum[0] = 0.0;
      double peak = 0.0;
      for (double v : spectrum) peak = std::max(peak, std::abs(v));
      for (double& v : spectrum) v /= peak;
      psi_.push_back(std::move(spectrum));
    }
  }

  phi_ = real_spectrum(periodized_gabor(width, height, lowpass_sigma(), 0.0, 0.0, 1.0), width, height);
  const double dc = phi_[0];
  for (double& v : phi_) v /= dc;

  plans_ = std::make_shared<const Plans>(width, height);
}

double FilterBank::sigma(int j) const noexcept { return 0.8 * std::ldexp(1.0, j); }
double FilterBank::center_frequency(int j) const noexcept { return 0.75 * std::numbers::pi / std::ldexp(1.0, j); }
double FilterBank::theta(int l) const noexcept { return l * std::numbers::pi / L_; }
double FilterBank::slant() const noexcept { return 4.0 / L_; }

std::span<const double> FilterBank::psi(int j, int l) const {
  return psi_.at(static_cast<std::size_t>(j) * L_ + l);
}

std::vector<double> ScatteringCoeffs::flatten() const {
  std::vector<double> out;
  out.reserve(1 + s1.size() + s2.size());
  out.push_back(s0);
  out.insert(out.end(), s1.begin(), s1.end());
  out.insert(out.end(), s2.begin(), s2.end());
  return out;
}

std::size_t raw_path_count(int J, int L) noexcept {
  return 1 + static_cast<std::size_t>(J) * L + static_cast<std::size_t>(L) * L * J * (J - 1) / 2;
}

std::size_t second_order_index(int j1, int j2, int J) noexcept {
  // Pairs before row j1: sum_{a<j1} (J-1-a).
  const std::size_t before = static_cast<std::size_t>(j1) * (2 * J - j1 - 1) / 2;
  return before + static_cast<std::size_t>(j2 - j1 - 1);
}

namespace {

struct RawPaths {
  double s0 = 0.0;
  std::vector<std::vector<double>> first;                 // [j][l]
  std::vector<double> second;                             // [pair] summed over (l1, l2)
};

RawPaths scatter_paths(const RealRaster& channel, const FilterBank& bank, bool with_second_order) {
  if (channel.width() != bank.width() || channel.height() != bank.height()) {
    throw Error(ErrorKind::dimension_mismatch,
                "raster " + std::to_string(channel.width()) + "x" + std::to_string(channel.height()) +
                    " does not match filter bank " + std::to_string(bank.width()) + "x" +
                    std::to_string(bank.height()));
  }
  const int J = bank.scales();
  const int L = bank.orientations();
  const std::size_t n = bank.pixel_count();
  const double inv_n = 1.0 / static_cast<double>(n);
  // Global mean of (u * phi) equals mean(u) * phi_hat(0).
  const double phi_dc = bank.phi()[0];
  const auto& plans = bank.plans();

  FftwBuffer x_hat(n), u_hat(n), a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.get()[i][0] = channel.data()[i];
    a.get()[i][1] = 0.0;
  }
  fftw_execute_dft(plans.forward, a.get(), x_hat.get());

  RawPaths out;
  out.s0 = x_hat.get()[0][0] * inv_n * phi_dc;
  out.first.assign(J, std::vector<double>(L, 0.0));
  out.second.assign(static_cast<std::size_t>(J) * (J - 1) / 2, 0.0);

  for (int j1 = 0; j1 < J; ++j1) {
    for (int l1 = 0; l1 < L; ++l1) {
      multiply(x_hat.get(), bank.psi(j1, l1), a.get());
      fftw_execute_dft(plans.backward, a.get(), b.get());
      out.first[j1][l1] = mean_modulus(b.get(), n, inv_n) * phi_dc;

      if (!with_second_order || j1 + 1 >= J) continue;
      for (std::size_t i = 0; i < n; ++i) {
        const double re = b.get()[i][0], im = b.get()[i][1];
        a.get()[i][0] = std::sqrt(re * re + im * im) * inv_n;
        a.get()[i][1] = 0.0;
      }
      fftw_execute_dft(plans.forward, a.get(), u_hat.get());
      for (int j2 = j1 + 1; j2 < J; ++j2) {
        double acc = 0.0;
        for (int l2 = 0; l2 < L; ++l2) {
          multiply(u_hat.get(), bank.psi(j2, l2), a.get());
          fftw_execute_dft(plans.backward, a.get(), b.get());
          acc += mean_modulus(b.get(), n, inv_n) * phi_dc;
        }
        out.second[second_order_index(j1, j2, J)] += acc;
      }
    }
  }
  return out;
}

}  // namespace

ScatteringCoeffs scatter_channel(const RealRaster& channel, const FilterBank& bank) {
  const RawPaths raw = scatter_paths(channel, bank, true);
  const int J = bank.scales();
  const double L = bank.orientations();
  ScatteringCoeffs c;
  c.s0 = raw.s0;
  c.s1.resize(J);
  for (int j = 0; j < J; ++j) {
    double acc = 0.0;
    for (double v : raw.first[j]) acc += v;
    c.s1[j] = acc / L;
  }
  c.s2 = raw.second;
  for (double& v : c.s2) v /= L * L;
  return c;
}

std::vector<std::vector<double>> first_order_responses(const RealRaster& channel, const FilterBank& bank) {
  return scatter_paths(channel, bank, false).first;
}

const char* to_string(ColorMode m) noexcept {
  switch (m) {
    case ColorMode::jzazbz: return "jzazbz";
    case ColorMode::rgb: return "rgb";
    case ColorMode::rgb_linear: return "rgb-linear";
    case ColorMode::grayscale: return "grayscale";
  }
  return "unknown";
}

ColorMode color_mode_from_string(const std::string& s) {
  if (s == "jzazbz") return ColorMode::jzazbz;
  if (s == "rgb") return ColorMode::rgb;
  if (s == "rgb-linear") return ColorMode::rgb_linear;
  if (s == "grayscale" || s == "gray") return ColorMode::grayscale;
  throw Error(ErrorKind::invalid_argument, "unknown color mode '" + s + "'");
}

int channel_count(ColorMode m) noexcept { return m == ColorMode::grayscale ? 1 : 3; }

std::vector<RealRaster> channels(const SrgbImage& img, ColorMode mode) {
  if (img.empty()) throw Error(ErrorKind::degenerate_input, "empty raster");
  const int w = img.width(), h = img.height();
  switch (mode) {
    case ColorMode::grayscale: return {colorspace::to_grayscale(img)};
    case ColorMode::jzazbz: {
      const auto jab = colorspace::image_to_jzazbz(img);
      std::vector<RealRaster> out(3, RealRaster(w, h));
      for (std::size_t i = 0; i < img.size(); ++i) {
        out[0].data()[i] = jab.data()[i].jz;
        out[1].data()[i] = jab.data()[i].az;
        out[2].data()[i] = jab.data()[i].bz;
      }
      return out;
    }
    case ColorMode::rgb:
    case ColorMode::rgb_linear: {
      const bool linear = mode == ColorMode::rgb_linear;
      auto value = [linear](std::uint8_t c) { return linear ? colorspace::srgb_to_linear(c) : c / 255.0; };
      std::vector<RealRaster> out(3, RealRaster(w, h));
      for (std::size_t i = 0; i < img.size(); ++i) {
        const SrgbPixel p = img.data()[i];
        out[0].data()[i] = value(p.r);
        out[1].data()[i] = value(p.g);
        out[2].data()[i] = value(p.b);
      }
      return out;
    }
  }
  throw Error(ErrorKind::invalid_argument, "unknown color mode");
}

Embedding embed(const ImageRecord& img, ColorMode mode, const FilterBank& bank) {
  Embedding e;
  e.image_id = img.id;
  e.algorithm = "wavelet";
  e.tag = to_string(mode);
  for (const auto& ch : channels(img.pixels, mode)) {
    const auto coeffs = scatter_channel(ch, bank).flatten();
    e.vector.insert(e.vector.end(), coeffs.begin(), coeffs.end());
  }
  return e;
}

std::shared_ptr<const FilterBank> FilterBankCache::get(int width, int height) {
  std::lock_guard lock(mutex_);
  auto& slot = banks_[{width, height}];
  if (!slot) slot = std::make_shared<const FilterBank>(width, height, J_, L_);
  return slot;
}

namespace {

struct PixelKey {
  int width;
  int height;
  const std::vector<SrgbPixel>* data;

  bool operator==(const PixelKey& o) const { return width == o.width && height == o.height && *data == *o.data; }
};

struct PixelKeyHash {
  std::size_t operator()(const PixelKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    auto mix = [&h](std::uint8_t v) {
      h ^= v;
      h *= 1099511628211ULL;
    };
    for (const auto& p : *k.data) {
      mix(p.r);
      mix(p.g);
      mix(p.b);
    }
    return static_cast<std::size_t>(h ^ (static_cast<std::uint64_t>(k.width) << 32) ^ k.height);
  }
};

}  // namespace

std::vector<Embedding> embed_all(std::span<const ImageRecord> images, ColorMode mode, int J, int L,
                                 unsigned threads) {
  // Group byte-identical rasters (block datasets repeat palette colors).
  std::unordered_map<PixelKey, std::size_t, PixelKeyHash> first_seen;
  std::vector<std::size_t> representative(images.size());
  std::vector<std::size_t> unique;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const PixelKey key{images[i].pixels.width(), images[i].pixels.height(), &images[i].pixels.data()};
    auto [it, inserted] = first_seen.emplace(key, unique.size());
    if (inserted) unique.push_back(i);
    representative[i] = it->second;
  }

  FilterBankCache banks(J, L);
  std::vector<std::vector<double>> vectors(unique.size());
  parallel_for(unique.size(), threads, [&](std::size_t u) {
    const auto& img = images[unique[u]];
    const auto bank = banks.get(img.pixels.width(), img.pixels.height());
    vectors[u] = embed(img, mode, *bank).vector;
  });

  std::vector<Embedding> out(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    out[i].image_id = images[i].id;
    out[i].algorithm = "wavelet";
    out[i].tag = to_string(mode);
    out[i].vector = vectors[representative[i]];
  }
  return out;
}

ImageRecord shuffle_pixels(const ImageRecord& img, ShuffleScope scope, std::uint64_t seed) {
  ImageRecord out = img;
  const Rect c = img.central;
  if (c.empty()) return out;
  std::mt19937_64 rng(seed);
  if (scope == ShuffleScope::global) {
    std::vector<SrgbPixel> pool;
    pool.reserve(static_cast<std::size_t>(c.width()) * c.height());
    for (int y = c.y0; y < c.y1; ++y)
      for (int x = c.x0; x < c.x1; ++x) pool.push_back(img.pixels.at(x, y));
    std::shuffle(pool.begin(), pool.end(), rng);
    std::size_t k = 0;
    for (int y = c.y0; y < c.y1; ++y)
      for (int x = c.x0; x < c.x1; ++x) out.pixels.at(x, y) = pool[k++];
  } else {
    std::vector<SrgbPixel> column(c.height());
    for (int x = c.x0; x < c.x1; ++x) {
      for (int y = c.y0; y < c.y1; ++y) column[y - c.y0] = img.pixels.at(x, y);
      std::shuffle(column.begin(), column.end(), rng);
      for (int y = c.y0; y < c.y1; ++y) out.pixels.at(x, y) = column[y - c.y0];
    }
  }
  return out;
}

}  // namespace chromawave::scattering
