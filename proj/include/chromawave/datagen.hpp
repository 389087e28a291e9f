#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chromawave/image.hpp"

namespace chromawave::datagen {

/// Uniform grid of `levels` values per channel (6 -> the 216-color web-safe grid).
std::vector<SrgbPixel> palette(int levels);

struct BlockSpec {
  int size = 300;
  int border_width = 50;
  SrgbPixel border_color{255, 255, 255};
  int palette_levels = 6;
  std::uint64_t seed = 0;

  void validate() const;
  Rect central() const { return {border_width, border_width, size - border_width, size - border_width}; }
};

/// Stripes start with color A at the left edge of the central region. When
/// stripe_width does not divide the central width the last stripe is truncated.
struct StripeSpec {
  int size = 300;
  int border_width = 50;
  int stripe_width = 25;
  SrgbPixel border_color{255, 255, 255};
  int palette_levels = 6;
  std::uint64_t seed = 0;

  void validate() const;
  Rect central() const { return {border_width, border_width, size - border_width, size - border_width}; }
};

ImageRecord render_block(const std::string& id, SrgbPixel color, const BlockSpec& spec);
ImageRecord render_stripes(const std::string& id, SrgbPixel a, SrgbPixel b, const StripeSpec& spec);

std::vector<ImageRecord> gen_blocks(int n, const BlockSpec& spec);
std::vector<ImageRecord> gen_stripes(int n, const StripeSpec& spec);

/// Palette draws behind gen_stripes, exposed for sampling checks.
std::vector<std::pair<SrgbPixel, SrgbPixel>> stripe_color_pairs(int n, const StripeSpec& spec);

// ---- raster files -------------------------------------------------------

/// Decodes an 8-bit (or 16-bit, downshifted) PNG; gray is expanded and alpha dropped.
SrgbImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const SrgbImage& img);

SrgbImage resize_nearest(const SrgbImage& img, int width, int height);

struct LoadFailure {
  std::string id;
  std::string message;
};

struct LoadResult {
  std::vector<ImageRecord> records;
  std::vector<LoadFailure> failures;
};

/// Every *.png in `dir`, lexicographic by file name, id = file stem.
LoadResult load_image_dir(const std::filesystem::path& dir, Source source = Source::colorgram);

// ---- CIFAR-10 -----------------------------------------------------------

inline constexpr std::size_t kCifarSide = 32;
inline constexpr std::size_t kCifarRecordBytes = 1 + 3 * kCifarSide * kCifarSide;

struct CifarRecord {
  std::uint8_t label = 0;
  SrgbImage image;  // 32x32
};

std::vector<CifarRecord> parse_cifar10(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_cifar10(std::span<const CifarRecord> records);

/// Reads one batch file and upscales each image to resize_to x resize_to.
std::vector<ImageRecord> load_cifar10(const std::filesystem::path& path, int resize_to = 300);

// ---- manifest -----------------------------------------------------------

struct ManifestEntry {
  std::string id;
  Source source = Source::colorgram;
  int width = 0;
  int height = 0;
  Rect mask;
  std::string path;  // relative to the manifest's directory

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// Writes <dir>/images/<id>.png for every record plus <dir>/manifest.jsonl.
std::vector<ManifestEntry> export_dataset(const std::filesystem::path& dir,
                                          std::span<const ImageRecord> records);

/// Loads the images a manifest points at.
std::vector<ImageRecord> load_dataset(const std::filesystem::path& manifest_path);

}  // namespace chromawave::datagen
