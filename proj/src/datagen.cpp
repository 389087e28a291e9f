#include "chromawave/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <random>

namespace chromawave::datagen {
namespace {

namespace fs = std::filesystem;

std::string indexed_id(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%05d", prefix, i);
  return buf;
}

void validate_common(int size, int border_width, int palette_levels) {
  if (size <= 0) throw Error(ErrorKind::invalid_argument, "image size must be positive");
  if (border_width < 0 || 2 * border_width >= size) {
    throw Error(ErrorKind::invalid_argument, "border_width must satisfy 0 <= border_width < size/2");
  }
  if (palette_levels < 2 || palette_levels > 256) {
    throw Error(ErrorKind::invalid_argument, "palette_levels must lie in [2, 256]");
  }
}

SrgbImage bordered_canvas(int size, SrgbPixel border) { return SrgbImage(size, size, border); }

}  // namespace

std::vector<SrgbPixel> palette(int levels) {
  if (levels < 2 || levels > 256) throw Error(ErrorKind::invalid_argument, "palette levels out of range");
  std::vector<std::uint8_t> ramp(levels);
  for (int i = 0; i < levels; ++i) {
    ramp[i] = static_cast<std::uint8_t>(std::lround(255.0 * i / (levels - 1)));
  }
  std::vector<SrgbPixel> out;
  out.reserve(static_cast<std::size_t>(levels) * levels * levels);
  for (auto r : ramp)
    for (auto g : ramp)
      for (auto b : ramp) out.push_back({r, g, b});
  return out;
}

void BlockSpec::validate() const { validate_common(size, border_width, palette_levels); }

void StripeSpec::validate() const {
  validate_common(size, border_width, palette_levels);
  if (stripe_width < 1) throw Error(ErrorKind::invalid_argument, "stripe_width must be >= 1");
}

ImageRecord render_block(const std::string& id, SrgbPixel color, const BlockSpec& spec) {
  spec.validate();
  ImageRecord rec{id, bordered_canvas(spec.size, spec.border_color), spec.central(), Source::block};
  const Rect c = rec.central;
  for (int y = c.y0; y < c.y1; ++y)
    for (int x = c.x0; x < c.x1; ++x) rec.pixels.at(x, y) = color;
  return rec;
}

ImageRecord render_stripes(const std::string& id, SrgbPixel a, SrgbPixel b, const StripeSpec& spec) {
  spec.validate();
  ImageRecord rec{id, bordered_canvas(spec.size, spec.border_color), spec.central(), Source::stripe};
  const Rect c = rec.central;
  for (int y = c.y0; y < c.y1; ++y)
    for (int x = c.x0; x < c.x1; ++x) {
      const bool first = ((x - c.x0) / spec.stripe_width) % 2 == 0;
      rec.pixels.at(x, y) = first ? a : b;
    }
  return rec;
}

std::vector<ImageRecord> gen_blocks(int n, const BlockSpec& spec) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
  spec.validate();
  const auto colors = palette(spec.palette_levels);
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick(0, colors.size() - 1);
  std::vector<ImageRecord> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(render_block(indexed_id("block", i), colors[pick(rng)], spec));
  return out;
}

std::vector<std::pair<SrgbPixel, SrgbPixel>> stripe_color_pairs(int n, const StripeSpec& spec) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
  spec.validate();
  const auto colors = palette(spec.palette_levels);
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick(0, colors.size() - 1);
  std::vector<std::pair<SrgbPixel, SrgbPixel>> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const auto a = colors[pick(rng)];
    const auto b = colors[pick(rng)];
    out.emplace_back(a, b);
  }
  return out;
}

std::vector<ImageRecord> gen_stripes(int n, const StripeSpec& spec) {
  const auto pairs = stripe_color_pairs(n, spec);
  std::vector<ImageRecord> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    out.push_back(render_stripes(indexed_id("stripe", i), pairs[i].first, pairs[i].second, spec));
  }
  return out;
}

SrgbImage resize_nearest(const SrgbImage& img, int width, int height) {
  if (img.empty()) throw Error(ErrorKind::degenerate_input, "empty raster");
  if (width < 1 || height < 1) throw Error(ErrorKind::invalid_argument, "target size must be positive");
  SrgbImage out(width, height);
  for (int y = 0; y < height; ++y) {
    const int sy = static_cast<int>(static_cast<long long>(y) * img.height() / height);
    for (int x = 0; x < width; ++x) {
      const int sx = static_cast<int>(static_cast<long long>(x) * img.width() / width);
      out.at(x, y) = img.at(sx, sy);
    }
  }
  return out;
}

LoadResult load_image_dir(const fs::path& dir, Source source) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::io, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") files.push_back(entry.path());
  }
  if (files.empty()) throw Error(ErrorKind::degenerate_input, "no PNG files in " + dir.string());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

  LoadResult result;
  for (const auto& f : files) {
    const std::string id = f.stem().string();
    try {
      SrgbImage img = read_png(f);
      const Rect full{0, 0, img.width(), img.height()};
      result.records.push_back({id, std::move(img), full, source});
    } catch (const Error& e) {
      result.failures.push_back({id, e.what()});
    }
  }
  return result;
}

std::vector<CifarRecord> parse_cifar10(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % kCifarRecordBytes != 0) {
    throw Error(ErrorKind::format, "CIFAR-10 batch length " + std::to_string(bytes.size()) +
                                       " is not a multiple of " + std::to_string(kCifarRecordBytes));
  }
  constexpr std::size_t plane = kCifarSide * kCifarSide;
  std::vector<CifarRecord> out(bytes.size() / kCifarRecordBytes);
  for (std::size_t r = 0; r < out.size(); ++r) {
    const std::uint8_t* rec = bytes.data() + r * kCifarRecordBytes;
    out[r].label = rec[0];
    out[r].image = SrgbImage(kCifarSide, kCifarSide);
    auto& px = out[r].image.data();
    for (std::size_t i = 0; i < plane; ++i) {
      px[i] = {rec[1 + i], rec[1 + plane + i], rec[1 + 2 * plane + i]};
    }
  }
  return out;
}

std::vector<std::uint8_t> serialize_cifar10(std::span<const CifarRecord> records) {
  constexpr std::size_t plane = kCifarSide * kCifarSide;
  std::vector<std::uint8_t> out(records.size() * kCifarRecordBytes);
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& img = records[r].image;
    if (img.width() != static_cast<int>(kCifarSide) || img.height() != static_cast<int>(kCifarSide)) {
      throw Error(ErrorKind::dimension_mismatch, "CIFAR-10 records must be 32x32");
    }
    std::uint8_t* rec = out.data() + r * kCifarRecordBytes;
    rec[0] = records[r].label;
    for (std::size_t i = 0; i < plane; ++i) {
      rec[1 + i] = img.data()[i].r;
      rec[1 + plane + i] = img.data()[i].g;
      rec[1 + 2 * plane + i] = img.data()[i].b;
    }
  }
  return out;
}

std::vector<ImageRecord> load_cifar10(const fs::path& path, int resize_to) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto parsed = parse_cifar10(bytes);
  const std::string stem = path.stem().string();
  std::vector<ImageRecord> out;
  out.reserve(parsed.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s_%05zu_label%u", stem.c_str(), i, static_cast<unsigned>(parsed[i].label));
    SrgbImage img = resize_to == static_cast<int>(kCifarSide)
                        ? parsed[i].image
                        : resize_nearest(parsed[i].image, resize_to, resize_to);
    const Rect full{0, 0, img.width(), img.height()};
    out.push_back({buf, std::move(img), full, Source::cifar10});
  }
  return out;
}

void write_manifest(const fs::path& path, std::span<const ManifestEntry> entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  for (const auto& e : entries) {
    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["source"] = to_string(e.source);
    j["width"] = e.width;
    j["height"] = e.height;
    j["mask"] = {e.mask.x0, e.mask.y0, e.mask.x1, e.mask.y1};
    j["path"] = e.path;
    out << j.dump() << '\n';
  }
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ManifestEntry e;
      e.id = j.at("id").get<std::string>();
      e.source = source_from_string(j.at("source").get<std::string>());
      e.width = j.at("width").get<int>();
      e.height = j.at("height").get<int>();
      const auto& m = j.at("mask");
      if (!m.is_array() || m.size() != 4) throw Error(ErrorKind::format, "mask must be [x0,y0,x1,y1]");
      e.mask = {m[0].get<int>(), m[1].get<int>(), m[2].get<int>(), m[3].get<int>()};
      e.path = j.at("path").get<std::string>();
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw LineError(ErrorKind::format, lineno, ex.what());
    } catch (const Error& ex) {
      throw LineError(ErrorKind::format, lineno, ex.what());
    }
  }
  return out;
}

std::vector<ManifestEntry> export_dataset(const fs::path& dir, std::span<const ImageRecord> records) {
  fs::create_directories(dir / "images");
  std::vector<ManifestEntry> entries;
  entries.reserve(records.size());
  for (const auto& r : records) {
    const std::string rel = "images/" + r.id + ".png";
    write_png(dir / rel, r.pixels);
    entries.push_back({r.id, r.source, r.pixels.width(), r.pixels.height(), r.central, rel});
  }
  write_manifest(dir / "manifest.jsonl", entries);
  return entries;
}

std::vector<ImageRecord> load_dataset(const fs::path& manifest_path) {
  const auto entries = read_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();
  std::vector<ImageRecord> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    SrgbImage img = read_png(base / e.path);
    if (img.width() != e.width || img.height() != e.height) {
      throw Error(ErrorKind::dimension_mismatch, "image " + e.id + " does not match its manifest size");
    }
    if (e.mask.x0 < 0 || e.mask.y0 < 0 || e.mask.x1 > e.width || e.mask.y1 > e.height) {
      throw Error(ErrorKind::format, "mask of " + e.id + " lies outside the image");
    }
    out.push_back({e.id, std::move(img), e.mask, e.source});
  }
  return out;
}

}  // namespace chromawave::datagen
