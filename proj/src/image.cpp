#include <cstdio>
#include <string>

#include "chromawave/error.hpp"
#include "chromawave/image.hpp"

namespace chromawave {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::degenerate_input: return "degenerate_input";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::format: return "format";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

const char* to_string(Source s) noexcept {
  switch (s) {
    case Source::block: return "block";
    case Source::stripe: return "stripe";
    case Source::colorgram: return "colorgram";
    case Source::cifar10: return "cifar10";
  }
  return "unknown";
}

Source source_from_string(const std::string& s) {
  if (s == "block") return Source::block;
  if (s == "stripe") return Source::stripe;
  if (s == "colorgram") return Source::colorgram;
  if (s == "cifar10") return Source::cifar10;
  throw Error(ErrorKind::format, "unknown dataset source '" + s + "'");
}

std::string to_hex(SrgbPixel p) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02X%02X%02X", p.r, p.g, p.b);
  return buf;
}

SrgbPixel from_hex(const std::string& hex) {
  std::string h = hex;
  if (!h.empty() && h.front() == '#') h.erase(0, 1);
  if (h.size() != 6) throw Error(ErrorKind::format, "bad hex color '" + hex + "'");
  std::uint8_t v[3];
  for (int i = 0; i < 3; ++i) {
    std::size_t used = 0;
    unsigned long x = 0;
    try {
      x = std::stoul(h.substr(2 * i, 2), &used, 16);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != 2) throw Error(ErrorKind::format, "bad hex color '" + hex + "'");
    v[i] = static_cast<std::uint8_t>(x);
  }
  return {v[0], v[1], v[2]};
}

}  // namespace chromawave
