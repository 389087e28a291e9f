#pragma once

#include <string>
#include <vector>

namespace chromawave {

/// A fixed-length image descriptor produced by the wavelet path or ingested
/// from an external producer.
struct Embedding {
  std::string image_id;
  std::string algorithm;  // "wavelet" for the internal path
  std::string tag;        // color mode ("jzazbz" | "rgb" | "rgb-linear" | "grayscale") or a layer tag
  std::vector<double> vector;

  std::size_t dim() const noexcept { return vector.size(); }
};

}  // namespace chromawave
