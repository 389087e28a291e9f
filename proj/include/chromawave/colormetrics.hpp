#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chromawave/convex_hull.hpp"
#include "chromawave/image.hpp"

namespace chromawave::colormetrics {

/// Normalized weights over the 2x2x2 JzAzBz subvolumes. Bin index is
/// 4 * [Jz >= mid] + 2 * [Az >= mid] + [Bz >= mid], with per-axis midpoints of
/// the sRGB gamut range.
struct ColorHistogram {
  std::array<double, 8> bins{};
};

int octant(const JzazbzPixel& p) noexcept;

ColorHistogram color_histogram(const ImageRecord& img);

/// Builds a histogram from raw weights; rejects negative or all-zero input.
ColorHistogram normalized(std::array<double, 8> weights);

/// 1 - Jensen-Shannon divergence (base 2) against the mixture (c_i + c_j) / 2.
double color_similarity(const ColorHistogram& a, const ColorHistogram& b);

/// Jensen-Shannon divergence in bits, in [0, 1].
double js_divergence(const ColorHistogram& a, const ColorHistogram& b);

struct PairSimilarity {
  std::size_t a = 0;  // dataset indices, a < b
  std::size_t b = 0;
  int cluster = 0;
  double similarity = 0.0;
};

struct SimilarityStats {
  std::vector<PairSimilarity> pairs;
  std::vector<double> cluster_means;     // NaN for clusters with < 2 members
  std::vector<std::size_t> cluster_pair_counts;
  double grand_mean = 0.0;               // over all pairs; NaN if there are none
};

/// All unordered pairs inside each cluster. `labels[i]` is image i's cluster.
SimilarityStats within_cluster_similarity(std::span<const ColorHistogram> histograms, std::span<const int> labels);

/// Grand mean only, without materializing pairs.
double within_cluster_mean(std::span<const ColorHistogram> histograms, std::span<const int> labels);

struct NullSummary {
  double mean = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
  std::vector<double> realizations;
};

/// Percentile with linear interpolation between order statistics.
double percentile(std::vector<double> values, double q);

NullSummary summarize(std::vector<double> realizations);

/// Grand-mean similarity under `realizations` size-preserving random relabelings.
NullSummary null_distribution(std::span<const ColorHistogram> histograms, std::span<const int> labels,
                              int realizations = 100, std::uint64_t seed = 0);

/// Mean JzAzBz coordinate of the central region.
JzazbzPixel mean_color(const ImageRecord& img);

struct HullSummary {
  std::vector<int> containing_hulls;      // per image
  std::vector<int> cluster_sizes;
  std::vector<int> cluster_hull_dimension;
  std::vector<int> cluster_unique_count;  // members inside exactly one hull
  double f = 0.0;
};

/// Fraction of points that lie inside (boundary-inclusive) exactly one
/// cluster's convex hull.
HullSummary coherence_fraction(std::span<const geometry::Point3> points, std::span<const int> labels,
                               double tolerance = 1e-9);

/// coherence_fraction under random relabelings.
NullSummary null_coherence_fraction(std::span<const geometry::Point3> points, std::span<const int> labels,
                                    int realizations = 100, std::uint64_t seed = 0, double tolerance = 1e-9);

geometry::Point3 to_point(const JzazbzPixel& p) noexcept;

}  // namespace chromawave::colormetrics
