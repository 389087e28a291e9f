#include "chromawave/colormetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "chromawave/clustering.hpp"
#include "chromawave/colorspace.hpp"
#include "chromawave/error.hpp"

namespace chromawave::colormetrics {
namespace {

constexpr double kNormTolerance = 1e-9;

void require_mask(const ImageRecord& img) {
  const Rect c = img.central;
  if (c.empty()) throw Error(ErrorKind::degenerate_input, "image " + img.id + " has an empty central mask");
  if (c.x0 < 0 || c.y0 < 0 || c.x1 > img.pixels.width() || c.y1 > img.pixels.height()) {
    throw Error(ErrorKind::invalid_argument, "central mask of " + img.id + " lies outside the image");
  }
}

// Visits the JzAzBz value of every central pixel, converting each run of
// identical sRGB values once.
template <typename Fn>
void for_each_central(const ImageRecord& img, Fn&& fn) {
  require_mask(img);
  const Rect c = img.central;
  SrgbPixel last = img.pixels.at(c.x0, c.y0);
  JzazbzPixel value = colorspace::rgb_to_jzazbz(last);
  for (int y = c.y0; y < c.y1; ++y) {
    for (int x = c.x0; x < c.x1; ++x) {
      const SrgbPixel p = img.pixels.at(x, y);
      if (!(p == last)) {
        last = p;
        value = colorspace::rgb_to_jzazbz(p);
      }
      fn(value);
    }
  }
}

void require_normalized(const ColorHistogram& h) {
  double sum = 0.0;
  for (double w : h.bins) {
    if (!(w >= 0.0)) throw Error(ErrorKind::invalid_argument, "histogram has a negative or NaN weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kNormTolerance) {
    throw Error(ErrorKind::invalid_argument, "histogram is not normalized (sum = " + std::to_string(sum) + ")");
  }
}

double kl_to_mixture(const ColorHistogram& p, const ColorHistogram& q) {
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double a = p.bins[i];
    if (a <= 0.0) continue;
    const double m = 0.5 * (a + q.bins[i]);
    acc += a * std::log2(a / m);
  }
  return acc;
}

std::vector<std::vector<std::size_t>> members_by_cluster(std::span<const int> labels) {
  const int k = clustering::cluster_count(labels);
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  return members;
}

// Upper-triangular similarity cache for repeated null realizations.
class SimilarityMatrix {
 public:
  explicit SimilarityMatrix(std::span<const ColorHistogram> h) : n_(h.size()), values_(n_ * (n_ - 1) / 2) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) values_[k++] = color_similarity(h[i], h[j]);
  }
  double operator()(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return values_[i * (2 * n_ - i - 1) / 2 + (j - i - 1)];
  }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

template <typename Sim>
double grand_mean_with(std::span<const int> labels, Sim&& sim) {
  const auto members = members_by_cluster(labels);
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& m : members) {
    for (std::size_t a = 0; a < m.size(); ++a)
      for (std::size_t b = a + 1; b < m.size(); ++b) {
        sum += sim(m[a], m[b]);
        ++count;
      }
  }
  return count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

void require_aligned(std::size_t n, std::span<const int> labels) {
  if (labels.size() != n) {
    throw Error(ErrorKind::dimension_mismatch,
                "labels (" + std::to_string(labels.size()) + ") do not align with dataset (" + std::to_string(n) + ")");
  }
}

}  // namespace

int octant(const JzazbzPixel& p) noexcept {
  return 4 * (p.jz >= colorspace::kJzRange.midpoint()) + 2 * (p.az >= colorspace::kAzRange.midpoint()) +
         (p.bz >= colorspace::kBzRange.midpoint());
}

ColorHistogram color_histogram(const ImageRecord& img) {
  std::array<double, 8> counts{};
  for_each_central(img, [&](const JzazbzPixel& p) { counts[octant(p)] += 1.0; });
  return normalized(counts);
}

ColorHistogram normalized(std::array<double, 8> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorKind::invalid_argument, "negative histogram weight");
    sum += w;
  }
  if (sum <= 0.0) throw Error(ErrorKind::degenerate_input, "histogram has no mass");
  ColorHistogram h;
  for (int i = 0; i < 8; ++i) h.bins[i] = weights[i] / sum;
  return h;
}

double js_divergence(const ColorHistogram& a, const ColorHistogram& b) {
  require_normalized(a);
  require_normalized(b);
  const double d = 0.5 * (kl_to_mixture(a, b) + kl_to_mixture(b, a));
  return std::clamp(d, 0.0, 1.0);
}

double color_similarity(const ColorHistogram& a, const ColorHistogram& b) { return 1.0 - js_divergence(a, b); }

SimilarityStats within_cluster_similarity(std::span<const ColorHistogram> histograms, std::span<const int> labels) {
  require_aligned(histograms.size(), labels);
  const auto members = members_by_cluster(labels);
  SimilarityStats s;
  s.cluster_means.assign(members.size(), std::numeric_limits<double>::quiet_NaN());
  s.cluster_pair_counts.assign(members.size(), 0);
  double total = 0.0;
  for (std::size_t c = 0; c < members.size(); ++c) {
    const auto& m = members[c];
    double sum = 0.0;
    for (std::size_t a = 0; a < m.size(); ++a)
      for (std::size_t b = a + 1; b < m.size(); ++b) {
        const double v = color_similarity(histograms[m[a]], histograms[m[b]]);
        s.pairs.push_back({m[a], m[b], static_cast<int>(c), v});
        sum += v;
      }
    const std::size_t count = m.size() * (m.size() - (m.empty() ? 0 : 1)) / 2;
    s.cluster_pair_counts[c] = count;
    if (count) s.cluster_means[c] = sum / static_cast<double>(count);
    total += sum;
  }
  s.grand_mean = s.pairs.empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : total / static_cast<double>(s.pairs.size());
  return s;
}

double within_cluster_mean(std::span<const ColorHistogram> histograms, std::span<const int> labels) {
  require_aligned(histograms.size(), labels);
  return grand_mean_with(labels, [&](std::size_t i, std::size_t j) {
    return color_similarity(histograms[i], histograms[j]);
  });
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorKind::degenerate_input, "percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

NullSummary summarize(std::vector<double> realizations) {
  NullSummary s;
  s.mean = std::accumulate(realizations.begin(), realizations.end(), 0.0) / static_cast<double>(realizations.size());
  s.lo95 = percentile(realizations, 2.5);
  s.hi95 = percentile(realizations, 97.5);
  s.realizations = std::move(realizations);
  return s;
}

NullSummary null_distribution(std::span<const ColorHistogram> histograms, std::span<const int> labels,
                              int realizations, std::uint64_t seed) {
  require_aligned(histograms.size(), labels);
  if (realizations < 1) throw Error(ErrorKind::invalid_argument, "need at least one null realization");
  std::vector<double> means;
  means.reserve(realizations);
  // The dense cache costs n^2/2 doubles; fall back to direct evaluation for large sets.
  constexpr std::size_t kMaxCached = 6000;
  if (histograms.size() <= kMaxCached) {
    const SimilarityMatrix sim(histograms);
    for (int r = 0; r < realizations; ++r) {
      const auto relabeled = clustering::random_relabel(labels, seed + static_cast<std::uint64_t>(r));
      means.push_back(grand_mean_with(relabeled, sim));
    }
  } else {
    for (int r = 0; r < realizations; ++r) {
      const auto relabeled = clustering::random_relabel(labels, seed + static_cast<std::uint64_t>(r));
      means.push_back(within_cluster_mean(histograms, relabeled));
    }
  }
  return summarize(std::move(means));
}

JzazbzPixel mean_color(const ImageRecord& img) {
  double jz = 0.0, az = 0.0, bz = 0.0;
  std::size_t n = 0;
  for_each_central(img, [&](const JzazbzPixel& p) {
    jz += p.jz;
    az += p.az;
    bz += p.bz;
    ++n;
  });
  const double inv = 1.0 / static_cast<double>(n);
  return {jz * inv, az * inv, bz * inv};
}

geometry::Point3 to_point(const JzazbzPixel& p) noexcept { return {p.jz, p.az, p.bz}; }

HullSummary coherence_fraction(std::span<const geometry::Point3> points, std::span<const int> labels,
                               double tolerance) {
  require_aligned(points.size(), labels);
  if (points.empty()) throw Error(ErrorKind::degenerate_input, "no points");
  const auto members = members_by_cluster(labels);

  std::vector<std::optional<geometry::ConvexHull3>> hulls;
  HullSummary s;
  s.cluster_sizes.assign(members.size(), 0);
  s.cluster_hull_dimension.assign(members.size(), -1);
  s.cluster_unique_count.assign(members.size(), 0);
  for (std::size_t c = 0; c < members.size(); ++c) {
    s.cluster_sizes[c] = static_cast<int>(members[c].size());
    if (members[c].empty()) {
      hulls.emplace_back();
      continue;
    }
    std::vector<geometry::Point3> pts;
    pts.reserve(members[c].size());
    for (auto i : members[c]) pts.push_back(points[i]);
    hulls.emplace_back(geometry::ConvexHull3(pts, tolerance));
    s.cluster_hull_dimension[c] = hulls.back()->dimension();
  }

  s.containing_hulls.assign(points.size(), 0);
  std::size_t unique = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    int count = 0;
    for (const auto& h : hulls) {
      if (h && h->contains(points[i])) ++count;
    }
    s.containing_hulls[i] = count;
    if (count == 1) {
      ++unique;
      ++s.cluster_unique_count[labels[i]];
    }
  }
  s.f = static_cast<double>(unique) / static_cast<double>(points.size());
  return s;
}

NullSummary null_coherence_fraction(std::span<const geometry::Point3> points, std::span<const int> labels,
                                    int realizations, std::uint64_t seed, double tolerance) {
  if (realizations < 1) throw Error(ErrorKind::invalid_argument, "need at least one null realization");
  std::vector<double> fs;
  fs.reserve(realizations);
  for (int r = 0; r < realizations; ++r) {
    const auto relabeled = clustering::random_relabel(labels, seed + static_cast<std::uint64_t>(r));
    fs.push_back(coherence_fraction(points, relabeled, tolerance).f);
  }
  return summarize(std::move(fs));
}

}  // namespace chromawave::colormetrics
