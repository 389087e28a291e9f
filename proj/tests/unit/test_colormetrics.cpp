#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "chromawave/colormetrics.hpp"
#include "chromawave/colorspace.hpp"
#include "chromawave/datagen.hpp"
#include "chromawave/error.hpp"
#include "reference_values.hpp"

using namespace chromawave;
using namespace chromawave::colormetrics;
using namespace chromawave::datagen;

namespace {

ColorHistogram random_histogram(std::mt19937_64& rng, bool sparse) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::array<double, 8> w{};
  for (auto& v : w) v = (sparse && u(rng) < 0.5) ? 0.0 : u(rng);
  w[rng() % 8] += 0.1;
  return normalized(w);
}

ColorHistogram one_hot(int bin) {
  std::array<double, 8> w{};
  w[bin] = 1.0;
  return normalized(w);
}

}  // namespace

TEST(Histogram, OctantUsesGamutMidpoints) {
  using namespace chromawave::colorspace;
  const double j = kJzRange.midpoint(), a = kAzRange.midpoint(), b = kBzRange.midpoint();
  EXPECT_EQ(octant({j - 1e-6, a - 1e-6, b - 1e-6}), 0);
  EXPECT_EQ(octant({j, a, b}), 7);
  EXPECT_EQ(octant({j + 0.01, a - 0.01, b + 0.01}), 5);
  EXPECT_EQ(octant({j - 0.01, a + 0.01, b - 0.01}), 2);
}

TEST(Histogram, UniformBlockIsOneHot) {
  BlockSpec spec;
  const SrgbPixel c{200, 30, 90};
  const auto img = render_block("b", c, spec);
  const auto h = color_histogram(img);
  const int expected = octant(colorspace::rgb_to_jzazbz(c));
  for (int i = 0; i < 8; ++i) EXPECT_EQ(h.bins[i], i == expected ? 1.0 : 0.0);
}

TEST(Histogram, BorderExcluded) {
  BlockSpec spec;
  spec.border_color = {0, 0, 0};
  const auto a = color_histogram(render_block("a", {255, 255, 255}, spec));
  spec.border_color = {255, 0, 0};
  const auto b = color_histogram(render_block("b", {255, 255, 255}, spec));
  EXPECT_EQ(a.bins, b.bins);
}

TEST(Histogram, StripesSplitEvenly) {
  StripeSpec spec;  // 200 px central width, 8 stripes of 25
  const SrgbPixel black{0, 0, 0}, white{255, 255, 255};
  const auto h = color_histogram(render_stripes("s", black, white, spec));
  const int ob = octant(colorspace::rgb_to_jzazbz(black)), ow = octant(colorspace::rgb_to_jzazbz(white));
  ASSERT_NE(ob, ow);
  EXPECT_DOUBLE_EQ(h.bins[ob], 0.5);
  EXPECT_DOUBLE_EQ(h.bins[ow], 0.5);
  EXPECT_NEAR(std::accumulate(h.bins.begin(), h.bins.end(), 0.0), 1.0, 1e-12);
}

TEST(Histogram, EmptyMaskRejected) {
  BlockSpec spec;
  auto img = render_block("b", {1, 2, 3}, spec);
  img.central = {10, 10, 10, 20};
  EXPECT_THROW(color_histogram(img), Error);
}

TEST(Histogram, NormalizedRejectsBadWeights) {
  EXPECT_THROW(normalized({}), Error);
  EXPECT_THROW(normalized({-1, 2, 0, 0, 0, 0, 0, 0}), Error);
  const auto h = normalized({2, 2, 0, 0, 0, 0, 0, 4});
  EXPECT_DOUBLE_EQ(h.bins[7], 0.5);
}

TEST(Similarity, MatchesScipyExample) {
  const auto a = normalized({0.5, 0.5, 0, 0, 0, 0, 0, 0});
  const auto b = one_hot(0);
  EXPECT_NEAR(color_similarity(a, b), reference::kJsExample, 1e-12);
  EXPECT_NEAR(js_divergence(a, b), 1.0 - reference::kJsExample, 1e-12);
}

TEST(Similarity, IdentityAndDisjoint) {
  EXPECT_DOUBLE_EQ(color_similarity(one_hot(3), one_hot(3)), 1.0);
  EXPECT_NEAR(color_similarity(one_hot(3), one_hot(4)), 0.0, 1e-15);
}

TEST(Similarity, SymmetricAndBounded) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10000; ++i) {
    const auto a = random_histogram(rng, i % 2 == 0);
    const auto b = random_histogram(rng, i % 3 == 0);
    const double s = color_similarity(a, b);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_NEAR(s, color_similarity(b, a), 1e-14);
    EXPECT_NEAR(color_similarity(a, a), 1.0, 1e-14);
  }
}

TEST(WithinCluster, PairCountsAndMeans) {
  std::vector<ColorHistogram> h{one_hot(0), one_hot(0), one_hot(1), one_hot(2), one_hot(2)};
  const std::vector<int> labels{0, 0, 0, 1, 1};
  const auto s = within_cluster_similarity(h, labels);
  EXPECT_EQ(s.pairs.size(), 4u);
  ASSERT_EQ(s.cluster_pair_counts.size(), 2u);
  EXPECT_EQ(s.cluster_pair_counts[0], 3u);
  EXPECT_EQ(s.cluster_pair_counts[1], 1u);
  EXPECT_NEAR(s.cluster_means[0], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.cluster_means[1], 1.0, 1e-12);
  EXPECT_NEAR(s.grand_mean, 0.5, 1e-12);
  EXPECT_NEAR(within_cluster_mean(h, labels), 0.5, 1e-12);
  for (const auto& p : s.pairs) EXPECT_LT(p.a, p.b);
}

TEST(WithinCluster, SingletonsHaveNoPairs) {
  std::vector<ColorHistogram> h{one_hot(0), one_hot(1)};
  const std::vector<int> labels{0, 1};
  const auto s = within_cluster_similarity(h, labels);
  EXPECT_TRUE(s.pairs.empty());
  EXPECT_TRUE(std::isnan(s.grand_mean));
  EXPECT_TRUE(std::isnan(s.cluster_means[0]));
}

TEST(WithinCluster, LengthMismatchRejected) {
  std::vector<ColorHistogram> h{one_hot(0), one_hot(1)};
  const std::vector<int> labels{0};
  EXPECT_THROW(within_cluster_similarity(h, labels), Error);
}

TEST(NullDistribution, SingleClusterIsInvariant) {
  std::mt19937_64 rng(5);
  std::vector<ColorHistogram> h;
  for (int i = 0; i < 12; ++i) h.push_back(random_histogram(rng, false));
  const std::vector<int> labels(12, 0);
  const double observed = within_cluster_mean(h, labels);
  const auto null = null_distribution(h, labels, 25, 3);
  ASSERT_EQ(null.realizations.size(), 25u);
  for (double r : null.realizations) EXPECT_NEAR(r, observed, 1e-12);
  EXPECT_NEAR(null.lo95, observed, 1e-12);
  EXPECT_NEAR(null.hi95, observed, 1e-12);
}

TEST(NullDistribution, SeededAndSeparatedFromTightClusters) {
  std::vector<ColorHistogram> h;
  std::vector<int> labels;
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < 10; ++i) {
      h.push_back(one_hot(c));
      labels.push_back(c);
    }
  const auto a = null_distribution(h, labels, 50, 9);
  const auto b = null_distribution(h, labels, 50, 9);
  EXPECT_EQ(a.realizations, b.realizations);
  EXPECT_DOUBLE_EQ(within_cluster_mean(h, labels), 1.0);
  EXPECT_LT(a.hi95, 0.6);
  EXPECT_THROW(null_distribution(h, labels, 0), Error);
}

TEST(Percentile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4, 5}, 50), 3.0);
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 50), 2.5);
  EXPECT_DOUBLE_EQ(percentile({10, 0}, 25), 2.5);
  EXPECT_DOUBLE_EQ(percentile({7}, 97.5), 7.0);
  EXPECT_THROW(percentile({}, 50), Error);
  const auto s = summarize({0, 1, 2, 3});
  EXPECT_DOUBLE_EQ(s.mean, 1.5);
  EXPECT_DOUBLE_EQ(s.lo95, 0.075);
  EXPECT_DOUBLE_EQ(s.hi95, 2.925);
}

TEST(MeanColor, CentralRegionOnly) {
  StripeSpec spec;
  spec.border_color = {0, 255, 0};
  const SrgbPixel a{250, 10, 10}, b{10, 10, 250};
  const auto m = mean_color(render_stripes("s", a, b, spec));
  const auto ja = colorspace::rgb_to_jzazbz(a), jb = colorspace::rgb_to_jzazbz(b);
  EXPECT_NEAR(m.jz, 0.5 * (ja.jz + jb.jz), 1e-12);
  EXPECT_NEAR(m.az, 0.5 * (ja.az + jb.az), 1e-12);
  EXPECT_NEAR(m.bz, 0.5 * (ja.bz + jb.bz), 1e-12);
}

// Containment counts from an LP feasibility oracle: [1,1,1,2,1,1,1,1].
TEST(Coherence, FixtureFraction) {
  const std::vector<geometry::Point3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {3, 0.8, 0.5},
                                          {2, 0, 0}, {4, 0, 0}, {3, 2, 0}, {3, 1, 2}};
  const std::vector<int> labels{0, 0, 0, 0, 1, 1, 1, 1};
  const auto s = coherence_fraction(pts, labels);
  EXPECT_EQ(s.containing_hulls, (std::vector<int>{1, 1, 1, 2, 1, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(s.f, 0.875);
  EXPECT_EQ(s.cluster_unique_count, (std::vector<int>{3, 4}));
  EXPECT_EQ(s.cluster_hull_dimension, (std::vector<int>{3, 3}));
}

TEST(Coherence, SeparatedAndIdenticalClusters) {
  std::vector<geometry::Point3> pts;
  std::vector<int> labels;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 8; ++i) {
      pts.push_back({u(rng) + 5.0 * c, u(rng), u(rng)});
      labels.push_back(c);
    }
  EXPECT_DOUBLE_EQ(coherence_fraction(pts, labels).f, 1.0);

  // Two clusters with the same point set: every point lies in both hulls.
  std::vector<geometry::Point3> dup(pts.begin(), pts.begin() + 8);
  dup.insert(dup.end(), pts.begin(), pts.begin() + 8);
  std::vector<int> dl(8, 0);
  dl.insert(dl.end(), 8, 1);
  EXPECT_DOUBLE_EQ(coherence_fraction(dup, dl).f, 0.0);

  const auto null = null_coherence_fraction(pts, labels, 20, 4);
  EXPECT_EQ(null.realizations.size(), 20u);
  EXPECT_LT(null.mean, 1.0);
  EXPECT_THROW(coherence_fraction(std::vector<geometry::Point3>{}, std::vector<int>{}), Error);
}

TEST(Coherence, SingletonClusterHull) {
  const std::vector<geometry::Point3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.2, 0.2, 0.2}};
  const std::vector<int> labels{0, 0, 0, 0, 1};
  const auto s = coherence_fraction(pts, labels);
  EXPECT_EQ(s.containing_hulls, (std::vector<int>{1, 1, 1, 1, 2}));
  EXPECT_EQ(s.cluster_hull_dimension[1], 0);
  EXPECT_DOUBLE_EQ(s.f, 0.8);
}
