#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>
#include <unistd.h>

#include "chromawave/clustering.hpp"
#include "chromawave/error.hpp"
#include <fstream>

using namespace chromawave;
using namespace chromawave::clustering;

namespace {

std::vector<std::vector<double>> two_blobs() {
  const std::vector<std::vector<double>> blob{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 0.2}, {0.3, 0.9}};
  auto pts = blob;
  for (const auto& p : blob) pts.push_back({p[0] + 10, p[1] + 10});
  return pts;
}

std::vector<std::vector<double>> random_points(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (auto& p : pts)
    for (auto& v : p) v = g(rng);
  return pts;
}

}  // namespace

TEST(KMeans, SingleCluster) {
  const auto pts = random_points(30, 3, 1);
  KMeansOptions o;
  o.k = 1;
  const auto m = kmeans(pts, o);
  std::vector<double> mean(3, 0.0);
  for (const auto& p : pts)
    for (int d = 0; d < 3; ++d) mean[d] += p[d] / 30.0;
  for (int l : m.labels) EXPECT_EQ(l, 0);
  for (int d = 0; d < 3; ++d) EXPECT_NEAR(m.centroids[0][d], mean[d], 1e-12);
}

TEST(KMeans, EachPointOwnCluster) {
  const auto pts = random_points(8, 2, 2);
  KMeansOptions o;
  o.k = 8;
  const auto m = kmeans(pts, o);
  EXPECT_EQ(m.inertia, 0.0);
  std::vector<int> sorted = m.labels;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 8; ++i) EXPECT_EQ(sorted[i], i);
}

// Exhaustive search over all 2-partitions gives SSE 4.563333... with the
// blobs separated.
TEST(KMeans, TwoBlobsGlobalOptimum) {
  for (auto init : {Init::kmeanspp, Init::random}) {
    KMeansOptions o;
    o.k = 2;
    o.init = init;
    o.seed = 5;
    const auto m = kmeans(two_blobs(), o);
    EXPECT_NEAR(m.inertia, 4.563333333333334, 1e-9);
    for (int i = 1; i < 6; ++i) EXPECT_EQ(m.labels[i], m.labels[0]);
    for (int i = 7; i < 12; ++i) EXPECT_EQ(m.labels[i], m.labels[6]);
    EXPECT_NE(m.labels[0], m.labels[6]);
  }
}

TEST(KMeans, DeterministicAndMonotone) {
  const auto pts = random_points(300, 5, 3);
  KMeansOptions o;
  o.k = 7;
  o.seed = 42;
  const auto a = kmeans(pts, o);
  const auto b = kmeans(pts, o);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.inertia, b.inertia);
  for (std::size_t i = 1; i < a.inertia_trace.size(); ++i) EXPECT_LE(a.inertia_trace[i], a.inertia_trace[i - 1]);
  std::vector<int> sizes(7, 0);
  for (int l : a.labels) {
    ASSERT_GE(l, 0);
    ASSERT_LT(l, 7);
    ++sizes[l];
  }
  for (int s : sizes) EXPECT_GT(s, 0);
  EXPECT_EQ(a.k, 7);
  EXPECT_EQ(a.seed, 42u);
  EXPECT_EQ(a.n_init, 10);
}

TEST(KMeans, DuplicatePointsStillFillAllClusters) {
  std::vector<std::vector<double>> pts(20, std::vector<double>{1.0, 1.0});
  pts.push_back({5.0, 5.0});
  pts.push_back({9.0, 9.0});
  KMeansOptions o;
  o.k = 3;
  const auto m = kmeans(pts, o);
  EXPECT_EQ(cluster_count(m.labels), 3);
  EXPECT_NEAR(m.inertia, 0.0, 1e-12);
}

TEST(KMeans, Errors) {
  const auto pts = random_points(5, 2, 0);
  KMeansOptions o;
  o.k = 6;
  EXPECT_THROW(kmeans(pts, o), Error);
  o.k = 0;
  EXPECT_THROW(kmeans(pts, o), Error);
  auto mixed = pts;
  mixed[2].push_back(1.0);
  o.k = 2;
  try {
    kmeans(mixed, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dimension_mismatch);
  }
}

TEST(KMeans, EmbeddingOverload) {
  std::vector<Embedding> emb;
  const auto pts = two_blobs();
  for (std::size_t i = 0; i < pts.size(); ++i) emb.push_back({"i" + std::to_string(i), "wavelet", "jzazbz", pts[i]});
  KMeansOptions o;
  o.k = 2;
  EXPECT_EQ(kmeans(emb, o).labels, kmeans(pts, o).labels);
}

TEST(RandomRelabel, PreservesSizes) {
  const std::vector<int> labels{0, 0, 1, 1};
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto out = random_relabel(labels, s);
    EXPECT_EQ(std::count(out.begin(), out.end(), 0), 2);
    EXPECT_EQ(std::count(out.begin(), out.end(), 1), 2);
  }
  EXPECT_EQ(random_relabel(std::vector<int>{3, 3, 3}, 9), (std::vector<int>{3, 3, 3}));
}

TEST(RandomRelabel, UniformOverArrangements) {
  const std::vector<int> labels{0, 0, 1};
  std::map<std::vector<int>, int> counts;
  for (std::uint64_t s = 0; s < 10000; ++s) ++counts[random_relabel(labels, s)];
  ASSERT_EQ(counts.size(), 3u);
  for (const auto& [arrangement, n] : counts) EXPECT_NEAR(n / 10000.0, 1.0 / 3.0, 0.02);
}

TEST(Assignments, CsvRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / ("assign_" + std::to_string(::getpid()) + ".csv");
  const std::vector<Assignment> rows{{"a", 0}, {"b,with,commas", 3}, {"c", 1}};
  write_assignments(path, rows);
  const auto back = read_assignments(path);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].image_id, rows[i].image_id);
    EXPECT_EQ(back[i].cluster, rows[i].cluster);
  }
  std::ofstream(path) << "image_id,cluster\nx,notanumber\n";
  try {
    read_assignments(path);
    FAIL();
  } catch (const LineError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::filesystem::remove(path);
}
