#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "chromawave/embedding.hpp"

namespace chromawave::clustering {

enum class Init { kmeanspp, random };

const char* to_string(Init init) noexcept;
Init init_from_string(const std::string& s);

struct KMeansOptions {
  int k = 10;
  Init init = Init::kmeanspp;
  int n_init = 10;
  std::uint64_t seed = 0;
  int max_iter = 300;
  double tol = 1e-6;  // relative inertia change
};

struct ClusterModel {
  std::vector<std::vector<double>> centroids;
  std::vector<int> labels;
  double inertia = 0.0;
  int k = 0;
  Init init = Init::kmeanspp;
  int n_init = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  /// Inertia after every assignment step of the winning restart.
  std::vector<double> inertia_trace;
};

/// Lloyd's algorithm, best of n_init restarts by inertia. Squared Euclidean
/// distance; an emptied cluster is re-seeded at the point farthest from its
/// centroid. Deterministic for a fixed seed.
ClusterModel kmeans(std::span<const std::vector<double>> points, const KMeansOptions& opts);
ClusterModel kmeans(std::span<const Embedding> embeddings, const KMeansOptions& opts);

/// Uniformly random permutation of the label multiset (cluster sizes kept).
std::vector<int> random_relabel(std::span<const int> labels, std::uint64_t seed);

int cluster_count(std::span<const int> labels);

struct Assignment {
  std::string image_id;
  int cluster = 0;
};

/// CSV with header image_id,cluster.
void write_assignments(const std::filesystem::path& path, std::span<const Assignment> rows);
std::vector<Assignment> read_assignments(const std::filesystem::path& path);

}  // namespace chromawave::clustering
