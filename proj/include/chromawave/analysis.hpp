#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chromawave/embedding.hpp"

namespace chromawave::analysis {

/// Dot product over norms; throws on zero vectors or length mismatch.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const Embedding& a, const Embedding& b);

/// 1-based ranks, ties share their average rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Minmax scaling to [0, 1]; an all-equal input maps to 0.5 everywhere.
std::vector<double> minmax(std::span<const double> values);

/// Average-tie ranks, minmax scaled.
std::vector<double> rank_minmax(std::span<const double> values);

struct Correlation {
  double rho = 0.0;
  double p = 1.0;  // two-tailed
  bool degenerate = false;  // a constant input; rho is NaN
};

Correlation pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of average-tie ranks; p from the t approximation
/// with n - 2 degrees of freedom.
Correlation spearman(std::span<const double> x, std::span<const double> y);

struct TestResult {
  double statistic = 0.0;
  double p = 1.0;  // two-tailed
  bool degenerate = false;
};

/// One-sample z test of a proportion (normal approximation, no continuity correction).
TestResult proportion_test(std::size_t successes, std::size_t n, double p0 = 0.5);

/// Two-sample z test with pooled variance.
TestResult two_sample_proportion_test(std::size_t s1, std::size_t n1, std::size_t s2, std::size_t n2);

/// Welch's unequal-variance t test.
TestResult t_test_two_tailed(std::span<const double> a, std::span<const double> b);

/// Two-sided tail of the standard normal.
double normal_two_tailed(double z);
/// Two-sided tail of Student's t.
double student_two_tailed(double t, double dof);

struct Pca {
  std::vector<double> mean;
  std::vector<std::vector<double>> components;  // unit rows, largest-magnitude loading positive
  std::vector<double> explained_variance;
  std::vector<double> explained_ratio;
  std::vector<std::vector<double>> projections;  // [sample][component]
  bool rank_deficient = false;  // fewer than the requested components have variance
};

Pca pca(std::span<const std::vector<double>> samples, int n_components);

struct ComponentExtremes {
  int component = 0;
  double explained_ratio = 0.0;
  std::vector<std::string> minimizing;  // most negative projection first
  std::vector<std::string> maximizing;  // most positive projection first
};

struct PcaExtremesResult {
  std::vector<ComponentExtremes> components;
  bool rank_deficient = false;
};

PcaExtremesResult pca_extremes(std::span<const Embedding> embeddings, int n_components, int m);

struct PairSample {
  std::string id_a;
  std::string id_b;
  double embedding_similarity = 0.0;
  double color_similarity = 0.0;
  double mean_jz = 0.0;
};

struct LuminanceRow {
  double mean_jz_minmax = 0.0;
  double embedding_similarity = 0.0;
};

struct LuminanceRelation {
  std::vector<LuminanceRow> rows;
  /// Fraction of below-median-luminance pairs whose embedding similarity is
  /// below the mean over all pairs.
  double asymmetry = 0.0;
};

LuminanceRelation luminance_relation(std::span<const PairSample> pairs);

/// `count` distinct unordered index pairs (i < j) drawn uniformly from [0, n).
std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n, std::size_t count, std::uint64_t seed);

}  // namespace chromawave::analysis
