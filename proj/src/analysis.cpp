#include "chromawave/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "chromawave/error.hpp"

namespace chromawave::analysis {
namespace {

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw Error(ErrorKind::dimension_mismatch, "inputs have different lengths");
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double mean) {
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size() - 1);
}

}  // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size());
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(ErrorKind::degenerate_input, "cosine similarity of a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double cosine_similarity(const Embedding& a, const Embedding& b) { return cosine_similarity(a.vector, b.vector); }

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

std::vector<double> minmax(std::span<const double> values) {
  if (values.empty()) return {};
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  std::vector<double> out(values.size(), 0.5);
  if (*hi == *lo) return out;
  const double span = *hi - *lo;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / span;
  return out;
}

std::vector<double> rank_minmax(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorKind::invalid_argument, "rank_minmax needs at least two values");
  const auto r = average_ranks(values);
  return minmax(r);
}

double normal_two_tailed(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

double student_two_tailed(double t, double dof) {
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(dof);
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  require_same_length(x.size(), y.size());
  if (x.size() < 3) throw Error(ErrorKind::invalid_argument, "correlation needs at least 3 samples");
  const double mx = mean_of(x), my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  Correlation c;
  if (sxx == 0.0 || syy == 0.0) {
    c.rho = std::numeric_limits<double>::quiet_NaN();
    c.p = 1.0;
    c.degenerate = true;
    return c;
  }
  c.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double dof = static_cast<double>(x.size() - 2);
  if (std::abs(c.rho) >= 1.0) {
    c.p = 0.0;
  } else {
    const double t = c.rho * std::sqrt(dof / ((1.0 - c.rho) * (1.0 + c.rho)));
    c.p = student_two_tailed(t, dof);
  }
  return c;
}

Correlation spearman(std::span<const double> x, std::span<const double> y) {
  require_same_length(x.size(), y.size());
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

TestResult proportion_test(std::size_t successes, std::size_t n, double p0) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "proportion test needs n >= 1");
  if (successes > n) throw Error(ErrorKind::invalid_argument, "successes exceed n");
  if (!(p0 > 0.0 && p0 < 1.0)) throw Error(ErrorKind::invalid_argument, "p0 must lie in (0, 1)");
  const double phat = static_cast<double>(successes) / static_cast<double>(n);
  TestResult r;
  r.statistic = (phat - p0) / std::sqrt(p0 * (1.0 - p0) / static_cast<double>(n));
  r.p = normal_two_tailed(r.statistic);
  return r;
}

TestResult two_sample_proportion_test(std::size_t s1, std::size_t n1, std::size_t s2, std::size_t n2) {
  if (n1 < 1 || n2 < 1) throw Error(ErrorKind::invalid_argument, "proportion test needs n >= 1");
  if (s1 > n1 || s2 > n2) throw Error(ErrorKind::invalid_argument, "successes exceed n");
  const double p1 = static_cast<double>(s1) / n1, p2 = static_cast<double>(s2) / n2;
  const double pooled = static_cast<double>(s1 + s2) / static_cast<double>(n1 + n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
  TestResult r;
  if (se == 0.0) {
    r.degenerate = true;
    r.p = 1.0;
    return r;
  }
  r.statistic = (p1 - p2) / se;
  r.p = normal_two_tailed(r.statistic);
  return r;
}

TestResult t_test_two_tailed(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw Error(ErrorKind::invalid_argument, "t test needs two samples of size >= 2");
  const double ma = mean_of(a), mb = mean_of(b);
  const double va = sample_variance(a, ma) / a.size();
  const double vb = sample_variance(b, mb) / b.size();
  TestResult r;
  if (va + vb == 0.0) {
    r.degenerate = true;
    r.statistic = std::numeric_limits<double>::quiet_NaN();
    r.p = ma == mb ? 1.0 : 0.0;
    return r;
  }
  r.statistic = (ma - mb) / std::sqrt(va + vb);
  const double dof = (va + vb) * (va + vb) /
                     (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  r.p = student_two_tailed(r.statistic, dof);
  return r;
}

Pca pca(std::span<const std::vector<double>> samples, int n_components) {
  if (n_components < 1) throw Error(ErrorKind::invalid_argument, "n_components must be >= 1");
  if (samples.size() < static_cast<std::size_t>(n_components) + 1) {
    throw Error(ErrorKind::invalid_argument, "PCA needs at least n_components + 1 samples");
  }
  const std::size_t n = samples.size();
  const std::size_t d = samples.front().size();
  for (const auto& s : samples) {
    if (s.size() != d) throw Error(ErrorKind::dimension_mismatch, "PCA samples have mixed dimensionality");
  }
  if (static_cast<std::size_t>(n_components) > d) {
    throw Error(ErrorKind::invalid_argument, "n_components exceeds the data dimension");
  }

  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = samples[i][j];
  const Eigen::RowVectorXd mu = x.colwise().mean();
  x.rowwise() -= mu;
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw Error(ErrorKind::degenerate_input, "covariance eigendecomposition failed");

  const Eigen::VectorXd values = eig.eigenvalues();  // ascending
  const Eigen::MatrixXd vectors = eig.eigenvectors();
  const double total = std::max(values.sum(), 0.0);
  const double largest = std::max(values(d - 1), 0.0);

  Pca out;
  out.mean.assign(mu.data(), mu.data() + d);
  for (int c = 0; c < n_components; ++c) {
    const Eigen::Index col = static_cast<Eigen::Index>(d) - 1 - c;
    const double var = values(col);
    if (!(var > 1e-12 * largest) || largest <= 0.0) {
      out.rank_deficient = true;
      break;
    }
    Eigen::VectorXd v = vectors.col(col);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    out.components.emplace_back(v.data(), v.data() + d);
    out.explained_variance.push_back(var);
    out.explained_ratio.push_back(total > 0 ? var / total : 0.0);
  }

  out.projections.assign(n, std::vector<double>(out.components.size()));
  for (std::size_t c = 0; c < out.components.size(); ++c) {
    const Eigen::Map<const Eigen::VectorXd> v(out.components[c].data(), d);
    const Eigen::VectorXd proj = x * v;
    for (std::size_t i = 0; i < n; ++i) out.projections[i][c] = proj(i);
  }
  return out;
}

PcaExtremesResult pca_extremes(std::span<const Embedding> embeddings, int n_components, int m) {
  if (m < 1) throw Error(ErrorKind::invalid_argument, "m must be >= 1");
  std::vector<std::vector<double>> samples;
  samples.reserve(embeddings.size());
  for (const auto& e : embeddings) samples.push_back(e.vector);
  const Pca p = pca(samples, n_components);

  PcaExtremesResult out;
  out.rank_deficient = p.rank_deficient;
  const std::size_t take = std::min<std::size_t>(m, embeddings.size());
  for (std::size_t c = 0; c < p.components.size(); ++c) {
    std::vector<std::size_t> order(embeddings.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p.projections[a][c] < p.projections[b][c]; });
    ComponentExtremes ce;
    ce.component = static_cast<int>(c);
    ce.explained_ratio = p.explained_ratio[c];
    for (std::size_t i = 0; i < take; ++i) {
      ce.minimizing.push_back(embeddings[order[i]].image_id);
      ce.maximizing.push_back(embeddings[order[order.size() - 1 - i]].image_id);
    }
    out.components.push_back(std::move(ce));
  }
  return out;
}

LuminanceRelation luminance_relation(std::span<const PairSample> pairs) {
  if (pairs.empty()) throw Error(ErrorKind::degenerate_input, "no pairs");
  std::vector<double> jz, sim;
  for (const auto& p : pairs) {
    jz.push_back(p.mean_jz);
    sim.push_back(p.embedding_similarity);
  }
  const auto jz_norm = minmax(jz);
  LuminanceRelation out;
  for (std::size_t i = 0; i < pairs.size(); ++i) out.rows.push_back({jz_norm[i], sim[i]});

  std::vector<double> sorted = jz_norm;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  const double mean_sim = mean_of(sim);
  std::size_t dark = 0, dark_low = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (jz_norm[i] < median) {
      ++dark;
      if (sim[i] < mean_sim) ++dark_low;
    }
  }
  out.asymmetry = dark ? static_cast<double>(dark_low) / static_cast<double>(dark) : 0.0;
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n, std::size_t count, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorKind::invalid_argument, "need at least two items to form pairs");
  const std::size_t available = n * (n - 1) / 2;
  if (count > available) throw Error(ErrorKind::invalid_argument, "more pairs requested than exist");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(count);
  while (out.size() < count) {
    std::size_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (seen.emplace(a, b).second) out.emplace_back(a, b);
  }
  return out;
}

}  // namespace chromawave::analysis
