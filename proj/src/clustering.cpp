#include "chromawave/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "chromawave/error.hpp"

namespace chromawave::clustering {
namespace {

using Matrix = std::vector<std::vector<double>>;

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double t = a[d] - b[d];
    acc += t * t;
  }
  return acc;
}

Matrix init_random(std::span<const std::vector<double>> pts, int k, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(pts.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  // Partial Fisher-Yates: k distinct points.
  for (int c = 0; c < k; ++c) {
    std::uniform_int_distribution<std::size_t> pick(c, idx.size() - 1);
    std::swap(idx[c], idx[pick(rng)]);
  }
  Matrix centers;
  for (int c = 0; c < k; ++c) centers.push_back(pts[idx[c]]);
  return centers;
}

// Greedy k-means++: 2 + floor(ln k) candidates per step, keep the one that
// lowers the potential most.
Matrix init_kmeanspp(std::span<const std::vector<double>> pts, int k, std::mt19937_64& rng) {
  const std::size_t n = pts.size();
  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  Matrix centers;
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  centers.push_back(pts[first(rng)]);

  std::vector<double> closest(n);
  for (std::size_t i = 0; i < n; ++i) closest[i] = sq_dist(pts[i], centers[0]);

  std::vector<double> cumulative(n);
  std::vector<double> candidate_closest(n), best_closest(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (static_cast<int>(centers.size()) < k) {
    double potential = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      potential += closest[i];
      cumulative[i] = potential;
    }
    std::size_t best = 0;
    double best_potential = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
      std::size_t cand;
      if (potential <= 0.0) {
        cand = first(rng);
      } else {
        const double r = unit(rng) * potential;
        cand = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), r) -
                                        cumulative.begin());
        cand = std::min(cand, n - 1);
      }
      double cand_potential = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        candidate_closest[i] = std::min(closest[i], sq_dist(pts[i], pts[cand]));
        cand_potential += candidate_closest[i];
      }
      if (cand_potential < best_potential) {
        best_potential = cand_potential;
        best = cand;
        best_closest.swap(candidate_closest);
      }
    }
    centers.push_back(pts[best]);
    closest.swap(best_closest);
  }
  return centers;
}

struct RunResult {
  Matrix centers;
  std::vector<int> labels;
  double inertia = 0.0;
  int iterations = 0;
  std::vector<double> trace;
};

double assign(std::span<const std::vector<double>> pts, const Matrix& centers, std::vector<int>& labels,
              std::vector<double>& dist) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double d = sq_dist(pts[i], centers[c]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[i] = best;
    dist[i] = best_d;
    inertia += best_d;
  }
  return inertia;
}

// Moves the farthest point of a multi-member cluster into each empty cluster.
double fill_empty_clusters(std::span<const std::vector<double>> pts, Matrix& centers, std::vector<int>& labels,
                           std::vector<double>& dist, double inertia) {
  const int k = static_cast<int>(centers.size());
  std::vector<int> counts(k, 0);
  for (int l : labels) ++counts[l];
  for (int c = 0; c < k; ++c) {
    if (counts[c] > 0) continue;
    std::size_t far = pts.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (counts[labels[i]] > 1 && dist[i] > far_d) {
        far_d = dist[i];
        far = i;
      }
    }
    if (far == pts.size()) break;  // cannot happen while k <= n
    --counts[labels[far]];
    labels[far] = c;
    counts[c] = 1;
    centers[c] = pts[far];
    inertia -= dist[far];
    dist[far] = 0.0;
  }
  return inertia;
}

void update_centers(std::span<const std::vector<double>> pts, const std::vector<int>& labels, Matrix& centers) {
  const std::size_t dim = pts.front().size();
  std::vector<int> counts(centers.size(), 0);
  for (auto& c : centers) std::fill(c.begin(), c.end(), 0.0);
  // Fixed accumulation order: point index ascending.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto& c = centers[labels[i]];
    for (std::size_t d = 0; d < dim; ++d) c[d] += pts[i][d];
    ++counts[labels[i]];
  }
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (double& v : centers[c]) v /= counts[c];
  }
}

double sse(std::span<const std::vector<double>> pts, const Matrix& centers, const std::vector<int>& labels) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) acc += sq_dist(pts[i], centers[labels[i]]);
  return acc;
}

RunResult lloyd(std::span<const std::vector<double>> pts, Matrix centers, const KMeansOptions& opts) {
  RunResult r;
  r.labels.assign(pts.size(), -1);
  std::vector<double> dist(pts.size());
  std::vector<int> previous;
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iter; ++it) {
    previous = r.labels;
    double inertia = assign(pts, centers, r.labels, dist);
    inertia = fill_empty_clusters(pts, centers, r.labels, dist, inertia);
    r.trace.push_back(inertia);
    r.iterations = it + 1;
    if (inertia > prev_inertia * (1.0 + 1e-12) + 1e-300) {
      throw Error(ErrorKind::degenerate_input, "k-means inertia increased between iterations");
    }
    update_centers(pts, r.labels, centers);
    const bool stable = r.labels == previous;
    const bool small_change =
        std::isfinite(prev_inertia) && (prev_inertia - inertia) <= opts.tol * std::max(prev_inertia, 1e-300);
    prev_inertia = inertia;
    if (stable || small_change) break;
  }
  r.centers = std::move(centers);
  r.inertia = sse(pts, r.centers, r.labels);
  return r;
}

}  // namespace

const char* to_string(Init init) noexcept { return init == Init::kmeanspp ? "kmeanspp" : "random"; }

Init init_from_string(const std::string& s) {
  if (s == "kmeanspp" || s == "k-means++") return Init::kmeanspp;
  if (s == "random") return Init::random;
  throw Error(ErrorKind::invalid_argument, "unknown k-means init '" + s + "'");
}

ClusterModel kmeans(std::span<const std::vector<double>> points, const KMeansOptions& opts) {
  if (opts.k < 1) throw Error(ErrorKind::invalid_argument, "k must be >= 1");
  if (points.empty()) throw Error(ErrorKind::degenerate_input, "no points to cluster");
  if (static_cast<std::size_t>(opts.k) > points.size()) {
    throw Error(ErrorKind::invalid_argument,
                "k = " + std::to_string(opts.k) + " exceeds the number of points " + std::to_string(points.size()));
  }
  if (opts.n_init < 1) throw Error(ErrorKind::invalid_argument, "n_init must be >= 1");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(ErrorKind::dimension_mismatch, "points have mixed dimensionality");
  }

  ClusterModel best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int run = 0; run < opts.n_init; ++run) {
    std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                      static_cast<std::uint32_t>(run)};
    std::mt19937_64 rng(seq);
    Matrix centers = opts.init == Init::kmeanspp ? init_kmeanspp(points, opts.k, rng)
                                                 : init_random(points, opts.k, rng);
    RunResult r = lloyd(points, std::move(centers), opts);
    if (r.inertia < best.inertia) {
      best.centroids = std::move(r.centers);
      best.labels = std::move(r.labels);
      best.inertia = r.inertia;
      best.iterations = r.iterations;
      best.inertia_trace = std::move(r.trace);
    }
  }
  best.k = opts.k;
  best.init = opts.init;
  best.n_init = opts.n_init;
  best.seed = opts.seed;
  return best;
}

ClusterModel kmeans(std::span<const Embedding> embeddings, const KMeansOptions& opts) {
  std::vector<std::vector<double>> pts;
  pts.reserve(embeddings.size());
  for (const auto& e : embeddings) pts.push_back(e.vector);
  return kmeans(std::span<const std::vector<double>>(pts), opts);
}

std::vector<int> random_relabel(std::span<const int> labels, std::uint64_t seed) {
  if (labels.empty()) throw Error(ErrorKind::degenerate_input, "empty label vector");
  std::vector<int> out(labels.begin(), labels.end());
  std::mt19937_64 rng(seed);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

int cluster_count(std::span<const int> labels) {
  int k = 0;
  for (int l : labels) {
    if (l < 0) throw Error(ErrorKind::invalid_argument, "negative cluster label");
    k = std::max(k, l + 1);
  }
  return k;
}

void write_assignments(const std::filesystem::path& path, std::span<const Assignment> rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << "image_id,cluster\n";
  for (const auto& r : rows) out << r.image_id << ',' << r.cluster << '\n';
}

std::vector<Assignment> read_assignments(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line.rfind("image_id,cluster", 0) != 0) {
    throw LineError(ErrorKind::format, lineno, "expected header image_id,cluster");
  }
  std::vector<Assignment> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw LineError(ErrorKind::format, lineno, "expected image_id,cluster");
    Assignment a;
    a.image_id = line.substr(0, comma);
    try {
      std::size_t used = 0;
      a.cluster = std::stoi(line.substr(comma + 1), &used);
      if (used != line.size() - comma - 1 || a.cluster < 0) throw std::invalid_argument("cluster");
    } catch (const std::exception&) {
      throw LineError(ErrorKind::format, lineno, "bad cluster index");
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace chromawave::clustering
