#include "chromawave/convex_hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "chromawave/error.hpp"

namespace chromawave::geometry {
namespace {

Point3 sub(const Point3& a, const Point3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot(const Point3& a, const Point3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Point3 cross(const Point3& a, const Point3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm(const Point3& a) { return std::sqrt(dot(a, a)); }
Point3 scale(const Point3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

struct Face {
  std::array<std::size_t, 3> v;
  Point3 normal;
  double offset;
};

Face make_face(std::span<const Point3> pts, std::size_t a, std::size_t b, std::size_t c) {
  Point3 n = cross(sub(pts[b], pts[a]), sub(pts[c], pts[a]));
  const double len = norm(n);
  if (len > 0) n = scale(n, 1.0 / len);
  return {{a, b, c}, n, dot(n, pts[a])};
}

double point_line_distance(const Point3& p, const Point3& a, const Point3& dir_unit) {
  const Point3 d = sub(p, a);
  const Point3 along = scale(dir_unit, dot(d, dir_unit));
  return norm(sub(d, along));
}

// Andrew's monotone chain; returns counter-clockwise hull vertices.
std::vector<std::pair<double, double>> hull2d(std::vector<std::pair<double, double>> p) {
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  auto turn = [](const std::pair<double, double>& o, const std::pair<double, double>& a,
                 const std::pair<double, double>& b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<double, double>> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && turn(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && turn(h[k - 2], h[k - 1], p[i - 1]) <= 0) --k;
    h[k++] = p[i - 1];
  }
  h.resize(k - 1);
  return h;
}

}  // namespace

ConvexHull3::ConvexHull3(std::span<const Point3> pts, double tolerance) : tol_(tolerance) {
  if (pts.empty()) throw Error(ErrorKind::degenerate_input, "convex hull of an empty point set");
  origin_ = pts[0];

  // Affine dimension from a greedy maximal simplex.
  std::size_t i1 = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = norm(sub(pts[i], origin_));
    if (d > best) best = d, i1 = i;
  }
  if (best <= tol_) {
    dimension_ = 0;
    return;
  }
  direction_ = scale(sub(pts[i1], origin_), 1.0 / best);

  std::size_t i2 = 0;
  best = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = point_line_distance(pts[i], origin_, direction_);
    if (d > best) best = d, i2 = i;
  }
  if (best <= tol_) {
    dimension_ = 1;
    t_min_ = t_max_ = 0.0;
    for (const auto& p : pts) {
      const double t = dot(sub(p, origin_), direction_);
      t_min_ = std::min(t_min_, t);
      t_max_ = std::max(t_max_, t);
    }
    return;
  }

  plane_normal_ = cross(sub(pts[i1], origin_), sub(pts[i2], origin_));
  plane_normal_ = scale(plane_normal_, 1.0 / norm(plane_normal_));
  std::size_t i3 = 0;
  best = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = std::abs(dot(sub(pts[i], origin_), plane_normal_));
    if (d > best) best = d, i3 = i;
  }

  if (best <= tol_) {
    dimension_ = 2;
    u_ = direction_;
    v_ = cross(plane_normal_, u_);
    std::vector<std::pair<double, double>> flat;
    flat.reserve(pts.size());
    for (const auto& p : pts) {
      const Point3 d = sub(p, origin_);
      flat.emplace_back(dot(d, u_), dot(d, v_));
    }
    const auto poly = hull2d(std::move(flat));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const auto& a = poly[i];
      const auto& b = poly[(i + 1) % poly.size()];
      const double ex = b.first - a.first, ey = b.second - a.second;
      const double len = std::hypot(ex, ey);
      // Outward normal of a CCW edge.
      const double nx = ey / len, ny = -ex / len;
      edges_.push_back({nx, ny, nx * a.first + ny * a.second});
    }
    return;
  }

  dimension_ = 3;
  // Incremental hull seeded with the maximal tetrahedron.
  std::size_t i0 = 0;
  std::array<std::size_t, 4> seed{i0, i1, i2, i3};
  Point3 centroid{};
  for (auto s : seed)
    for (int d = 0; d < 3; ++d) centroid[d] += pts[s][d] / 4.0;

  std::vector<Face> faces;
  auto add_oriented = [&](std::size_t a, std::size_t b, std::size_t c) {
    Face f = make_face(pts, a, b, c);
    if (dot(f.normal, centroid) - f.offset > 0) f = make_face(pts, a, c, b);
    faces.push_back(f);
  };
  add_oriented(seed[0], seed[1], seed[2]);
  add_oriented(seed[0], seed[1], seed[3]);
  add_oriented(seed[0], seed[2], seed[3]);
  add_oriented(seed[1], seed[2], seed[3]);

  // Scale-aware visibility threshold for construction; queries use tol_.
  double extent = 0.0;
  for (const auto& p : pts) extent = std::max(extent, norm(sub(p, origin_)));
  const double eps = std::max(1e-14 * extent, 1e-300);

  for (std::size_t idx = 0; idx < pts.size(); ++idx) {
    if (std::find(seed.begin(), seed.end(), idx) != seed.end()) continue;
    const Point3& p = pts[idx];
    std::vector<bool> visible(faces.size(), false);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (dot(faces[f].normal, p) - faces[f].offset > eps) visible[f] = any = true;
    }
    if (!any) continue;

    std::set<std::pair<std::size_t, std::size_t>> visible_edges;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) visible_edges.emplace(v[e], v[(e + 1) % 3]);
    }
    std::vector<Face> next;
    next.reserve(faces.size() + 8);
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) next.push_back(faces[f]);
    }
    for (const auto& [a, b] : visible_edges) {
      if (visible_edges.count({b, a})) continue;  // interior to the visible region
      next.push_back(make_face(pts, a, b, idx));
    }
    faces = std::move(next);
  }

  planes_.reserve(faces.size());
  for (const auto& f : faces) {
    if (norm(f.normal) == 0.0) continue;  // sliver with no direction
    planes_.push_back({f.normal, f.offset});
  }
}

double ConvexHull3::max_facet_distance(const Point3& p) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& pl : planes_) worst = std::max(worst, dot(pl.normal, p) - pl.offset);
  return worst;
}

bool ConvexHull3::contains(const Point3& p) const {
  const Point3 d = sub(p, origin_);
  switch (dimension_) {
    case 0: return norm(d) <= tol_;
    case 1: {
      if (point_line_distance(p, origin_, direction_) > tol_) return false;
      const double t = dot(d, direction_);
      return t >= t_min_ - tol_ && t <= t_max_ + tol_;
    }
    case 2: {
      if (std::abs(dot(d, plane_normal_)) > tol_) return false;
      const double x = dot(d, u_), y = dot(d, v_);
      for (const auto& e : edges_) {
        if (e.nx * x + e.ny * y - e.offset > tol_) return false;
      }
      return true;
    }
    default: return max_facet_distance(p) <= tol_;
  }
}

}  // namespace chromawave::geometry
