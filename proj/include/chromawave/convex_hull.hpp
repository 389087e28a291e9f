#pragma once

#include <array>
#include <span>
#include <vector>

namespace chromawave::geometry {

using Point3 = std::array<double, 3>;

/// Convex hull of a 3D point set supporting boundary-inclusive containment
/// queries. Point sets whose affine hull is a plane, a line or a single point
/// are handled in that lower-dimensional hull.
class ConvexHull3 {
 public:
  /// `tolerance` is the absolute distance below which a point counts as on
  /// the hull; it also decides the affine dimension of the input.
  explicit ConvexHull3(std::span<const Point3> points, double tolerance = 1e-9);

  bool contains(const Point3& p) const;

  /// 0..3
  int dimension() const noexcept { return dimension_; }
  std::size_t facet_count() const noexcept { return planes_.size(); }

  /// Signed distance to the farthest facet plane (3D hulls); <= 0 inside.
  double max_facet_distance(const Point3& p) const;

 private:
  struct Plane {
    Point3 normal;  // unit, outward
    double offset;  // normal . x <= offset inside
  };
  struct Line2 {
    double nx, ny, offset;  // in-plane unit normal, outward
  };

  double tol_;
  int dimension_ = 0;
  Point3 origin_{};
  // dimension 3
  std::vector<Plane> planes_;
  // dimension 2: orthonormal in-plane basis + polygon edge half-planes
  Point3 u_{}, v_{}, plane_normal_{};
  std::vector<Line2> edges_;
  // dimension 1
  Point3 direction_{};
  double t_min_ = 0.0, t_max_ = 0.0;
};

}  // namespace chromawave::geometry
