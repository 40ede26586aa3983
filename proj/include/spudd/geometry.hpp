#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace spudd {

using Vec3 = Eigen::Vector3d;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Triangle {
  Vec3 a, b, c;
};

struct Aabb {
  Vec3 lo = Vec3::Constant(kInf);
  Vec3 hi = Vec3::Constant(-kInf);

  Aabb() = default;
  Aabb(const Vec3& lo_, const Vec3& hi_) : lo(lo_), hi(hi_) {}

  bool empty() const { return (lo.array() > hi.array()).any(); }
  void expand(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void expand(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extent() const { return hi - lo; }
  double diagonal() const { return empty() ? 0.0 : (hi - lo).norm(); }
  Aabb inflated(double r) const { return {lo.array() - r, hi.array() + r}; }
  bool contains(const Vec3& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
  bool contains(const Aabb& b) const { return contains(b.lo) && contains(b.hi); }
  bool overlaps(const Aabb& b) const {
    return (lo.array() <= b.hi.array()).all() && (b.lo.array() <= hi.array()).all();
  }
  double squared_distance(const Vec3& p) const {
    Vec3 d = (lo - p).cwiseMax(p - hi).cwiseMax(0.0);
    return d.squaredNorm();
  }
  // Largest squared distance from p to any point of the box.
  double squared_max_distance(const Vec3& p) const {
    Vec3 d = (p - lo).cwiseAbs().cwiseMax((hi - p).cwiseAbs());
    return d.squaredNorm();
  }
};

double squared_distance(const Aabb& a, const Aabb& b);
Aabb bounds_of(std::span<const Vec3> points);
Aabb bounds_of(const Triangle& t);

// Oriented plane n.x = offset with unit n.
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;
  double signed_distance(const Vec3& x) const { return normal.dot(x) - offset; }
};

// Planar convex polygon given as an ordered vertex ring. The supporting plane
// comes from Newell's method so slightly non-planar rings get a stable fit.
struct ConvexPolygon {
  std::vector<Vec3> ring;
  Plane plane;

  ConvexPolygon() = default;
  explicit ConvexPolygon(std::vector<Vec3> vertices);

  std::size_t size() const { return ring.size(); }
  double area() const;
  Vec3 centroid() const;
  Aabb bounds() const { return bounds_of(ring); }
};

struct ClosestPoint {
  Vec3 point = Vec3::Zero();
  double distance = kInf;
};

// Closest point on triangle (a, b, c) with its barycentric weights on (a, b, c).
struct TriangleClosest {
  Vec3 point = Vec3::Zero();
  Vec3 barycentric = Vec3::Zero();
  double distance = kInf;
};

TriangleClosest closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                          const Vec3& c);

// Closest point on segment [a, b]; `t` is the parameter from a.
struct SegmentClosest {
  Vec3 point = Vec3::Zero();
  double t = 0.0;
  double distance = kInf;
};

SegmentClosest closest_point_on_segment(const Vec3& p, const Vec3& a, const Vec3& b);

ClosestPoint point_triangle_distance(const Vec3& p, const Triangle& t);
ClosestPoint point_polygon_distance(const Vec3& p, const ConvexPolygon& f);

// Minimum distance between segments [p1, q1] and [p2, q2].
double segment_segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2);

// True iff the segment crosses or touches the polygon; points within `eps` of
// the supporting plane count as on it. The result does not depend on the
// order of the endpoints.
bool segment_intersects_polygon(const Vec3& a, const Vec3& b, const ConvexPolygon& f, double eps);

// Intersection of segment [a, b] with a triangle, if any (Moller-Trumbore,
// inclusive on edges).
std::optional<Vec3> segment_triangle_intersection(const Vec3& a, const Vec3& b, const Vec3& t0,
                                                  const Vec3& t1, const Vec3& t2);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace spudd
