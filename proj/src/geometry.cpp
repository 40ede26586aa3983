#include "spudd/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace spudd {

double squared_distance(const Aabb& a, const Aabb& b) {
  Vec3 d = (a.lo - b.hi).cwiseMax(b.lo - a.hi).cwiseMax(0.0);
  return d.squaredNorm();
}

Aabb bounds_of(std::span<const Vec3> points) {
  Aabb box;
  for (const auto& p : points) box.expand(p);
  return box;
}

Aabb bounds_of(const Triangle& t) {
  Aabb box;
  box.expand(t.a);
  box.expand(t.b);
  box.expand(t.c);
  return box;
}

ConvexPolygon::ConvexPolygon(std::vector<Vec3> vertices) : ring(std::move(vertices)) {
  Vec3 n = Vec3::Zero();
  Vec3 c = Vec3::Zero();
  const std::size_t m = ring.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec3& u = ring[i];
    const Vec3& v = ring[(i + 1) % m];
    n.x() += (u.y() - v.y()) * (u.z() + v.z());
    n.y() += (u.z() - v.z()) * (u.x() + v.x());
    n.z() += (u.x() - v.x()) * (u.y() + v.y());
    c += u;
  }
  if (m > 0) c /= static_cast<double>(m);
  double len = n.norm();
  plane.normal = len > 0.0 ? Vec3(n / len) : Vec3(Vec3::UnitZ());
  plane.offset = plane.normal.dot(c);
}

double ConvexPolygon::area() const {
  double a = 0.0;
  for (std::size_t i = 1; i + 1 < ring.size(); ++i) a += triangle_area(ring[0], ring[i], ring[i + 1]);
  return a;
}

Vec3 ConvexPolygon::centroid() const {
  Vec3 c = Vec3::Zero();
  double total = 0.0;
  for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
    double a = triangle_area(ring[0], ring[i], ring[i + 1]);
    c += a * (ring[0] + ring[i] + ring[i + 1]) / 3.0;
    total += a;
  }
  if (total > 0.0) return c / total;
  Vec3 mean = Vec3::Zero();
  for (const auto& v : ring) mean += v;
  return ring.empty() ? mean : Vec3(mean / static_cast<double>(ring.size()));
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

SegmentClosest closest_point_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  Vec3 ab = b - a;
  double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  SegmentClosest r;
  r.t = t;
  r.point = a + t * ab;
  r.distance = (p - r.point).norm();
  return r;
}

namespace {

TriangleClosest degenerate_triangle_closest(const Vec3& p, const Vec3& a, const Vec3& b,
                                            const Vec3& c) {
  TriangleClosest best;
  auto consider = [&](const Vec3& u, const Vec3& v, int iu, int iv) {
    SegmentClosest s = closest_point_on_segment(p, u, v);
    if (s.distance < best.distance) {
      best.distance = s.distance;
      best.point = s.point;
      best.barycentric = Vec3::Zero();
      best.barycentric[iu] = 1.0 - s.t;
      best.barycentric[iv] = s.t;
    }
  };
  consider(a, b, 0, 1);
  consider(b, c, 1, 2);
  consider(c, a, 2, 0);
  return best;
}

}  // namespace

TriangleClosest closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                          const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const double scale = std::max({ab.squaredNorm(), ac.squaredNorm(), (c - b).squaredNorm()});
  if (ab.cross(ac).squaredNorm() <= 1e-24 * scale * scale) return degenerate_triangle_closest(p, a, b, c);

  TriangleClosest r;
  auto done = [&](const Vec3& q, double wa, double wb, double wc) {
    r.point = q;
    r.barycentric = Vec3(wa, wb, wc);
    r.distance = (p - q).norm();
    return r;
  };

  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return done(a, 1, 0, 0);

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return done(b, 0, 1, 0);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    double v = d1 / (d1 - d3);
    return done(a + v * ab, 1 - v, v, 0);
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return done(c, 0, 0, 1);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    double w = d2 / (d2 - d6);
    return done(a + w * ac, 1 - w, 0, w);
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return done(b + w * (c - b), 0, 1 - w, w);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return done(a + ab * v + ac * w, 1 - v - w, v, w);
}

ClosestPoint point_triangle_distance(const Vec3& p, const Triangle& t) {
  TriangleClosest r = closest_point_on_triangle(p, t.a, t.b, t.c);
  return {r.point, r.distance};
}

ClosestPoint point_polygon_distance(const Vec3& p, const ConvexPolygon& f) {
  ClosestPoint best;
  const auto& ring = f.ring;
  if (ring.empty()) return best;
  if (ring.size() == 1) return {ring[0], (p - ring[0]).norm()};
  if (ring.size() == 2) {
    SegmentClosest s = closest_point_on_segment(p, ring[0], ring[1]);
    return {s.point, s.distance};
  }
  for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
    TriangleClosest r = closest_point_on_triangle(p, ring[0], ring[i], ring[i + 1]);
    if (r.distance < best.distance) best = {r.point, r.distance};
  }
  return best;
}

double segment_segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2) {
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= 0.0 && e <= 0.0) return r.norm();
  if (a <= 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p1 + d1 * s) - (p2 + d2 * t)).norm();
}

namespace {

bool lex_less(const Vec3& u, const Vec3& v) {
  if (u.x() != v.x()) return u.x() < v.x();
  if (u.y() != v.y()) return u.y() < v.y();
  return u.z() < v.z();
}

// In-plane containment for a point already on (or projected to) the plane.
bool in_polygon(const Vec3& x, const ConvexPolygon& f, double eps) {
  Vec3 on = x - f.plane.signed_distance(x) * f.plane.normal;
  return point_polygon_distance(on, f).distance <= eps;
}

}  // namespace

bool segment_intersects_polygon(const Vec3& a_in, const Vec3& b_in, const ConvexPolygon& f,
                                double eps) {
  if (f.ring.size() < 3) return false;
  const bool swap = lex_less(b_in, a_in);
  const Vec3& a = swap ? b_in : a_in;
  const Vec3& b = swap ? a_in : b_in;

  const double sa = f.plane.signed_distance(a);
  const double sb = f.plane.signed_distance(b);
  if ((sa > eps && sb > eps) || (sa < -eps && sb < -eps)) return false;

  if (std::abs(sa) <= eps && std::abs(sb) <= eps) {
    if (in_polygon(a, f, eps) || in_polygon(b, f, eps)) return true;
    const auto& ring = f.ring;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      if (segment_segment_distance(a, b, ring[i], ring[(i + 1) % ring.size()]) <= eps) return true;
    }
    return false;
  }

  Vec3 x;
  if (std::abs(sa) <= eps) {
    x = a;
  } else if (std::abs(sb) <= eps) {
    x = b;
  } else {
    x = a + (sa / (sa - sb)) * (b - a);
  }
  return in_polygon(x, f, eps);
}

std::optional<Vec3> segment_triangle_intersection(const Vec3& a, const Vec3& b, const Vec3& t0,
                                                  const Vec3& t1, const Vec3& t2) {
  const Vec3 dir = b - a;
  const Vec3 e1 = t1 - t0;
  const Vec3 e2 = t2 - t0;
  const Vec3 pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  const double scale = e1.norm() * e2.norm() * dir.norm();
  if (std::abs(det) <= 1e-14 * scale) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 tvec = a - t0;
  const double u = tvec.dot(pvec) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 qvec = tvec.cross(e1);
  const double v = dir.dot(qvec) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(qvec) * inv;
  if (t < 0.0 || t > 1.0) return std::nullopt;
  return a + t * dir;
}

}  // namespace spudd
