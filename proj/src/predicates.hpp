#pragma once

#include "spudd/geometry.hpp"

namespace spudd::predicates {

// Sign of det[b - a, c - a, d - a]: positive when d lies on the side that
// (b - a) x (c - a) points to. Exact for any double input.
int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

// Weighted point: position, radius (weight r^2) and a priority used for
// symbolic perturbation of the weight. Priorities must be distinct.
struct WPoint {
  const Vec3* p;
  double r;
  int priority;
};

// For a positively oriented tetrahedron t[0..3], returns -1 when q lies
// strictly below the hyperplane through the lifted vertices (q conflicts with
// the tetrahedron's orthogonal sphere) and +1 otherwise. Ties are resolved by
// increasing each weight by an infinitesimal that grows with its priority, so
// the result is never 0.
int power_side(const WPoint t[4], const WPoint& q);

// Point of equal power distance to the four weighted points, from exact
// determinants rounded once. The points must not be coplanar.
Vec3 power_center_exact(const Vec3 p[4], const double r[4]);

// Counters for filter failures, for diagnostics.
struct Stats {
  long orient_exact = 0;
  long power_exact = 0;
};
Stats stats();

}  // namespace spudd::predicates
