#include "doctest.h"
#include "spudd/aabb_tree.hpp"
#include "spudd/errors.hpp"
#include "spudd/geometry.hpp"

#include <random>

using namespace spudd;

namespace {

ConvexPolygon unit_square(double z = 0.0) {
  return ConvexPolygon({Vec3(-0.5, -0.5, z), Vec3(0.5, -0.5, z), Vec3(0.5, 0.5, z), Vec3(-0.5, 0.5, z)});
}

Vec3 random_point(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec3(u(rng), u(rng), u(rng));
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("apex above a vertex is at unit distance") {
    const ClosestPoint c = point_triangle_distance(Vec3(0, 0, 1), {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)});
    CHECK(c.distance == doctest::Approx(1.0));
    CHECK((c.point - Vec3::Zero()).norm() < 1e-15);
  }

  TEST_CASE("interior point has zero distance") {
    const Triangle t{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    const Vec3 p(0.2, 0.3, 0.0);
    const ClosestPoint c = point_triangle_distance(p, t);
    CHECK(c.distance == doctest::Approx(0.0));
    CHECK((c.point - p).norm() < 1e-15);
  }

  TEST_CASE("triangle distance matches dense sampling") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      const Triangle t{random_point(rng), random_point(rng), random_point(rng)};
      const Vec3 p = random_point(rng, 2.0);
      const ClosestPoint c = point_triangle_distance(p, t);
      double best = kInf;
      const int n = 1000;
      for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j) {
          const double a = double(i) / n, b = double(j) / n;
          best = std::min(best, (p - (t.a + a * (t.b - t.a) + b * (t.c - t.a))).norm());
        }
      CHECK(c.distance <= best + 1e-12);
      CHECK(best - c.distance < 1e-4 * std::max(1.0, (t.b - t.a).norm() + (t.c - t.a).norm()));
      CHECK((p - c.point).norm() == doctest::Approx(c.distance));
    }
  }

  TEST_CASE("degenerate triangles fall back to segments and points") {
    const Triangle line{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
    CHECK(point_triangle_distance(Vec3(1.5, 1, 0), line).distance == doctest::Approx(1.0));
    CHECK(point_triangle_distance(Vec3(3, 0, 0), line).distance == doctest::Approx(1.0));
    const Triangle dot{Vec3(1, 1, 1), Vec3(1, 1, 1), Vec3(1, 1, 1)};
    const ClosestPoint c = point_triangle_distance(Vec3(1, 1, 3), dot);
    CHECK(c.distance == doctest::Approx(2.0));
    CHECK(c.point == Vec3(1, 1, 1));
  }

  TEST_CASE("triangle distance never exceeds the vertex distances") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
      const Triangle t{random_point(rng), random_point(rng), random_point(rng)};
      const Vec3 p = random_point(rng, 2.0);
      const double d = point_triangle_distance(p, t).distance;
      CHECK(d <= (p - t.a).norm() + 1e-15);
      CHECK(d <= (p - t.b).norm() + 1e-15);
      CHECK(d <= (p - t.c).norm() + 1e-15);
    }
  }

  TEST_CASE("segment against polygon") {
    const ConvexPolygon sq = unit_square();
    CHECK(segment_intersects_polygon(Vec3(0, 0, -1), Vec3(0, 0, 1), sq, 1e-9));
    CHECK_FALSE(segment_intersects_polygon(Vec3(-1, 0, 1), Vec3(1, 0, 1), sq, 1e-9));
    CHECK(segment_intersects_polygon(Vec3(0.1, 0.2, 0), Vec3(0.1, 0.2, 1), sq, 1e-9));
    CHECK_FALSE(segment_intersects_polygon(Vec3(2, 0, -1), Vec3(2, 0, 1), sq, 1e-9));
    // In-plane segment crossing the boundary.
    CHECK(segment_intersects_polygon(Vec3(-2, 0, 0), Vec3(2, 0, 0), sq, 1e-9));
  }

  TEST_CASE("segment test is symmetric under endpoint swap") {
    std::mt19937_64 rng(5);
    const ConvexPolygon sq = unit_square(0.1);
    for (int trial = 0; trial < 5000; ++trial) {
      const Vec3 a = random_point(rng), b = random_point(rng);
      CHECK(segment_intersects_polygon(a, b, sq, 1e-9) == segment_intersects_polygon(b, a, sq, 1e-9));
    }
  }

  TEST_CASE("polygon plane and area") {
    const ConvexPolygon sq = unit_square(2.0);
    CHECK(std::abs(sq.plane.normal.norm() - 1.0) < 1e-15);
    CHECK(std::abs(std::abs(sq.plane.signed_distance(Vec3(0, 0, 3))) - 1.0) < 1e-15);
    CHECK(sq.area() == doctest::Approx(1.0));
    CHECK((sq.centroid() - Vec3(0, 0, 2)).norm() < 1e-15);
  }
}

TEST_SUITE("aabb_tree") {
  TEST_CASE("empty input is rejected") { CHECK_THROWS_AS(AabbTree(std::vector<Aabb>{}), EmptyInput); }

  TEST_CASE("one triangle gives a single leaf") {
    const TriangleSoupIndex index({{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}});
    CHECK(index.tree().leaf_count() == 1);
    CHECK(index.tree().check_invariants());
    CHECK(index.closest(Vec3(0.2, 0.2, 0)).distance == doctest::Approx(0.0));
  }

  TEST_CASE("closest point matches a linear scan") {
    std::mt19937_64 rng(7);
    std::vector<Triangle> tris;
    for (int i = 0; i < 1000; ++i) {
      const Vec3 c = random_point(rng);
      tris.push_back({c, c + random_point(rng, 0.05), c + random_point(rng, 0.05)});
    }
    const TriangleSoupIndex index(tris);
    CHECK(index.tree().check_invariants());
    for (int q = 0; q < 500; ++q) {
      const Vec3 p = random_point(rng, 1.5);
      int best = -1;
      double best_d = kInf;
      for (std::size_t k = 0; k < tris.size(); ++k) {
        const double d = point_triangle_distance(p, tris[k]).distance;
        if (d < best_d) best_d = d, best = static_cast<int>(k);
      }
      const SoupHit hit = index.closest(p);
      CHECK(hit.primitive == best);
      CHECK(hit.distance == best_d);
    }
  }

  TEST_CASE("equidistant primitives resolve to the lower id") {
    const Triangle t{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    const TriangleSoupIndex index({t, t, t});
    CHECK(index.closest(Vec3(0.2, 0.2, 1)).primitive == 0);
    const Triangle below{Vec3(0, 0, -2), Vec3(1, 0, -2), Vec3(0, 1, -2)};
    const Triangle above{Vec3(0, 0, 2), Vec3(1, 0, 2), Vec3(0, 1, 2)};
    CHECK(TriangleSoupIndex({above, below}).closest(Vec3(0.2, 0.2, 0)).primitive == 0);
    CHECK(TriangleSoupIndex({below, above}).closest(Vec3(0.2, 0.2, 0)).primitive == 0);
  }

  TEST_CASE("degenerate overlapping boxes keep every primitive") {
    std::vector<Aabb> boxes(100, Aabb(Vec3::Zero(), Vec3::Zero()));
    const AabbTree tree(boxes);
    CHECK(tree.check_invariants());
    std::size_t seen = 0;
    tree.any_overlapping(Aabb(Vec3::Constant(-1), Vec3::Constant(1)), [&](int) {
      ++seen;
      return false;
    });
    CHECK(seen == 100);
  }
}
