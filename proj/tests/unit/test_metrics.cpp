#include "doctest.h"
#include "spudd/errors.hpp"
#include "spudd/metrics.hpp"
#include "spudd/shapes.hpp"

#include <cmath>

using namespace spudd;

namespace {

TriMesh single_triangle() {
  TriMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  m.faces = {{0, 1, 2}};
  return m;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("samples lie on the surface with the face normal") {
    const SurfaceSamples s = sample_surface(single_triangle(), 1000, 3);
    REQUIRE(s.points.size() == 1000);
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const Vec3& p = s.points[i];
      CHECK(p.z() == 0.0);
      CHECK(p.x() >= 0.0);
      CHECK(p.y() >= 0.0);
      CHECK(p.x() + p.y() <= 1.0 + 1e-15);
      CHECK(s.normals[i] == Vec3(0, 0, 1));
    }
  }

  TEST_CASE("sampling is area weighted") {
    // Two disjoint triangles with areas 3 : 1.
    TriMesh m;
    m.vertices = {Vec3(0, 0, 0), Vec3(3, 0, 0), Vec3(0, 2, 0), Vec3(10, 0, 0), Vec3(11, 0, 0), Vec3(10, 2, 0)};
    m.faces = {{0, 1, 2}, {3, 4, 5}};
    const std::size_t n = 40000;
    const SurfaceSamples s = sample_surface(m, n, 7);
    std::size_t big = 0;
    for (const Vec3& p : s.points) big += p.x() < 5.0 ? 1 : 0;
    const double expected = 0.75 * n, sigma = std::sqrt(n * 0.75 * 0.25);
    CHECK(std::abs(static_cast<double>(big) - expected) <= 3.0 * sigma);
  }

  TEST_CASE("sampling is deterministic per seed") {
    const TriMesh m = icosphere(0.5, 2);
    CHECK(sample_surface(m, 500, 11).points == sample_surface(m, 500, 11).points);
    CHECK(sample_surface(m, 500, 11).points != sample_surface(m, 500, 12).points);
  }

  TEST_CASE("degenerate meshes are rejected") {
    TriMesh flat;
    flat.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
    flat.faces = {{0, 1, 2}};
    CHECK_THROWS_AS(sample_surface(flat, 10, 1), ZeroArea);
    CHECK_THROWS_AS(sample_surface(TriMesh{}, 10, 1), EmptyInput);
  }

  TEST_CASE("point distances against a brute-force scan") {
    const TriMesh m = icosphere(0.5, 2);
    const TriangleSoupIndex index(m.triangles());
    std::vector<Vec3> pts;
    for (int i = 0; i < 200; ++i) pts.push_back(Vec3(std::sin(i), std::cos(1.3 * i), std::sin(0.7 * i)));
    const std::vector<double> d = distances_to(pts, index);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double best = kInf;
      for (const Triangle& t : m.triangles()) best = std::min(best, point_triangle_distance(pts[i], t).distance);
      CHECK(d[i] == doctest::Approx(best).epsilon(1e-12));
    }
  }

  TEST_CASE("identical meshes are at distance zero") {
    const TriMesh m = icosphere(0.5, 3);
    CHECK(chamfer_l2(m, m, 5000) < 1e-12);
    CHECK(hausdorff(m, m, 5000) < 1e-12);
  }

  TEST_CASE("concentric spheres") {
    const TriMesh a = icosphere(1.0, 5), b = icosphere(1.01, 5);
    const double ce = chamfer_l2(a, b, 20000);
    const double he = hausdorff(a, b, 20000);
    CHECK(ce == doctest::Approx(0.01).epsilon(0.2));
    CHECK(he >= ce);
    CHECK(he < 0.02);
    CHECK(chamfer_l2(b, a, 20000) == doctest::Approx(ce).epsilon(0.05));
  }

  TEST_CASE("hausdorff sees a distant outlier the chamfer averages away") {
    const TriMesh a = icosphere(0.5, 3);
    TriMesh outlier = single_triangle();
    for (Vec3& v : outlier.vertices) v = 0.3 * v + Vec3(3, 0, 0);
    const TriMesh b = merge(a, outlier);
    CHECK(hausdorff(a, b, 20000) > 2.0);
    CHECK(chamfer_l2(a, b, 20000) < 0.1);
  }

  TEST_CASE("edge chamfer") {
    const double radius = 0.01 * std::sqrt(3.0);
    const EdgeChamfer smooth = edge_chamfer(icosphere(0.5, 5), icosphere(0.5, 5), 20000, 30.0, radius);
    CHECK(smooth.no_edges);
    CHECK(smooth.value == 0.0);

    const TriMesh cube = box_mesh(Vec3::Constant(-0.5), Vec3::Constant(0.5));
    const EdgeChamfer same = edge_chamfer(cube, cube, 20000, 30.0, radius);
    CHECK_FALSE(same.no_edges);
    CHECK(same.value == 0.0);

    const TriMesh bevel = beveled_box(Vec3::Constant(-0.5), Vec3::Constant(0.5), 0.02);
    const EdgeChamfer ece = edge_chamfer(bevel, cube, 20000, 30.0, radius);
    CHECK_FALSE(ece.no_edges);
    CHECK(ece.value > chamfer_l2(bevel, cube, 20000));
  }

  TEST_CASE("metric report") {
    const TriMesh m = icosphere(0.5, 2);
    MetricOptions o;
    o.samples = 2000;
    const MetricReport r = compute_metrics(m, m, o);
    CHECK(r.ce < 1e-12);
    CHECK(r.he < 1e-12);
    CHECK(r.vertex_count == m.vertices.size());
    CHECK(r.sample_count == 2000);
  }
}
