#include "doctest.h"
#include "fixtures.hpp"
#include "spudd/errors.hpp"
#include "spudd/power_diagram.hpp"
#include "spudd/shapes.hpp"
#include "spudd/superpower.hpp"

#include <set>

using namespace spudd;

namespace {

ConvexPolygon unit_square() {
  return ConvexPolygon({Vec3(-0.5, -0.5, 0), Vec3(0.5, -0.5, 0), Vec3(0.5, 0.5, 0), Vec3(-0.5, 0.5, 0)});
}

// 8^3 grid whose node layers sit at half-integer multiples of h around z = 0,
// carrying exact distances to that plane.
UdfGrid plane_grid() {
  UdfGrid g;
  g.spec.dims = {8, 8, 8};
  g.spec.spacing = 0.25;
  g.spec.origin = Vec3(-0.875, -0.875, -0.875);
  g.values.resize(g.spec.node_count());
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = std::abs(g.spec.node(i).z());
  return g;
}

}  // namespace

TEST_SUITE("superpower_contour") {
  TEST_CASE("ball against face") {
    const ConvexPolygon sq = unit_square();
    CHECK(face_ball_intersects(sq, Vec3(0, 0, 0.5), 1.0, 1e-9));
    CHECK_FALSE(face_ball_intersects(sq, Vec3(0, 0, 2), 1.0, 1e-9));
    CHECK_FALSE(face_ball_intersects(sq, Vec3(0, 0, 1), 1.0, 1e-9));
    CHECK_FALSE(face_ball_intersects(sq, Vec3(0, 0, 0), 1e-10, 1e-9));
  }

  TEST_CASE("plane: tangent faces between vertical neighbours are kept") {
    const UdfGrid g = plane_grid();
    const PowerDiagram pd = compute_power_diagram(g);
    const SuperpowerContour sp = compute_superpower_contour(pd);
    CHECK(sp.source == superpower_faces_all_pairs(pd));
    // Every seed of a vertical column has the same power on z = 0, so which
    // opposite pair owns each patch of the plane is a tie-break detail.
    double area = 0.0;
    for (const auto& f : sp.faces) {
      bool flat = true;
      for (const Vec3& v : f.polygon.ring) flat = flat && std::abs(v.z()) < 1e-12;
      if (!flat) continue;
      const Vec3 a = pd.seeds[f.i].p, b = pd.seeds[f.j].p;
      CHECK((a - b).head<2>().norm() == 0.0);
      CHECK(a.z() * b.z() < 0.0);
      area += f.polygon.area();
    }
    CHECK(area == doctest::Approx(2.25 * 2.25));
    CHECK(verify_outside_balls(sp, pd.seeds) == 0);
  }

  TEST_CASE("pruned filter equals all pairs on analytic fixtures") {
    for (const auto& shape : {fixtures::sphere(), fixtures::torus(), fixtures::disk(), fixtures::crossed_sheets()}) {
      const PowerDiagram pd = compute_power_diagram(fixtures::grid(shape, 10));
      const SuperpowerContour sp = compute_superpower_contour(pd);
      CHECK(sp.source == superpower_faces_all_pairs(pd));
      CHECK(verify_outside_balls(sp, pd.seeds) == 0);
      CHECK(sp.tree.check_invariants());
    }
  }

  TEST_CASE("face inside a ball is removed and flagged") {
    const PowerDiagram pd = compute_power_diagram(fixtures::grid(fixtures::sphere(), 8));
    const SuperpowerContour sp = compute_superpower_contour(pd);
    REQUIRE_FALSE(sp.empty());
    // Every face rejected by the filter really meets some ball.
    const std::set<int> kept(sp.source.begin(), sp.source.end());
    for (std::size_t f = 0; f < pd.faces.size(); f += 7) {
      if (kept.count(static_cast<int>(f))) continue;
      bool hit = false;
      for (const Seed& s : pd.seeds) hit = hit || face_ball_intersects(pd.faces[f].polygon, s.p, s.d, sp.eps_ball);
      CHECK(hit);
    }
    std::vector<PowerFace> faces = sp.faces;
    for (Vec3& v : faces[0].polygon.ring) v = pd.seeds[0].p + 0.01 * (v - pd.seeds[0].p).normalized() * pd.seeds[0].d;
    faces[0].polygon = ConvexPolygon(faces[0].polygon.ring);
    CHECK(verify_outside_balls(faces, pd.seeds, sp.eps_ball) >= 1);
    CHECK(verify_outside_balls(std::vector<PowerFace>{}, pd.seeds, sp.eps_ball) == 0);
  }

  TEST_CASE("signed power contour") {
    const PowerDiagram pd = compute_power_diagram(fixtures::grid(fixtures::sphere(), 6));
    CHECK(power_contour_signed(pd, std::vector<int>(pd.seeds.size(), 1)).empty());
    CHECK_THROWS_AS(power_contour_signed(pd, {1, -1}), Error);
    const PowerDiagram two = compute_power_diagram({{Vec3(-0.5, 0, 0), 0.5}, {Vec3(0.5, 0, 0), 0.5}},
                                                   Aabb(Vec3::Constant(-1), Vec3::Constant(1)));
    CHECK(power_contour_signed(two, {-1, 1}) == std::vector<int>{0});
  }

  TEST_CASE("signed contour pairs are contained in the unsigned contour") {
    for (const auto& shape : {fixtures::sphere(), fixtures::torus()}) {
      const SdfGrid sdf = fixtures::signed_grid(shape, 16);
      const PowerDiagram pd = compute_power_diagram(sdf.unsigned_grid());
      std::vector<int> signs(sdf.values.size());
      for (std::size_t i = 0; i < signs.size(); ++i) signs[i] = sdf.values[i] < 0.0 ? -1 : 1;
      const std::vector<int> signed_faces = power_contour_signed(pd, signs);
      const SuperpowerContour sp = compute_superpower_contour(pd);
      std::set<std::pair<int, int>> pairs;
      for (const auto& f : sp.faces) pairs.insert({f.i, f.j});
      REQUIRE_FALSE(signed_faces.empty());
      for (int f : signed_faces) CHECK(pairs.count({pd.faces[f].i, pd.faces[f].j}) == 1);
    }
  }

  TEST_CASE("convergence study") {
    const TriMesh sphere = icosphere(0.5, 4);
    ConvergenceOptions opt;
    opt.samples = 20000;
    const auto one = contour_convergence_study(sphere, {12}, opt);
    REQUIRE(one.size() == 1);
    CHECK(one[0].resolution == 12);
    CHECK(one[0].face_count > 0);
    CHECK(one[0].hausdorff == std::max(one[0].contour_to_surface, one[0].surface_to_contour));
    CHECK_THROWS_AS(contour_convergence_study(sphere, {16, 16}, opt), Error);
    CHECK_THROWS_AS(contour_convergence_study(sphere, {1, 4}, opt), Error);

    const auto rows = contour_convergence_study(plane_patch(0.4, 8, 0.0123), {8, 16, 24}, opt);
    for (const auto& r : rows) CHECK(r.hausdorff <= r.spacing);
  }

  TEST_CASE("random seed mode") {
    ConvergenceOptions opt;
    opt.samples = 20000;
    opt.random_seeds = true;
    const auto a = contour_convergence_study(icosphere(0.5, 3), {8, 12}, opt);
    const auto b = contour_convergence_study(icosphere(0.5, 3), {8, 12}, opt);
    REQUIRE(a.size() == 2);
    CHECK(a[1].seeds == 12 * 12 * 12);
    CHECK(a[1].hausdorff == b[1].hausdorff);
  }
}
