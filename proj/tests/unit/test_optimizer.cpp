#include "doctest.h"
#include "fixtures.hpp"
#include "spudd/contouring.hpp"
#include "spudd/errors.hpp"
#include "spudd/optimizer.hpp"
#include "spudd/pipeline.hpp"
#include "spudd/postprocess.hpp"

#include <random>

using namespace spudd;

namespace {

constexpr std::uint16_t kVertical = (1u << 8) | (1u << 9) | (1u << 10) | (1u << 11);

// Unit cell straddling z = 0 with Hermite data of that plane on its four
// vertical edges.
CellProblem plane_cell() {
  CellProblem c;
  c.q = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)};
  c.n.assign(4, Vec3(0, 0, 1));
  local_mesh_topology(kVertical, c.fan, c.spokes);
  c.clamp = Aabb(Vec3(0, 0, -0.5), Vec3(1, 1, 0.5)).inflated(0.25);
  return c;
}

// Independent evaluation of the local energy by projection onto each
// triangle's plane and edges.
long double reference_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  using V = Eigen::Matrix<long double, 3, 1>;
  const V P = p.cast<long double>(), A = a.cast<long double>(), B = b.cast<long double>(), C = c.cast<long double>();
  auto seg = [](const V& x, const V& u, const V& v) {
    const V d = v - u;
    const long double len2 = d.squaredNorm();
    long double t = len2 > 0 ? (x - u).dot(d) / len2 : 0;
    t = std::clamp<long double>(t, 0, 1);
    return (x - (u + t * d)).norm();
  };
  long double best = std::min({seg(P, A, B), seg(P, B, C), seg(P, C, A)});
  const V n = (B - A).cross(C - A);
  if (n.squaredNorm() > 0) {
    const V proj = P - n * ((P - A).dot(n) / n.squaredNorm());
    const bool inside = (B - A).cross(proj - A).dot(n) >= 0 && (C - B).cross(proj - B).dot(n) >= 0 &&
                        (A - C).cross(proj - C).dot(n) >= 0;
    if (inside) best = std::min(best, (P - proj).norm());
  }
  return best;
}

}  // namespace

TEST_SUITE("dual_optimizer") {
  TEST_CASE("initial dual vertices are Hermite means") {
    GridSpec spec;
    spec.dims = {3, 3, 3};
    const ActiveTopology one = topology_from_edges(spec, {2});
    HermiteData h{{Vec3(0, 0, 0.3)}, {Vec3(0, 0, 1)}};
    CHECK(init_dual_vertices(one, h)[0] == Vec3(0, 0, 0.3));

    const UdfGrid plane = fixtures::grid(fixtures::plane(), 10);
    const ContourResult c = extract_contour(plane);
    const ActiveTopology topo = find_active_topology(plane, c.contour);
    const HermiteData ph = merge_hermite(topo, init_cell_hermite(plane, topo));
    const std::vector<Vec3> x = init_dual_vertices(topo, ph);
    for (std::size_t ci = 0; ci < x.size(); ++ci) {
      CHECK(std::abs(x[ci].z() - 0.0123) <= eps_geom(plane.spec));
      if (topo.cell_edges[ci].size() == 4) {
        Vec3 mean = Vec3::Zero();
        for (int e : topo.cell_edges[ci]) mean += ph.q[e];
        CHECK((x[ci] - mean / 4.0).norm() < 1e-15);
      }
    }
  }

  TEST_CASE("local mesh fan pairs edges sharing a cell face") {
    std::vector<std::array<int, 2>> fan;
    std::vector<int> spokes;
    local_mesh_topology(kVertical, fan, spokes);
    // Vertical edges pair around the four side faces.
    CHECK(fan.size() == 4);
    CHECK(spokes.empty());
    local_mesh_topology((1u << 0) | (1u << 11), fan, spokes);
    CHECK(fan.empty());
    CHECK(spokes == std::vector<int>{0, 1});
  }

  TEST_CASE("local energy examples") {
    CellProblem c = plane_cell();
    const Vec3 x(0.5, 0.5, 0.0);
    c.p = {Vec3(0.5, 0.5, 0.3), Vec3(0.2, 0.7, -0.1)};
    c.d = {0.3, 0.1};
    CHECK(local_energy(c, x) == doctest::Approx(0.0));
    // Only the normal terms change when the vertex moves within the plane.
    c.p.clear();
    c.d.clear();
    c.n = {Vec3(1, 0, 0), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
    CHECK(local_energy(c, Vec3(0, 0.5, 0.2)) == 0.0);
    CHECK(local_energy(c, Vec3(0.5, 0.5, 0.2)) == doctest::Approx(0.25));
  }

  TEST_CASE("local energy matches an independent evaluation") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      CellProblem c;
      const std::uint16_t mask = static_cast<std::uint16_t>(rng() & 0xfff) | 1u;
      for (int k = 0; k < 12; ++k)
        if (mask >> k & 1) {
          c.q.push_back(Vec3(u(rng), u(rng), u(rng)));
          c.n.push_back(trial % 3 ? Vec3(u(rng), u(rng), u(rng)).normalized() : Vec3::Zero());
        }
      local_mesh_topology(mask, c.fan, c.spokes);
      for (int j = 0; j < 5; ++j) {
        c.p.push_back(2.0 * Vec3(u(rng), u(rng), u(rng)));
        c.d.push_back(std::abs(u(rng)));
      }
      const Vec3 x(u(rng), u(rng), u(rng));
      long double e = 0;
      for (std::size_t j = 0; j < c.p.size(); ++j) {
        long double best = 1e300;
        for (const auto& [a, b] : c.fan) best = std::min(best, reference_distance(c.p[j], x, c.q[a], c.q[b]));
        for (int k : c.spokes) best = std::min(best, reference_distance(c.p[j], x, c.q[k], c.q[k]));
        e += (best - c.d[j]) * (best - c.d[j]);
      }
      for (std::size_t k = 0; k < c.q.size(); ++k) {
        const long double g = c.n[k].cast<long double>().dot((x - c.q[k]).cast<long double>());
        e += g * g;
      }
      CHECK(local_energy(c, x) == doctest::Approx(static_cast<double>(e)).epsilon(1e-9));
      CHECK(local_energy(c, x) >= 0.0);
    }
  }

  TEST_CASE("minimiser on a plane") {
    CellProblem c = plane_cell();
    c.p = {Vec3(0.5, 0.5, 0.3), Vec3(0.4, 0.6, -0.2)};
    c.d = {0.3, 0.2};
    const double tol = 1e-6;
    const LocalResult r = local_minimize(c, Vec3(0.5, 0.5, 0.2), 10, tol, 1e-3);
    CHECK(std::abs(r.x.z()) <= 10 * tol);
    CHECK(r.surrogate_increases == 0);
    CHECK(r.iterations >= 1);
  }

  TEST_CASE("single Hermite point without seeds stays put") {
    CellProblem c;
    c.q = {Vec3(0.3, 0.4, 0.5)};
    c.n = {Vec3(0, 0, 1)};
    local_mesh_topology(1u << 8, c.fan, c.spokes);
    c.clamp = Aabb(Vec3::Zero(), Vec3::Ones()).inflated(0.25);
    const LocalResult r = local_minimize(c, c.q[0], 10, 1e-9, 1e-3);
    CHECK((r.x - c.q[0]).norm() < 1e-15);
  }

  TEST_CASE("the vertex never leaves the clamp box") {
    CellProblem c = plane_cell();
    c.p = {Vec3(0.5, 0.5, 5.0)};
    c.d = {0.0};
    c.n.assign(4, Vec3::Zero());
    const LocalResult r = local_minimize(c, Vec3(0.5, 0.5, 0.0), 10, 1e-9, 1e-3);
    CHECK(c.clamp.contains(r.x));
    CHECK(r.surrogate_increases == 0);
  }

  TEST_CASE("negating normals leaves the minimiser bit-identical") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      CellProblem c = plane_cell();
      for (auto& n : c.n) n = Vec3(u(rng), u(rng), u(rng)).normalized();
      for (int j = 0; j < 4; ++j) {
        c.p.push_back(Vec3(u(rng), u(rng), u(rng)));
        c.d.push_back(std::abs(u(rng)) * 0.5);
      }
      CellProblem flipped = c;
      for (std::size_t k = 0; k < c.n.size(); ++k)
        if (rng() & 1) flipped.n[k] = -flipped.n[k];
      const Vec3 x0(0.5 + 0.1 * u(rng), 0.5, 0.1 * u(rng));
      const LocalResult a = local_minimize(c, x0, 10, 1e-9, 1e-3);
      const LocalResult b = local_minimize(flipped, x0, 10, 1e-9, 1e-3);
      CHECK(a.x == b.x);
      CHECK(local_energy(c, a.x) == local_energy(flipped, a.x));
    }
  }

  TEST_CASE("Hermite update from a flat quad") {
    GridSpec spec;
    spec.dims = {4, 4, 4};
    const EdgeId e = static_cast<EdgeId>(spec.index(1, 1, 1)) * 3 + 2;
    const ActiveTopology topo = topology_from_edges(spec, {e});
    std::vector<Vec3> dual;
    for (CellId cell : topo.cells) {
      const auto k = spec.coords(static_cast<std::size_t>(cell));
      dual.push_back(Vec3(k[0] + 0.5, k[1] + 0.5, 1.3));
    }
    const QuadMesh mesh = assemble_quads(topo, dual);
    REQUIRE(mesh.quads.size() == 1);
    const HermiteData up = update_hermite(mesh, topo, {{Vec3(1, 1, 1.5)}, {Vec3(0, 0, 1)}});
    CHECK((up.q[0] - Vec3(1, 1, 1.3)).norm() < 1e-15);
    CHECK(up.n[0] == Vec3(0, 0, 1));
    const HermiteData down = update_hermite(mesh, topo, {{Vec3(1, 1, 1.5)}, {Vec3(0, 0.6, -0.8)}});
    CHECK(down.n[0] == Vec3(0, 0, -1));
  }

  TEST_CASE("plane: Hermite points are a fixed point") {
    const UdfGrid g = fixtures::grid(fixtures::plane(), 12);
    const ContourResult c = extract_contour(g);
    const ActiveTopology topo = find_active_topology(g, c.contour);
    const HermiteData h = merge_hermite(topo, init_cell_hermite(g, topo));
    OptimizerConfig one;
    one.k2 = 1;
    const OptimizeResult r = optimize(g, topo, h, assign_spheres(c.diagram.seeds, c.contour, topo), one);
    for (std::size_t e = 0; e < h.q.size(); ++e) CHECK((r.hermite.q[e] - h.q[e]).norm() <= one.tol * g.spec.spacing);
  }

  TEST_CASE("plane: energy collapses from a perturbed start") {
    const UdfGrid g = fixtures::grid(fixtures::plane(), 16);
    const ContourResult c = extract_contour(g);
    const ActiveTopology topo = find_active_topology(g, c.contour);
    const HermiteData h = merge_hermite(topo, init_cell_hermite(g, topo));
    const std::vector<int> assignment = assign_spheres(c.diagram.seeds, c.contour, topo);
    std::vector<Vec3> x0 = init_dual_vertices(topo, h);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Vec3& x : x0) x += 0.2 * g.spec.spacing * Vec3(u(rng), u(rng), u(rng));
    const OptimizeResult r = optimize(g, topo, h, assignment, OptimizerConfig{}, x0);
    REQUIRE(r.energy.size() == 21);
    CHECK(r.energy.back() <= 1e-6 * r.energy.front());
    CHECK(r.surrogate_increases == 0);
  }

  TEST_CASE("zero outer iterations return the initialisation") {
    const UdfGrid g = fixtures::grid(fixtures::sphere(), 12);
    const ContourResult c = extract_contour(g);
    const ActiveTopology topo = find_active_topology(g, c.contour);
    const HermiteData h = merge_hermite(topo, init_cell_hermite(g, topo));
    OptimizerConfig none;
    none.k2 = 0;
    const OptimizeResult r = optimize(g, topo, h, assign_spheres(c.diagram.seeds, c.contour, topo), none);
    CHECK(r.dual == init_dual_vertices(topo, h));
    CHECK(r.hermite.q == h.q);
    CHECK(r.energy.size() == 1);
    OptimizerConfig bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(optimize(g, topo, h, assign_spheres(c.diagram.seeds, c.contour, topo), bad), Error);
  }

  TEST_CASE("sphere: energy trace mostly decreases") {
    const Reconstruction r = reconstruct(fixtures::grid(fixtures::sphere(), 16));
    const auto& e = r.report.energy;
    REQUIRE(e.size() == 21);
    CHECK(e.back() < e.front());
    CHECK(r.report.surrogate_increases == 0);
    std::size_t down = 0;
    for (std::size_t k = 1; k < e.size(); ++k) down += e[k] <= e[k - 1] ? 1 : 0;
    MESSAGE("non-increasing outer steps: " << down << " of " << e.size() - 1);
  }
}
