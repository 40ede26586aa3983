#include "doctest.h"
#include "spudd/errors.hpp"
#include "spudd/parallel.hpp"
#include "spudd/power_diagram.hpp"

#include <map>
#include <random>

using namespace spudd;

namespace {

const Aabb kBox(Vec3::Constant(-1), Vec3::Constant(1));

std::vector<Seed> random_seeds(std::size_t n, std::uint64_t seed, double max_d = 0.3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.9, 0.9), w(0.0, max_d);
  std::vector<Seed> s(n);
  for (auto& x : s) x = {Vec3(u(rng), u(rng), u(rng)), w(rng)};
  return s;
}

using PairKey = std::pair<int, int>;

std::map<PairKey, double> face_areas(const PowerDiagram& pd) {
  std::map<PairKey, double> out;
  for (const auto& f : pd.faces) out[{f.i, f.j}] += f.polygon.area();
  return out;
}

}  // namespace

TEST_SUITE("power_diagram") {
  TEST_CASE("power distance") {
    CHECK(power_distance(Vec3(2, 0, 0), {Vec3::Zero(), 1.0}) == 3.0);
    CHECK(power_distance(Vec3(0, 0.6, 0.8), {Vec3::Zero(), 1.0}) == doctest::Approx(0.0));
    CHECK(power_distance(Vec3(1, 2, 3), {Vec3(1, 2, 3), 0.5}) == -0.25);
  }

  TEST_CASE("classification ties go to the lower index") {
    const std::vector<Seed> one{{Vec3(0.3, 0, 0), 0.1}};
    CHECK(classify_point(Vec3(5, 5, 5), one) == 0);
    const std::vector<Seed> two{{Vec3(1, 0, 0), 0.5}, {Vec3(-1, 0, 0), 0.5}};
    CHECK(classify_point(Vec3(0, 0.3, 0), two) == 0);
    CHECK(classify_point(Vec3(-0.1, 0, 0), two) == 1);
  }

  TEST_CASE("two seeds meet on the radical plane") {
    const PowerDiagram pd = compute_power_diagram({{Vec3(0, 0, 0), 0.0}, {Vec3(2, 0, 0), 1.0}},
                                                  Aabb(Vec3(-1, -1, -1), Vec3(3, 1, 1)));
    REQUIRE(pd.faces.size() == 1);
    CHECK(pd.faces[0].i == 0);
    CHECK(pd.faces[0].j == 1);
    for (const Vec3& v : pd.faces[0].polygon.ring) CHECK(v.x() == doctest::Approx(0.75));
    CHECK(pd.faces[0].polygon.area() == doctest::Approx(4.0));
    CHECK(pd.faces[0].on_boundary);
  }

  TEST_CASE("equal weights meet on the bisector") {
    const PowerDiagram pd = compute_power_diagram({{Vec3(0, 0, -0.5), 0.2}, {Vec3(0, 0, 0.5), 0.2}}, kBox);
    REQUIRE(pd.faces.size() == 1);
    for (const Vec3& v : pd.faces[0].polygon.ring) CHECK(std::abs(v.z()) < 1e-12);
  }

  TEST_CASE("input errors") {
    CHECK_THROWS_AS(compute_power_diagram({{Vec3::Zero(), 0.1}}, kBox), EmptyInput);
    try {
      compute_power_diagram({{Vec3(0.1, 0, 0), 0.1}, {Vec3(0.2, 0, 0), 0.1}, {Vec3(0.1, 0, 0), 0.3}}, kBox);
      FAIL("no error");
    } catch (const DuplicateSeed& e) {
      CHECK(e.first() == 0);
      CHECK(e.second() == 2);
    }
  }

  TEST_CASE("containing cell agrees with brute force on random seeds") {
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
      const std::vector<Seed> seeds = random_seeds(200, 100 + trial);
      const PowerDiagram pd = compute_power_diagram(seeds, kBox);
      std::mt19937_64 rng(trial);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (int q = 0; q < 1000; ++q) {
        const Vec3 x(u(rng), u(rng), u(rng));
        CHECK(containing_cell(pd, x) == classify_point(x, seeds));
      }
      const DiagramReport r = validate_diagram(pd, 10000, trial);
      CHECK(r.violations() == 0);
      CHECK(r.face_vertices > 0);
    }
  }

  TEST_CASE("structure: sorted faces, two cells per face, convex cells") {
    const PowerDiagram pd = compute_power_diagram(random_seeds(150, 7), kBox);
    for (std::size_t f = 1; f < pd.faces.size(); ++f)
      CHECK(std::make_pair(pd.faces[f - 1].i, pd.faces[f - 1].j) < std::make_pair(pd.faces[f].i, pd.faces[f].j));
    std::vector<int> uses(pd.faces.size(), 0);
    for (std::size_t c = 0; c < pd.cell_faces.size(); ++c)
      for (int f : pd.cell_faces[c]) {
        ++uses[f];
        CHECK((pd.faces[f].i == int(c) || pd.faces[f].j == int(c)));
      }
    for (int u : uses) CHECK(u == 2);
    // Each cell's vertex centroid lies on its own side of every face.
    for (std::size_t c = 0; c < pd.cell_faces.size(); ++c) {
      if (pd.cell_faces[c].empty()) continue;
      Vec3 centroid = Vec3::Zero();
      int n = 0;
      for (int f : pd.cell_faces[c])
        for (const Vec3& v : pd.faces[f].polygon.ring) centroid += v, ++n;
      centroid /= n;
      for (int f : pd.cell_faces[c]) {
        const int other = pd.faces[f].i == int(c) ? pd.faces[f].j : pd.faces[f].i;
        CHECK(power_distance(centroid, pd.seeds[c]) <= power_distance(centroid, pd.seeds[other]) + pd.eps_pow());
      }
    }
  }

  TEST_CASE("fault injection is detected") {
    PowerDiagram pd = compute_power_diagram(random_seeds(60, 3), kBox);
    REQUIRE(validate_diagram(pd, 100).violations() == 0);
    PowerFace& f = pd.faces[pd.faces.size() / 2];
    const Vec3 axis = pd.seeds[f.j].p - pd.seeds[f.i].p;
    // Moving along the seed axis changes pi_i - pi_j by 2 t |axis|.
    const double t = 10.0 * pd.eps_pow() / (2.0 * axis.norm());
    f.polygon.ring[0] += t * axis.normalized();
    CHECK(validate_diagram(pd, 100).violations() >= 1);
  }

  TEST_CASE("hidden seed has no cell") {
    const std::vector<Seed> seeds{{Vec3(0, 0, 0), 0.8}, {Vec3(0.1, 0, 0), 0.01}, {Vec3(0.5, 0.5, 0.5), 0.1}};
    const PowerDiagram pd = compute_power_diagram(seeds, kBox);
    CHECK(pd.hidden[1]);
    CHECK(pd.hidden_count() == 1);
    CHECK(pd.cell_faces[1].empty());
    for (const auto& f : pd.faces) CHECK((f.i != 1 && f.j != 1));
    CHECK(validate_diagram(pd, 2000).violations() == 0);
  }

  TEST_CASE("triangulation and clipping produce the same faces") {
    for (std::uint64_t trial = 0; trial < 3; ++trial) {
      const std::vector<Seed> seeds = random_seeds(120, 40 + trial);
      PowerDiagramOptions clip;
      clip.method = PowerDiagramOptions::Method::Clipping;
      const auto a = face_areas(compute_power_diagram(seeds, kBox));
      const auto b = face_areas(compute_power_diagram(seeds, kBox, clip));
      // Faces of negligible area may appear in only one of them.
      for (const auto& [key, area] : a)
        if (area > 1e-9) {
          REQUIRE(b.count(key) == 1);
          CHECK(b.at(key) == doctest::Approx(area).epsilon(1e-6));
        }
      for (const auto& [key, area] : b)
        if (area > 1e-9) CHECK(a.count(key) == 1);
    }
  }

  TEST_CASE("lattice seeds with quantised weights stay valid") {
    std::vector<Seed> seeds;
    for (int k = 0; k < 5; ++k)
      for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 5; ++i) seeds.push_back({Vec3(i, j, k) * 0.4 - Vec3::Constant(0.8), 0.05 * ((i + j + k) % 3)});
    const PowerDiagram pd = compute_power_diagram(seeds, kBox);
    CHECK(validate_diagram(pd, 5000).violations() == 0);
  }

  TEST_CASE("grid input uses the padded grid box") {
    UdfGrid g;
    g.spec.dims = {4, 4, 4};
    g.spec.spacing = 0.5;
    g.values.assign(64, 0.2);
    const PowerDiagram pd = compute_power_diagram(g);
    CHECK(pd.seeds.size() == 64);
    CHECK(pd.bbox.lo == Vec3::Constant(-0.5));
    CHECK(pd.bbox.hi == Vec3::Constant(2.0));
    CHECK(validate_diagram(pd, 2000).violations() == 0);
  }

  TEST_CASE("output does not depend on the thread count") {
    const std::vector<Seed> seeds = random_seeds(300, 77);
    const int before = thread_count();
    set_thread_count(1);
    const PowerDiagram a = compute_power_diagram(seeds, kBox);
    set_thread_count(4);
    const PowerDiagram b = compute_power_diagram(seeds, kBox);
    set_thread_count(before);
    REQUIRE(a.faces.size() == b.faces.size());
    for (std::size_t f = 0; f < a.faces.size(); ++f) {
      CHECK(a.faces[f].i == b.faces[f].i);
      CHECK(a.faces[f].j == b.faces[f].j);
      CHECK(a.faces[f].polygon.ring == b.faces[f].polygon.ring);
    }
  }
}
