#pragma once

#include "spudd/contouring.hpp"
#include "spudd/grid.hpp"
#include "spudd/metrics.hpp"
#include "spudd/pipeline.hpp"
#include "spudd/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fixtures {

using spudd::Vec3;

// Analytic surfaces with exact distance functions.
struct Shape {
  std::string name;
  spudd::Aabb box;
  std::function<double(const Vec3&)> distance;
  bool closed = false;
};

inline double square_distance(const Vec3& local) {
  // Distance to the square [-0.4, 0.4]^2 in the local z = 0 plane.
  const double dx = std::max(std::abs(local.x()) - 0.4, 0.0);
  const double dy = std::max(std::abs(local.y()) - 0.4, 0.0);
  return std::sqrt(dx * dx + dy * dy + local.z() * local.z());
}

inline Shape sphere(double r = 0.5) {
  return {"sphere", {Vec3::Constant(-r), Vec3::Constant(r)}, [r](const Vec3& x) { return x.norm() - r; }, true};
}

inline Shape torus(double major = 0.35, double minor = 0.15) {
  return {"torus",
          {Vec3(-major - minor, -major - minor, -minor), Vec3(major + minor, major + minor, minor)},
          [=](const Vec3& x) {
            const double rho = std::hypot(x.x(), x.y()) - major;
            return std::hypot(rho, x.z()) - minor;
          },
          true};
}

// Disk of radius 0.4 in the plane z = height.
inline Shape disk(double height = 0.0123) {
  return {"disk",
          {Vec3(-0.4, -0.4, 0.0), Vec3(0.4, 0.4, 0.0)},
          [=](const Vec3& x) {
            const double rho = std::max(std::hypot(x.x(), x.y()) - 0.4, 0.0);
            return std::hypot(rho, x.z() - height);
          }};
}

// Squares in z = 0 and x = 0 meeting along the y axis.
inline Shape crossed_sheets() {
  return {"crossed_sheets",
          {Vec3::Constant(-0.4), Vec3::Constant(0.4)},
          [](const Vec3& x) {
            return std::min(square_distance(x), square_distance(Vec3(x.z(), x.y(), x.x())));
          }};
}

// Unbounded plane z = height.
inline Shape plane(double height = 0.0123) {
  return {"plane", {Vec3::Constant(-0.5), Vec3::Constant(0.5)}, [=](const Vec3& x) { return x.z() - height; }};
}

inline spudd::UdfGrid grid(const Shape& s, int res) {
  return spudd::sample_function(spudd::make_grid_spec(s.box, res), s.distance);
}

inline spudd::SdfGrid signed_grid(const Shape& s, int res) {
  spudd::SdfGrid g;
  g.spec = spudd::make_grid_spec(s.box, res);
  g.values.resize(g.spec.node_count());
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = s.distance(g.spec.node(i));
  return g;
}

// Area-uniform samples on the analytic surface.
inline std::vector<Vec3> surface_points(const Shape& s, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec3> pts;
  pts.reserve(n);
  while (pts.size() < n) {
    if (s.name == "sphere") {
      pts.push_back(0.5 * Vec3(g(rng), g(rng), g(rng)).normalized());
    } else if (s.name == "disk") {
      const double r = 0.4 * std::sqrt(u(rng)), t = 2.0 * M_PI * u(rng);
      pts.emplace_back(r * std::cos(t), r * std::sin(t), 0.0123);
    } else if (s.name == "crossed_sheets") {
      const double a = 0.8 * u(rng) - 0.4, b = 0.8 * u(rng) - 0.4;
      pts.push_back(u(rng) < 0.5 ? Vec3(a, b, 0.0) : Vec3(0.0, b, a));
    } else {
      // Torus: uniform angles, thinned by the area element.
      const double t = 2.0 * M_PI * u(rng), p = 2.0 * M_PI * u(rng);
      const double ring = 0.35 + 0.15 * std::cos(p);
      if (u(rng) * 0.5 > ring) continue;
      pts.emplace_back(ring * std::cos(t), ring * std::sin(t), 0.15 * std::sin(p));
    }
  }
  return pts;
}

struct SurfaceError {
  double chamfer = 0.0;    // mean of the two directed mean distances
  double hausdorff = 0.0;  // larger directed maximum
};

// Sampled distances between a mesh and an analytic surface.
inline SurfaceError compare_to_shape(const spudd::TriMesh& mesh, const Shape& s, std::size_t n = 100000) {
  const spudd::SurfaceSamples on_mesh = spudd::sample_surface(mesh, n, 1);
  const std::vector<Vec3> on_shape = surface_points(s, n, 2);
  const spudd::TriangleSoupIndex index(mesh.triangles());
  const std::vector<double> back = spudd::distances_to(on_shape, index);
  double sum_a = 0.0, sum_b = 0.0, max_a = 0.0, max_b = 0.0;
  for (const Vec3& p : on_mesh.points) {
    const double d = std::abs(s.distance(p));
    sum_a += d;
    max_a = std::max(max_a, d);
  }
  for (double d : back) {
    sum_b += d;
    max_b = std::max(max_b, d);
  }
  return {0.5 * (sum_a / on_mesh.points.size() + sum_b / back.size()), std::max(max_a, max_b)};
}

inline std::string obj_bytes(const spudd::QuadMesh& mesh) {
  std::ostringstream s;
  spudd::write_obj(s, spudd::to_polymesh(mesh));
  return s.str();
}

// Flat n x n sheet of quads in z = 0 on an integer lattice.
inline spudd::QuadMesh sheet(int n) {
  spudd::QuadMesh m;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) m.vertices.emplace_back(i, j, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int a = j * (n + 1) + i;
      m.quads.push_back({a, a + 1, a + n + 2, a + n + 1});
    }
  m.vertex_cell.assign(m.vertices.size(), -1);
  m.quad_edge.assign(m.quads.size(), -1);
  return m;
}

// Adds a strip of `height` quads standing on the sheet edge from vertex a to
// vertex b, so that edge gets three incident faces.
inline void add_fin(spudd::QuadMesh& m, int a, int b, int height) {
  int lo_a = a, lo_b = b;
  for (int k = 1; k <= height; ++k) {
    const int na = static_cast<int>(m.vertices.size());
    m.vertices.push_back(m.vertices[a] + Vec3(0, 0, k));
    m.vertices.push_back(m.vertices[b] + Vec3(0, 0, k));
    m.vertex_cell.push_back(-1);
    m.vertex_cell.push_back(-1);
    m.quads.push_back({lo_a, lo_b, na + 1, na});
    m.quad_edge.push_back(-1);
    lo_a = na;
    lo_b = na + 1;
  }
}

// Closed cube of six quads offset by `shift`.
inline void add_cube(spudd::QuadMesh& m, const Vec3& shift) {
  const int b = static_cast<int>(m.vertices.size());
  for (int c = 0; c < 8; ++c) {
    m.vertices.push_back(shift + Vec3(c & 1, (c >> 1) & 1, (c >> 2) & 1));
    m.vertex_cell.push_back(-1);
  }
  const int faces[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& f : faces) {
    m.quads.push_back({b + f[0], b + f[1], b + f[2], b + f[3]});
    m.quad_edge.push_back(-1);
  }
}

}  // namespace fixtures
