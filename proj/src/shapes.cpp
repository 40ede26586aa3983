#include "spudd/shapes.hpp"

#include "convex_cell.hpp"
#include "spudd/errors.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace spudd {

TriMesh icosphere(double radius, int subdivisions, const Vec3& center) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                         {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                         {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(4 * f.size());
    for (const auto& tri : f) {
      const int a = midpoint(tri[0], tri[1]);
      const int b = midpoint(tri[1], tri[2]);
      const int c = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  TriMesh m;
  for (const auto& p : v) m.vertices.push_back(center + radius * p);
  m.faces = std::move(f);
  return m;
}

TriMesh torus(double major, double minor, int segments, int sides) {
  TriMesh m;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < segments; ++i) {
    const double u = two_pi * i / segments;
    for (int j = 0; j < sides; ++j) {
      const double w = two_pi * j / sides;
      const double r = major + minor * std::cos(w);
      m.vertices.emplace_back(r * std::cos(u), r * std::sin(u), minor * std::sin(w));
    }
  }
  auto id = [&](int i, int j) { return (i % segments) * sides + (j % sides); };
  for (int i = 0; i < segments; ++i) {
    for (int j = 0; j < sides; ++j) {
      m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return m;
}

TriMesh disk(double radius, int segments, int rings) {
  TriMesh m;
  m.vertices.emplace_back(0, 0, 0);
  const double two_pi = 2.0 * std::numbers::pi;
  for (int r = 1; r <= rings; ++r) {
    const double rad = radius * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double a = two_pi * s / segments;
      m.vertices.emplace_back(rad * std::cos(a), rad * std::sin(a), 0.0);
    }
  }
  auto id = [&](int r, int s) { return r == 0 ? 0 : 1 + (r - 1) * segments + (s % segments); };
  for (int s = 0; s < segments; ++s) m.faces.push_back({0, id(1, s), id(1, s + 1)});
  for (int r = 1; r < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      m.faces.push_back({id(r, s), id(r + 1, s), id(r + 1, s + 1)});
      m.faces.push_back({id(r, s), id(r + 1, s + 1), id(r, s + 1)});
    }
  }
  return m;
}

namespace {

// n x n grid of quads over a square, mapped through `at(u, v)` with u, v in [-half, half].
template <class At>
TriMesh sheet(double half, int n, At at) {
  TriMesh m;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) m.vertices.push_back(at(-half + 2 * half * i / n, -half + 2 * half * j / n));
  }
  auto id = [&](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return m;
}

}  // namespace

TriMesh plane_patch(double half, int n, double height) {
  return sheet(half, n, [&](double u, double v) { return Vec3(u, v, height); });
}

TriMesh crossed_sheets(double half, int n) {
  TriMesh a = sheet(half, n, [](double u, double v) { return Vec3(u, v, 0.0); });
  TriMesh b = sheet(half, n, [](double u, double v) { return Vec3(0.0, v, u); });
  return merge(a, b);
}

TriMesh merge(const TriMesh& a, const TriMesh& b) {
  TriMesh m = a;
  const int off = static_cast<int>(a.vertices.size());
  m.vertices.insert(m.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (const auto& f : b.faces) m.faces.push_back({f[0] + off, f[1] + off, f[2] + off});
  return m;
}

namespace {

TriMesh cell_surface(const ConvexCell& cell, const Vec3& offset) {
  TriMesh m;
  std::vector<int> remap(cell.vertex_slots(), -1);
  for (int v : cell.live_vertices()) {
    remap[v] = static_cast<int>(m.vertices.size());
    m.vertices.push_back(offset + cell.vertices()[v]);
  }
  for (const auto& f : cell.faces()) {
    for (std::size_t k = 1; k + 1 < f.ring.size(); ++k)
      m.faces.push_back({remap[f.ring[0]], remap[f.ring[k]], remap[f.ring[k + 1]]});
  }
  return m;
}

}  // namespace

TriMesh box_mesh(const Vec3& lo, const Vec3& hi) {
  const Vec3 c = 0.5 * (lo + hi);
  ConvexCell cell(Aabb(lo - c, hi - c));
  return cell_surface(cell, c);
}

TriMesh beveled_box(const Vec3& lo, const Vec3& hi, double bevel) {
  if (bevel < 0.0) throw Error("bevel must be non-negative");
  const Vec3 c = 0.5 * (lo + hi);
  const Vec3 e = 0.5 * (hi - lo);
  ConvexCell cell(Aabb(-e, e));
  if (bevel > 0.0) {
    // Edge parallel to axis a, at the (sb, sc) corner of the other two axes.
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, d = (a + 2) % 3;
      for (int sb : {-1, 1}) {
        for (int sd : {-1, 1}) {
          Vec3 n = Vec3::Zero();
          n[b] = sb;
          n[d] = sd;
          cell.clip(n, e[b] + e[d] - bevel, 0, 1e-15);
        }
      }
    }
  }
  return cell_surface(cell, c);
}

}  // namespace spudd
