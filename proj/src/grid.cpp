#include "spudd/grid.hpp"

#include "spudd/aabb_tree.hpp"
#include "spudd/errors.hpp"
#include "spudd/parallel.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace spudd {

void GridSpec::validate() const {
  for (int d : dims) {
    if (d < 2) throw Error("grid dims must be at least 2 per axis");
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw Error("grid spacing must be positive");
  if (!origin.allFinite()) throw Error("grid origin must be finite");
}

void UdfGrid::validate() const {
  spec.validate();
  if (values.size() != spec.node_count()) throw Error("grid value count does not match dims");
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("unsigned grid values must be finite and >= 0");
  }
}

UdfGrid SdfGrid::unsigned_grid() const {
  UdfGrid g{spec, values};
  for (double& v : g.values) v = std::abs(v);
  return g;
}

GridSpec make_grid_spec(const Aabb& box, int resolution, double padding) {
  if (resolution < 2) throw Error("resolution must be at least 2");
  if (padding < 0.0) throw Error("padding must be non-negative");
  if (box.empty()) throw EmptyInput("cannot build a grid around an empty box");
  const double pad = padding * box.diagonal();
  const Aabb grown = box.inflated(pad);
  double side = grown.extent().maxCoeff();
  if (side <= 0.0) side = 1.0;
  GridSpec spec;
  spec.dims = {resolution, resolution, resolution};
  spec.spacing = side / (resolution - 1);
  spec.origin = grown.center() - Vec3::Constant(0.5 * side);
  return spec;
}

UdfGrid sample_udf(const TriMesh& mesh, const GridSpec& spec) {
  if (mesh.empty()) throw EmptyInput("cannot sample an empty mesh");
  mesh.validate();
  spec.validate();
  TriangleSoupIndex index(mesh.triangles());
  UdfGrid grid{spec, std::vector<double>(spec.node_count())};
  parallel_for(0, grid.values.size(), [&](std::size_t n) {
    grid.values[n] = index.closest(spec.node(n)).distance;
  });
  return grid;
}

UdfGrid sample_udf(const TriMesh& mesh, int resolution, double padding) {
  if (mesh.empty()) throw EmptyInput("cannot sample an empty mesh");
  return sample_udf(mesh, make_grid_spec(mesh.bounds(), resolution, padding));
}

double winding_number(const Vec3& x, const std::vector<Triangle>& triangles) {
  double total = 0.0;
  for (const auto& t : triangles) {
    const Vec3 a = t.a - x, b = t.b - x, c = t.c - x;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double det = a.dot(b.cross(c));
    const double div = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    total += 2.0 * std::atan2(det, div);
  }
  return total / (4.0 * std::numbers::pi);
}

SdfGrid sample_sdf(const TriMesh& mesh, const GridSpec& spec) {
  UdfGrid udf = sample_udf(mesh, spec);
  const std::vector<Triangle> tris = mesh.triangles();
  const TriangleSoupIndex index(tris);
  const AabbTree& tree = index.tree();

  // The winding number is constant off the surface, so along each x row it is
  // only re-evaluated after a step whose segment touches a triangle.
  auto crosses = [&](const Vec3& a, const Vec3& b) {
    Aabb box;
    box.expand(a);
    box.expand(b);
    return tree.any_overlapping(box, [&](int id) {
      const Triangle& t = tris[id];
      if (segment_triangle_intersection(a, b, t.a, t.b, t.c)) return true;
      // Grazing contacts are caught by the distance test.
      const double eps = 1e-9 * spec.spacing;
      return point_triangle_distance(a, t).distance <= eps ||
             point_triangle_distance(b, t).distance <= eps ||
             segment_segment_distance(a, b, t.a, t.b) <= eps ||
             segment_segment_distance(a, b, t.b, t.c) <= eps ||
             segment_segment_distance(a, b, t.c, t.a) <= eps;
    });
  };

  SdfGrid sdf{spec, udf.values};
  const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
  parallel_for(0, static_cast<std::size_t>(ny) * nz, [&](std::size_t row) {
    const int j = static_cast<int>(row % ny);
    const int k = static_cast<int>(row / ny);
    double w = winding_number(spec.node(0, j, k), tris);
    for (int i = 0; i < nx; ++i) {
      if (i > 0 && crosses(spec.node(i - 1, j, k), spec.node(i, j, k)))
        w = winding_number(spec.node(i, j, k), tris);
      const std::size_t n = spec.index(i, j, k);
      if (w >= 0.5) sdf.values[n] = -udf.values[n];
    }
  });
  return sdf;
}

SdfGrid sample_sdf(const TriMesh& mesh, int resolution, double padding) {
  if (mesh.empty()) throw EmptyInput("cannot sample an empty mesh");
  return sample_sdf(mesh, make_grid_spec(mesh.bounds(), resolution, padding));
}

UdfGrid sample_function(const GridSpec& spec, const std::function<double(const Vec3&)>& f) {
  spec.validate();
  UdfGrid grid{spec, std::vector<double>(spec.node_count())};
  parallel_for(0, grid.values.size(),
               [&](std::size_t n) { grid.values[n] = std::abs(f(spec.node(n))); });
  return grid;
}

UdfGrid add_noise(const UdfGrid& grid, double sigma, std::uint64_t rng_seed) {
  if (sigma < 0.0) throw Error("noise sigma must be non-negative");
  UdfGrid out = grid;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> noise(0.0, sigma * grid.spec.spacing);
  for (double& v : out.values) v = std::max(0.0, v + noise(rng));
  return out;
}

UdfGrid grid_union(const UdfGrid& a, const UdfGrid& b) {
  if (!(a.spec == b.spec) || a.values.size() != b.values.size())
    throw GridMismatch("grid union needs identical dims, origin and spacing");
  UdfGrid out = a;
  for (std::size_t n = 0; n < out.values.size(); ++n) out.values[n] = std::min(a.values[n], b.values[n]);
  return out;
}

}  // namespace spudd
