#pragma once

#include "spudd/aabb_tree.hpp"
#include "spudd/mesh.hpp"

#include <cstdint>
#include <vector>

namespace spudd {

struct SurfaceSamples {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // unit normal of the source triangle
};

// Area-weighted uniform samples; deterministic per seed. Throws ZeroArea
// when the mesh has no area and EmptyInput when it has no faces.
SurfaceSamples sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t rng_seed);

// Distance from each point to the indexed mesh.
std::vector<double> distances_to(const std::vector<Vec3>& points, const TriangleSoupIndex& mesh);

struct MetricOptions {
  std::size_t samples = 100000;  // per side
  double edge_angle_deg = 30.0;
  double edge_radius_fraction = 0.01;  // of the union bounding-box diagonal
  std::uint64_t rng_seed = 1;
};

// Symmetric mean of point-to-mesh distances.
double chamfer_l2(const TriMesh& a, const TriMesh& b, std::size_t n, std::uint64_t rng_seed = 1);

// Largest sampled point-to-mesh distance over both directions.
double hausdorff(const TriMesh& a, const TriMesh& b, std::size_t n, std::uint64_t rng_seed = 1);

struct EdgeChamfer {
  double value = 0.0;
  bool no_edges = false;  // one side had no edge samples; value is 0
};

// Chamfer restricted to edge samples: samples with a neighbour within
// `radius` whose normal differs by more than `angle_deg`. Distances are
// measured between the two edge sample sets.
EdgeChamfer edge_chamfer(const TriMesh& a, const TriMesh& b, std::size_t n, double angle_deg,
                         double radius, std::uint64_t rng_seed = 1);

struct MetricReport {
  double ce = 0.0;
  double he = 0.0;
  double ece = 0.0;
  bool ece_no_edges = false;
  std::size_t vertex_count = 0;  // of the first mesh
  std::size_t sample_count = 0;
};

MetricReport compute_metrics(const TriMesh& a, const TriMesh& b, const MetricOptions& options = {});

}  // namespace spudd
