#pragma once

#include "spudd/contouring.hpp"
#include "spudd/postprocess.hpp"

#include <array>
#include <optional>
#include <vector>

namespace spudd {

struct OptimizerConfig {
  int k1 = 10;          // inner iterations
  int k2 = 20;          // outer iterations
  double tol = 1e-4;    // inner step threshold, in units of the spacing
  double lambda = 1e-3;
};

// Mean of each active cell's Hermite points.
std::vector<Vec3> init_dual_vertices(const ActiveTopology& topo, const HermiteData& hermite);

// Everything one cell's solve reads. The local mesh is the fan of triangles
// (v, q_a, q_b) over active-edge pairs sharing a cell face, plus segments
// (v, q_k) for Hermite points no triangle uses.
struct CellProblem {
  std::vector<Vec3> q, n;
  std::vector<std::array<int, 2>> fan;
  std::vector<int> spokes;
  std::vector<Vec3> p;  // assigned seeds
  std::vector<double> d;
  Aabb clamp;
};

// Local mesh pairs for a cell's active edges, as indices in local order.
void local_mesh_topology(std::uint16_t active_mask, std::vector<std::array<int, 2>>& fan,
                         std::vector<int>& spokes);

struct LocalClosest {
  Vec3 point = Vec3::Zero();
  double distance = kInf;
  double alpha = 0.0;  // weight of the dual vertex in `point`
};

LocalClosest closest_on_local_mesh(const CellProblem& cell, const Vec3& x, const Vec3& p);

// Sum of squared distance residuals to the assigned seeds plus squared
// normal residuals.
double local_energy(const CellProblem& cell, const Vec3& x);

struct LocalResult {
  Vec3 x = Vec3::Zero();
  int iterations = 0;
  // Inner steps that raised the linearised objective; always 0 unless the
  // solve is broken.
  int surrogate_increases = 0;
};

// `tol` is absolute. The step toward each quadratic minimiser is shortened
// so the vertex stays inside the clamp box.
LocalResult local_minimize(const CellProblem& cell, const Vec3& x0, int k1, double tol, double lambda);

// Per active edge: the quad's triangles give the new crossing and normal.
HermiteData update_hermite(const QuadMesh& mesh, const ActiveTopology& topo, const HermiteData& hermite);

struct OptimizeResult {
  std::vector<Vec3> dual;
  HermiteData hermite;
  std::vector<double> energy;  // initial, then after each outer iteration
  std::size_t surrogate_increases = 0;
  std::size_t inner_iterations = 0;
};

// Builds the per-cell problem for active cell ci.
CellProblem make_cell_problem(const ActiveTopology& topo, const HermiteData& hermite,
                              const std::vector<Seed>& seeds, const std::vector<int>& seed_ids, int ci);

OptimizeResult optimize(const UdfGrid& grid, const ActiveTopology& topo, HermiteData hermite,
                        const std::vector<int>& assignment, const OptimizerConfig& config,
                        std::optional<std::vector<Vec3>> initial = std::nullopt);

}  // namespace spudd
