#include "spudd/optimizer.hpp"

#include "spudd/errors.hpp"
#include "spudd/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace spudd {

namespace {

// Local edge k lies on the cell face {corner bit `axis` == side} when it runs
// along another axis and its first corner has that bit.
bool on_face(int k, int axis, int side) {
  return k / 4 != axis && ((kCellEdges[k][0] >> axis) & 1) == side;
}

Vec3 clamp_to(const Aabb& box, const Vec3& x) { return x.cwiseMax(box.lo).cwiseMin(box.hi); }

}  // namespace

std::vector<Vec3> init_dual_vertices(const ActiveTopology& topo, const HermiteData& hermite) {
  std::vector<Vec3> x(topo.cells.size(), Vec3::Zero());
  for (std::size_t ci = 0; ci < topo.cells.size(); ++ci) {
    const auto& edges = topo.cell_edges[ci];
    if (edges.empty()) throw Error("active cell without active edges");
    for (int e : edges) x[ci] += hermite.q[e];
    x[ci] /= static_cast<double>(edges.size());
  }
  return x;
}

void local_mesh_topology(std::uint16_t active_mask, std::vector<std::array<int, 2>>& fan,
                         std::vector<int>& spokes) {
  fan.clear();
  spokes.clear();
  int local[12];
  int count = 0;
  for (int k = 0; k < 12; ++k) local[k] = (active_mask >> k & 1) ? count++ : -1;
  std::vector<char> used(count, 0);
  for (int a = 0; a < 12; ++a) {
    for (int b = a + 1; b < 12; ++b) {
      if (local[a] < 0 || local[b] < 0) continue;
      bool share = false;
      for (int axis = 0; axis < 3 && !share; ++axis)
        for (int side = 0; side < 2 && !share; ++side) share = on_face(a, axis, side) && on_face(b, axis, side);
      if (!share) continue;
      fan.push_back({local[a], local[b]});
      used[local[a]] = used[local[b]] = 1;
    }
  }
  for (int k = 0; k < count; ++k)
    if (!used[k]) spokes.push_back(k);
}

LocalClosest closest_on_local_mesh(const CellProblem& cell, const Vec3& x, const Vec3& p) {
  LocalClosest best;
  for (const auto& [a, b] : cell.fan) {
    const TriangleClosest t = closest_point_on_triangle(p, x, cell.q[a], cell.q[b]);
    if (t.distance < best.distance) best = {t.point, t.distance, t.barycentric[0]};
  }
  for (int k : cell.spokes) {
    const SegmentClosest s = closest_point_on_segment(p, x, cell.q[k]);
    if (s.distance < best.distance) best = {s.point, s.distance, 1.0 - s.t};
  }
  return best;
}

double local_energy(const CellProblem& cell, const Vec3& x) {
  double e = 0.0;
  for (std::size_t j = 0; j < cell.p.size(); ++j) {
    const double r = closest_on_local_mesh(cell, x, cell.p[j]).distance - cell.d[j];
    e += r * r;
  }
  for (std::size_t k = 0; k < cell.q.size(); ++k) {
    const double g = cell.n[k].dot(x - cell.q[k]);
    e += g * g;
  }
  return e;
}

LocalResult local_minimize(const CellProblem& cell, const Vec3& x0, int k1, double tol, double lambda) {
  LocalResult out;
  Vec3 x = clamp_to(cell.clamp, x0);
  Vec3 m = Vec3::Zero();
  for (const Vec3& q : cell.q) m += q;
  if (!cell.q.empty()) m /= static_cast<double>(cell.q.size());
  const double eps = 1e-9 * std::max(cell.clamp.extent().maxCoeff(), 1e-300);

  struct Row {
    Vec3 a;
    double c;  // residual f(x + delta) = c - a.delta
  };
  std::vector<Row> rows;
  for (int it = 0; it < k1; ++it) {
    rows.clear();
    for (std::size_t j = 0; j < cell.p.size(); ++j) {
      const LocalClosest lc = closest_on_local_mesh(cell, x, cell.p[j]);
      const Vec3 r = cell.p[j] - lc.point;
      const double len = r.norm();
      if (len < eps) continue;
      rows.push_back({lc.alpha * (r / len), len - cell.d[j]});
    }
    Eigen::Matrix3d A = lambda * Eigen::Matrix3d::Identity();
    Vec3 rhs = -lambda * (x - m);
    for (const Row& r : rows) {
      A += r.a * r.a.transpose();
      rhs += r.a * r.c;
    }
    for (std::size_t k = 0; k < cell.q.size(); ++k) {
      const Vec3& n = cell.n[k];
      A += n * n.transpose();
      rhs -= n * n.dot(x - cell.q[k]);
    }
    const Vec3 delta = A.ldlt().solve(rhs);

    // Shorten the step so the vertex stays in the clamp box; the objective is
    // convex, so any point between x and the minimiser is no worse than x.
    double s = 1.0;
    for (int ax = 0; ax < 3; ++ax) {
      const double target = x[ax] + delta[ax];
      if (target > cell.clamp.hi[ax]) s = std::min(s, (cell.clamp.hi[ax] - x[ax]) / delta[ax]);
      if (target < cell.clamp.lo[ax]) s = std::min(s, (cell.clamp.lo[ax] - x[ax]) / delta[ax]);
    }
    s = std::max(s, 0.0);
    const Vec3 step = s * delta;

    auto surrogate = [&](const Vec3& dlt) {
      double v = lambda * (x - m + dlt).squaredNorm();
      for (const Row& r : rows) v += (r.c - r.a.dot(dlt)) * (r.c - r.a.dot(dlt));
      for (std::size_t k = 0; k < cell.q.size(); ++k) {
        const double g = cell.n[k].dot(x - cell.q[k] + dlt);
        v += g * g;
      }
      return v;
    };
    const double before = surrogate(Vec3::Zero());
    // Rounding allowance: relative, plus the square of the positional tolerance.
    if (surrogate(step) > before * (1.0 + 1e-9) + eps * eps) ++out.surrogate_increases;

    x = clamp_to(cell.clamp, x + step);
    ++out.iterations;
    if (step.norm() <= tol) break;
  }
  out.x = x;
  return out;
}

CellProblem make_cell_problem(const ActiveTopology& topo, const HermiteData& hermite,
                              const std::vector<Seed>& seeds, const std::vector<int>& seed_ids, int ci) {
  CellProblem cell;
  for (int e : topo.cell_edges[ci]) {
    cell.q.push_back(hermite.q[e]);
    cell.n.push_back(hermite.n[e]);
  }
  local_mesh_topology(topo.cell_mask[ci], cell.fan, cell.spokes);
  for (int s : seed_ids) {
    cell.p.push_back(seeds[s].p);
    cell.d.push_back(seeds[s].d);
  }
  // The cell box scaled by 1.5 about its centre.
  cell.clamp = cell_box(topo.spec, topo.cells[ci]).inflated(0.25 * topo.spec.spacing);
  return cell;
}

HermiteData update_hermite(const QuadMesh& mesh, const ActiveTopology& topo, const HermiteData& hermite) {
  const GridSpec& spec = topo.spec;
  std::vector<int> quad_of_edge(topo.edges.size(), -1);
  for (std::size_t f = 0; f < mesh.quads.size(); ++f) quad_of_edge[mesh.quad_edge[f]] = static_cast<int>(f);
  const double eg = eps_geom(spec);

  HermiteData out = hermite;
  parallel_for(0, topo.edges.size(), [&](std::size_t ei) {
    const int f = quad_of_edge[ei];
    if (f < 0) return;
    const auto& quad = mesh.quads[f];
    const Vec3& v0 = mesh.vertices[quad[0]];
    const Vec3& v1 = mesh.vertices[quad[1]];
    const Vec3& v2 = mesh.vertices[quad[2]];
    const Vec3& v3 = mesh.vertices[quad[3]];
    const Vec3 c1 = (v1 - v0).cross(v2 - v0);
    const Vec3 c2 = (v2 - v0).cross(v3 - v0);
    if (0.5 * (c1.norm() + c2.norm()) < eg * eg) return;

    const auto [na, nb] = edge_nodes(spec, topo.edges[ei]);
    const Vec3 a = spec.node(na), b = spec.node(nb);
    std::optional<Vec3> hit = segment_triangle_intersection(a, b, v0, v1, v2);
    if (!hit) hit = segment_triangle_intersection(a, b, v0, v2, v3);
    const Vec3 sum = c1 + c2;  // area-weighted sum of the triangle normals
    if (!hit && sum.norm() > 0.0) {
      // The quad may pass beside its edge; extend its plane to the edge.
      const Vec3 nrm = sum.normalized();
      const Vec3 centre = 0.25 * (v0 + v1 + v2 + v3);
      const double da = nrm.dot(a - centre), db = nrm.dot(b - centre);
      if ((da <= 0.0 && db >= 0.0) || (da >= 0.0 && db <= 0.0)) {
        const double t = da == db ? 0.5 : da / (da - db);
        hit = a + t * (b - a);
      }
    }
    if (hit) {
      out.q[ei] = *hit;
    } else {
      const Vec3& old = hermite.q[ei];
      const TriangleClosest t1 = closest_point_on_triangle(old, v0, v1, v2);
      const TriangleClosest t2 = closest_point_on_triangle(old, v0, v2, v3);
      out.q[ei] = closest_point_on_segment(t2.distance < t1.distance ? t2.point : t1.point, a, b).point;
    }

    Vec3 n = sum;
    const Vec3& ref = hermite.n[ei].isZero(0.0) ? c1 : hermite.n[ei];
    if (n.dot(ref) < 0.0) n = -n;
    const double len = n.norm();
    if (len > 0.0) out.n[ei] = n / len;
  });
  return out;
}

OptimizeResult optimize(const UdfGrid& grid, const ActiveTopology& topo, HermiteData hermite,
                        const std::vector<int>& assignment, const OptimizerConfig& config,
                        std::optional<std::vector<Vec3>> initial) {
  if (config.k1 < 0 || config.k2 < 0 || !(config.tol > 0.0) || !(config.lambda > 0.0))
    throw Error("optimizer iteration counts must be >= 0 and tol, lambda positive");
  const std::vector<Seed> seeds = grid_seeds(grid);
  if (assignment.size() != seeds.size()) throw Error("one assignment per seed is required");
  std::vector<std::vector<int>> by_cell(topo.cells.size());
  for (std::size_t s = 0; s < seeds.size(); ++s)
    if (assignment[s] >= 0) by_cell[assignment[s]].push_back(static_cast<int>(s));

  OptimizeResult out;
  out.dual = initial ? std::move(*initial) : init_dual_vertices(topo, hermite);
  if (out.dual.size() != topo.cells.size()) throw Error("one dual vertex per active cell is required");
  const double tol = config.tol * topo.spec.spacing;

  std::vector<CellProblem> cells(topo.cells.size());
  std::vector<double> energy(topo.cells.size());
  auto build = [&] {
    parallel_for(0, cells.size(), [&](std::size_t ci) {
      cells[ci] = make_cell_problem(topo, hermite, seeds, by_cell[ci], static_cast<int>(ci));
    });
  };
  auto total_energy = [&] {
    parallel_for(0, cells.size(), [&](std::size_t ci) { energy[ci] = local_energy(cells[ci], out.dual[ci]); });
    double e = 0.0;
    for (double v : energy) e += v;
    return e;
  };

  build();
  out.energy.push_back(total_energy());
  std::vector<LocalResult> local(cells.size());
  for (int outer = 0; outer < config.k2; ++outer) {
    parallel_for(0, cells.size(), [&](std::size_t ci) {
      local[ci] = local_minimize(cells[ci], out.dual[ci], config.k1, tol, config.lambda);
    });
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      out.dual[ci] = local[ci].x;
      out.surrogate_increases += static_cast<std::size_t>(local[ci].surrogate_increases);
      out.inner_iterations += static_cast<std::size_t>(local[ci].iterations);
    }
    hermite = update_hermite(assemble_quads(topo, out.dual), topo, hermite);
    build();
    out.energy.push_back(total_energy());
  }
  out.hermite = std::move(hermite);
  return out;
}

}  // namespace spudd
