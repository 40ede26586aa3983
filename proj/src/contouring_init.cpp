#include "spudd/contouring.hpp"

#include "spudd/errors.hpp"
#include "spudd/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace spudd {

namespace {

std::array<int, 3> node_coords(const GridSpec& spec, std::int64_t node) {
  return spec.coords(static_cast<std::size_t>(node));
}

Vec3 corner_offset(int c) { return Vec3(c & 1, (c >> 1) & 1, (c >> 2) & 1); }

// Zero crossing of the linear interpolant between values +d_a and -d_b.
double crossing_parameter(double da, double db, double eps) {
  const double s = da + db;
  return s < eps ? 0.5 : da / s;
}

}  // namespace

bool edge_in_grid(const GridSpec& spec, EdgeId e) {
  if (e < 0 || static_cast<std::size_t>(e / 3) >= spec.node_count()) return false;
  const int axis = static_cast<int>(e % 3);
  return node_coords(spec, e / 3)[axis] < spec.dims[axis] - 1;
}

std::array<std::size_t, 2> edge_nodes(const GridSpec& spec, EdgeId e) {
  auto c = node_coords(spec, e / 3);
  const std::size_t a = spec.index(c[0], c[1], c[2]);
  c[e % 3] += 1;
  return {a, spec.index(c[0], c[1], c[2])};
}

std::array<CellId, 4> edge_cells(const GridSpec& spec, EdgeId e) {
  const int a = static_cast<int>(e % 3), b = (a + 1) % 3, c = (a + 2) % 3;
  const auto base = node_coords(spec, e / 3);
  constexpr int kOffsets[4][2] = {{-1, -1}, {0, -1}, {0, 0}, {-1, 0}};
  std::array<CellId, 4> out{};
  for (int k = 0; k < 4; ++k) {
    auto x = base;
    x[b] += kOffsets[k][0];
    x[c] += kOffsets[k][1];
    bool ok = true;
    for (int ax = 0; ax < 3; ++ax) ok = ok && x[ax] >= 0 && x[ax] < spec.dims[ax] - 1;
    out[k] = ok ? static_cast<CellId>(spec.index(x[0], x[1], x[2])) : -1;
  }
  return out;
}

bool cell_in_grid(const GridSpec& spec, CellId c) {
  if (c < 0 || static_cast<std::size_t>(c) >= spec.node_count()) return false;
  const auto x = node_coords(spec, c);
  for (int ax = 0; ax < 3; ++ax)
    if (x[ax] >= spec.dims[ax] - 1) return false;
  return true;
}

std::array<std::size_t, 8> cell_corners(const GridSpec& spec, CellId c) {
  const auto x = node_coords(spec, c);
  std::array<std::size_t, 8> out{};
  for (int k = 0; k < 8; ++k) out[k] = spec.index(x[0] + (k & 1), x[1] + ((k >> 1) & 1), x[2] + ((k >> 2) & 1));
  return out;
}

std::array<EdgeId, 12> cell_edge_ids(const GridSpec& spec, CellId c) {
  const auto corners = cell_corners(spec, c);
  std::array<EdgeId, 12> out{};
  for (int k = 0; k < 12; ++k) out[k] = static_cast<EdgeId>(corners[kCellEdges[k][0]]) * 3 + k / 4;
  return out;
}

Aabb cell_box(const GridSpec& spec, CellId c) {
  const Vec3 lo = spec.node(static_cast<std::size_t>(c));
  return {lo, lo + Vec3::Constant(spec.spacing)};
}

int ActiveTopology::edge_index(EdgeId e) const {
  auto it = std::lower_bound(edges.begin(), edges.end(), e);
  return it != edges.end() && *it == e ? static_cast<int>(it - edges.begin()) : -1;
}

int ActiveTopology::cell_index(CellId c) const {
  auto it = std::lower_bound(cells.begin(), cells.end(), c);
  return it != cells.end() && *it == c ? static_cast<int>(it - cells.begin()) : -1;
}

ActiveTopology topology_from_edges(const GridSpec& spec, std::vector<EdgeId> edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  ActiveTopology t;
  t.spec = spec;
  t.edges = std::move(edges);
  for (EdgeId e : t.edges) {
    if (!edge_in_grid(spec, e)) throw Error("active edge outside the grid");
    for (CellId c : edge_cells(spec, e))
      if (c >= 0) t.cells.push_back(c);
  }
  std::sort(t.cells.begin(), t.cells.end());
  t.cells.erase(std::unique(t.cells.begin(), t.cells.end()), t.cells.end());
  t.cell_mask.assign(t.cells.size(), 0);
  t.cell_edges.assign(t.cells.size(), {});
  parallel_for(0, t.cells.size(), [&](std::size_t ci) {
    const auto ids = cell_edge_ids(spec, t.cells[ci]);
    for (int k = 0; k < 12; ++k) {
      const int idx = t.edge_index(ids[k]);
      if (idx < 0) continue;
      t.cell_mask[ci] |= static_cast<std::uint16_t>(1u << k);
      t.cell_edges[ci].push_back(idx);
    }
  });
  return t;
}

ActiveTopology find_active_topology(const UdfGrid& grid, const SuperpowerContour& sp) {
  if (sp.empty()) throw EmptyContour();
  const GridSpec& spec = grid.spec;
  // Plane tolerance: 1e-9 of the diagram diagonal, the same scale as the ball tolerance.
  const double eps = sp.eps_ball;
  std::vector<char> active(3 * spec.node_count(), 0);
  parallel_for(0, spec.node_count(), [&](std::size_t node) {
    for (int axis = 0; axis < 3; ++axis) {
      const EdgeId e = static_cast<EdgeId>(node) * 3 + axis;
      if (!edge_in_grid(spec, e)) continue;
      const auto [a, b] = edge_nodes(spec, e);
      active[e] = sp.segment_hits(spec.node(a), spec.node(b), eps) ? 1 : 0;
    }
  });
  std::vector<EdgeId> edges;
  for (std::size_t e = 0; e < active.size(); ++e)
    if (active[e]) edges.push_back(static_cast<EdgeId>(e));
  if (edges.empty()) throw EmptyContour();
  return topology_from_edges(spec, std::move(edges));
}

std::optional<std::array<int, 8>> color_cell(std::uint16_t active_mask) {
  std::array<int, 8> label{};
  label[0] = -1;
  int queue[8], head = 0, tail = 0;
  queue[tail++] = 0;
  while (head < tail) {
    const int u = queue[head++];
    for (int k = 0; k < 12; ++k) {
      const auto [a, b] = kCellEdges[k];
      if (a != u && b != u) continue;
      const int v = a == u ? b : a;
      const int want = (active_mask >> k & 1) ? -label[u] : label[u];
      if (label[v] == 0) {
        label[v] = want;
        queue[tail++] = v;
      } else if (label[v] != want) {
        return std::nullopt;
      }
    }
  }
  return label;
}

std::vector<HermitePoint> init_hermite_bipartite(const UdfGrid& grid, CellId cell,
                                                 const std::array<int, 8>& labels,
                                                 std::uint16_t active_mask) {
  const GridSpec& spec = grid.spec;
  const auto corners = cell_corners(spec, cell);
  const Vec3 origin = spec.node(static_cast<std::size_t>(cell));
  const double h = spec.spacing;
  double v[8];
  for (int c = 0; c < 8; ++c) v[c] = labels[c] * grid.values[corners[c]];

  std::vector<HermitePoint> out;
  for (int k = 0; k < 12; ++k) {
    if (!(active_mask >> k & 1)) continue;
    const auto [a, b] = kCellEdges[k];
    const double t = crossing_parameter(grid.values[corners[a]], grid.values[corners[b]], eps_geom(spec));
    const Vec3 local = corner_offset(a) + t * (corner_offset(b) - corner_offset(a));
    // Gradient of the trilinear interpolant of the pseudo-signed values.
    Vec3 g = Vec3::Zero();
    for (int c = 0; c < 8; ++c) {
      const Vec3 o = corner_offset(c);
      const Vec3 w = (o.array() > 0.5).select(local, Vec3::Ones() - local);
      const Vec3 s = (o.array() > 0.5).select(Vec3::Ones(), -Vec3::Ones());
      g += v[c] * Vec3(s.x() * w.y() * w.z(), w.x() * s.y() * w.z(), w.x() * w.y() * s.z());
    }
    g /= h;
    HermitePoint hp;
    hp.q = origin + h * local;
    const double len = g.norm();
    if (len >= kEpsGrad) hp.n = g / len;
    out.push_back(hp);
  }
  return out;
}

std::vector<HermitePoint> init_hermite_nonbipartite(const UdfGrid& grid, CellId cell,
                                                    std::uint16_t active_mask) {
  const GridSpec& spec = grid.spec;
  const auto corners = cell_corners(spec, cell);
  const Vec3 origin = spec.node(static_cast<std::size_t>(cell));
  std::vector<HermitePoint> out;
  for (int k = 0; k < 12; ++k) {
    if (!(active_mask >> k & 1)) continue;
    const auto [a, b] = kCellEdges[k];
    const double t = crossing_parameter(grid.values[corners[a]], grid.values[corners[b]], eps_geom(spec));
    HermitePoint hp;
    hp.q = origin + spec.spacing * (corner_offset(a) + t * (corner_offset(b) - corner_offset(a)));
    out.push_back(hp);
  }
  return out;
}

std::vector<CellHermite> init_cell_hermite(const UdfGrid& grid, const ActiveTopology& topo) {
  std::vector<CellHermite> out(topo.cells.size());
  parallel_for(0, topo.cells.size(), [&](std::size_t ci) {
    const auto labels = color_cell(topo.cell_mask[ci]);
    out[ci].bipartite = labels.has_value();
    out[ci].estimates = labels ? init_hermite_bipartite(grid, topo.cells[ci], *labels, topo.cell_mask[ci])
                               : init_hermite_nonbipartite(grid, topo.cells[ci], topo.cell_mask[ci]);
  });
  return out;
}

HermitePoint merge_estimates(const std::vector<HermitePoint>& estimates, const Vec3& a, const Vec3& b) {
  HermitePoint out;
  if (estimates.empty()) return out;
  Vec3 q = Vec3::Zero();
  for (const auto& e : estimates) q += e.q;
  q /= static_cast<double>(estimates.size());
  out.q = closest_point_on_segment(q, a, b).point;

  const Vec3* first = nullptr;
  Vec3 n = Vec3::Zero();
  for (const auto& e : estimates) {
    if (e.n.isZero(0.0)) continue;
    if (!first) first = &e.n;
    n += e.n.dot(*first) >= 0.0 ? e.n : Vec3(-e.n);
  }
  const double len = n.norm();
  if (first && len >= kEpsGrad) out.n = n / len;
  return out;
}

HermiteData merge_hermite(const ActiveTopology& topo, const std::vector<CellHermite>& cells) {
  const GridSpec& spec = topo.spec;
  HermiteData h;
  h.q.assign(topo.edges.size(), Vec3::Zero());
  h.n.assign(topo.edges.size(), Vec3::Zero());
  parallel_for(0, topo.edges.size(), [&](std::size_t ei) {
    const EdgeId e = topo.edges[ei];
    auto around = edge_cells(spec, e);
    std::sort(around.begin(), around.end());
    std::vector<HermitePoint> est;
    for (CellId c : around) {
      if (c < 0) continue;
      const int ci = topo.cell_index(c);
      if (ci < 0) continue;
      const auto& list = topo.cell_edges[ci];
      const auto it = std::find(list.begin(), list.end(), static_cast<int>(ei));
      if (it != list.end()) est.push_back(cells[ci].estimates[it - list.begin()]);
    }
    const auto [a, b] = edge_nodes(spec, e);
    const HermitePoint m = merge_estimates(est, spec.node(a), spec.node(b));
    h.q[ei] = m.q;
    h.n[ei] = m.n;
  });
  return h;
}

std::vector<int> assign_spheres(const std::vector<Seed>& seeds, const SuperpowerContour& sp,
                                const ActiveTopology& topo) {
  if (sp.empty() || topo.cells.empty()) throw EmptyContour();
  const GridSpec& spec = topo.spec;
  std::vector<Aabb> centers;
  centers.reserve(topo.cells.size());
  for (CellId c : topo.cells) {
    const Vec3 m = cell_box(spec, c).center();
    centers.emplace_back(m, m);
  }
  const AabbTree center_tree(std::move(centers));

  std::vector<int> out(seeds.size(), -1);
  parallel_for(0, seeds.size(), [&](std::size_t s) {
    const Vec3 b = sp.closest(seeds[s].p).point;
    std::array<int, 3> x{};
    for (int ax = 0; ax < 3; ++ax) {
      // ceil - 1 puts points on a shared boundary in the lower cell.
      const double f = (b[ax] - spec.origin[ax]) / spec.spacing;
      const double k = std::ceil(f) - 1.0;
      x[ax] = static_cast<int>(std::clamp(k, 0.0, static_cast<double>(spec.dims[ax] - 2)));
    }
    const int ci = topo.cell_index(static_cast<CellId>(spec.index(x[0], x[1], x[2])));
    if (ci >= 0) {
      out[s] = ci;
      return;
    }
    out[s] = center_tree
                 .closest(b, [&](int id, const Vec3& p) {
                   const Vec3& m = center_tree.primitive_box(id).lo;
                   return ClosestPoint{m, (p - m).norm()};
                 })
                 .primitive;
  });
  return out;
}

}  // namespace spudd
