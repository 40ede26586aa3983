#pragma once

#include "spudd/grid.hpp"
#include "spudd/power_diagram.hpp"
#include "spudd/superpower.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace spudd {

// Grid edges are identified by node index * 3 + axis (the edge leaves the node
// along +axis); cells by the node index of their lowest corner. Corner c of a
// cell sits at offset (c & 1, c >> 1 & 1, c >> 2 & 1); local edge k joins
// corners kCellEdges[k] and runs along axis k / 4.
using EdgeId = std::int64_t;
using CellId = std::int64_t;

inline constexpr std::array<std::array<int, 2>, 12> kCellEdges = {{
    {0, 1}, {2, 3}, {4, 5}, {6, 7},  // x
    {0, 2}, {1, 3}, {4, 6}, {5, 7},  // y
    {0, 4}, {1, 5}, {2, 6}, {3, 7},  // z
}};

inline constexpr double kEpsGrad = 1e-8;
inline double eps_geom(const GridSpec& spec) { return 1e-9 * spec.spacing; }

bool edge_in_grid(const GridSpec& spec, EdgeId e);
std::array<std::size_t, 2> edge_nodes(const GridSpec& spec, EdgeId e);
// The four cells around an edge, counterclockwise seen from the +axis side;
// -1 where the cell would leave the grid.
std::array<CellId, 4> edge_cells(const GridSpec& spec, EdgeId e);
bool cell_in_grid(const GridSpec& spec, CellId c);
std::array<std::size_t, 8> cell_corners(const GridSpec& spec, CellId c);
std::array<EdgeId, 12> cell_edge_ids(const GridSpec& spec, CellId c);
Aabb cell_box(const GridSpec& spec, CellId c);

struct ActiveTopology {
  GridSpec spec;
  std::vector<EdgeId> edges;  // sorted
  std::vector<CellId> cells;  // sorted
  // Per active cell: bit k set when local edge k is active, and the indices
  // into `edges` of those edges in local order.
  std::vector<std::uint16_t> cell_mask;
  std::vector<std::vector<int>> cell_edges;

  int edge_index(EdgeId e) const;  // -1 when inactive
  int cell_index(CellId c) const;  // -1 when inactive
};

// Active cells and their masks from a sorted list of active edges.
ActiveTopology topology_from_edges(const GridSpec& spec, std::vector<EdgeId> edges);

// An edge is active when its segment meets a contour face. Throws
// EmptyContour when none is.
ActiveTopology find_active_topology(const UdfGrid& grid, const SuperpowerContour& sp);

// Corner labels with active edges joining opposite labels and inactive edges
// equal ones; corner 0 gets -1. Empty when the constraints are inconsistent.
std::optional<std::array<int, 8>> color_cell(std::uint16_t active_mask);

struct HermitePoint {
  Vec3 q = Vec3::Zero();
  Vec3 n = Vec3::Zero();  // unit or zero
};

// Per-cell estimates for the cell's active edges, in local edge order.
std::vector<HermitePoint> init_hermite_bipartite(const UdfGrid& grid, CellId cell,
                                                 const std::array<int, 8>& labels,
                                                 std::uint16_t active_mask);
std::vector<HermitePoint> init_hermite_nonbipartite(const UdfGrid& grid, CellId cell,
                                                    std::uint16_t active_mask);

struct CellHermite {
  bool bipartite = false;
  std::vector<HermitePoint> estimates;  // matches ActiveTopology::cell_edges
};

std::vector<CellHermite> init_cell_hermite(const UdfGrid& grid, const ActiveTopology& topo);

struct HermiteData {
  std::vector<Vec3> q;  // per active edge
  std::vector<Vec3> n;
};

// Mean of the estimates, re-projected onto segment [a, b]; normals are
// flipped to agree with the first nonzero one before averaging.
HermitePoint merge_estimates(const std::vector<HermitePoint>& estimates, const Vec3& a, const Vec3& b);

// Estimates are gathered per edge in increasing cell order.
HermiteData merge_hermite(const ActiveTopology& topo, const std::vector<CellHermite>& cells);

// Active cell index per seed. The seed goes to the cell holding its closest
// contour point (the lowest cell id on shared boundaries), or, when that
// cell is inactive, to the active cell with the nearest centre.
std::vector<int> assign_spheres(const std::vector<Seed>& seeds, const SuperpowerContour& sp,
                                const ActiveTopology& topo);

}  // namespace spudd
