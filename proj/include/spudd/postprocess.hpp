#pragma once

#include "spudd/contouring.hpp"
#include "spudd/mesh.hpp"

#include <array>
#include <vector>

namespace spudd {

// Dual quad mesh: vertex v belongs to active cell vertex_cell[v], quad f
// surrounds active edge quad_edge[f]. Connectivity may be non-manifold.
struct QuadMesh {
  std::vector<Vec3> vertices;
  std::vector<int> vertex_cell;
  std::vector<std::array<int, 4>> quads;
  std::vector<int> quad_edge;
  // Active edges skipped because fewer than four incident cells are active.
  std::vector<int> open_edges;
};

// One quad per active edge whose four cells are active, vertices in the
// edge_cells order (counterclockwise seen from the edge's +axis side).
// `dual` holds one position per active cell.
QuadMesh assemble_quads(const ActiveTopology& topo, const std::vector<Vec3>& dual);

struct Component {
  std::vector<int> faces;  // increasing
  std::size_t boundary_edges = 0;
};

// Faces joined across edges with exactly two incident faces. Components are
// ordered by their lowest face. A component's boundary edges are the edges
// with exactly one incident face from that component.
std::vector<Component> decompose_components(const QuadMesh& mesh);

inline constexpr int kDefaultThinning = 10;

// Repeatedly removes every component that has boundary edges and fewer than
// `max_cardinality` faces, until none qualifies or one component is left. If
// every component qualifies, the largest (lowest first face on ties) stays.
// Unreferenced vertices are dropped.
QuadMesh thin(const QuadMesh& mesh, int max_cardinality = kDefaultThinning);

// Keeps the listed quads and the vertices they use, in order.
QuadMesh keep_quads(const QuadMesh& mesh, const std::vector<int>& quads);

// Splits each quad along its shorter diagonal, dropping zero-area triangles.
TriMesh triangulate(const QuadMesh& mesh);
PolyMesh to_polymesh(const QuadMesh& mesh);

struct EdgeCounts {
  std::size_t edges = 0;
  std::size_t boundary = 0;     // one incident face
  std::size_t nonmanifold = 0;  // more than two incident faces
  std::size_t boundary_loops = 0;
};

EdgeCounts count_edges(const QuadMesh& mesh);
// Vertex pairs with more than two incident faces.
std::vector<std::array<int, 2>> nonmanifold_edges(const QuadMesh& mesh);

}  // namespace spudd
