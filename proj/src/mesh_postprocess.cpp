#include "spudd/postprocess.hpp"

#include "spudd/errors.hpp"

#include <algorithm>
#include <numeric>

namespace spudd {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  // The smaller root wins so representatives are deterministic.
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

struct EdgeFace {
  int a, b, face;
  bool operator<(const EdgeFace& o) const {
    return a != o.a ? a < o.a : (b != o.b ? b < o.b : face < o.face);
  }
};

// Every (edge, face) incidence, grouped by edge.
std::vector<EdgeFace> incidences(const QuadMesh& mesh) {
  std::vector<EdgeFace> out;
  out.reserve(4 * mesh.quads.size());
  for (std::size_t f = 0; f < mesh.quads.size(); ++f) {
    const auto& q = mesh.quads[f];
    for (int k = 0; k < 4; ++k) {
      const int u = q[k], v = q[(k + 1) % 4];
      out.push_back({std::min(u, v), std::max(u, v), static_cast<int>(f)});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <class Fn>
void for_each_edge_group(const std::vector<EdgeFace>& inc, Fn&& fn) {
  for (std::size_t i = 0; i < inc.size();) {
    std::size_t j = i;
    while (j < inc.size() && inc[j].a == inc[i].a && inc[j].b == inc[i].b) ++j;
    fn(i, j);
    i = j;
  }
}

}  // namespace

QuadMesh assemble_quads(const ActiveTopology& topo, const std::vector<Vec3>& dual) {
  if (dual.size() != topo.cells.size()) throw Error("one dual vertex per active cell is required");
  QuadMesh mesh;
  mesh.vertices = dual;
  mesh.vertex_cell.resize(dual.size());
  std::iota(mesh.vertex_cell.begin(), mesh.vertex_cell.end(), 0);
  for (std::size_t ei = 0; ei < topo.edges.size(); ++ei) {
    const auto cells = edge_cells(topo.spec, topo.edges[ei]);
    std::array<int, 4> quad{};
    bool complete = true;
    for (int k = 0; k < 4 && complete; ++k) {
      quad[k] = cells[k] < 0 ? -1 : topo.cell_index(cells[k]);
      complete = quad[k] >= 0;
    }
    if (complete) {
      mesh.quads.push_back(quad);
      mesh.quad_edge.push_back(static_cast<int>(ei));
    } else {
      mesh.open_edges.push_back(static_cast<int>(ei));
    }
  }
  return mesh;
}

std::vector<Component> decompose_components(const QuadMesh& mesh) {
  const auto inc = incidences(mesh);
  DisjointSets sets(mesh.quads.size());
  for_each_edge_group(inc, [&](std::size_t i, std::size_t j) {
    if (j - i == 2) sets.unite(inc[i].face, inc[i + 1].face);
  });

  std::vector<int> comp_of_root(mesh.quads.size(), -1);
  std::vector<int> comp_of_face(mesh.quads.size());
  std::vector<Component> comps;
  for (std::size_t f = 0; f < mesh.quads.size(); ++f) {
    const int r = sets.find(static_cast<int>(f));
    if (comp_of_root[r] < 0) {
      comp_of_root[r] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    comp_of_face[f] = comp_of_root[r];
    comps[comp_of_face[f]].faces.push_back(static_cast<int>(f));
  }
  for_each_edge_group(inc, [&](std::size_t i, std::size_t j) {
    // Components with exactly one face on this edge see it as boundary.
    std::vector<int> cs;
    for (std::size_t k = i; k < j; ++k) cs.push_back(comp_of_face[inc[k].face]);
    std::sort(cs.begin(), cs.end());
    for (std::size_t k = 0; k < cs.size();) {
      std::size_t m = k;
      while (m < cs.size() && cs[m] == cs[k]) ++m;
      if (m - k == 1) ++comps[cs[k]].boundary_edges;
      k = m;
    }
  });
  return comps;
}

QuadMesh keep_quads(const QuadMesh& mesh, const std::vector<int>& quads) {
  QuadMesh out;
  std::vector<int> remap(mesh.vertices.size(), -1);
  std::vector<char> used(mesh.vertices.size(), 0);
  for (int f : quads)
    for (int v : mesh.quads[f]) used[v] = 1;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (!used[v]) continue;
    remap[v] = static_cast<int>(out.vertices.size());
    out.vertices.push_back(mesh.vertices[v]);
    out.vertex_cell.push_back(mesh.vertex_cell.empty() ? -1 : mesh.vertex_cell[v]);
  }
  for (int f : quads) {
    std::array<int, 4> q{};
    for (int k = 0; k < 4; ++k) q[k] = remap[mesh.quads[f][k]];
    out.quads.push_back(q);
    out.quad_edge.push_back(mesh.quad_edge.empty() ? -1 : mesh.quad_edge[f]);
  }
  out.open_edges = mesh.open_edges;
  return out;
}

QuadMesh thin(const QuadMesh& mesh, int max_cardinality) {
  std::vector<int> all(mesh.quads.size());
  std::iota(all.begin(), all.end(), 0);
  QuadMesh cur = keep_quads(mesh, all);
  for (;;) {
    const auto comps = decompose_components(cur);
    if (comps.size() <= 1) break;
    std::vector<char> remove(comps.size(), 0);
    std::size_t count = 0;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      if (comps[c].boundary_edges > 0 && comps[c].faces.size() < static_cast<std::size_t>(max_cardinality)) {
        remove[c] = 1;
        ++count;
      }
    }
    if (count == 0) break;
    if (count == comps.size()) {
      std::size_t largest = 0;
      for (std::size_t c = 1; c < comps.size(); ++c)
        if (comps[c].faces.size() > comps[largest].faces.size()) largest = c;
      remove[largest] = 0;
    }
    std::vector<int> keep;
    for (std::size_t c = 0; c < comps.size(); ++c)
      if (!remove[c]) keep.insert(keep.end(), comps[c].faces.begin(), comps[c].faces.end());
    std::sort(keep.begin(), keep.end());
    cur = keep_quads(cur, keep);
  }
  return cur;
}

TriMesh triangulate(const QuadMesh& mesh) {
  TriMesh out;
  out.vertices = mesh.vertices;
  auto add = [&](int a, int b, int c) {
    const Vec3& pa = mesh.vertices[a];
    const Vec3& pb = mesh.vertices[b];
    const Vec3& pc = mesh.vertices[c];
    const double scale = std::max({(pb - pa).squaredNorm(), (pc - pa).squaredNorm(), (pc - pb).squaredNorm()});
    if ((pb - pa).cross(pc - pa).norm() <= 1e-14 * scale) return;
    out.faces.push_back({a, b, c});
  };
  for (const auto& q : mesh.quads) {
    const double d02 = (mesh.vertices[q[0]] - mesh.vertices[q[2]]).squaredNorm();
    const double d13 = (mesh.vertices[q[1]] - mesh.vertices[q[3]]).squaredNorm();
    if (d02 <= d13) {
      add(q[0], q[1], q[2]);
      add(q[0], q[2], q[3]);
    } else {
      add(q[0], q[1], q[3]);
      add(q[1], q[2], q[3]);
    }
  }
  return out;
}

PolyMesh to_polymesh(const QuadMesh& mesh) {
  PolyMesh out;
  out.vertices = mesh.vertices;
  for (const auto& q : mesh.quads) out.faces.push_back({q[0], q[1], q[2], q[3]});
  return out;
}

EdgeCounts count_edges(const QuadMesh& mesh) {
  const auto inc = incidences(mesh);
  EdgeCounts c;
  DisjointSets loops(mesh.vertices.size());
  std::vector<char> on_boundary(mesh.vertices.size(), 0);
  for_each_edge_group(inc, [&](std::size_t i, std::size_t j) {
    ++c.edges;
    if (j - i == 1) {
      ++c.boundary;
      loops.unite(inc[i].a, inc[i].b);
      on_boundary[inc[i].a] = on_boundary[inc[i].b] = 1;
    } else if (j - i > 2) {
      ++c.nonmanifold;
    }
  });
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    if (on_boundary[v] && loops.find(static_cast<int>(v)) == static_cast<int>(v)) ++c.boundary_loops;
  return c;
}

std::vector<std::array<int, 2>> nonmanifold_edges(const QuadMesh& mesh) {
  const auto inc = incidences(mesh);
  std::vector<std::array<int, 2>> out;
  for_each_edge_group(inc, [&](std::size_t i, std::size_t j) {
    if (j - i > 2) out.push_back({inc[i].a, inc[i].b});
  });
  return out;
}

}  // namespace spudd
