#pragma once

#include "spudd/geometry.hpp"

#include <cstdint>
#include <vector>

namespace spudd {

// Convex polytope stored as faces with vertex rings, clipped in place by
// half-spaces n.y <= b. Vertex ids are stable until compact(), so callers may
// keep per-vertex flags across clips.
class ConvexCell {
 public:
  struct Face {
    int tag;
    std::vector<int> ring;
  };

  enum class Clip { Unchanged, Clipped, Empty };

  // Box faces are tagged -1 (x lo), -2 (x hi), -3, -4, -5, -6.
  explicit ConvexCell(const Aabb& box);

  // Vertices with n.y - b within `tol` count as on the plane; the cut face
  // gets `tag`. Returns Empty when no vertex is strictly inside.
  Clip clip(const Vec3& n, double b, int tag, double tol);

  bool empty() const { return faces_.empty(); }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Vec3>& vertices() const { return verts_; }
  std::size_t vertex_slots() const { return verts_.size(); }

  // False once a clip has cut the vertex away.
  bool alive(int v) const { return v >= static_cast<int>(dead_.size()) || !dead_[v]; }

  // Ids of vertices referenced by the current faces, ascending.
  std::vector<int> live_vertices() const;

 private:
  double eval(int v, const Vec3& n, double b);
  int cut_point(int a, int c, double sa, double sc);

  std::vector<Vec3> verts_;
  std::vector<Face> faces_;
  std::vector<char> dead_;

  // Scratch reused across clips.
  std::vector<double> s_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> on_stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<std::pair<std::uint64_t, int>> cuts_;
  std::vector<int> cap_;
};

}  // namespace spudd
