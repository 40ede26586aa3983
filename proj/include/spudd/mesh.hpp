#pragma once

#include "spudd/geometry.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace spudd {

// Triangle mesh; connectivity may be non-manifold.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  bool empty() const { return faces.empty(); }
  Triangle triangle(std::size_t f) const {
    return {vertices[faces[f][0]], vertices[faces[f][1]], vertices[faces[f][2]]};
  }
  std::vector<Triangle> triangles() const;
  Aabb bounds() const { return bounds_of(vertices); }
  double area() const;
  // Throws Error when a face index is out of range.
  void validate() const;
};

// General polygon mesh; used for quad output and OBJ round trips.
struct PolyMesh {
  std::vector<Vec3> vertices;
  std::vector<std::vector<int>> faces;
};

using GroundTruthMesh = TriMesh;

// OBJ reader: `v` and `f` records only, `f` entries may use the a/b/c form and
// negative (relative) indices. Throws ParseError with the line number.
PolyMesh read_obj(const std::string& path);
PolyMesh parse_obj(std::istream& in, const std::string& name = "<stream>");
void write_obj(const std::string& path, const PolyMesh& mesh);
void write_obj(std::ostream& out, const PolyMesh& mesh);

// Fan-triangulates polygons with more than three vertices.
TriMesh to_trimesh(const PolyMesh& mesh);
PolyMesh to_polymesh(const TriMesh& mesh);

// Shortest round-trip decimal for a double; used by every text writer so
// output bytes depend only on the values.
std::string format_double(double v);

}  // namespace spudd
