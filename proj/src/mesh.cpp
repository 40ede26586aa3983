#include "spudd/mesh.hpp"

#include "spudd/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace spudd {

std::vector<Triangle> TriMesh::triangles() const {
  std::vector<Triangle> out;
  out.reserve(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) out.push_back(triangle(f));
  return out;
}

double TriMesh::area() const {
  double a = 0.0;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    Triangle t = triangle(f);
    a += triangle_area(t.a, t.b, t.c);
  }
  return a;
}

void TriMesh::validate() const {
  const int n = static_cast<int>(vertices.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (int v : faces[f]) {
      if (v < 0 || v >= n) throw Error("face " + std::to_string(f) + " references vertex " +
                                       std::to_string(v) + " out of range");
    }
  }
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

PolyMesh parse_obj(std::istream& in, const std::string& name) {
  PolyMesh mesh;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) throw ParseError(name, line_no, "malformed vertex record");
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> face;
      std::string tok;
      while (ss >> tok) {
        const std::string head = tok.substr(0, tok.find('/'));
        int idx = 0;
        auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
        if (ec != std::errc() || ptr != head.data() + head.size() || idx == 0)
          throw ParseError(name, line_no, "malformed face index '" + tok + "'");
        const int n = static_cast<int>(mesh.vertices.size());
        const int resolved = idx > 0 ? idx - 1 : n + idx;
        if (resolved < 0 || resolved >= n)
          throw ParseError(name, line_no, "face index " + tok + " out of range");
        face.push_back(resolved);
      }
      if (face.size() < 3) throw ParseError(name, line_no, "face with fewer than 3 vertices");
      mesh.faces.push_back(std::move(face));
    }
  }
  return mesh;
}

PolyMesh read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_obj(in, path);
}

void write_obj(std::ostream& out, const PolyMesh& mesh) {
  std::string buf;
  for (const auto& v : mesh.vertices) {
    buf += "v ";
    buf += format_double(v.x());
    buf += ' ';
    buf += format_double(v.y());
    buf += ' ';
    buf += format_double(v.z());
    buf += '\n';
  }
  for (const auto& f : mesh.faces) {
    buf += 'f';
    for (int idx : f) {
      buf += ' ';
      buf += std::to_string(idx + 1);
    }
    buf += '\n';
  }
  out << buf;
}

void write_obj(const std::string& path, const PolyMesh& mesh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_obj(out, mesh);
  if (!out) throw Error("write failed for " + path);
}

TriMesh to_trimesh(const PolyMesh& mesh) {
  TriMesh tri;
  tri.vertices = mesh.vertices;
  for (const auto& f : mesh.faces) {
    for (std::size_t i = 1; i + 1 < f.size(); ++i) tri.faces.push_back({f[0], f[i], f[i + 1]});
  }
  return tri;
}

PolyMesh to_polymesh(const TriMesh& mesh) {
  PolyMesh poly;
  poly.vertices = mesh.vertices;
  poly.faces.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) poly.faces.push_back({f[0], f[1], f[2]});
  return poly;
}

}  // namespace spudd
