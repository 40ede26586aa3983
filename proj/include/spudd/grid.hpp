#pragma once

#include "spudd/geometry.hpp"
#include "spudd/mesh.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace spudd {

// Node layout shared by unsigned and signed grids. Nodes are indexed
// i + nx * (j + ny * k), x fastest.
struct GridSpec {
  std::array<int, 3> dims{2, 2, 2};
  Vec3 origin = Vec3::Zero();
  double spacing = 1.0;

  std::size_t node_count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) * (static_cast<std::size_t>(j) +
                                                static_cast<std::size_t>(dims[1]) * k);
  }
  std::array<int, 3> coords(std::size_t idx) const {
    const int i = static_cast<int>(idx % dims[0]);
    idx /= dims[0];
    const int j = static_cast<int>(idx % dims[1]);
    return {i, j, static_cast<int>(idx / dims[1])};
  }
  Vec3 node(int i, int j, int k) const { return origin + spacing * Vec3(i, j, k); }
  Vec3 node(std::size_t idx) const {
    auto c = coords(idx);
    return node(c[0], c[1], c[2]);
  }
  Aabb bounds() const {
    return {origin, origin + spacing * Vec3(dims[0] - 1, dims[1] - 1, dims[2] - 1)};
  }
  // Throws Error unless dims >= 2 and spacing is finite and positive.
  void validate() const;

  bool operator==(const GridSpec& o) const {
    return dims == o.dims && origin == o.origin && spacing == o.spacing;
  }
};

struct UdfGrid {
  GridSpec spec;
  std::vector<double> values;

  double at(int i, int j, int k) const { return values[spec.index(i, j, k)]; }
  // Throws Error on size mismatch or a negative / non-finite value.
  void validate() const;
};

struct SdfGrid {
  GridSpec spec;
  std::vector<double> values;

  double at(int i, int j, int k) const { return values[spec.index(i, j, k)]; }
  UdfGrid unsigned_grid() const;
};

constexpr double kDefaultPadding = 0.1;

// Cubic grid with `resolution` nodes per axis covering `box` grown by
// padding * diagonal on every side. The cube side is the longest side of the
// grown box and is centered on it.
GridSpec make_grid_spec(const Aabb& box, int resolution, double padding = kDefaultPadding);

UdfGrid sample_udf(const TriMesh& mesh, int resolution, double padding = kDefaultPadding);
UdfGrid sample_udf(const TriMesh& mesh, const GridSpec& spec);

// Signed distances: negative where the generalized winding number is >= 0.5.
// The mesh must be closed; open input is not detected.
SdfGrid sample_sdf(const TriMesh& mesh, int resolution, double padding = kDefaultPadding);
SdfGrid sample_sdf(const TriMesh& mesh, const GridSpec& spec);

// Grid of |f(node)|; used for analytic fixtures.
UdfGrid sample_function(const GridSpec& spec, const std::function<double(const Vec3&)>& f);

double winding_number(const Vec3& x, const std::vector<Triangle>& triangles);

// Adds N(0, (sigma * h)^2) to every value and clamps at zero.
UdfGrid add_noise(const UdfGrid& grid, double sigma, std::uint64_t rng_seed);

// Elementwise minimum; throws GridMismatch unless layouts are identical.
UdfGrid grid_union(const UdfGrid& a, const UdfGrid& b);

enum class GridEncoding { Ascii, Binary };

void save_grid(std::ostream& out, const GridSpec& spec, const std::vector<double>& values,
               GridEncoding encoding);
void save_grid(const std::string& path, const UdfGrid& grid,
               GridEncoding encoding = GridEncoding::Binary);
void save_grid(const std::string& path, const SdfGrid& grid,
               GridEncoding encoding = GridEncoding::Binary);

// Reads any grid file; values may be negative. Throws FormatError with the
// byte offset of the first malformed byte.
SdfGrid parse_grid(const std::string& bytes);
SdfGrid load_signed_grid(const std::string& path);
// As load_signed_grid, but rejects negative values.
UdfGrid load_grid(const std::string& path);

}  // namespace spudd
