#pragma once

#include "spudd/aabb_tree.hpp"
#include "spudd/mesh.hpp"
#include "spudd/power_diagram.hpp"

#include <cstdint>
#include <vector>

namespace spudd {

// Power faces that meet no open seed ball, with a tree for segment and
// closest-point queries.
struct SuperpowerContour {
  std::vector<PowerFace> faces;
  std::vector<int> source;  // index of each face in the diagram
  AabbTree tree;            // empty when there are no faces
  // Per face: range of the ring's signed distances to its fitted plane and the
  // largest vertex coordinate, for closest-point pruning.
  struct Slab {
    double lo = 0.0, hi = 0.0, scale = 0.0;
  };
  std::vector<Slab> slabs;
  std::size_t seed_count = 0;
  double eps_ball = 0.0;

  bool empty() const { return faces.empty(); }
  double total_area() const;
  SoupHit closest(const Vec3& p) const;
  // True when segment [a, b] crosses or touches a face.
  bool segment_hits(const Vec3& a, const Vec3& b, double eps) const;
  // Fan triangulation of all faces.
  TriMesh triangles() const;
};

// Contour over the given faces, with its search structures built.
SuperpowerContour make_superpower_contour(std::vector<PowerFace> faces, std::vector<int> source,
                                          std::size_t seed_count, double eps_ball);

// Ball tolerance: 1e-9 of the box diagonal.
double ball_tolerance(const PowerDiagram& pd);

// True iff dist(center, f) < radius - eps. Tangent faces do not intersect;
// balls with radius <= eps are empty.
bool face_ball_intersects(const ConvexPolygon& f, const Vec3& center, double radius, double eps);

// Keeps faces avoiding every seed ball; each face is tested only against the
// seeds whose balls reach its box.
SuperpowerContour compute_superpower_contour(const PowerDiagram& pd);

// Same membership test against every seed; indices of retained faces.
std::vector<int> superpower_faces_all_pairs(const PowerDiagram& pd);

// Faces whose two seeds carry opposite signs (sign < 0 is inside).
std::vector<int> power_contour_signed(const PowerDiagram& pd, const std::vector<int>& signs);

// Counts points sampled on the faces (vertices, centroid and random interior
// points) that lie strictly inside some ball by more than eps.
std::size_t verify_outside_balls(const std::vector<PowerFace>& faces, const std::vector<Seed>& seeds,
                                 double eps, int samples_per_face = 8, std::uint64_t rng_seed = 1);
std::size_t verify_outside_balls(const SuperpowerContour& sp, const std::vector<Seed>& seeds);

struct ConvergenceRow {
  int resolution = 0;
  std::size_t seeds = 0;
  double spacing = 0.0;
  double hausdorff = 0.0;      // two-sided
  double contour_to_surface = 0.0;
  double surface_to_contour = 0.0;
  std::size_t face_count = 0;
  double total_area = 0.0;
};

struct ConvergenceOptions {
  std::size_t samples = 100000;  // per side
  double padding = kDefaultPadding;
  // When true, seeds are resolution^3 uniform random points in the grid box
  // carrying their exact distances, instead of the grid nodes.
  bool random_seeds = false;
  std::uint64_t rng_seed = 1;
};

// Throws Error unless the resolutions are >= 2 and strictly increasing.
std::vector<ConvergenceRow> contour_convergence_study(const TriMesh& mesh,
                                                      const std::vector<int>& resolutions,
                                                      const ConvergenceOptions& options = {});

}  // namespace spudd
