#pragma once

#include "spudd/geometry.hpp"
#include "spudd/grid.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spudd {

// Weighted sample: position p and unsigned distance d, read as the ball B(p, d).
struct Seed {
  Vec3 p = Vec3::Zero();
  double d = 0.0;
};

struct PowerFace {
  int i = -1, j = -1;  // i < j
  ConvexPolygon polygon;
  bool on_boundary = false;
};

struct PowerDiagram {
  std::vector<Seed> seeds;
  std::vector<PowerFace> faces;           // sorted by (i, j)
  std::vector<std::vector<int>> cell_faces;
  std::vector<char> hidden;               // seed has an empty cell
  Aabb bbox;

  double diagonal() const { return bbox.diagonal(); }
  // Validation tolerance for power distances.
  double eps_pow() const { return 1e-7 * diagonal() * diagonal(); }
  std::size_t hidden_count() const;
};

double power_distance(const Vec3& x, const Seed& s);

// Brute-force argmin of the power distance; ties go to the lowest index.
int classify_point(const Vec3& x, std::span<const Seed> seeds);

struct PowerDiagramOptions {
  enum class Method {
    // Dual of the regular triangulation, built with exact predicates.
    Triangulation,
    // Independent per-seed clipping of the box by radical half-spaces, with a
    // per-vertex certificate against all seeds. Slower; kept as a cross-check.
    Clipping,
  };
  Method method = Method::Triangulation;
  // Clipping only: nearest neighbours clipped before the certificate pass.
  int neighbors = 26;
};

// Power cells of the seeds restricted to `bbox`. Throws EmptyInput for fewer
// than two seeds and DuplicateSeed for repeated positions.
PowerDiagram compute_power_diagram(std::vector<Seed> seeds, const Aabb& bbox,
                                   const PowerDiagramOptions& options = {});

std::vector<Seed> grid_seeds(const UdfGrid& grid);
// Grid bounds grown by one spacing.
Aabb diagram_bounds(const GridSpec& spec);
PowerDiagram compute_power_diagram(const UdfGrid& grid, const PowerDiagramOptions& options = {});

// Cell whose half-space description contains x: x in the box and
// pi_i(x) <= pi_j(x) for each face partner j. Ties go to the lowest index;
// returns -1 outside every cell.
int containing_cell(const PowerDiagram& pd, const Vec3& x);

struct DiagramReport {
  std::size_t probes = 0;
  std::size_t classification_mismatches = 0;
  std::size_t uncovered_probes = 0;     // in no cell
  std::size_t overlapped_probes = 0;    // strictly inside two cells
  std::size_t radical_violations = 0;   // face vertex off its radical plane
  std::size_t minimality_violations = 0;
  std::size_t face_vertices = 0;

  std::size_t violations() const {
    return classification_mismatches + uncovered_probes + overlapped_probes +
           radical_violations + minimality_violations;
  }
};

// Samples `probes` uniform points in the box and checks every face vertex.
DiagramReport validate_diagram(const PowerDiagram& pd, std::size_t probes,
                               std::uint64_t rng_seed = 1);

// One OBJ polygon per face.
void write_diagram_obj(const std::string& path, const PowerDiagram& pd);

}  // namespace spudd
