#pragma once

#include "spudd/contouring.hpp"
#include "spudd/optimizer.hpp"
#include "spudd/postprocess.hpp"
#include "spudd/power_diagram.hpp"
#include "spudd/superpower.hpp"

#include <functional>
#include <string>
#include <vector>

namespace spudd {

struct StageTime {
  std::string stage;
  double seconds = 0.0;
};

struct ContourStats {
  std::size_t seeds = 0;
  std::size_t hidden_seeds = 0;
  std::size_t power_faces = 0;
  std::size_t contour_faces = 0;
  std::vector<StageTime> timings;
};

struct ContourResult {
  PowerDiagram diagram;
  SuperpowerContour contour;
  ContourStats stats;
};

// Power diagram and superpower contour of a grid.
ContourResult extract_contour(const UdfGrid& grid, const PowerDiagramOptions& options = {});

struct ReconstructOptions {
  OptimizerConfig optimizer;
  bool thinning = true;
  int thinning_cardinality = kDefaultThinning;
  PowerDiagramOptions diagram;
  // Called on the per-cell Hermite estimates before they are merged.
  std::function<void(std::vector<CellHermite>&)> edit_cell_hermite;
};

struct ReconstructReport {
  ContourStats contour;
  std::size_t active_edges = 0;
  std::size_t active_cells = 0;
  std::size_t bipartite_cells = 0;
  std::size_t open_edges = 0;
  std::size_t quads_before_thinning = 0;
  std::size_t vertices = 0;
  std::size_t quads = 0;
  std::size_t components = 0;
  std::vector<double> energy;
  std::size_t surrogate_increases = 0;
  std::size_t inner_iterations = 0;
  std::vector<StageTime> timings;

  double bipartite_ratio() const {
    return active_cells == 0 ? 0.0 : static_cast<double>(bipartite_cells) / static_cast<double>(active_cells);
  }
};

struct Reconstruction {
  QuadMesh mesh;  // unreferenced vertices removed
  ReconstructReport report;
};

// Full pipeline. Errors are rethrown with the failing stage's name prefixed;
// an empty contour stays an EmptyContour.
Reconstruction reconstruct(const UdfGrid& grid, const ReconstructOptions& options = {});

}  // namespace spudd
