#include "spudd/pipeline.hpp"

#include "spudd/errors.hpp"

#include <chrono>
#include <numeric>

namespace spudd {

namespace {

template <class Fn>
auto run_stage(const char* name, std::vector<StageTime>& timings, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  auto record = [&] {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    timings.push_back({name, dt.count()});
  };
  try {
    auto result = fn();
    record();
    return result;
  } catch (const EmptyContour& e) {
    throw EmptyContour(std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(std::string(name) + ": " + e.what());
  }
}

}  // namespace

ContourResult extract_contour(const UdfGrid& grid, const PowerDiagramOptions& options) {
  ContourResult r;
  r.diagram = run_stage("power_diagram", r.stats.timings, [&] { return compute_power_diagram(grid, options); });
  r.contour = run_stage("superpower_contour", r.stats.timings, [&] { return compute_superpower_contour(r.diagram); });
  r.stats.seeds = r.diagram.seeds.size();
  r.stats.hidden_seeds = r.diagram.hidden_count();
  r.stats.power_faces = r.diagram.faces.size();
  r.stats.contour_faces = r.contour.faces.size();
  return r;
}

Reconstruction reconstruct(const UdfGrid& grid, const ReconstructOptions& options) {
  Reconstruction out;
  ReconstructReport& rep = out.report;
  ContourResult c = extract_contour(grid, options.diagram);
  rep.contour = c.stats;
  rep.timings = c.stats.timings;

  const ActiveTopology topo =
      run_stage("active_topology", rep.timings, [&] { return find_active_topology(grid, c.contour); });
  rep.active_edges = topo.edges.size();
  rep.active_cells = topo.cells.size();

  HermiteData hermite = run_stage("hermite_init", rep.timings, [&] {
    std::vector<CellHermite> cells = init_cell_hermite(grid, topo);
    for (const auto& cell : cells) rep.bipartite_cells += cell.bipartite ? 1 : 0;
    if (options.edit_cell_hermite) options.edit_cell_hermite(cells);
    return merge_hermite(topo, cells);
  });

  const std::vector<int> assignment = run_stage("sphere_assignment", rep.timings, [&] {
    return assign_spheres(c.diagram.seeds, c.contour, topo);
  });

  OptimizeResult opt = run_stage("optimize", rep.timings, [&] {
    return optimize(grid, topo, std::move(hermite), assignment, options.optimizer);
  });
  rep.energy = opt.energy;
  rep.surrogate_increases = opt.surrogate_increases;
  rep.inner_iterations = opt.inner_iterations;

  out.mesh = run_stage("postprocess", rep.timings, [&] {
    QuadMesh mesh = assemble_quads(topo, opt.dual);
    rep.open_edges = mesh.open_edges.size();
    rep.quads_before_thinning = mesh.quads.size();
    if (options.thinning) return thin(mesh, options.thinning_cardinality);
    std::vector<int> all(mesh.quads.size());
    std::iota(all.begin(), all.end(), 0);
    return keep_quads(mesh, all);
  });
  rep.vertices = out.mesh.vertices.size();
  rep.quads = out.mesh.quads.size();
  rep.components = decompose_components(out.mesh).size();
  return out;
}

}  // namespace spudd
