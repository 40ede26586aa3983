#include "spudd/cli.hpp"

#include "spudd/errors.hpp"
#include "spudd/metrics.hpp"
#include "spudd/parallel.hpp"
#include "spudd/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace spudd {

namespace {

using nlohmann::ordered_json;

// Writes through a temporary file so a failed run never leaves a partial
// artifact under the requested name.
void write_file(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp + " for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.close();
    if (!f) {
      std::remove(tmp.c_str());
      throw Error("failed writing " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error("cannot move " + tmp + " to " + path);
  }
}

void write_mesh(const std::string& path, const PolyMesh& mesh) {
  std::ostringstream s;
  write_obj(s, mesh);
  write_file(path, s.str());
}

void write_grid(const std::string& path, const GridSpec& spec, const std::vector<double>& values, bool ascii) {
  std::ostringstream s;
  save_grid(s, spec, values, ascii ? GridEncoding::Ascii : GridEncoding::Binary);
  write_file(path, s.str());
}

TriMesh load_trimesh(const std::string& path) {
  TriMesh m = to_trimesh(read_obj(path));
  m.validate();
  return m;
}

ordered_json timings_json(const std::vector<StageTime>& timings) {
  ordered_json t = ordered_json::array();
  for (const auto& s : timings) t.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
  return t;
}

ordered_json grid_json(const GridSpec& spec) {
  return {{"dims", spec.dims},
          {"origin", {spec.origin.x(), spec.origin.y(), spec.origin.z()}},
          {"spacing", spec.spacing}};
}

// Human-readable rendering: scalars as aligned key/value rows, arrays of
// objects as one row per element.
void print_table(std::ostream& out, const ordered_json& j, const std::string& indent = "") {
  std::size_t width = 0;
  for (const auto& [k, v] : j.items()) width = std::max(width, k.size());
  for (const auto& [k, v] : j.items()) {
    if (v.is_object()) {
      out << indent << k << ":\n";
      print_table(out, v, indent + "  ");
    } else if (v.is_array() && !v.empty() && v.front().is_object()) {
      out << indent << k << ":\n";
      for (const auto& row : v) {
        out << indent << " ";
        for (const auto& [rk, rv] : row.items()) out << " " << rk << "=" << rv.dump();
        out << "\n";
      }
    } else {
      out << indent << std::left << std::setw(static_cast<int>(width)) << k << "  " << v.dump() << "\n";
    }
  }
}

struct Context {
  std::ostream& out;
  bool json = false;

  void report(const ordered_json& j) const {
    if (json)
      out << j.dump(2) << "\n";
    else
      print_table(out, j);
  }
};

struct SampleArgs {
  std::string mesh, output;
  int resolution = 0;
  double padding = kDefaultPadding;
  bool sign = false, ascii = false;
  double noise = 0.0;
  std::uint64_t seed = 1;
};

void cmd_sample(const SampleArgs& a, const Context& ctx) {
  const TriMesh mesh = load_trimesh(a.mesh);
  GridSpec spec;
  if (a.sign) {
    const SdfGrid g = sample_sdf(mesh, a.resolution, a.padding);
    write_grid(a.output, g.spec, g.values, a.ascii);
    spec = g.spec;
  } else {
    UdfGrid g = sample_udf(mesh, a.resolution, a.padding);
    if (a.noise > 0.0) g = add_noise(g, a.noise, a.seed);
    write_grid(a.output, g.spec, g.values, a.ascii);
    spec = g.spec;
  }
  ordered_json j{{"output", a.output}, {"signed", a.sign}, {"grid", grid_json(spec)}};
  if (!a.sign) j["noise"] = a.noise;
  ctx.report(j);
}

struct ContourArgs {
  std::string grid, output, report;
};

void cmd_contour(const ContourArgs& a, const Context& ctx) {
  const UdfGrid grid = load_grid(a.grid);
  const ContourResult c = extract_contour(grid);
  if (c.contour.empty()) throw EmptyContour();
  PolyMesh soup;
  for (const auto& f : c.contour.faces) {
    std::vector<int> face;
    for (const Vec3& v : f.polygon.ring) {
      face.push_back(static_cast<int>(soup.vertices.size()));
      soup.vertices.push_back(v);
    }
    soup.faces.push_back(std::move(face));
  }
  write_mesh(a.output, soup);
  const ordered_json j{{"output", a.output},
                       {"seeds", c.stats.seeds},
                       {"hidden_seeds", c.stats.hidden_seeds},
                       {"power_faces", c.stats.power_faces},
                       {"contour_faces", c.stats.contour_faces},
                       {"contour_area", c.contour.total_area()},
                       {"timings", timings_json(c.stats.timings)}};
  if (!a.report.empty()) write_file(a.report, j.dump(2) + "\n");
  ctx.report(j);
}

struct ReconstructArgs {
  std::string grid, output, report;
  ReconstructOptions options;
  bool no_thinning = false, triangulate = false, trace = false;
};

void cmd_reconstruct(ReconstructArgs a, const Context& ctx) {
  const UdfGrid grid = load_grid(a.grid);
  a.options.thinning = !a.no_thinning;
  const Reconstruction r = reconstruct(grid, a.options);
  const PolyMesh mesh = a.triangulate ? to_polymesh(triangulate(r.mesh)) : to_polymesh(r.mesh);
  write_mesh(a.output, mesh);

  const ReconstructReport& rep = r.report;
  const EdgeCounts edges = count_edges(r.mesh);
  ordered_json j{{"output", a.output},
                 {"seeds", rep.contour.seeds},
                 {"power_faces", rep.contour.power_faces},
                 {"contour_faces", rep.contour.contour_faces},
                 {"active_edges", rep.active_edges},
                 {"active_cells", rep.active_cells},
                 {"bipartite_ratio", rep.bipartite_ratio()},
                 {"quads_before_thinning", rep.quads_before_thinning},
                 {"vertices", mesh.vertices.size()},
                 {"faces", mesh.faces.size()},
                 {"components", rep.components},
                 {"boundary_edges", edges.boundary},
                 {"boundary_loops", edges.boundary_loops},
                 {"nonmanifold_edges", edges.nonmanifold},
                 {"inner_iterations", rep.inner_iterations},
                 {"surrogate_increases", rep.surrogate_increases},
                 {"timings", timings_json(rep.timings)}};
  if (a.trace) j["energy"] = rep.energy;
  if (!a.report.empty()) write_file(a.report, j.dump(2) + "\n");
  ctx.report(j);
}

struct MetricsArgs {
  std::string a, b;
  MetricOptions options;
};

void cmd_metrics(const MetricsArgs& a, const Context& ctx) {
  const TriMesh ma = load_trimesh(a.a);
  const TriMesh mb = load_trimesh(a.b);
  const MetricReport m = compute_metrics(ma, mb, a.options);
  ordered_json j{{"ce", m.ce},
                 {"he", m.he},
                 {"ece", m.ece},
                 {"ece_no_edges", m.ece_no_edges},
                 {"vertices", m.vertex_count},
                 {"samples", m.sample_count}};
  ctx.report(j);
}

struct ConvergenceArgs {
  std::string mesh, output;
  std::vector<int> resolutions;
  ConvergenceOptions options;
};

void cmd_convergence(const ConvergenceArgs& a, const Context& ctx) {
  const TriMesh mesh = load_trimesh(a.mesh);
  const auto rows = contour_convergence_study(mesh, a.resolutions, a.options);
  ordered_json table = ordered_json::array();
  for (const auto& r : rows) {
    table.push_back({{"resolution", r.resolution},
                     {"seeds", r.seeds},
                     {"spacing", r.spacing},
                     {"hausdorff", r.hausdorff},
                     {"contour_to_surface", r.contour_to_surface},
                     {"surface_to_contour", r.surface_to_contour},
                     {"faces", r.face_count},
                     {"area", r.total_area}});
  }
  if (!a.output.empty()) write_file(a.output, table.dump(2) + "\n");
  if (ctx.json) {
    ctx.out << table.dump(2) << "\n";
    return;
  }
  ctx.out << std::left << std::setw(6) << "res" << std::setw(24) << "spacing" << std::setw(24) << "hausdorff"
          << std::setw(24) << "sp->surface" << std::setw(24) << "surface->sp" << "faces\n";
  for (const auto& r : rows) {
    ctx.out << std::left << std::setw(6) << r.resolution << std::setw(24) << format_double(r.spacing)
            << std::setw(24) << format_double(r.hausdorff) << std::setw(24) << format_double(r.contour_to_surface)
            << std::setw(24) << format_double(r.surface_to_contour) << r.face_count << "\n";
  }
}

struct UnionArgs {
  std::string a, b, output;
  bool ascii = false;
};

void cmd_union(const UnionArgs& a, const Context& ctx) {
  const UdfGrid g = grid_union(load_grid(a.a), load_grid(a.b));
  write_grid(a.output, g.spec, g.values, a.ascii);
  ctx.report({{"output", a.output}, {"grid", grid_json(g.spec)}});
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mesh reconstruction from unsigned distance grids", "spudd"};
  app.require_subcommand(1);
  int threads = 0;
  bool json = false;
  app.add_option("--threads", threads, "worker threads (default: SPUDD_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--json", json, "print reports as JSON");

  SampleArgs sample;
  auto* sub_sample = app.add_subcommand("sample", "sample a mesh's unsigned (or signed) distance grid");
  sub_sample->add_option("mesh", sample.mesh, "input OBJ")->required();
  sub_sample->add_option("--res", sample.resolution, "nodes per axis")->required()->check(CLI::Range(2, 4096));
  sub_sample->add_option("--padding", sample.padding, "margin as a fraction of the box diagonal")
      ->check(CLI::NonNegativeNumber);
  sub_sample->add_flag("--signed", sample.sign, "write signed distances");
  auto* noise = sub_sample->add_option("--noise", sample.noise, "Gaussian noise, in units of the spacing")
                    ->check(CLI::NonNegativeNumber);
  sub_sample->add_option("--seed", sample.seed, "noise seed");
  sub_sample->add_option("-o,--out", sample.output, "output grid file")->required();
  sub_sample->add_flag("--ascii", sample.ascii, "write the ascii grid encoding");
  noise->excludes(sub_sample->get_option("--signed"));

  ContourArgs contour;
  auto* sub_contour = app.add_subcommand("contour", "write the superpower contour of a grid");
  sub_contour->add_option("grid", contour.grid, "input grid file")->required();
  sub_contour->add_option("-o,--out", contour.output, "output OBJ polygon soup")->required();
  sub_contour->add_option("--report", contour.report, "also write the stats JSON here");

  ReconstructArgs recon;
  auto* sub_recon = app.add_subcommand("reconstruct", "reconstruct a mesh from a grid");
  sub_recon->add_option("grid", recon.grid, "input grid file")->required();
  sub_recon->add_option("-o,--out", recon.output, "output OBJ")->required();
  sub_recon->add_option("--k1", recon.options.optimizer.k1, "inner iterations")->check(CLI::NonNegativeNumber);
  sub_recon->add_option("--k2", recon.options.optimizer.k2, "outer iterations")->check(CLI::NonNegativeNumber);
  sub_recon->add_option("--tol", recon.options.optimizer.tol, "inner step threshold, in units of the spacing")
      ->check(CLI::PositiveNumber);
  sub_recon->add_option("--lambda", recon.options.optimizer.lambda, "regularisation weight")
      ->check(CLI::PositiveNumber);
  sub_recon->add_flag("--no-thinning", recon.no_thinning, "keep every component");
  sub_recon->add_option("--thinning-cardinality", recon.options.thinning_cardinality,
                        "open components with fewer faces are removed")
      ->check(CLI::NonNegativeNumber);
  sub_recon->add_flag("--triangulate", recon.triangulate, "write triangles instead of quads");
  sub_recon->add_flag("--trace", recon.trace, "include the energy trace in the report");
  sub_recon->add_option("--report", recon.report, "also write the report JSON here");

  MetricsArgs metrics;
  auto* sub_metrics = app.add_subcommand("metrics", "compare two meshes");
  sub_metrics->add_option("a", metrics.a, "reconstructed OBJ")->required();
  sub_metrics->add_option("b", metrics.b, "reference OBJ")->required();
  sub_metrics->add_option("--samples", metrics.options.samples, "samples per mesh")->check(CLI::PositiveNumber);
  sub_metrics->add_option("--edge-angle", metrics.options.edge_angle_deg, "edge normal angle in degrees")
      ->check(CLI::Range(0.0, 180.0));
  sub_metrics->add_option("--edge-radius", metrics.options.edge_radius_fraction,
                          "edge neighbourhood as a fraction of the diagonal")
      ->check(CLI::PositiveNumber);
  sub_metrics->add_option("--seed", metrics.options.rng_seed, "sampling seed");

  ConvergenceArgs conv;
  auto* sub_conv = app.add_subcommand("convergence", "contour-to-surface distance across resolutions");
  sub_conv->add_option("mesh", conv.mesh, "input OBJ")->required();
  sub_conv->add_option("--res", conv.resolutions, "increasing resolutions, e.g. 16,32,64")
      ->required()
      ->delimiter(',')
      ->check(CLI::Range(2, 4096));
  sub_conv->add_option("--samples", conv.options.samples, "samples per side")->check(CLI::PositiveNumber);
  sub_conv->add_option("--padding", conv.options.padding, "grid margin")->check(CLI::NonNegativeNumber);
  sub_conv->add_flag("--random-seeds", conv.options.random_seeds, "random sample positions instead of nodes");
  sub_conv->add_option("--seed", conv.options.rng_seed, "sampling seed");
  sub_conv->add_option("-o,--out", conv.output, "also write the table JSON here");

  UnionArgs uni;
  auto* sub_union = app.add_subcommand("union", "elementwise minimum of two grids");
  sub_union->add_option("a", uni.a, "first grid")->required();
  sub_union->add_option("b", uni.b, "second grid")->required();
  sub_union->add_option("-o,--out", uni.output, "output grid file")->required();
  sub_union->add_flag("--ascii", uni.ascii, "write the ascii grid encoding");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (!conv.resolutions.empty() && !std::is_sorted(conv.resolutions.begin(), conv.resolutions.end(),
                                                     std::less_equal<int>()))
      throw CLI::ValidationError("--res", "resolutions must be strictly increasing");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (threads > 0) set_thread_count(threads);
  const Context ctx{out, json};
  try {
    if (*sub_sample) cmd_sample(sample, ctx);
    if (*sub_contour) cmd_contour(contour, ctx);
    if (*sub_recon) cmd_reconstruct(recon, ctx);
    if (*sub_metrics) cmd_metrics(metrics, ctx);
    if (*sub_conv) cmd_convergence(conv, ctx);
    if (*sub_union) cmd_union(uni, ctx);
  } catch (const EmptyContour& e) {
    err << "spudd: " << e.what() << "\n";
    return kExitEmptyContour;
  } catch (const std::exception& e) {
    err << "spudd: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace spudd
