#include "spudd/power_diagram.hpp"

#include "convex_cell.hpp"
#include "regular_triangulation.hpp"
#include "seed_tree.hpp"
#include "spudd/aabb_tree.hpp"
#include "spudd/errors.hpp"
#include "spudd/mesh.hpp"
#include "spudd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace spudd {

double power_distance(const Vec3& x, const Seed& s) { return (x - s.p).squaredNorm() - s.d * s.d; }

int classify_point(const Vec3& x, std::span<const Seed> seeds) {
  int best = -1;
  double best_pow = kInf;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const double pw = power_distance(x, seeds[k]);
    if (pw < best_pow) {
      best_pow = pw;
      best = static_cast<int>(k);
    }
  }
  return best;
}

std::size_t PowerDiagram::hidden_count() const {
  return static_cast<std::size_t>(std::count(hidden.begin(), hidden.end(), 1));
}

namespace {

struct CellFace {
  int partner;
  std::vector<Vec3> ring;
  bool on_boundary;
};

struct CellResult {
  bool empty = false;
  std::vector<CellFace> faces;
};

void check_seeds(const std::vector<Seed>& seeds, const Aabb& bbox) {
  if (seeds.size() < 2) throw EmptyInput("a power diagram needs at least two seeds");
  for (const Seed& s : seeds) {
    if (!s.p.allFinite() || !std::isfinite(s.d) || s.d < 0.0)
      throw Error("seed positions must be finite and radii finite and >= 0");
    if (!bbox.contains(s.p)) throw Error("seed lies outside the diagram box");
  }
  std::vector<int> order(seeds.size());
  std::iota(order.begin(), order.end(), 0);
  auto lex = [&](int a, int b) {
    const Vec3& u = seeds[a].p;
    const Vec3& v = seeds[b].p;
    if (u.x() != v.x()) return u.x() < v.x();
    if (u.y() != v.y()) return u.y() < v.y();
    if (u.z() != v.z()) return u.z() < v.z();
    return a < b;
  };
  std::sort(order.begin(), order.end(), lex);
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (seeds[order[k - 1]].p == seeds[order[k]].p)
      throw DuplicateSeed(static_cast<std::size_t>(order[k - 1]), static_cast<std::size_t>(order[k]));
  }
}

CellResult build_cell(int i, const std::vector<Seed>& seeds, const SeedTree& tree, const Aabb& bbox,
                      double tol_pow, int neighbors) {
  const Vec3 pi = seeds[i].p;
  const double di2 = seeds[i].d * seeds[i].d;
  const double tol_s = 0.5 * tol_pow;
  const Aabb local(bbox.lo - pi, bbox.hi - pi);
  ConvexCell cell(local);
  CellResult out;

  // s = n.y - b equals (pi_i - pi_j) / 2 in coordinates centred on p_i.
  auto clip_with = [&](int j) {
    const Vec3 n = seeds[j].p - pi;
    const double b = 0.5 * (n.squaredNorm() + di2 - seeds[j].d * seeds[j].d);
    return cell.clip(n, b, j, tol_s);
  };

  for (int j : tree.k_nearest(pi, neighbors, i)) {
    if (clip_with(j) == ConvexCell::Clip::Empty) {
      out.empty = true;
      return out;
    }
  }

  // Certificate pass: a vertex is final once no seed beats seed i there by
  // more than the tolerance. Clipping with the best seed at a vertex adds a
  // true facet, and surviving vertices keep their certificates.
  std::vector<char> verified(cell.vertex_slots(), 0);
  std::vector<int> work = cell.live_vertices();
  std::reverse(work.begin(), work.end());
  std::size_t budget = 200000;
  while (!work.empty() && budget-- > 0) {
    const int v = work.back();
    work.pop_back();
    if (!cell.alive(v) || verified[v]) continue;
    const Vec3 y = cell.vertices()[v];
    const double own = y.squaredNorm() - di2;
    const int j = tree.min_power_below(pi + y, own - tol_pow);
    if (j < 0) {
      verified[v] = 1;
      continue;
    }
    const std::size_t before = cell.vertex_slots();
    const auto r = clip_with(j);
    if (r == ConvexCell::Clip::Empty) {
      out.empty = true;
      return out;
    }
    if (r == ConvexCell::Clip::Unchanged) {
      verified[v] = 1;
      continue;
    }
    verified.resize(cell.vertex_slots(), 0);
    if (cell.alive(v)) work.push_back(v);
    for (std::size_t k = cell.vertex_slots(); k-- > before;) work.push_back(static_cast<int>(k));
  }

  const double tol_box = 1e-12 * bbox.diagonal();
  auto on_box = [&](const Vec3& y) {
    for (int a = 0; a < 3; ++a) {
      if (std::abs(y[a] - local.lo[a]) <= tol_box || std::abs(y[a] - local.hi[a]) <= tol_box)
        return true;
    }
    return false;
  };
  for (const auto& f : cell.faces()) {
    if (f.tag < 0) continue;
    CellFace cf{f.tag, {}, false};
    cf.ring.reserve(f.ring.size());
    for (int v : f.ring) {
      const Vec3& y = cell.vertices()[v];
      cf.on_boundary |= on_box(y);
      cf.ring.push_back(pi + y);
    }
    out.faces.push_back(std::move(cf));
  }
  return out;
}

bool near_box(const Vec3& x, const Aabb& box, double tol) {
  for (int a = 0; a < 3; ++a) {
    if (std::abs(x[a] - box.lo[a]) <= tol || std::abs(x[a] - box.hi[a]) <= tol) return true;
  }
  return false;
}

// Sutherland-Hodgman against the six box planes.
std::vector<Vec3> clip_to_box(std::vector<Vec3> poly, const Aabb& box) {
  std::vector<Vec3> next;
  for (int a = 0; a < 3 && !poly.empty(); ++a) {
    for (int side = 0; side < 2 && !poly.empty(); ++side) {
      // Inside when s >= 0.
      auto s = [&](const Vec3& x) { return side == 0 ? x[a] - box.lo[a] : box.hi[a] - x[a]; };
      next.clear();
      for (std::size_t k = 0; k < poly.size(); ++k) {
        const Vec3& u = poly[k];
        const Vec3& v = poly[(k + 1) % poly.size()];
        const double su = s(u), sv = s(v);
        if (su >= 0.0) next.push_back(u);
        if ((su >= 0.0) != (sv >= 0.0)) {
          Vec3 x = u + (su / (su - sv)) * (v - u);
          x[a] = side == 0 ? box.lo[a] : box.hi[a];
          next.push_back(x);
        }
      }
      poly.swap(next);
    }
  }
  return poly;
}

PowerDiagram assemble(std::vector<Seed> seeds, const Aabb& bbox, std::vector<PowerFace> faces,
                      std::vector<char> hidden) {
  std::sort(faces.begin(), faces.end(),
            [](const PowerFace& a, const PowerFace& b) { return a.i < b.i || (a.i == b.i && a.j < b.j); });
  PowerDiagram pd;
  pd.bbox = bbox;
  pd.cell_faces.resize(seeds.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    pd.cell_faces[faces[f].i].push_back(static_cast<int>(f));
    pd.cell_faces[faces[f].j].push_back(static_cast<int>(f));
  }
  pd.faces = std::move(faces);
  pd.hidden = std::move(hidden);
  pd.seeds = std::move(seeds);
  return pd;
}

PowerDiagram by_clipping(std::vector<Seed> seeds, const Aabb& bbox, int neighbors) {
  const std::size_t n = seeds.size();
  std::vector<Vec3> points(n);
  std::vector<double> radii(n);
  for (std::size_t k = 0; k < n; ++k) {
    points[k] = seeds[k].p;
    radii[k] = seeds[k].d;
  }
  const SeedTree tree(points, radii);
  const double diag = bbox.diagonal();
  const double tol_pow = 1e-13 * diag * diag;

  std::vector<CellResult> cells(n);
  parallel_for(0, n, [&](std::size_t i) {
    cells[i] = build_cell(static_cast<int>(i), seeds, tree, bbox, tol_pow, neighbors);
  });

  // Each face is reported by up to two cells; keep the lower-index cell's copy.
  std::vector<PowerFace> faces;
  std::vector<char> hidden(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    hidden[i] = cells[i].empty ? 1 : 0;
    for (CellFace& cf : cells[i].faces) {
      const int ii = static_cast<int>(i);
      if (cf.partner < ii && !cells[cf.partner].empty) {
        const auto& other = cells[cf.partner].faces;
        if (std::any_of(other.begin(), other.end(), [&](const CellFace& o) { return o.partner == ii; }))
          continue;
      }
      PowerFace face;
      face.i = std::min(ii, cf.partner);
      face.j = std::max(ii, cf.partner);
      face.on_boundary = cf.on_boundary;
      face.polygon = ConvexPolygon(std::move(cf.ring));
      faces.push_back(std::move(face));
    }
  }
  return assemble(std::move(seeds), bbox, std::move(faces), std::move(hidden));
}

PowerDiagram by_triangulation(std::vector<Seed> seeds, const Aabb& bbox) {
  const std::size_t n = seeds.size();
  std::vector<Vec3> points(n);
  std::vector<double> radii(n);
  for (std::size_t k = 0; k < n; ++k) {
    points[k] = seeds[k].p;
    radii[k] = seeds[k].d;
  }
  const RegularTriangulation rt(points, radii, bbox);

  const auto& tets = rt.tets();
  std::vector<Vec3> centers(tets.size());
  parallel_for(0, tets.size(), [&](std::size_t t) {
    if (rt.alive(static_cast<int>(t))) centers[t] = rt.power_center(static_cast<int>(t));
  });

  // The face of edge (a, b) is the polygon of power centres around it.
  struct Edge {
    int a, b;
    std::size_t begin, end;
  };
  std::vector<Edge> edges;
  std::vector<int> rings;
  rt.for_each_edge([&](int a, int b, const std::vector<int>& ring) {
    edges.push_back({a, b, rings.size(), rings.size() + ring.size()});
    rings.insert(rings.end(), ring.begin(), ring.end());
  });
  std::sort(edges.begin(), edges.end(),
            [](const Edge& x, const Edge& y) { return x.a < y.a || (x.a == y.a && x.b < y.b); });

  const double diag = bbox.diagonal();
  const double tol_merge = 1e-12 * diag;
  std::vector<PowerFace> built(edges.size());
  std::vector<char> keep(edges.size(), 0);
  parallel_for(0, edges.size(), [&](std::size_t e) {
    const Edge& edge = edges[e];
    std::vector<Vec3> poly;
    poly.reserve(edge.end - edge.begin);
    for (std::size_t k = edge.begin; k < edge.end; ++k) poly.push_back(centers[rings[k]]);
    poly = clip_to_box(std::move(poly), bbox);
    std::vector<Vec3> ring;
    ring.reserve(poly.size());
    for (const Vec3& x : poly) {
      if (ring.empty() || (x - ring.back()).norm() > tol_merge) ring.push_back(x);
    }
    while (ring.size() > 1 && (ring.front() - ring.back()).norm() <= tol_merge) ring.pop_back();
    if (ring.size() < 3) return;
    PowerFace face;
    face.i = edge.a;
    face.j = edge.b;
    for (const Vec3& x : ring) face.on_boundary = face.on_boundary || near_box(x, bbox, tol_merge);
    face.polygon = ConvexPolygon(std::move(ring));
    // The radical plane is known exactly in direction.
    const Vec3 normal = (seeds[edge.b].p - seeds[edge.a].p).normalized();
    face.polygon.plane.normal = normal;
    face.polygon.plane.offset = normal.dot(face.polygon.centroid());
    built[e] = std::move(face);
    keep[e] = 1;
  });

  std::vector<PowerFace> faces;
  std::vector<char> hidden(n, 1);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!keep[e]) continue;
    hidden[built[e].i] = 0;
    hidden[built[e].j] = 0;
    faces.push_back(std::move(built[e]));
  }
  // Without any face inside the box, a single cell covers all of it.
  if (faces.empty()) hidden[classify_point(bbox.center(), seeds)] = 0;
  return assemble(std::move(seeds), bbox, std::move(faces), std::move(hidden));
}

}  // namespace

PowerDiagram compute_power_diagram(std::vector<Seed> seeds, const Aabb& bbox,
                                   const PowerDiagramOptions& options) {
  check_seeds(seeds, bbox);
  if (options.method == PowerDiagramOptions::Method::Clipping)
    return by_clipping(std::move(seeds), bbox, options.neighbors);
  return by_triangulation(std::move(seeds), bbox);
}

std::vector<Seed> grid_seeds(const UdfGrid& grid) {
  std::vector<Seed> seeds(grid.values.size());
  for (std::size_t k = 0; k < seeds.size(); ++k) seeds[k] = {grid.spec.node(k), grid.values[k]};
  return seeds;
}

Aabb diagram_bounds(const GridSpec& spec) { return spec.bounds().inflated(spec.spacing); }

PowerDiagram compute_power_diagram(const UdfGrid& grid, const PowerDiagramOptions& options) {
  grid.validate();
  return compute_power_diagram(grid_seeds(grid), diagram_bounds(grid.spec), options);
}

namespace {

bool in_cell(const PowerDiagram& pd, int i, const Vec3& x, double margin) {
  const double own = power_distance(x, pd.seeds[i]);
  for (int f : pd.cell_faces[i]) {
    const PowerFace& face = pd.faces[f];
    const int j = face.i == i ? face.j : face.i;
    if (own > power_distance(x, pd.seeds[j]) - margin) return false;
  }
  return true;
}

// Cell boxes are rebuilt from the radical planes of each cell's faces
// together with the diagram box, by clipping a box cell.
std::vector<Aabb> cell_bounds(const PowerDiagram& pd) {
  std::vector<Aabb> boxes(pd.seeds.size());
  const double diag = pd.diagonal();
  const double tol_s = 0.5e-13 * diag * diag;
  parallel_for(0, pd.seeds.size(), [&](std::size_t i) {
    if (pd.hidden[i]) return;
    const Vec3 pi = pd.seeds[i].p;
    const double di2 = pd.seeds[i].d * pd.seeds[i].d;
    ConvexCell cell(Aabb(pd.bbox.lo - pi, pd.bbox.hi - pi));
    for (int f : pd.cell_faces[i]) {
      const PowerFace& face = pd.faces[f];
      const int j = face.i == static_cast<int>(i) ? face.j : face.i;
      const Vec3 n = pd.seeds[j].p - pi;
      cell.clip(n, 0.5 * (n.squaredNorm() + di2 - pd.seeds[j].d * pd.seeds[j].d), j, tol_s);
    }
    Aabb box;
    for (int v : cell.live_vertices()) box.expand(Vec3(pi + cell.vertices()[v]));
    boxes[i] = box.inflated(1e-9 * diag);
  });
  return boxes;
}

class CellLocator {
 public:
  explicit CellLocator(const PowerDiagram& pd) : pd_(pd) {
    std::vector<Aabb> boxes = cell_bounds(pd);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (!boxes[i].empty()) {
        ids_.push_back(static_cast<int>(i));
        live_.push_back(boxes[i]);
      }
    }
    if (!live_.empty()) tree_ = AabbTree(live_);
  }

  // Lowest-index cell containing x, and the number of cells containing x
  // with the given strictness margin.
  std::pair<int, int> locate(const Vec3& x, double margin) const {
    int best = -1, strict = 0;
    if (live_.empty() || !pd_.bbox.contains(x)) return {best, strict};
    tree_.any_overlapping(Aabb(x, x), [&](int k) {
      const int i = ids_[k];
      if (in_cell(pd_, i, x, 0.0) && (best < 0 || i < best)) best = i;
      if (in_cell(pd_, i, x, margin)) ++strict;
      return false;
    });
    return {best, strict};
  }

 private:
  const PowerDiagram& pd_;
  std::vector<int> ids_;
  std::vector<Aabb> live_;
  AabbTree tree_;
};

}  // namespace

int containing_cell(const PowerDiagram& pd, const Vec3& x) {
  if (!pd.bbox.contains(x)) return -1;
  for (std::size_t i = 0; i < pd.seeds.size(); ++i) {
    if (!pd.hidden[i] && in_cell(pd, static_cast<int>(i), x, 0.0)) return static_cast<int>(i);
  }
  return -1;
}

DiagramReport validate_diagram(const PowerDiagram& pd, std::size_t probes, std::uint64_t rng_seed) {
  DiagramReport report;
  report.probes = probes;
  const std::size_t n = pd.seeds.size();
  if (n == 0) return report;
  const double eps = pd.eps_pow();
  std::vector<Vec3> points(n);
  std::vector<double> radii(n);
  for (std::size_t k = 0; k < n; ++k) {
    points[k] = pd.seeds[k].p;
    radii[k] = pd.seeds[k].d;
  }
  const SeedTree tree(points, radii);

  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3> xs(probes);
  for (auto& x : xs) {
    for (int a = 0; a < 3; ++a) x[a] = pd.bbox.lo[a] + unit(rng) * (pd.bbox.hi[a] - pd.bbox.lo[a]);
  }
  const CellLocator locator(pd);
  std::vector<std::array<char, 3>> flags(probes);
  parallel_for(0, probes, [&](std::size_t p) {
    const auto [cell, strict] = locator.locate(xs[p], eps);
    const int truth = tree.min_power_below(xs[p], kInf);
    flags[p] = {static_cast<char>(cell >= 0 && cell != truth), static_cast<char>(cell < 0),
                static_cast<char>(strict > 1)};
  });
  for (const auto& f : flags) {
    report.classification_mismatches += f[0];
    report.uncovered_probes += f[1];
    report.overlapped_probes += f[2];
  }

  std::vector<std::array<std::size_t, 3>> face_flags(pd.faces.size());
  parallel_for(0, pd.faces.size(), [&](std::size_t f) {
    const PowerFace& face = pd.faces[f];
    std::array<std::size_t, 3> c{0, 0, 0};
    for (const Vec3& x : face.polygon.ring) {
      const double pi = power_distance(x, pd.seeds[face.i]);
      const double pj = power_distance(x, pd.seeds[face.j]);
      ++c[0];
      if (std::abs(pi - pj) > eps) ++c[1];
      if (tree.min_power_below(x, pi - eps) >= 0) ++c[2];
    }
    face_flags[f] = c;
  });
  for (const auto& c : face_flags) {
    report.face_vertices += c[0];
    report.radical_violations += c[1];
    report.minimality_violations += c[2];
  }
  return report;
}

void write_diagram_obj(const std::string& path, const PowerDiagram& pd) {
  PolyMesh soup;
  for (const PowerFace& f : pd.faces) {
    std::vector<int> idx;
    for (const Vec3& v : f.polygon.ring) {
      idx.push_back(static_cast<int>(soup.vertices.size()));
      soup.vertices.push_back(v);
    }
    soup.faces.push_back(std::move(idx));
  }
  write_obj(path, soup);
}

}  // namespace spudd
