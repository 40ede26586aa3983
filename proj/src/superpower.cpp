#include "spudd/superpower.hpp"

#include "seed_tree.hpp"
#include "spudd/errors.hpp"
#include "spudd/grid.hpp"
#include "spudd/metrics.hpp"
#include "spudd/parallel.hpp"

#include <algorithm>
#include <random>

namespace spudd {

namespace {

SeedTree seed_tree(const std::vector<Seed>& seeds) {
  std::vector<Vec3> points(seeds.size());
  std::vector<double> radii(seeds.size());
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    points[k] = seeds[k].p;
    radii[k] = seeds[k].d;
  }
  return SeedTree(points, radii);
}

bool hits_own_ball(const PowerFace& f, const std::vector<Seed>& seeds, double eps) {
  return face_ball_intersects(f.polygon, seeds[f.i].p, seeds[f.i].d, eps) ||
         face_ball_intersects(f.polygon, seeds[f.j].p, seeds[f.j].d, eps);
}

}  // namespace

double SuperpowerContour::total_area() const {
  double a = 0.0;
  for (const auto& f : faces) a += f.polygon.area();
  return a;
}

SoupHit SuperpowerContour::closest(const Vec3& p) const {
  if (faces.empty()) return {};
  // Every point of a face has its signed plane distance within the slab, so
  // the gap to the slab bounds the distance from below.
  auto lower = [this](int id, const Vec3& q) {
    const Slab& s = slabs[id];
    const double sd = faces[id].polygon.plane.signed_distance(q);
    const double gap = std::max({sd - s.hi, s.lo - sd, 0.0});
    return gap - 1e-12 * (q.lpNorm<Eigen::Infinity>() + s.scale);
  };
  return tree.closest(p, lower, [this](int id, const Vec3& q) { return point_polygon_distance(q, faces[id].polygon); });
}

bool SuperpowerContour::segment_hits(const Vec3& a, const Vec3& b, double eps) const {
  if (faces.empty()) return false;
  Aabb box;
  box.expand(a);
  box.expand(b);
  return tree.any_overlapping(box.inflated(eps), [&](int id) {
    return segment_intersects_polygon(a, b, faces[id].polygon, eps);
  });
}

TriMesh SuperpowerContour::triangles() const {
  TriMesh m;
  for (const auto& f : faces) {
    const int base = static_cast<int>(m.vertices.size());
    m.vertices.insert(m.vertices.end(), f.polygon.ring.begin(), f.polygon.ring.end());
    for (int k = 1; k + 1 < static_cast<int>(f.polygon.size()); ++k) m.faces.push_back({base, base + k, base + k + 1});
  }
  return m;
}

SuperpowerContour make_superpower_contour(std::vector<PowerFace> faces, std::vector<int> source,
                                          std::size_t seed_count, double eps_ball) {
  SuperpowerContour sp;
  sp.faces = std::move(faces);
  sp.source = std::move(source);
  sp.seed_count = seed_count;
  sp.eps_ball = eps_ball;
  std::vector<Aabb> boxes;
  for (const PowerFace& f : sp.faces) {
    boxes.push_back(f.polygon.bounds());
    SuperpowerContour::Slab slab{kInf, -kInf, 0.0};
    for (const Vec3& v : f.polygon.ring) {
      const double sd = f.polygon.plane.signed_distance(v);
      slab.lo = std::min(slab.lo, sd);
      slab.hi = std::max(slab.hi, sd);
      slab.scale = std::max(slab.scale, v.lpNorm<Eigen::Infinity>());
    }
    sp.slabs.push_back(slab);
  }
  if (!boxes.empty()) sp.tree = AabbTree(std::move(boxes));
  return sp;
}

double ball_tolerance(const PowerDiagram& pd) { return 1e-9 * pd.diagonal(); }

bool face_ball_intersects(const ConvexPolygon& f, const Vec3& center, double radius, double eps) {
  if (radius <= eps) return false;
  return point_polygon_distance(center, f).distance < radius - eps;
}

SuperpowerContour compute_superpower_contour(const PowerDiagram& pd) {
  const double eps = ball_tolerance(pd);
  const SeedTree tree = seed_tree(pd.seeds);
  // Absorbs rounding in the power evaluations and in the polygon's plane fit.
  const double slack = 1e-10 * pd.diagonal() * pd.diagonal();
  std::vector<char> keep(pd.faces.size(), 0);
  parallel_for(0, pd.faces.size(), [&](std::size_t fi) {
    const PowerFace& f = pd.faces[fi];
    // The defining seeds reject almost every face that fails, so test them first.
    if (hits_own_ball(f, pd.seeds, eps)) return;
    // With g = pi_k - pi_i affine and pi_i >= -2 eps max(d_i, eps) on the face
    // (own ball missed), ball k can only reach the face if g dips below that
    // bound at some vertex. This cheap test screens the polygon distance.
    const Seed& si = pd.seeds[f.i];
    const double margin = 2.0 * eps * std::max(si.d, eps) + slack;
    const auto& ring = f.polygon.ring;
    std::vector<double> threshold(ring.size());
    for (std::size_t q = 0; q < ring.size(); ++q)
      threshold[q] = (ring[q] - si.p).squaredNorm() - si.d * si.d + margin;
    const bool hit = tree.any_ball_reaching(f.polygon.bounds(), eps, [&](int k) {
      if (k == f.i || k == f.j) return false;
      const Seed& sk = pd.seeds[k];
      bool below = false;
      for (std::size_t q = 0; q < ring.size() && !below; ++q)
        below = (ring[q] - sk.p).squaredNorm() - sk.d * sk.d < threshold[q];
      return below && face_ball_intersects(f.polygon, sk.p, sk.d, eps);
    });
    keep[fi] = hit ? 0 : 1;
  });

  std::vector<PowerFace> faces;
  std::vector<int> source;
  for (std::size_t fi = 0; fi < pd.faces.size(); ++fi) {
    if (!keep[fi]) continue;
    faces.push_back(pd.faces[fi]);
    source.push_back(static_cast<int>(fi));
  }
  return make_superpower_contour(std::move(faces), std::move(source), pd.seeds.size(), eps);
}

std::vector<int> superpower_faces_all_pairs(const PowerDiagram& pd) {
  const double eps = ball_tolerance(pd);
  std::vector<char> keep(pd.faces.size(), 1);
  parallel_for(0, pd.faces.size(), [&](std::size_t fi) {
    for (const Seed& s : pd.seeds) {
      if (face_ball_intersects(pd.faces[fi].polygon, s.p, s.d, eps)) {
        keep[fi] = 0;
        return;
      }
    }
  });
  std::vector<int> out;
  for (std::size_t fi = 0; fi < keep.size(); ++fi)
    if (keep[fi]) out.push_back(static_cast<int>(fi));
  return out;
}

std::vector<int> power_contour_signed(const PowerDiagram& pd, const std::vector<int>& signs) {
  if (signs.size() != pd.seeds.size()) throw Error("one sign per seed is required");
  std::vector<int> out;
  for (std::size_t fi = 0; fi < pd.faces.size(); ++fi) {
    const PowerFace& f = pd.faces[fi];
    if ((signs[f.i] < 0) != (signs[f.j] < 0)) out.push_back(static_cast<int>(fi));
  }
  return out;
}

std::size_t verify_outside_balls(const std::vector<PowerFace>& faces, const std::vector<Seed>& seeds,
                                 double eps, int samples_per_face, std::uint64_t rng_seed) {
  if (faces.empty() || seeds.empty()) return 0;
  const SeedTree tree = seed_tree(seeds);
  std::vector<std::size_t> bad(faces.size(), 0);
  parallel_for(0, faces.size(), [&](std::size_t fi) {
    const auto& ring = faces[fi].polygon.ring;
    if (ring.empty()) return;
    std::vector<Vec3> pts(ring.begin(), ring.end());
    pts.push_back(faces[fi].polygon.centroid());
    std::mt19937_64 rng(rng_seed ^ (0x9e3779b97f4a7c15ULL * (fi + 1)));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(1, std::max<std::size_t>(1, ring.size() - 2));
    for (int s = 0; s < samples_per_face && ring.size() >= 3; ++s) {
      const std::size_t k = pick(rng);
      double a = u(rng), b = u(rng);
      if (a + b > 1.0) {
        a = 1.0 - a;
        b = 1.0 - b;
      }
      pts.push_back(ring[0] + a * (ring[k] - ring[0]) + b * (ring[k + 1] - ring[0]));
    }
    for (const Vec3& x : pts) {
      if (tree.any_ball_reaching(Aabb(x, x), eps, [](int) { return true; })) ++bad[fi];
    }
  });
  std::size_t total = 0;
  for (std::size_t b : bad) total += b;
  return total;
}

std::size_t verify_outside_balls(const SuperpowerContour& sp, const std::vector<Seed>& seeds) {
  return verify_outside_balls(sp.faces, seeds, sp.eps_ball);
}

std::vector<ConvergenceRow> contour_convergence_study(const TriMesh& mesh,
                                                      const std::vector<int>& resolutions,
                                                      const ConvergenceOptions& options) {
  if (resolutions.empty()) throw Error("at least one resolution is required");
  for (std::size_t k = 0; k < resolutions.size(); ++k) {
    if (resolutions[k] < 2) throw Error("resolutions must be at least 2");
    if (k > 0 && resolutions[k] <= resolutions[k - 1]) throw Error("resolutions must increase");
  }
  const TriangleSoupIndex surface(mesh.triangles());
  const SurfaceSamples on_surface = sample_surface(mesh, options.samples, options.rng_seed);

  std::vector<ConvergenceRow> rows;
  for (int res : resolutions) {
    const GridSpec spec = make_grid_spec(mesh.bounds(), res, options.padding);
    std::vector<Seed> seeds;
    if (options.random_seeds) {
      std::mt19937_64 rng(options.rng_seed + static_cast<std::uint64_t>(res));
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const Aabb box = spec.bounds();
      seeds.resize(spec.node_count());
      for (Seed& s : seeds) {
        const double x = u(rng), y = u(rng), z = u(rng);
        s.p = box.lo + Vec3(x, y, z).cwiseProduct(box.extent());
      }
      parallel_for(0, seeds.size(), [&](std::size_t k) { seeds[k].d = surface.closest(seeds[k].p).distance; });
    } else {
      seeds = grid_seeds(sample_udf(mesh, spec));
    }
    const PowerDiagram pd = compute_power_diagram(std::move(seeds), diagram_bounds(spec));
    const SuperpowerContour sp = compute_superpower_contour(pd);

    ConvergenceRow row;
    row.resolution = res;
    row.seeds = pd.seeds.size();
    row.spacing = spec.spacing;
    row.face_count = sp.faces.size();
    row.total_area = sp.total_area();
    if (sp.empty()) {
      row.hausdorff = row.contour_to_surface = row.surface_to_contour = kInf;
    } else {
      const SurfaceSamples on_contour = sample_surface(sp.triangles(), options.samples, options.rng_seed + 1);
      const std::vector<double> a = distances_to(on_contour.points, surface);
      std::vector<double> b(on_surface.points.size());
      parallel_for(0, b.size(), [&](std::size_t k) { b[k] = sp.closest(on_surface.points[k]).distance; });
      row.contour_to_surface = *std::max_element(a.begin(), a.end());
      row.surface_to_contour = *std::max_element(b.begin(), b.end());
      row.hausdorff = std::max(row.contour_to_surface, row.surface_to_contour);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace spudd
