#include "spudd/metrics.hpp"

#include "spudd/errors.hpp"
#include "spudd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <unordered_map>

namespace spudd {

SurfaceSamples sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t rng_seed) {
  if (mesh.empty()) throw EmptyInput("cannot sample a mesh without faces");
  if (n == 0) throw Error("sample count must be at least 1");
  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Triangle t = mesh.triangle(f);
    total += triangle_area(t.a, t.b, t.c);
    cumulative[f] = total;
  }
  if (!(total > 0.0)) throw ZeroArea("cannot sample a mesh with zero area");

  SurfaceSamples out;
  out.points.resize(n);
  out.normals.resize(n);
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t s = 0; s < n; ++s) {
    const double pick = u(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    const std::size_t f = std::min<std::size_t>(it - cumulative.begin(), mesh.faces.size() - 1);
    const Triangle t = mesh.triangle(f);
    const double r1 = std::sqrt(u(rng));
    const double r2 = u(rng);
    out.points[s] = (1.0 - r1) * t.a + r1 * (1.0 - r2) * t.b + r1 * r2 * t.c;
    const Vec3 nrm = (t.b - t.a).cross(t.c - t.a);
    const double len = nrm.norm();
    out.normals[s] = len > 0.0 ? Vec3(nrm / len) : Vec3(Vec3::Zero());
  }
  return out;
}

std::vector<double> distances_to(const std::vector<Vec3>& points, const TriangleSoupIndex& mesh) {
  std::vector<double> d(points.size());
  parallel_for(0, points.size(), [&](std::size_t k) { d[k] = mesh.closest(points[k]).distance; });
  return d;
}

namespace {

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

struct TwoSided {
  std::vector<double> ab, ba;
};

TwoSided two_sided(const TriMesh& a, const TriMesh& b, std::size_t n, std::uint64_t rng_seed) {
  const TriangleSoupIndex ia(a.triangles());
  const TriangleSoupIndex ib(b.triangles());
  return {distances_to(sample_surface(a, n, rng_seed).points, ib),
          distances_to(sample_surface(b, n, rng_seed).points, ia)};
}

// Samples with a neighbour within `radius` whose normal line differs by more
// than the angle. Normals are compared up to sign, since reconstructions need
// not be consistently oriented.
std::vector<Vec3> edge_samples(const SurfaceSamples& s, double cos_thresh, double radius) {
  const double cell = std::max(radius, 1e-300);
  auto key = [&](const Vec3& p) {
    const auto c = (p / cell).array().floor().cast<std::int64_t>();
    return (c[0] * 73856093) ^ (c[1] * 19349663) ^ (c[2] * 83492791);
  };
  std::unordered_multimap<std::int64_t, int> buckets;
  buckets.reserve(s.points.size());
  for (std::size_t k = 0; k < s.points.size(); ++k) buckets.emplace(key(s.points[k]), static_cast<int>(k));

  std::vector<char> flag(s.points.size(), 0);
  const double r2 = radius * radius;
  parallel_for(0, s.points.size(), [&](std::size_t k) {
    const Vec3& p = s.points[k];
    for (int dx = -1; dx <= 1 && !flag[k]; ++dx)
      for (int dy = -1; dy <= 1 && !flag[k]; ++dy)
        for (int dz = -1; dz <= 1 && !flag[k]; ++dz) {
          const Vec3 q = p + cell * Vec3(dx, dy, dz);
          auto [lo, hi] = buckets.equal_range(key(q));
          for (auto it = lo; it != hi; ++it) {
            const int m = it->second;
            if ((s.points[m] - p).squaredNorm() > r2) continue;
            if (std::abs(s.normals[m].dot(s.normals[k])) < cos_thresh) {
              flag[k] = 1;
              break;
            }
          }
        }
  });
  std::vector<Vec3> out;
  for (std::size_t k = 0; k < flag.size(); ++k)
    if (flag[k]) out.push_back(s.points[k]);
  return out;
}

std::vector<double> nearest_point_distances(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
  std::vector<Aabb> boxes;
  boxes.reserve(to.size());
  for (const Vec3& p : to) boxes.emplace_back(p, p);
  const AabbTree tree(std::move(boxes));
  std::vector<double> d(from.size());
  parallel_for(0, from.size(), [&](std::size_t k) {
    d[k] = tree.closest(from[k], [&](int id, const Vec3& q) { return ClosestPoint{to[id], (q - to[id]).norm()}; })
               .distance;
  });
  return d;
}

}  // namespace

double chamfer_l2(const TriMesh& a, const TriMesh& b, std::size_t n, std::uint64_t rng_seed) {
  const TwoSided d = two_sided(a, b, n, rng_seed);
  return 0.5 * (mean(d.ab) + mean(d.ba));
}

double hausdorff(const TriMesh& a, const TriMesh& b, std::size_t n, std::uint64_t rng_seed) {
  const TwoSided d = two_sided(a, b, n, rng_seed);
  return std::max(max_of(d.ab), max_of(d.ba));
}

EdgeChamfer edge_chamfer(const TriMesh& a, const TriMesh& b, std::size_t n, double angle_deg, double radius,
                         std::uint64_t rng_seed) {
  const double c = std::cos(angle_deg * std::numbers::pi / 180.0);
  const std::vector<Vec3> ea = edge_samples(sample_surface(a, n, rng_seed), c, radius);
  const std::vector<Vec3> eb = edge_samples(sample_surface(b, n, rng_seed), c, radius);
  if (ea.empty() || eb.empty()) return {0.0, true};
  return {0.5 * (mean(nearest_point_distances(ea, eb)) + mean(nearest_point_distances(eb, ea))), false};
}

MetricReport compute_metrics(const TriMesh& a, const TriMesh& b, const MetricOptions& options) {
  MetricReport r;
  const TwoSided d = two_sided(a, b, options.samples, options.rng_seed);
  r.ce = 0.5 * (mean(d.ab) + mean(d.ba));
  r.he = std::max(max_of(d.ab), max_of(d.ba));
  Aabb box = a.bounds();
  box.expand(b.bounds());
  const EdgeChamfer e = edge_chamfer(a, b, options.samples, options.edge_angle_deg,
                                     options.edge_radius_fraction * box.diagonal(), options.rng_seed);
  r.ece = e.value;
  r.ece_no_edges = e.no_edges;
  r.vertex_count = a.vertices.size();
  r.sample_count = options.samples;
  return r;
}

}  // namespace spudd
