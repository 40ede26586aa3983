#include "regular_triangulation.hpp"

#include "predicates.hpp"
#include "spudd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace spudd {

namespace {

std::uint64_t spread_bits(std::uint64_t x) {
  x &= 0x1fffff;
  x = (x | x << 32) & 0x1f00000000ffffULL;
  x = (x | x << 16) & 0x1f0000ff0000ffULL;
  x = (x | x << 8) & 0x100f00f00f00f00fULL;
  x = (x | x << 4) & 0x10c30c30c30c30c3ULL;
  x = (x | x << 2) & 0x1249249249249249ULL;
  return x;
}

std::uint64_t morton(const Vec3& p, const Aabb& box) {
  const Vec3 ext = box.extent().cwiseMax(1e-300);
  std::uint64_t key = 0;
  for (int k = 0; k < 3; ++k) {
    const double t = std::clamp((p[k] - box.lo[k]) / ext[k], 0.0, 1.0);
    key |= spread_bits(static_cast<std::uint64_t>(t * 2097151.0)) << k;
  }
  return key;
}

}  // namespace

RegularTriangulation::RegularTriangulation(const std::vector<Vec3>& points,
                                           const std::vector<double>& radii, const Aabb& domain) {
  if (points.size() != radii.size()) throw Error("points and radii differ in length");
  n_ = static_cast<int>(points.size());
  pts_ = points;
  r_ = radii;
  hidden_.assign(points.size(), 0);

  // Auxiliary vertices at alternate corners of a cube much larger than the
  // domain, with zero weight. A power of two keeps their coordinates short.
  const Vec3 c = domain.center();
  const double span = std::max(domain.extent().norm(), 1e-12);
  const double half = std::exp2(std::ceil(std::log2(10.0 * span)));
  const Vec3 corners[4] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  for (const Vec3& k : corners) {
    pts_.push_back(c + half * k);
    r_.push_back(0.0);
  }
  std::array<int, 4> first = {n_, n_ + 1, n_ + 2, n_ + 3};
  if (predicates::orient3d(pts_[first[0]], pts_[first[1]], pts_[first[2]], pts_[first[3]]) < 0)
    std::swap(first[2], first[3]);
  const int t0 = new_tet(first);
  tets_[t0].nb = {-1, -1, -1, -1};
  hint_ = t0;

  // Biased randomised insertion order: random rounds of doubling size, each
  // sorted along a space-filling curve.
  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(0x5eedULL);
  std::shuffle(order.begin(), order.end(), rng);
  Aabb box;
  for (const Vec3& p : points) box.expand(p);
  std::vector<std::uint64_t> keys(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) keys[i] = morton(points[i], box);
  std::size_t end = order.size();
  while (end > 0) {
    const std::size_t begin = end <= 64 ? 0 : end / 2;
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(end),
              [&](int a, int b) { return keys[a] < keys[b] || (keys[a] == keys[b] && a < b); });
    end = begin;
  }
  for (int q : order) insert(q);
}

int RegularTriangulation::new_tet(const std::array<int, 4>& v) {
  int t;
  if (!free_.empty()) {
    t = free_.back();
    free_.pop_back();
  } else {
    t = static_cast<int>(tets_.size());
    tets_.emplace_back();
    stamp_.push_back(0);
  }
  tets_[t].v = v;
  tets_[t].nb = {-1, -1, -1, -1};
  return t;
}

bool RegularTriangulation::conflicts(int t, int q) const {
  const Tet& tet = tets_[t];
  predicates::WPoint w[4];
  for (int k = 0; k < 4; ++k) w[k] = {&pts_[tet.v[k]], r_[tet.v[k]], tet.v[k]};
  return predicates::power_side(w, {&pts_[q], r_[q], q}) < 0;
}

int RegularTriangulation::locate(int q, int start) {
  int t = start;
  const Vec3& p = pts_[q];
  const std::size_t cap = 64 + 8 * tets_.size();
  for (std::size_t step = 0; step < cap; ++step) {
    const Tet& tet = tets_[t];
    walk_seed_ = walk_seed_ * 1664525u + 1013904223u;
    const int r = static_cast<int>(walk_seed_ >> 30);
    int next = -1;
    for (int i = 0; i < 4 && next < 0; ++i) {
      const int k = (r + i) & 3;
      if (tet.nb[k] < 0) continue;
      const Vec3* v[4] = {&pts_[tet.v[0]], &pts_[tet.v[1]], &pts_[tet.v[2]], &pts_[tet.v[3]]};
      v[k] = &p;
      if (predicates::orient3d(*v[0], *v[1], *v[2], *v[3]) < 0) next = tet.nb[k];
    }
    if (next < 0) return t;
    t = next;
  }
  // The walk should always terminate; scan as a last resort.
  for (int s = 0; s < static_cast<int>(tets_.size()); ++s) {
    if (!alive(s)) continue;
    const Tet& tet = tets_[s];
    bool inside = true;
    for (int k = 0; k < 4 && inside; ++k) {
      const Vec3* v[4] = {&pts_[tet.v[0]], &pts_[tet.v[1]], &pts_[tet.v[2]], &pts_[tet.v[3]]};
      v[k] = &p;
      inside = predicates::orient3d(*v[0], *v[1], *v[2], *v[3]) >= 0;
    }
    if (inside) return s;
  }
  throw Error("point location failed");
}

void RegularTriangulation::insert(int q) {
  const int t = locate(q, hint_);
  if (!conflicts(t, q)) {
    hidden_[q] = 1;
    return;
  }
  epoch_ += 2;
  const std::uint32_t in_cavity = epoch_, outside = epoch_ + 1;
  cavity_.assign(1, t);
  boundary_.clear();
  stamp_[t] = in_cavity;
  for (std::size_t i = 0; i < cavity_.size(); ++i) {
    const int c = cavity_[i];
    for (int k = 0; k < 4; ++k) {
      const int u = tets_[c].nb[k];
      if (u >= 0 && stamp_[u] == in_cavity) continue;
      if (u >= 0 && stamp_[u] != outside) {
        if (conflicts(u, q)) {
          stamp_[u] = in_cavity;
          cavity_.push_back(u);
          continue;
        }
        stamp_[u] = outside;
      }
      boundary_.emplace_back(c, k);
    }
  }

  // Star the cavity boundary from q.
  struct Side {
    int a, b, tet, face;
  };
  std::vector<Side> sides;
  sides.reserve(3 * boundary_.size());
  created_.clear();
  std::vector<int> kept;
  kept.reserve(3 * boundary_.size());
  for (const auto& [c, k] : boundary_) {
    const Tet old = tets_[c];
    std::array<int, 4> v = old.v;
    v[k] = q;
    const int nt = new_tet(v);
    created_.push_back(nt);
    const int out = old.nb[k];
    tets_[nt].nb[k] = out;
    if (out >= 0) {
      for (int j = 0; j < 4; ++j)
        if (tets_[out].nb[j] == c) tets_[out].nb[j] = nt;
    }
    for (int j = 0; j < 4; ++j) {
      if (j == k) continue;
      kept.push_back(old.v[j]);
      int e[2], m = 0;
      for (int i = 0; i < 4; ++i)
        if (i != j && i != k) e[m++] = v[i];
      sides.push_back({std::min(e[0], e[1]), std::max(e[0], e[1]), nt, j});
    }
  }
  std::sort(sides.begin(), sides.end(),
            [](const Side& x, const Side& y) { return x.a < y.a || (x.a == y.a && x.b < y.b); });
  for (std::size_t i = 0; i + 1 < sides.size(); i += 2) {
    if (sides[i].a != sides[i + 1].a || sides[i].b != sides[i + 1].b) throw Error("cavity is not a ball");
    tets_[sides[i].tet].nb[sides[i].face] = sides[i + 1].tet;
    tets_[sides[i + 1].tet].nb[sides[i + 1].face] = sides[i].tet;
  }

  // Vertices inside the cavity but not on its boundary lose their cells.
  std::sort(kept.begin(), kept.end());
  for (int c : cavity_) {
    for (int v : tets_[c].v) {
      if (v < n_ && v != q && !std::binary_search(kept.begin(), kept.end(), v)) hidden_[v] = 1;
    }
    tets_[c].v[0] = -1;
    free_.push_back(c);
  }
  hint_ = created_.back();
}

Vec3 RegularTriangulation::power_center(int t) const {
  const Tet& tet = tets_[t];
  const Vec3& o = pts_[tet.v[0]];
  const double r0 = r_[tet.v[0]];
  Eigen::Matrix3d a;
  Vec3 rhs;
  for (int i = 0; i < 3; ++i) {
    const Vec3 d = pts_[tet.v[i + 1]] - o;
    const double ri = r_[tet.v[i + 1]];
    a.row(i) = 2.0 * d.transpose();
    rhs[i] = d.squaredNorm() - (ri - r0) * (ri + r0);
  }
  // Slivers (common among grid points) make the system nearly singular, and
  // the rounded solve can land far from the true centre.
  const double scale = 8.0 * a.row(0).norm() * a.row(1).norm() * a.row(2).norm();
  if (std::abs(a.determinant()) > 1e-6 * scale) return o + a.fullPivLu().solve(rhs);
  const Vec3 p[4] = {pts_[tet.v[0]], pts_[tet.v[1]], pts_[tet.v[2]], pts_[tet.v[3]]};
  const double r[4] = {r_[tet.v[0]], r_[tet.v[1]], r_[tet.v[2]], r_[tet.v[3]]};
  return predicates::power_center_exact(p, r);
}

bool RegularTriangulation::edge_ring(int t, int a, int b, std::vector<int>& ring) const {
  ring.clear();
  int x = -1;
  for (int v : tets_[t].v) {
    if (v != a && v != b) {
      x = v;
      break;
    }
  }
  int cur = t;
  for (;;) {
    ring.push_back(cur);
    const Tet& c = tets_[cur];
    int kx = 0, y = -1;
    for (int k = 0; k < 4; ++k) {
      if (c.v[k] == x) kx = k;
      else if (c.v[k] != a && c.v[k] != b) y = c.v[k];
    }
    const int next = c.nb[kx];
    if (next == t) return true;
    if (next < t) return false;
    cur = next;
    x = y;
  }
}

}  // namespace spudd
