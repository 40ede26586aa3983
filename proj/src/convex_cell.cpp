#include "convex_cell.hpp"

#include <algorithm>
#include <cmath>

namespace spudd {

ConvexCell::ConvexCell(const Aabb& box) {
  for (int c = 0; c < 8; ++c) {
    verts_.emplace_back(c & 1 ? box.hi.x() : box.lo.x(), c & 2 ? box.hi.y() : box.lo.y(),
                        c & 4 ? box.hi.z() : box.lo.z());
  }
  // Rings are counterclockwise seen from outside.
  faces_ = {{-1, {0, 4, 6, 2}}, {-2, {1, 3, 7, 5}}, {-3, {0, 1, 5, 4}},
            {-4, {2, 6, 7, 3}}, {-5, {0, 2, 3, 1}}, {-6, {4, 5, 7, 6}}};
}

double ConvexCell::eval(int v, const Vec3& n, double b) {
  if (stamp_[v] != epoch_) {
    stamp_[v] = epoch_;
    s_[v] = n.dot(verts_[v]) - b;
  }
  return s_[v];
}

int ConvexCell::cut_point(int a, int c, double sa, double sc) {
  const int lo = std::min(a, c), hi = std::max(a, c);
  const std::uint64_t key = (static_cast<std::uint64_t>(lo) << 32) | static_cast<std::uint32_t>(hi);
  for (const auto& [k, id] : cuts_) {
    if (k == key) return id;
  }
  const double slo = lo == a ? sa : sc;
  const double shi = lo == a ? sc : sa;
  const double t = slo / (slo - shi);
  const int id = static_cast<int>(verts_.size());
  verts_.push_back(verts_[lo] + t * (verts_[hi] - verts_[lo]));
  s_.push_back(0.0);
  stamp_.push_back(epoch_);
  on_stamp_.push_back(0);
  cuts_.emplace_back(key, id);
  return id;
}

ConvexCell::Clip ConvexCell::clip(const Vec3& n, double b, int tag, double tol) {
  if (faces_.empty()) return Clip::Empty;
  ++epoch_;
  if (stamp_.size() < verts_.size()) {
    stamp_.resize(verts_.size(), 0);
    on_stamp_.resize(verts_.size(), 0);
    s_.resize(verts_.size(), 0.0);
  }

  bool any_in = false, any_out = false;
  for (const Face& f : faces_) {
    for (int v : f.ring) {
      const double s = eval(v, n, b);
      any_out |= s > tol;
      any_in |= s < -tol;
    }
  }
  if (!any_out) return Clip::Unchanged;
  if (!any_in) {
    faces_.clear();
    return Clip::Empty;
  }

  cuts_.clear();
  cap_.clear();
  auto add_cap = [&](int v) {
    if (on_stamp_[v] != epoch_) {
      on_stamp_[v] = epoch_;
      cap_.push_back(v);
    }
  };

  std::size_t kept = 0;
  std::vector<int> ring;
  for (std::size_t fi = 0; fi < faces_.size(); ++fi) {
    Face& f = faces_[fi];
    bool touched = false;
    for (int v : f.ring) {
      const double s = s_[v];
      if (s > tol) touched = true;
      if (std::abs(s) <= tol) add_cap(v);
    }
    if (touched) {
      if (dead_.size() < verts_.size()) dead_.resize(verts_.size(), 0);
      for (int v : f.ring) {
        if (s_[v] > tol) dead_[v] = 1;
      }
      ring.clear();
      const std::size_t m = f.ring.size();
      for (std::size_t k = 0; k < m; ++k) {
        const int a = f.ring[k];
        const int c = f.ring[(k + 1) % m];
        const double sa = s_[a], sc = s_[c];
        if (sa <= tol) ring.push_back(a);
        if ((sa < -tol && sc > tol) || (sa > tol && sc < -tol)) {
          const int x = cut_point(a, c, sa, sc);
          add_cap(x);
          ring.push_back(x);
        }
      }
      if (ring.size() < 3) continue;
      f.ring.assign(ring.begin(), ring.end());
    }
    if (kept != fi) faces_[kept] = std::move(f);
    ++kept;
  }
  faces_.resize(kept);

  // Cap polygon: convex hull of the on-plane points in a basis of the plane.
  const Vec3 nn = n.normalized();
  const Vec3 helper = std::abs(nn.x()) < 0.6 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = nn.cross(helper).normalized();
  const Vec3 w = nn.cross(u);
  struct P {
    double x, y;
    int id;
  };
  std::vector<P> pts;
  pts.reserve(cap_.size());
  for (int v : cap_) pts.push_back({u.dot(verts_[v]), w.dot(verts_[v]), v});
  std::sort(pts.begin(), pts.end(), [](const P& a, const P& c) {
    if (a.x != c.x) return a.x < c.x;
    if (a.y != c.y) return a.y < c.y;
    return a.id < c.id;
  });
  auto cross = [](const P& o, const P& a, const P& c) {
    return (a.x - o.x) * (c.y - o.y) - (a.y - o.y) * (c.x - o.x);
  };
  if (pts.size() < 3) return Clip::Clipped;
  std::vector<P> hull(2 * pts.size() + 1);
  std::size_t h = 0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], pts[k]) <= 0.0) --h;
    hull[h++] = pts[k];
  }
  for (std::size_t k = pts.size() - 1, lower = h + 1; k-- > 0;) {
    while (h >= lower && cross(hull[h - 2], hull[h - 1], pts[k]) <= 0.0) --h;
    hull[h++] = pts[k];
  }
  if (h > 0) --h;
  if (h >= 3) {
    Face cap{tag, {}};
    cap.ring.reserve(h);
    // u x w = n, so counterclockwise in (u, w) faces outward.
    for (std::size_t k = 0; k < h; ++k) cap.ring.push_back(hull[k].id);
    faces_.push_back(std::move(cap));
  }
  return Clip::Clipped;
}

std::vector<int> ConvexCell::live_vertices() const {
  std::vector<char> seen(verts_.size(), 0);
  for (const Face& f : faces_) {
    for (int v : f.ring) seen[v] = 1;
  }
  std::vector<int> out;
  for (std::size_t v = 0; v < seen.size(); ++v) {
    if (seen[v]) out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace spudd
