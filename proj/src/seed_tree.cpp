#include "seed_tree.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace spudd {

SeedTree::SeedTree(const std::vector<Vec3>& points, const std::vector<double>& radii,
                   int leaf_size) {
  ids_.resize(points.size());
  std::iota(ids_.begin(), ids_.end(), 0);
  if (points.empty()) return;
  pts_ = points;
  r_ = radii;
  nodes_.reserve(2 * points.size() / std::max(1, leaf_size) + 2);
  build(0, static_cast<std::int32_t>(points.size()), std::max(1, leaf_size));
  std::vector<Vec3> p(points.size());
  std::vector<double> r(points.size());
  for (std::size_t k = 0; k < ids_.size(); ++k) {
    p[k] = points[ids_[k]];
    r[k] = radii[ids_[k]];
  }
  pts_ = std::move(p);
  r_ = std::move(r);
}

// Writing pi_j(x) = |u|^2 - 2 u.delta_j + w_j with u = x - c, delta_j = p_j - c
// and w_j = |delta_j|^2 - d_j^2, an affine minorant of w_j bounds pi_j from
// below. For distance samples the slope of w is twice the foot point, so the
// bound is tight for x near the surface, where plain box bounds are not.
void SeedTree::fit_power_bound(Node& node, std::int32_t begin, std::int32_t end) const {
  const Vec3 c = node.box.center();
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity() * 1e-12 * (1.0 + node.box.extent().squaredNorm());
  Vec3 rhs = Vec3::Zero();
  Vec3 mean_delta = Vec3::Zero();
  double mean_w = 0.0;
  const double count = static_cast<double>(end - begin);
  for (std::int32_t k = begin; k < end; ++k) {
    const Vec3 delta = pts_[ids_[k]] - c;
    mean_delta += delta;
    mean_w += delta.squaredNorm() - r_[ids_[k]] * r_[ids_[k]];
  }
  mean_delta /= count;
  mean_w /= count;
  for (std::int32_t k = begin; k < end; ++k) {
    const Vec3 delta = pts_[ids_[k]] - c;
    const Vec3 e = delta - mean_delta;
    const double w = delta.squaredNorm() - r_[ids_[k]] * r_[ids_[k]];
    m += e * e.transpose();
    rhs += e * (w - mean_w);
  }
  const Vec3 g = m.ldlt().solve(rhs);
  double a = kInf;
  for (std::int32_t k = begin; k < end; ++k) {
    const Vec3 delta = pts_[ids_[k]] - c;
    a = std::min(a, delta.squaredNorm() - r_[ids_[k]] * r_[ids_[k]] - g.dot(delta));
  }
  node.g = g.allFinite() ? g : Vec3::Zero();
  if (!g.allFinite()) {
    a = kInf;
    for (std::int32_t k = begin; k < end; ++k) {
      const Vec3 delta = pts_[ids_[k]] - c;
      a = std::min(a, delta.squaredNorm() - r_[ids_[k]] * r_[ids_[k]]);
    }
  }
  node.a = a;
}

double SeedTree::power_lower_bound(const Node& n, const Vec3& x) const {
  const double box_bound = n.box.squared_distance(x) - n.max_r2;
  const Vec3 c = n.box.center();
  const Vec3 u = x - c;
  double lin = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double coef = n.g[k] - 2.0 * u[k];
    lin += std::min(coef * (n.box.lo[k] - c[k]), coef * (n.box.hi[k] - c[k]));
  }
  const double affine = u.squaredNorm() + n.a + lin;
  // Slack for rounding in the affine form.
  const double slack = 1e-14 * (u.squaredNorm() + n.box.extent().squaredNorm() + n.max_r2);
  return std::max(box_bound, affine - slack);
}

std::int32_t SeedTree::build(std::int32_t begin, std::int32_t end, int leaf_size) {
  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  double max_r = 0.0;
  for (std::int32_t k = begin; k < end; ++k) {
    box.expand(pts_[ids_[k]]);
    max_r = std::max(max_r, r_[ids_[k]]);
  }
  nodes_[index].box = box;
  nodes_[index].max_r = max_r;
  nodes_[index].max_r2 = max_r * max_r;
  nodes_[index].begin = begin;
  nodes_[index].end = end;
  fit_power_bound(nodes_[index], begin, end);
  if (end - begin <= leaf_size) return index;

  // Radius counts as a fourth coordinate so that nodes stay narrow in d,
  // which keeps the power lower bound tight near the surface.
  double min_r = kInf;
  for (std::int32_t k = begin; k < end; ++k) min_r = std::min(min_r, r_[ids_[k]]);
  int axis = 0;
  Vec3 ext = box.extent();
  if (ext.y() > ext[axis]) axis = 1;
  if (ext.z() > ext[axis]) axis = 2;
  if (max_r - min_r > ext[axis]) axis = 3;
  auto key = [&](int id) { return axis == 3 ? r_[id] : pts_[id][axis]; };
  const std::int32_t mid = begin + (end - begin) / 2;
  std::nth_element(ids_.begin() + begin, ids_.begin() + mid, ids_.begin() + end,
                   [&](int a, int b) {
                     double ca = key(a), cb = key(b);
                     return ca < cb || (ca == cb && a < b);
                   });
  const std::int32_t left = build(begin, mid, leaf_size);
  const std::int32_t right = build(mid, end, leaf_size);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

std::vector<int> SeedTree::k_nearest(const Vec3& x, int k, int exclude) const {
  std::vector<int> out;
  if (nodes_.empty() || k <= 0) return out;
  // Max-heap of the current k best, ordered by (distance, id).
  using Item = std::pair<double, int>;
  std::priority_queue<Item> heap;
  std::int32_t stack[128];
  double dstack[128];
  int top = 0;
  stack[top] = 0;
  dstack[top++] = nodes_[0].box.squared_distance(x);
  auto bound = [&]() { return static_cast<int>(heap.size()) < k ? kInf : heap.top().first; };
  while (top > 0) {
    --top;
    const Node& n = nodes_[stack[top]];
    if (dstack[top] > bound()) continue;
    if (n.leaf()) {
      for (std::int32_t s = n.begin; s < n.end; ++s) {
        const int id = ids_[s];
        if (id == exclude) continue;
        const Item item{(pts_[s] - x).squaredNorm(), id};
        if (static_cast<int>(heap.size()) < k) {
          heap.push(item);
        } else if (item < heap.top()) {
          heap.pop();
          heap.push(item);
        }
      }
      continue;
    }
    const double dl = nodes_[n.left].box.squared_distance(x);
    const double dr = nodes_[n.right].box.squared_distance(x);
    if (dl <= dr) {
      stack[top] = n.right, dstack[top++] = dr;
      stack[top] = n.left, dstack[top++] = dl;
    } else {
      stack[top] = n.left, dstack[top++] = dl;
      stack[top] = n.right, dstack[top++] = dr;
    }
  }
  out.resize(heap.size());
  for (std::size_t i = heap.size(); i-- > 0;) {
    out[i] = heap.top().second;
    heap.pop();
  }
  return out;
}

int SeedTree::min_power_below(const Vec3& x, double threshold) const {
  if (nodes_.empty()) return -1;
  double best = threshold;
  int best_id = -1;
  std::int32_t stack[128];
  double lstack[128];
  int top = 0;
  stack[top] = 0;
  lstack[top++] = power_lower_bound(nodes_[0], x);
  while (top > 0) {
    --top;
    if (lstack[top] > best || (best_id < 0 && lstack[top] >= best)) continue;
    const Node& n = nodes_[stack[top]];
    if (n.leaf()) {
      for (std::int32_t s = n.begin; s < n.end; ++s) {
        const double pw = (pts_[s] - x).squaredNorm() - r_[s] * r_[s];
        const int id = ids_[s];
        if (best_id < 0 ? pw < best : (pw < best || (pw == best && id < best_id))) {
          best = pw;
          best_id = id;
        }
      }
      continue;
    }
    const Node& l = nodes_[n.left];
    const Node& r = nodes_[n.right];
    const double bl = power_lower_bound(l, x);
    const double br = power_lower_bound(r, x);
    if (bl <= br) {
      stack[top] = n.right, lstack[top++] = br;
      stack[top] = n.left, lstack[top++] = bl;
    } else {
      stack[top] = n.left, lstack[top++] = bl;
      stack[top] = n.right, lstack[top++] = br;
    }
  }
  return best_id;
}

}  // namespace spudd
