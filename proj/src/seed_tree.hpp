#pragma once

#include "spudd/geometry.hpp"

#include <cstdint>
#include <vector>

namespace spudd {

// kd-tree over weighted points (p, d). Nodes carry the largest radius below
// them, which gives lower bounds for power distances and ball reach.
class SeedTree {
 public:
  SeedTree(const std::vector<Vec3>& points, const std::vector<double>& radii, int leaf_size = 8);

  std::size_t size() const { return ids_.size(); }

  // The k nearest seeds to x in Euclidean distance, sorted by (distance, id),
  // skipping `exclude`.
  std::vector<int> k_nearest(const Vec3& x, int k, int exclude = -1) const;

  // Seed with the smallest power distance at x among those strictly below
  // `threshold`; ties go to the lowest id. Returns -1 when none qualifies.
  int min_power_below(const Vec3& x, double threshold) const;

  // Calls fn(id) for seeds whose ball, shrunk by `eps`, may reach `box`:
  // d > eps and dist(p, box) < d - eps. Stops early when fn returns true.
  template <class Fn>
  bool any_ball_reaching(const Aabb& box, double eps, Fn&& fn) const;

 private:
  struct Node {
    Aabb box;
    double max_r = 0.0;
    double max_r2 = 0.0;
    // Affine lower bound of |p - c|^2 - d^2 over the node's seeds:
    // it is >= a + g.(p - c), with c the box centre.
    Vec3 g = Vec3::Zero();
    double a = 0.0;
    std::int32_t left = -1, right = -1;
    std::int32_t begin = 0, end = 0;
    bool leaf() const { return left < 0; }
  };

  std::int32_t build(std::int32_t begin, std::int32_t end, int leaf_size);
  void fit_power_bound(Node& node, std::int32_t begin, std::int32_t end) const;
  double power_lower_bound(const Node& n, const Vec3& x) const;

  std::vector<Vec3> pts_;    // permuted into tree order
  std::vector<double> r_;    // permuted into tree order
  std::vector<int> ids_;     // tree slot -> seed id
  std::vector<Node> nodes_;
};

template <class Fn>
bool SeedTree::any_ball_reaching(const Aabb& box, double eps, Fn&& fn) const {
  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    const double reach = n.max_r - eps;
    if (reach <= 0.0 || squared_distance(n.box, box) >= reach * reach) continue;
    if (n.leaf()) {
      for (std::int32_t k = n.begin; k < n.end; ++k) {
        const double rk = r_[k] - eps;
        if (rk <= 0.0 || box.squared_distance(pts_[k]) >= rk * rk) continue;
        if (fn(ids_[k])) return true;
      }
      continue;
    }
    stack[top++] = n.right;
    stack[top++] = n.left;
  }
  return false;
}

}  // namespace spudd
