#pragma once

#include "spudd/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace spudd {

struct SoupHit {
  Vec3 point = Vec3::Zero();
  double distance = kInf;
  int primitive = -1;
};

// Bounding-volume hierarchy over primitive boxes. The tree only knows boxes;
// primitive-specific work is passed to the queries as callables, which keeps
// one implementation for triangle soups, polygon soups and point sets.
// Immutable after construction, so concurrent queries are safe.
class AabbTree {
 public:
  AabbTree() = default;
  // Throws EmptyInput when `boxes` is empty.
  explicit AabbTree(std::vector<Aabb> boxes, int leaf_size = 4);

  std::size_t size() const { return boxes_.size(); }
  bool empty() const { return boxes_.empty(); }
  const Aabb& bounds() const { return nodes_.front().box; }
  const Aabb& primitive_box(int id) const { return boxes_[id]; }

  // Global minimum of `closest(id, p) -> ClosestPoint` over all primitives.
  // Ties go to the lowest primitive id.
  template <class ClosestFn>
  SoupHit closest(const Vec3& p, ClosestFn&& closest_fn) const {
    return closest(p, [](int, const Vec3&) { return 0.0; }, closest_fn);
  }

  // Same, skipping primitives whose `lower(id, p)` distance bound already
  // exceeds the best distance found.
  template <class LowerFn, class ClosestFn>
  SoupHit closest(const Vec3& p, LowerFn&& lower, ClosestFn&& closest_fn) const;

  // Calls `fn(id)` for each primitive whose box overlaps `box`; stops early
  // when `fn` returns true and reports whether it did.
  template <class Fn>
  bool any_overlapping(const Aabb& box, Fn&& fn) const;

  // Structural checks used by tests: boxes nest, every primitive is stored once.
  bool check_invariants() const;
  std::size_t leaf_count() const;

 private:
  struct Node {
    Aabb box;
    std::int32_t left = -1, right = -1;
    std::int32_t begin = 0, count = 0;
    bool leaf() const { return left < 0; }
  };

  std::int32_t build(std::int32_t begin, std::int32_t end, int leaf_size);

  std::vector<Aabb> boxes_;
  std::vector<std::int32_t> order_;
  std::vector<Node> nodes_;
};

template <class LowerFn, class ClosestFn>
SoupHit AabbTree::closest(const Vec3& p, LowerFn&& lower, ClosestFn&& closest_fn) const {
  SoupHit best;
  if (nodes_.empty()) return best;
  double best2 = kInf;
  struct Entry {
    std::int32_t node;
    double d2;
  };
  Entry stack[128];
  int top = 0;
  stack[top++] = {0, nodes_[0].box.squared_distance(p)};
  while (top > 0) {
    Entry e = stack[--top];
    if (e.d2 > best2) continue;
    const Node& n = nodes_[e.node];
    if (n.leaf()) {
      for (std::int32_t k = n.begin; k < n.begin + n.count; ++k) {
        const int id = order_[k];
        if (boxes_[id].squared_distance(p) > best2) continue;
        if (best2 < kInf) {
          const double lb = lower(id, p);
          if (lb * lb > best2) continue;
        }
        ClosestPoint c = closest_fn(id, p);
        const double d2 = c.distance * c.distance;
        if (d2 < best2 || (d2 == best2 && id < best.primitive)) {
          best2 = d2;
          best.point = c.point;
          best.distance = c.distance;
          best.primitive = id;
        }
      }
      continue;
    }
    const double dl = nodes_[n.left].box.squared_distance(p);
    const double dr = nodes_[n.right].box.squared_distance(p);
    // Push the farther child first so the nearer one is expanded next.
    if (dl <= dr) {
      if (dr <= best2) stack[top++] = {n.right, dr};
      if (dl <= best2) stack[top++] = {n.left, dl};
    } else {
      if (dl <= best2) stack[top++] = {n.left, dl};
      if (dr <= best2) stack[top++] = {n.right, dr};
    }
  }
  return best;
}

template <class Fn>
bool AabbTree::any_overlapping(const Aabb& box, Fn&& fn) const {
  if (nodes_.empty()) return false;
  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (!n.box.overlaps(box)) continue;
    if (n.leaf()) {
      for (std::int32_t k = n.begin; k < n.begin + n.count; ++k) {
        const int id = order_[k];
        if (boxes_[id].overlaps(box) && fn(id)) return true;
      }
      continue;
    }
    stack[top++] = n.right;
    stack[top++] = n.left;
  }
  return false;
}

// Triangle soup plus its tree; the common case for distance queries against
// ground-truth and reconstructed meshes.
class TriangleSoupIndex {
 public:
  explicit TriangleSoupIndex(std::vector<Triangle> triangles);
  SoupHit closest(const Vec3& p) const;
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const AabbTree& tree() const { return tree_; }

 private:
  std::vector<Triangle> triangles_;
  AabbTree tree_;
};

}  // namespace spudd
