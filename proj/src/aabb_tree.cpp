#include "spudd/aabb_tree.hpp"

#include "spudd/errors.hpp"

#include <algorithm>
#include <numeric>

namespace spudd {

AabbTree::AabbTree(std::vector<Aabb> boxes, int leaf_size) : boxes_(std::move(boxes)) {
  if (boxes_.empty()) throw EmptyInput("cannot build an AABB tree over zero primitives");
  order_.resize(boxes_.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * boxes_.size() / std::max(1, leaf_size) + 2);
  build(0, static_cast<std::int32_t>(boxes_.size()), std::max(1, leaf_size));
}

std::int32_t AabbTree::build(std::int32_t begin, std::int32_t end, int leaf_size) {
  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  Aabb centers;
  for (std::int32_t k = begin; k < end; ++k) {
    box.expand(boxes_[order_[k]]);
    centers.expand(boxes_[order_[k]].center());
  }
  nodes_[index].box = box;
  nodes_[index].begin = begin;
  nodes_[index].count = end - begin;
  if (end - begin <= leaf_size) return index;
  int axis = 0;
  Vec3 ext = centers.extent();
  if (ext.y() > ext[axis]) axis = 1;
  if (ext.z() > ext[axis]) axis = 2;
  const std::int32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::int32_t a, std::int32_t b) {
                     double ca = boxes_[a].lo[axis] + boxes_[a].hi[axis];
                     double cb = boxes_[b].lo[axis] + boxes_[b].hi[axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const std::int32_t left = build(begin, mid, leaf_size);
  const std::int32_t right = build(mid, end, leaf_size);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

bool AabbTree::check_invariants() const {
  std::vector<int> seen(boxes_.size(), 0);
  for (const Node& n : nodes_) {
    if (n.leaf()) {
      for (std::int32_t k = n.begin; k < n.begin + n.count; ++k) {
        const int id = order_[k];
        ++seen[id];
        if (!n.box.contains(boxes_[id])) return false;
      }
    } else {
      if (!n.box.contains(nodes_[n.left].box) || !n.box.contains(nodes_[n.right].box)) return false;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

std::size_t AabbTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf(); }));
}

namespace {

std::vector<Aabb> triangle_boxes(const std::vector<Triangle>& tris) {
  std::vector<Aabb> boxes;
  boxes.reserve(tris.size());
  for (const auto& t : tris) boxes.push_back(bounds_of(t));
  return boxes;
}

}  // namespace

TriangleSoupIndex::TriangleSoupIndex(std::vector<Triangle> triangles)
    : triangles_(std::move(triangles)), tree_(triangle_boxes(triangles_)) {}

SoupHit TriangleSoupIndex::closest(const Vec3& p) const {
  return tree_.closest(p, [this](int id, const Vec3& q) {
    return point_triangle_distance(q, triangles_[id]);
  });
}

}  // namespace spudd
