#pragma once

#include "spudd/geometry.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace spudd {

// Regular (weighted Delaunay) tetrahedralisation of points p_i with weights
// r_i^2, built by incremental insertion with exact predicates and symbolic
// weight perturbation. Four auxiliary vertices far outside `domain` enclose
// the input, so every tetrahedron is finite; within `domain` they never
// dominate in power distance.
class RegularTriangulation {
 public:
  struct Tet {
    std::array<int, 4> v;   // positively oriented; v[0] < 0 marks a free slot
    std::array<int, 4> nb;  // nb[k] is across the face opposite v[k], -1 outside
  };

  RegularTriangulation(const std::vector<Vec3>& points, const std::vector<double>& radii,
                       const Aabb& domain);

  int input_size() const { return n_; }
  bool auxiliary(int v) const { return v >= n_; }
  // True for inputs that are not vertices (their power cell is empty).
  bool hidden(int i) const { return hidden_[i] != 0; }
  const Vec3& point(int v) const { return pts_[v]; }
  double radius(int v) const { return r_[v]; }
  const std::vector<Tet>& tets() const { return tets_; }
  bool alive(int t) const { return tets_[t].v[0] >= 0; }

  // Point of equal power distance to the four vertices of tetrahedron t.
  Vec3 power_center(int t) const;

  // Calls fn(a, b, ring) once per edge with two input endpoints, where ring
  // lists the tetrahedra around the edge in cyclic order.
  template <class Fn>
  void for_each_edge(Fn&& fn) const;

 private:
  void insert(int q);
  int locate(int q, int start);
  bool conflicts(int t, int q) const;
  int new_tet(const std::array<int, 4>& v);
  // Tetrahedra around edge (a, b) of tet t, starting at t; empty when t is not
  // the lowest index of the ring.
  bool edge_ring(int t, int a, int b, std::vector<int>& ring) const;

  int n_ = 0;
  std::vector<Vec3> pts_;
  std::vector<double> r_;
  std::vector<char> hidden_;
  std::vector<Tet> tets_;
  std::vector<int> free_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  int hint_ = 0;
  std::uint32_t walk_seed_ = 0;
  // Scratch for insertion.
  std::vector<int> cavity_;
  std::vector<std::pair<int, int>> boundary_;
  std::vector<int> created_;
};

template <class Fn>
void RegularTriangulation::for_each_edge(Fn&& fn) const {
  std::vector<int> ring;
  for (int t = 0; t < static_cast<int>(tets_.size()); ++t) {
    if (!alive(t)) continue;
    const Tet& tet = tets_[t];
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        const int a = tet.v[i], b = tet.v[j];
        if (auxiliary(a) || auxiliary(b)) continue;
        if (!edge_ring(t, a, b, ring)) continue;
        fn(std::min(a, b), std::max(a, b), ring);
      }
    }
  }
}

}  // namespace spudd
