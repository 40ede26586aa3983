#pragma once

#include "spudd/mesh.hpp"

namespace spudd {

// Test and demo surfaces. All are centred on the origin unless noted.

TriMesh icosphere(double radius = 0.5, int subdivisions = 4, const Vec3& center = Vec3::Zero());

// Ring of major radius R in the z = 0 plane, tube radius r.
TriMesh torus(double major = 0.35, double minor = 0.15, int segments = 96, int sides = 48);

// Open disk in the z = 0 plane.
TriMesh disk(double radius = 0.4, int segments = 96, int rings = 24);

// Square [-half, half]^2 in the plane z = height, split into n x n quads.
TriMesh plane_patch(double half = 0.4, int n = 8, double height = 0.0);

// Two squares meeting at right angles along the y axis: one in z = 0, one in x = 0.
TriMesh crossed_sheets(double half = 0.4, int n = 8);

TriMesh box_mesh(const Vec3& lo, const Vec3& hi);

// Box with every edge cut by a 45 degree chamfer of width `bevel` on each face.
TriMesh beveled_box(const Vec3& lo, const Vec3& hi, double bevel);

TriMesh merge(const TriMesh& a, const TriMesh& b);

}  // namespace spudd
