#pragma once

#include "hexcube/tri_mesh.hpp"

namespace hexcube::shapes {

// Regular octahedron with apexes on the coordinate axes (6 vertices, 8 triangles).
TriMesh octahedron(double radius = 1.0, const Vec3& center = {0, 0, 0});

// Axis-aligned box surface, 8 vertices, 12 triangles, outward orientation.
TriMesh box(const Vec3& min_corner, const Vec3& max_corner);

// Icosahedron subdivided `order` times with vertices projected to the sphere.
// V = 10 * 4^order + 2, F = 20 * 4^order.
TriMesh icosphere(int order, double radius = 1.0, const Vec3& center = {0, 0, 0});

// Icosphere stretched to semi-axes (a, b, c).
TriMesh ellipsoid(int order, double a, double b, double c, const Vec3& center = {0, 0, 0});

// Two spheres of radius r centered at +/- separation/2 along x, joined by a
// smooth-min blend; extracted as a watertight genus-zero surface.
TriMesh peanut(double r = 0.3, double separation = 0.36, double blend = 0.1, int resolution = 56);

// Torus around the z axis (genus one; used to exercise topology guards).
TriMesh torus(double major = 1.0, double minor = 0.35, int nu = 24, int nv = 16);

}  // namespace hexcube::shapes
