#pragma once

#include <array>
#include <vector>

#include "hexcube/geometry.hpp"

namespace hexcube {

// Triangulated closed surface.  Vertices are in model units; triangles are
// index triples with consistent outward orientation.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<double> vertex_tags;  // optional, empty or one per vertex

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }

    Vec3 triangle_centroid(int t) const {
        const auto& tri = triangles[t];
        return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
    }
    double triangle_area(int t) const {
        const auto& tri = triangles[t];
        return hexcube::triangle_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
    }
};

struct MeshTopology {
    int vertex_count = 0;
    int edge_count = 0;
    int triangle_count = 0;
    int euler_characteristic() const { return vertex_count - edge_count + triangle_count; }
};

MeshTopology mesh_topology(const TriMesh& mesh);

// Throws TopologyError unless the mesh is a connected closed 2-manifold of
// genus zero (every triangle index in range, every edge shared by exactly two
// triangles, V - E + F = 2, single component).  Throws DegenerateGeometry when
// a triangle area is below 1e-12 x bbox-diagonal^2.
void validate_closed_genus_zero(const TriMesh& mesh);

BBox bounding_box(const TriMesh& mesh);

// Enclosed volume by the divergence theorem; positive for outward orientation.
double mesh_volume(const TriMesh& mesh);

double mesh_area(const TriMesh& mesh);

Vec3 mesh_centroid(const TriMesh& mesh);

// Triangle adjacency: neighbor(t, e) is the triangle sharing edge e
// (tri[e], tri[(e+1)%3]) of triangle t, or -1 on a boundary.
std::vector<std::array<int, 3>> triangle_adjacency(const TriMesh& mesh);

// Area-weighted vertex normals (outward for outward-oriented meshes).
std::vector<Vec3> vertex_normals(const TriMesh& mesh);

// Midpoint 1-to-4 subdivision (no smoothing: the surface is unchanged).  The
// input vertices keep their indices; edge midpoints are appended after them.
TriMesh subdivide_midpoint(const TriMesh& mesh, int rounds);

// Taubin lambda/mu smoothing: a low-pass filter over vertex positions that
// removes voxel-scale noise with negligible shrinkage.
TriMesh taubin_smooth(const TriMesh& mesh, int iterations, double lambda = 0.5,
                      double mu = -0.53);

}  // namespace hexcube
