#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hexcube/geometry.hpp"

namespace hexcube {

// Structured hexahedral mesh.  Cells use VTK_HEXAHEDRON node ordering:
// nodes 0-3 on the bottom face counterclockwise, 4-7 directly above.
struct HexMesh {
    std::vector<Vec3> nodes;
    std::vector<std::array<int, 8>> cells;

    // Optional per-cell attributes (empty or one per cell).
    std::vector<double> cell_volume;
    std::vector<int> cell_shell;

    // Lattice dimension per axis (2N) when the mesh is a structured lattice
    // deformation; 0 when unknown.  Node (i, j, k) has id (k*n + j)*n + i.
    int lattice_nodes_per_axis = 0;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int cell_count() const { return static_cast<int>(cells.size()); }
};

// Exact volume of the piecewise-linear hexahedron whose quad faces are split
// along fixed diagonals.  Corner-tetrahedra route: fan of 12 tetrahedra from
// the cell centroid over the triangulated surface.
double hex_volume_tets(const std::array<Vec3, 8>& c);

// Same solid via the divergence theorem over the 12 surface triangles.
double hex_volume_divergence(const std::array<Vec3, 8>& c);

std::array<Vec3, 8> cell_corners(const HexMesh& mesh, int cell);

// Fills cell_volume (hex_volume_tets per cell).
void attach_cell_volumes(HexMesh& mesh);

// Builds the (n-1)^3 cell connectivity of an n^3 node lattice.
std::vector<std::array<int, 8>> lattice_cells(int nodes_per_axis);

}  // namespace hexcube
