#pragma once

#include "hexcube/tri_mesh.hpp"
#include "hexcube/voxel_grid.hpp"

namespace hexcube {

// Extracts the iso-level surface of a scalar grid as a triangle mesh.
// Cells between voxel centers are split into six tetrahedra sharing the main
// diagonal, which makes the output watertight and 2-manifold on fields without
// exact-zero plateaus.  Triangles are oriented outward (toward values > iso).
// Connected components holding less than `min_component_area_fraction` of the
// total area are dropped (marching noise specks).
TriMesh extract_isosurface(const ScalarGrid& grid, double iso,
                           double min_component_area_fraction = 0.01);

}  // namespace hexcube
