#pragma once

#include <filesystem>

#include "hexcube/hex_mesh.hpp"
#include "hexcube/tri_mesh.hpp"
#include "hexcube/voxel_grid.hpp"

namespace hexcube {

// Loads an ASCII surface mesh (.off, .obj, .stl) and validates it as a closed
// genus-zero 2-manifold.  STL facets are deduplicated by grid hashing at
// 1e-7 x bbox-diagonal.  Throws ParseError, TopologyError, DegenerateGeometry.
TriMesh load_surface_mesh(const std::filesystem::path& path);

// Legacy ASCII VTK unstructured grid, cell type 12.  Doubles are printed with
// 17 significant digits so a write/load round trip is bit exact.  Attached
// cell_volume / cell_shell attributes are emitted as CELL_DATA.
void write_hex_vtk(const HexMesh& mesh, const std::filesystem::path& path);

HexMesh load_hex_vtk(const std::filesystem::path& path);

// Plain OFF writer (debug dumps of shells and intermediate surfaces).
void write_surface_off(const TriMesh& mesh, const std::filesystem::path& path);

// Legacy ASCII VTK structured points (debug dumps of level-set snapshots).
void write_scalar_grid_vtk(const ScalarGrid& grid, const std::filesystem::path& path);

}  // namespace hexcube
