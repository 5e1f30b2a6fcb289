#pragma once

#include <memory>
#include <span>
#include <vector>

#include "hexcube/cube_complex.hpp"
#include "hexcube/hex_mesh.hpp"
#include "hexcube/sphere_map.hpp"

namespace hexcube {

// Node-wise correspondence f: cube -> model.
struct VolumetricMap {
    std::shared_ptr<const CubeComplex> cube;
    std::vector<Vec3> images;  // one per lattice node

    int nodes_per_axis() const { return cube->nodes_per_axis(); }
};

// Locates each unit-direction query in the shell map's spherical triangulation
// and returns the barycentric pull-back onto the shell's source surface.
// Queries that coincide with mapped vertices reproduce the source vertex
// exactly; the puncture triangle acts as a regular interpolation cell.
std::vector<Vec3> interpolate_inverse(const SphereMap& shell_map, std::span<const Vec3> queries);

// Maps every cube-shell node through its cube sphere map and the inverse of
// the matching model shell map; nodes are checked for pairwise distinctness
// (1e-9).  Both lists run outermost (k=1) to innermost (k=N).
std::pair<VolumetricMap, HexMesh> assemble_initial_map(
    std::shared_ptr<const CubeComplex> cube, const std::vector<SphereMap>& model_shell_maps,
    const std::vector<SphereMap>& cube_shell_maps);

// Trilinear placement of a node inside the innermost shell block from the
// block's 8 corner images (fallback for non-canonical lattices).  Corner bit
// layout: bit0 = u, bit1 = v, bit2 = w.
Vec3 trilinear_core_fallback(const std::array<Vec3, 8>& corner_images, const Vec3& local_uvw);

// Jacobi smoothing toward the 6-neighbor lattice average.  Boundary nodes are
// held fixed when fix_boundary is set (default in the pipeline); otherwise
// they relax toward the mean of their valid neighbors.
HexMesh laplacian_smooth(const HexMesh& mesh, int iterations, bool fix_boundary = true);

HexMesh hex_mesh_from_map(const VolumetricMap& map);

}  // namespace hexcube
