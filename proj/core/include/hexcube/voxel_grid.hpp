#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hexcube/geometry.hpp"
#include "hexcube/tri_mesh.hpp"

namespace hexcube {

using Index3 = std::array<int, 3>;

// Regular voxel grid; values live at voxel centers.
struct GridLayout {
    Index3 dims{0, 0, 0};
    Vec3 origin{0, 0, 0};  // position of the corner of voxel (0,0,0)
    double spacing = 1.0;  // model units per voxel

    std::size_t size() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * dims[1] + j) * dims[0] + i;
    }
    bool contains(int i, int j, int k) const {
        return i >= 0 && j >= 0 && k >= 0 && i < dims[0] && j < dims[1] && k < dims[2];
    }
    Vec3 center(int i, int j, int k) const {
        return origin + Vec3{(i + 0.5) * spacing, (j + 0.5) * spacing, (k + 0.5) * spacing};
    }
};

struct BinaryVolume {
    GridLayout layout;
    std::vector<std::uint8_t> occupancy;  // 1 inside or on surface, 0 outside

    std::uint8_t at(int i, int j, int k) const { return occupancy[layout.index(i, j, k)]; }
    std::size_t occupied_count() const;
};

struct ScalarGrid {
    GridLayout layout;
    std::vector<double> values;

    double at(int i, int j, int k) const { return values[layout.index(i, j, k)]; }
    double& at(int i, int j, int k) { return values[layout.index(i, j, k)]; }
    // Trilinear interpolation in the voxel-center lattice; clamps to the domain.
    double sample(const Vec3& p) const;
};

// Rasterizes a watertight mesh: a voxel is occupied iff its center is inside
// or on the surface.  Ray-parity along +x with jittered re-casts on grazing
// hits.  `pad` extra voxels are added around the bounding box on each side.
// Throws ResolutionTooHigh when the grid would exceed 512^3, NonWatertight on
// unresolvable parity.
BinaryVolume voxelize(const TriMesh& mesh, double spacing, int pad = 6);

// Signed Euclidean distance to the occupancy interface: negative inside,
// positive outside.  Exact within a 5-voxel band, fast sweeping beyond.
// Throws EmptyVolume when nothing is occupied.
ScalarGrid signed_distance(const BinaryVolume& vol);

// Euler characteristic of the cubical complex spanned by occupied voxels.
// 1 for a simply connected genus-zero solid.
long long cubical_euler_characteristic(const BinaryVolume& vol);

// True when the occupied voxels form a single 6-connected component and the
// complement (including the boundary frame) is also a single component.
bool occupancy_is_connected(const BinaryVolume& vol);

}  // namespace hexcube
