#pragma once

#include <vector>

#include "hexcube/tri_mesh.hpp"

namespace hexcube {

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Uniform-grid acceleration structure for point-to-surface distance queries.
class TriangleDistanceGrid {
public:
    explicit TriangleDistanceGrid(const TriMesh& mesh, int target_cells_per_axis = 24);

    // Unsigned distance from p to the closest triangle.
    double distance(const Vec3& p) const;

private:
    const TriMesh& mesh_;
    BBox box_;
    double cell_ = 1.0;
    int dims_[3] = {1, 1, 1};
    std::vector<std::vector<int>> cells_;

    std::size_t cell_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * dims_[1] + j) * dims_[0] + i;
    }
};

}  // namespace hexcube
