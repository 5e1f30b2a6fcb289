#include "hexcube/mesh_distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hexcube {

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Ericson, Real-Time Collision Detection, closest point on triangle.
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0 && d2 <= 0) return distance(p, a);

    Vec3 bp = p - b;
    double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0 && d4 <= d3) return distance(p, b);

    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) {
        double v = d1 / (d1 - d3);
        return distance(p, a + ab * v);
    }

    Vec3 cp = p - c;
    double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0 && d5 <= d6) return distance(p, c);

    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) {
        double w = d2 / (d2 - d6);
        return distance(p, a + ac * w);
    }

    double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return distance(p, b + (c - b) * w);
    }

    double denom = 1.0 / (va + vb + vc);
    double v = vb * denom, w = vc * denom;
    return distance(p, a + ab * v + ac * w);
}

TriangleDistanceGrid::TriangleDistanceGrid(const TriMesh& mesh, int target) : mesh_(mesh) {
    box_ = bounding_box(mesh);
    double ext = std::max(box_.max_extent(), 1e-12);
    cell_ = ext / target;
    for (int a = 0; a < 3; ++a) {
        dims_[a] = std::max(1, static_cast<int>(std::ceil((box_.max[a] - box_.min[a]) / cell_)) + 1);
    }
    cells_.resize(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2]);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        BBox tb;
        for (int v = 0; v < 3; ++v) tb.expand(mesh.vertices[mesh.triangles[t][v]]);
        int lo[3], hi[3];
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::clamp(static_cast<int>((tb.min[a] - box_.min[a]) / cell_), 0, dims_[a] - 1);
            hi[a] = std::clamp(static_cast<int>((tb.max[a] - box_.min[a]) / cell_), 0, dims_[a] - 1);
        }
        for (int k = lo[2]; k <= hi[2]; ++k)
            for (int j = lo[1]; j <= hi[1]; ++j)
                for (int i = lo[0]; i <= hi[0]; ++i) cells_[cell_index(i, j, k)].push_back(t);
    }
}

double TriangleDistanceGrid::distance(const Vec3& p) const {
    int ci[3];
    for (int a = 0; a < 3; ++a)
        ci[a] = std::clamp(static_cast<int>((p[a] - box_.min[a]) / cell_), 0, dims_[a] - 1);

    double best = std::numeric_limits<double>::max();
    const int max_ring = std::max({dims_[0], dims_[1], dims_[2]});
    for (int ring = 0; ring <= max_ring; ++ring) {
        // Once a hit exists, one extra ring guarantees correctness (cell metric
        // vs euclidean metric slack).
        if (best < (ring - 1) * cell_) break;
        bool any_cell = false;
        for (int k = ci[2] - ring; k <= ci[2] + ring; ++k) {
            if (k < 0 || k >= dims_[2]) continue;
            for (int j = ci[1] - ring; j <= ci[1] + ring; ++j) {
                if (j < 0 || j >= dims_[1]) continue;
                for (int i = ci[0] - ring; i <= ci[0] + ring; ++i) {
                    if (i < 0 || i >= dims_[0]) continue;
                    if (std::max({std::abs(i - ci[0]), std::abs(j - ci[1]), std::abs(k - ci[2])}) !=
                        ring)
                        continue;  // shell of the ring only
                    any_cell = true;
                    for (int t : cells_[cell_index(i, j, k)]) {
                        const auto& tri = mesh_.triangles[t];
                        double d = point_triangle_distance(p, mesh_.vertices[tri[0]],
                                                           mesh_.vertices[tri[1]],
                                                           mesh_.vertices[tri[2]]);
                        if (d < best) best = d;
                    }
                }
            }
        }
        if (!any_cell && best < std::numeric_limits<double>::max() && ring > max_ring) break;
    }
    return best;
}

}  // namespace hexcube
