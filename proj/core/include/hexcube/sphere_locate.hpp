#pragma once

#include <array>
#include <vector>

#include "hexcube/sphere_map.hpp"

namespace hexcube {

// Point location on a spherical triangulation via central (gnomonic)
// projection: a direction q lies in triangle (a, b, c) when q is a nonnegative
// combination of the three vertex directions.  Queries walk from a hint
// triangle and fall back to a full scan, so every unit direction resolves
// (the puncture hole is covered by the puncture triangle itself).
class SphereLocator {
public:
    explicit SphereLocator(const SphereMap& map);

    struct Hit {
        int triangle = -1;
        std::array<double, 3> bary{0, 0, 0};  // normalized, clamped to >= 0
    };

    Hit locate(const Vec3& q, int hint_triangle = 0) const;
    Hit locate_brute(const Vec3& q) const;

    // Interpolates the source surface position at direction q.  Exact vertex
    // positions reproduce exactly.
    Vec3 interpolate_source(const Hit& hit, const Vec3& q) const;

private:
    const SphereMap& map_;
    std::vector<std::array<int, 3>> adjacency_;

    // Raw barycentric weights (unnormalized) of q against triangle t.
    std::array<double, 3> raw_bary(int t, const Vec3& q) const;
};

}  // namespace hexcube
