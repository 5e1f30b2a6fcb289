#include "hexcube/shapes.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "hexcube/isosurface.hpp"
#include "hexcube/voxel_grid.hpp"

namespace hexcube::shapes {

TriMesh octahedron(double radius, const Vec3& center) {
    TriMesh m;
    m.vertices = {center + Vec3{radius, 0, 0},  center + Vec3{-radius, 0, 0},
                  center + Vec3{0, radius, 0},  center + Vec3{0, -radius, 0},
                  center + Vec3{0, 0, radius},  center + Vec3{0, 0, -radius}};
    m.triangles = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                   {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
    return m;
}

TriMesh box(const Vec3& lo, const Vec3& hi) {
    TriMesh m;
    for (int c = 0; c < 8; ++c)
        m.vertices.push_back({(c & 1) ? hi.x : lo.x, (c & 2) ? hi.y : lo.y,
                              (c & 4) ? hi.z : lo.z});
    // Two triangles per face, outward orientation.
    const int quads[6][4] = {{0, 2, 3, 1},   // z = lo
                             {4, 5, 7, 6},   // z = hi
                             {0, 1, 5, 4},   // y = lo
                             {2, 6, 7, 3},   // y = hi
                             {0, 4, 6, 2},   // x = lo
                             {1, 3, 7, 5}};  // x = hi
    for (const auto& q : quads) {
        m.triangles.push_back({q[0], q[1], q[2]});
        m.triangles.push_back({q[0], q[2], q[3]});
    }
    return m;
}

TriMesh icosphere(int order, double radius, const Vec3& center) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    TriMesh m;
    m.vertices = {{-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
                  {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
                  {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
    m.triangles = {{0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                   {1, 5, 9},   {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                   {3, 9, 4},   {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                   {4, 9, 5},   {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (auto& v : m.vertices) v = normalized(v);

    for (int s = 0; s < order; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            int id = m.vertex_count();
            m.vertices.push_back(normalized((m.vertices[a] + m.vertices[b]) * 0.5));
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(m.triangles.size() * 4);
        for (const auto& t : m.triangles) {
            int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        m.triangles = std::move(next);
    }
    for (auto& v : m.vertices) v = center + v * radius;
    return m;
}

TriMesh ellipsoid(int order, double a, double b, double c, const Vec3& center) {
    TriMesh m = icosphere(order, 1.0, {0, 0, 0});
    for (auto& v : m.vertices) v = center + Vec3{v.x * a, v.y * b, v.z * c};
    return m;
}

TriMesh peanut(double r, double separation, double blend, int resolution) {
    const Vec3 c1{-separation / 2, 0, 0}, c2{separation / 2, 0, 0};
    auto sdf = [&](const Vec3& p) {
        double d1 = distance(p, c1) - r;
        double d2 = distance(p, c2) - r;
        // Polynomial smooth minimum keeps the waist round and genus zero.
        double h = std::max(blend - std::abs(d1 - d2), 0.0) / blend;
        return std::min(d1, d2) - h * h * blend * 0.25;
    };
    ScalarGrid grid;
    double half = r + separation / 2 + blend + 4.0 * (2 * r + separation) / resolution;
    grid.layout.spacing = 2.0 * half / resolution;
    grid.layout.origin = Vec3{-half, -half, -half};
    grid.layout.dims = {resolution + 1, resolution + 1, resolution + 1};
    grid.values.resize(grid.layout.size());
    for (int k = 0; k <= resolution; ++k)
        for (int j = 0; j <= resolution; ++j)
            for (int i = 0; i <= resolution; ++i)
                grid.values[grid.layout.index(i, j, k)] = sdf(grid.layout.center(i, j, k));
    return extract_isosurface(grid, 0.0);
}

TriMesh torus(double major, double minor, int nu, int nv) {
    TriMesh m;
    for (int i = 0; i < nu; ++i) {
        double u = 2 * M_PI * i / nu;
        for (int j = 0; j < nv; ++j) {
            double v = 2 * M_PI * j / nv;
            m.vertices.push_back({(major + minor * std::cos(v)) * std::cos(u),
                                  (major + minor * std::cos(v)) * std::sin(u),
                                  minor * std::sin(v)});
        }
    }
    auto id = [&](int i, int j) { return (i % nu) * nv + (j % nv); };
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return m;
}

}  // namespace hexcube::shapes
