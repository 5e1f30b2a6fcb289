#include "hexcube/isosurface.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <vector>

namespace hexcube {

namespace {

// Six positively oriented tetrahedra tiling the unit cube, sharing the main
// diagonal 0-7.  Corner bit layout: bit0 = x, bit1 = y, bit2 = z.
constexpr int kTets[6][4] = {
    {0, 1, 3, 7},  // x, y, z
    {0, 1, 7, 5},  // x, z, y (swapped for orientation)
    {0, 2, 7, 3},  // y, x, z (swapped)
    {0, 2, 6, 7},  // y, z, x
    {0, 4, 5, 7},  // z, x, y
    {0, 4, 7, 6},  // z, y, x (swapped)
};

struct EdgeKeyHash {
    std::size_t operator()(std::uint64_t k) const { return std::hash<std::uint64_t>()(k); }
};

}  // namespace

TriMesh extract_isosurface(const ScalarGrid& grid, double iso,
                           double min_component_area_fraction) {
    const auto& L = grid.layout;
    TriMesh mesh;
    std::unordered_map<std::uint64_t, int, EdgeKeyHash> edge_vertex;

    // Crossing vertex on the lattice segment between centers a and b (global
    // linear ids); shared segments weld to the same vertex.  Crossings within
    // 2% of a lattice point snap onto it (and weld across all its segments),
    // which removes the worst sliver triangles plain marching produces.
    constexpr double kSnap = 0.02;
    auto crossing = [&](std::size_t ia, std::size_t ib, double fa, double fb,
                        const Vec3& pa, const Vec3& pb) -> int {
        double f0 = fa, f1 = fb;
        Vec3 p0 = pa, p1 = pb;
        if (ia > ib) {
            std::swap(ia, ib);
            std::swap(f0, f1);
            std::swap(p0, p1);
        }
        double t = std::clamp((iso - f0) / (f1 - f0), 0.0, 1.0);
        std::uint64_t key;
        Vec3 pos;
        if (t < kSnap) {
            key = (static_cast<std::uint64_t>(ia) << 32) | static_cast<std::uint32_t>(ia);
            pos = p0;
        } else if (t > 1.0 - kSnap) {
            key = (static_cast<std::uint64_t>(ib) << 32) | static_cast<std::uint32_t>(ib);
            pos = p1;
        } else {
            key = (static_cast<std::uint64_t>(ia) << 32) | static_cast<std::uint32_t>(ib);
            pos = p0 + (p1 - p0) * t;
        }
        auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;
        int id = mesh.vertex_count();
        mesh.vertices.push_back(pos);
        edge_vertex.emplace(key, id);
        return id;
    };

    std::size_t corner_id[8];
    double f[8];
    Vec3 p[8];
    for (int k = 0; k + 1 < L.dims[2]; ++k) {
        for (int j = 0; j + 1 < L.dims[1]; ++j) {
            for (int i = 0; i + 1 < L.dims[0]; ++i) {
                for (int c = 0; c < 8; ++c) {
                    int ci = i + (c & 1), cj = j + ((c >> 1) & 1), ck = k + ((c >> 2) & 1);
                    corner_id[c] = L.index(ci, cj, ck);
                    f[c] = grid.values[corner_id[c]];
                    p[c] = L.center(ci, cj, ck);
                }
                for (const auto& tet : kTets) {
                    int inside[4], n_in = 0;
                    for (int v = 0; v < 4; ++v)
                        if (f[tet[v]] < iso) inside[n_in++] = v;
                    if (n_in == 0 || n_in == 4) continue;

                    auto cr = [&](int a, int b) {
                        return crossing(corner_id[tet[a]], corner_id[tet[b]], f[tet[a]],
                                        f[tet[b]], p[tet[a]], p[tet[b]]);
                    };
                    auto emit = [&](int a, int b, int c) {
                        if (a != b && b != c && a != c) mesh.triangles.push_back({a, b, c});
                    };
                    // Permutation parity of (i, j, k, l) relative to (0,1,2,3)
                    // decides the winding; the tets are positively oriented.
                    auto parity = [](const int* perm) {
                        int inv = 0;
                        for (int a = 0; a < 4; ++a)
                            for (int b = a + 1; b < 4; ++b)
                                if (perm[a] > perm[b]) ++inv;
                        return inv % 2;
                    };

                    if (n_in == 1 || n_in == 3) {
                        // Single vertex on one side; (s, a, b, c) with s first.
                        int s = -1;
                        if (n_in == 1) {
                            s = inside[0];
                        } else {
                            for (int v = 0; v < 4; ++v)
                                if (f[tet[v]] >= iso) s = v;
                        }
                        int perm[4] = {s, -1, -1, -1};
                        int w = 1;
                        for (int v = 0; v < 4; ++v)
                            if (v != s) perm[w++] = v;
                        int v0 = cr(s, perm[1]), v1 = cr(s, perm[2]), v2 = cr(s, perm[3]);
                        bool flip = parity(perm) == 1;
                        if (n_in == 3) flip = !flip;  // normal points away from the inside
                        if (flip)
                            emit(v0, v2, v1);
                        else
                            emit(v0, v1, v2);
                    } else {
                        // Two vertices inside: quad c_ik, c_il, c_jl, c_jk.
                        int si = inside[0], sj = inside[1];
                        int perm[4] = {si, sj, -1, -1};
                        int w = 2;
                        for (int v = 0; v < 4; ++v)
                            if (v != si && v != sj) perm[w++] = v;
                        int cik = cr(perm[0], perm[2]), cil = cr(perm[0], perm[3]);
                        int cjl = cr(perm[1], perm[3]), cjk = cr(perm[1], perm[2]);
                        if (parity(perm) == 1) {
                            emit(cik, cjl, cil);
                            emit(cik, cjk, cjl);
                        } else {
                            emit(cik, cil, cjl);
                            emit(cik, cjl, cjk);
                        }
                    }
                }
            }
        }
    }

    if (mesh.triangles.empty()) return mesh;

    // Drop speck components by surface area.
    std::vector<int> parent(mesh.vertex_count());
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<int> rank(mesh.vertex_count(), 0);
    std::vector<int> root_of(mesh.vertex_count());
    auto find = [&](int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank[a] < rank[b]) std::swap(a, b);
        parent[b] = a;
        if (rank[a] == rank[b]) ++rank[a];
    };
    for (const auto& t : mesh.triangles) {
        unite(t[0], t[1]);
        unite(t[0], t[2]);
    }
    std::unordered_map<int, double> component_area;
    double total_area = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        double a = mesh.triangle_area(t);
        component_area[find(mesh.triangles[t][0])] += a;
        total_area += a;
    }
    if (component_area.size() > 1) {
        TriMesh kept;
        std::vector<int> remap(mesh.vertex_count(), -1);
        for (const auto& t : mesh.triangles) {
            if (component_area[find(t[0])] < min_component_area_fraction * total_area) continue;
            std::array<int, 3> nt;
            for (int v = 0; v < 3; ++v) {
                if (remap[t[v]] < 0) {
                    remap[t[v]] = kept.vertex_count();
                    kept.vertices.push_back(mesh.vertices[t[v]]);
                }
                nt[v] = remap[t[v]];
            }
            kept.triangles.push_back(nt);
        }
        return kept;
    }
    return mesh;
}

}  // namespace hexcube
