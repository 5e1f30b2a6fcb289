#include "hexcube/tri_mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>

#include "hexcube/errors.hpp"

namespace hexcube {

namespace {

// Canonical undirected edge key.
inline std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

MeshTopology mesh_topology(const TriMesh& mesh) {
    std::map<std::uint64_t, int> edges;
    for (const auto& t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) edges[edge_key(t[e], t[(e + 1) % 3])]++;
    }
    MeshTopology topo;
    topo.vertex_count = mesh.vertex_count();
    topo.edge_count = static_cast<int>(edges.size());
    topo.triangle_count = mesh.triangle_count();
    return topo;
}

void validate_closed_genus_zero(const TriMesh& mesh) {
    const int nv = mesh.vertex_count();
    if (nv < 4 || mesh.triangle_count() < 4)
        throw TopologyError("mesh has too few vertices or triangles (" + std::to_string(nv) +
                            " vertices, " + std::to_string(mesh.triangle_count()) + " triangles)");

    for (const auto& t : mesh.triangles) {
        for (int i = 0; i < 3; ++i)
            if (t[i] < 0 || t[i] >= nv) throw TopologyError("triangle index out of range");
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw TopologyError("triangle with repeated vertex");
    }

    // Every edge must be shared by exactly two triangles.
    std::map<std::uint64_t, int> edges;
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) edges[edge_key(t[e], t[(e + 1) % 3])]++;
    for (const auto& [key, count] : edges) {
        if (count != 2)
            throw TopologyError("edge shared by " + std::to_string(count) +
                                " triangles (expected 2); mesh is open or non-manifold");
    }

    // Single connected component (via vertex adjacency over edges).
    {
        std::vector<std::vector<int>> adj(nv);
        for (const auto& [key, count] : edges) {
            int a = static_cast<int>(key >> 32);
            int b = static_cast<int>(key & 0xffffffffu);
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        std::vector<char> seen(nv, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int reached = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    ++reached;
                    stack.push_back(w);
                }
        }
        if (reached != nv) throw TopologyError("mesh has multiple connected components");
    }

    const int chi = nv - static_cast<int>(edges.size()) + mesh.triangle_count();
    if (chi != 2)
        throw TopologyError("Euler characteristic " + std::to_string(chi) +
                            " != 2; surface is not genus zero");

    const double diag2 = [&] {
        BBox box = bounding_box(mesh);
        double d = box.diagonal();
        return d * d;
    }();
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        if (mesh.triangle_area(t) <= 1e-12 * diag2)
            throw DegenerateGeometry("triangle " + std::to_string(t) + " has near-zero area");
    }
}

BBox bounding_box(const TriMesh& mesh) {
    BBox box;
    for (const auto& v : mesh.vertices) box.expand(v);
    return box;
}

double mesh_volume(const TriMesh& mesh) {
    double vol = 0.0;
    for (const auto& t : mesh.triangles)
        vol += triple(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    return vol / 6.0;
}

double mesh_area(const TriMesh& mesh) {
    double area = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) area += mesh.triangle_area(t);
    return area;
}

Vec3 mesh_centroid(const TriMesh& mesh) {
    // Area-weighted centroid of the surface.
    Vec3 c{0, 0, 0};
    double total = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        double a = mesh.triangle_area(t);
        c += mesh.triangle_centroid(t) * a;
        total += a;
    }
    return total > 0.0 ? c / total : c;
}

std::vector<std::array<int, 3>> triangle_adjacency(const TriMesh& mesh) {
    std::map<std::uint64_t, std::array<int, 2>> edge_tris;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            auto key = edge_key(tri[e], tri[(e + 1) % 3]);
            auto it = edge_tris.find(key);
            if (it == edge_tris.end())
                edge_tris[key] = {t, -1};
            else
                it->second[1] = t;
        }
    }
    std::vector<std::array<int, 3>> adj(mesh.triangle_count(), {-1, -1, -1});
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            const auto& pair = edge_tris[edge_key(tri[e], tri[(e + 1) % 3])];
            adj[t][e] = (pair[0] == t) ? pair[1] : pair[0];
        }
    }
    return adj;
}

TriMesh subdivide_midpoint(const TriMesh& mesh, int rounds) {
    TriMesh out = mesh;
    for (int r = 0; r < rounds; ++r) {
        std::map<std::uint64_t, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = edge_key(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            int id = out.vertex_count();
            out.vertices.push_back((out.vertices[a] + out.vertices[b]) * 0.5);
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(out.triangles.size() * 4);
        for (const auto& t : out.triangles) {
            int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        out.triangles = std::move(next);
    }
    return out;
}

TriMesh taubin_smooth(const TriMesh& mesh, int iterations, double lambda, double mu) {
    TriMesh out = mesh;
    std::vector<std::vector<int>> neighbors(mesh.vertex_count());
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            neighbors[t[e]].push_back(t[(e + 1) % 3]);
            neighbors[t[(e + 1) % 3]].push_back(t[e]);
        }
    std::vector<Vec3> next(out.vertices.size());
    auto pass = [&](double factor) {
        for (int v = 0; v < out.vertex_count(); ++v) {
            Vec3 avg{0, 0, 0};
            for (int w : neighbors[v]) avg += out.vertices[w];
            avg = avg / static_cast<double>(neighbors[v].size());
            next[v] = out.vertices[v] + (avg - out.vertices[v]) * factor;
        }
        out.vertices.swap(next);
    };
    for (int it = 0; it < iterations; ++it) {
        pass(lambda);
        pass(mu);
    }
    return out;
}

std::vector<Vec3> vertex_normals(const TriMesh& mesh) {
    std::vector<Vec3> normals(mesh.vertices.size(), Vec3{0, 0, 0});
    for (const auto& t : mesh.triangles) {
        Vec3 n = cross(mesh.vertices[t[1]] - mesh.vertices[t[0]],
                       mesh.vertices[t[2]] - mesh.vertices[t[0]]);
        for (int i = 0; i < 3; ++i) normals[t[i]] += n;
    }
    for (auto& n : normals) n = normalized(n);
    return normals;
}

}  // namespace hexcube
