#include "hexcube/map_assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hexcube/errors.hpp"
#include "hexcube/sphere_locate.hpp"

namespace hexcube {

std::vector<Vec3> interpolate_inverse(const SphereMap& shell_map, std::span<const Vec3> queries) {
    SphereLocator locator(shell_map);
    std::vector<Vec3> out;
    out.reserve(queries.size());
    int hint = 0;
    for (const auto& q : queries) {
        auto hit = locator.locate(q, hint);
        hint = hit.triangle;
        out.push_back(locator.interpolate_source(hit, q));
    }
    return out;
}

Vec3 trilinear_core_fallback(const std::array<Vec3, 8>& c, const Vec3& uvw) {
    // Corner bit layout: bit0 = u, bit1 = v, bit2 = w.
    double u = uvw.x, v = uvw.y, w = uvw.z;
    auto lerp = [](const Vec3& a, const Vec3& b, double t) { return a + (b - a) * t; };
    Vec3 c00 = lerp(c[0], c[1], u), c10 = lerp(c[2], c[3], u);
    Vec3 c01 = lerp(c[4], c[5], u), c11 = lerp(c[6], c[7], u);
    return lerp(lerp(c00, c10, v), lerp(c01, c11, v), w);
}

HexMesh hex_mesh_from_map(const VolumetricMap& map) {
    HexMesh mesh;
    mesh.nodes = map.images;
    mesh.cells = map.cube->hexes;
    mesh.lattice_nodes_per_axis = map.cube->nodes_per_axis();
    attach_cell_volumes(mesh);

    // Shell index per cell: 1 at the outermost cell layer.
    const int n = mesh.lattice_nodes_per_axis - 1;  // cells per axis
    mesh.cell_shell.resize(mesh.cells.size());
    std::size_t c = 0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                mesh.cell_shell[c++] =
                    1 + std::min({i, j, k, n - 1 - i, n - 1 - j, n - 1 - k});
    return mesh;
}

std::pair<VolumetricMap, HexMesh> assemble_initial_map(
    std::shared_ptr<const CubeComplex> cube, const std::vector<SphereMap>& model_shell_maps,
    const std::vector<SphereMap>& cube_shell_maps) {
    const int N = cube->resolution;
    if (static_cast<int>(model_shell_maps.size()) != N ||
        static_cast<int>(cube_shell_maps.size()) != N)
        throw ShellCountMismatch("expected " + std::to_string(N) + " shell maps, got " +
                                 std::to_string(model_shell_maps.size()) + " model / " +
                                 std::to_string(cube_shell_maps.size()) + " cube");

    VolumetricMap map;
    map.cube = cube;
    map.images.assign(cube->nodes.size(), Vec3{0, 0, 0});
    std::vector<char> assigned(cube->nodes.size(), 0);

    for (int k = 1; k <= N; ++k) {
        const auto& shell = cube->shells[k - 1];
        const auto& cube_map = cube_shell_maps[k - 1];
        if (cube_map.positions.size() != shell.vertex_to_node.size())
            throw ShellCountMismatch("cube shell map " + std::to_string(k) +
                                     " does not match the cube shell triangulation");
        auto images = interpolate_inverse(model_shell_maps[k - 1], cube_map.positions);
        for (std::size_t v = 0; v < images.size(); ++v) {
            int node = shell.vertex_to_node[v];
            map.images[node] = images[v];
            assigned[node] = 1;
        }
    }

    // Canonical lattices cover every node with a shell; anything left gets the
    // trilinear blend inside the innermost block.
    if (std::find(assigned.begin(), assigned.end(), 0) != assigned.end()) {
        const int n = cube->nodes_per_axis();
        const int lo = N - 1, hi = n - N;
        std::array<Vec3, 8> corners;
        for (int c = 0; c < 8; ++c)
            corners[c] = map.images[cube->node_id((c & 1) ? hi : lo, (c & 2) ? hi : lo,
                                                  (c & 4) ? hi : lo)];
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    int node = cube->node_id(i, j, k);
                    if (assigned[node]) continue;
                    Vec3 uvw{(i - lo) / double(hi - lo), (j - lo) / double(hi - lo),
                             (k - lo) / double(hi - lo)};
                    map.images[node] = trilinear_core_fallback(corners, uvw);
                }
    }

    // Bijectivity on nodes: no two images within 1e-9.
    {
        std::vector<int> order(map.images.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return map.images[a].x < map.images[b].x;
        });
        const double tol = 1e-9, tol2 = tol * tol;
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (std::size_t j = i + 1; j < order.size(); ++j) {
                if (map.images[order[j]].x - map.images[order[i]].x > tol) break;
                if (norm2(map.images[order[i]] - map.images[order[j]]) < tol2)
                    throw BijectivityFailure("cube nodes " + std::to_string(order[i]) + " and " +
                                             std::to_string(order[j]) +
                                             " map to the same point");
            }
        }
    }

    HexMesh mesh = hex_mesh_from_map(map);
    return {std::move(map), std::move(mesh)};
}

HexMesh laplacian_smooth(const HexMesh& mesh, int iterations, bool fix_boundary) {
    const int n = mesh.lattice_nodes_per_axis;
    if (n <= 0) throw ConfigError("laplacian_smooth needs a lattice hex mesh");
    if (iterations < 0) throw ConfigError("iterations must be >= 0");

    HexMesh out = mesh;
    std::vector<Vec3> next(out.nodes.size());
    auto id = [n](int i, int j, int k) { return (k * n + j) * n + i; };

    for (int it = 0; it < iterations; ++it) {
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    bool boundary = i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 ||
                                    k == n - 1;
                    int node = id(i, j, k);
                    if (boundary && fix_boundary) {
                        next[node] = out.nodes[node];
                        continue;
                    }
                    Vec3 sum{0, 0, 0};
                    int count = 0;
                    const int off[6][3] = {{-1, 0, 0}, {1, 0, 0},  {0, -1, 0},
                                           {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
                    for (const auto& o : off) {
                        int ni = i + o[0], nj = j + o[1], nk = k + o[2];
                        if (ni < 0 || nj < 0 || nk < 0 || ni >= n || nj >= n || nk >= n) continue;
                        sum += out.nodes[id(ni, nj, nk)];
                        ++count;
                    }
                    next[node] = sum / count;
                }
        std::swap(out.nodes, next);
    }
    if (!out.cell_volume.empty()) attach_cell_volumes(out);
    return out;
}

}  // namespace hexcube
