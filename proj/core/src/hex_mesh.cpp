#include "hexcube/hex_mesh.hpp"

namespace hexcube {

namespace {

// Fixed surface triangulation of the hex cell, outward orientation.
constexpr int kHexFaceTris[12][3] = {
    {0, 3, 2}, {0, 2, 1},  // bottom (z-)
    {4, 5, 6}, {4, 6, 7},  // top (z+)
    {0, 1, 5}, {0, 5, 4},  // front (y-)
    {2, 3, 7}, {2, 7, 6},  // back (y+)
    {0, 4, 7}, {0, 7, 3},  // left (x-)
    {1, 2, 6}, {1, 6, 5},  // right (x+)
};

}  // namespace

double hex_volume_tets(const std::array<Vec3, 8>& c) {
    Vec3 m{0, 0, 0};
    for (const auto& p : c) m += p;
    m *= 0.125;
    double vol = 0.0;
    for (const auto& t : kHexFaceTris)
        vol += triple(c[t[0]] - m, c[t[1]] - m, c[t[2]] - m);
    return vol / 6.0;
}

double hex_volume_divergence(const std::array<Vec3, 8>& c) {
    double vol = 0.0;
    for (const auto& t : kHexFaceTris) vol += triple(c[t[0]], c[t[1]], c[t[2]]);
    return vol / 6.0;
}

std::array<Vec3, 8> cell_corners(const HexMesh& mesh, int cell) {
    std::array<Vec3, 8> c;
    for (int v = 0; v < 8; ++v) c[v] = mesh.nodes[mesh.cells[cell][v]];
    return c;
}

void attach_cell_volumes(HexMesh& mesh) {
    mesh.cell_volume.resize(mesh.cells.size());
    for (int e = 0; e < mesh.cell_count(); ++e)
        mesh.cell_volume[e] = hex_volume_tets(cell_corners(mesh, e));
}

std::vector<std::array<int, 8>> lattice_cells(int n) {
    std::vector<std::array<int, 8>> cells;
    cells.reserve(static_cast<std::size_t>(n - 1) * (n - 1) * (n - 1));
    auto id = [n](int i, int j, int k) { return (k * n + j) * n + i; };
    for (int k = 0; k + 1 < n; ++k)
        for (int j = 0; j + 1 < n; ++j)
            for (int i = 0; i + 1 < n; ++i)
                cells.push_back({id(i, j, k), id(i + 1, j, k), id(i + 1, j + 1, k),
                                 id(i, j + 1, k), id(i, j, k + 1), id(i + 1, j, k + 1),
                                 id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)});
    return cells;
}

}  // namespace hexcube
