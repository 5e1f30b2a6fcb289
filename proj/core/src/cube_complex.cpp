#include "hexcube/cube_complex.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace hexcube {

int CubeComplex::shell_of(int i, int j, int k) const {
    int n = nodes_per_axis();
    int ring = std::min({i, j, k, n - 1 - i, n - 1 - j, n - 1 - k});
    return ring + 1;
}

namespace {

// Appends the triangulated boundary quads of the sub-lattice [lo, hi]^3 as the
// shell surface.  Quads are split along their lexicographically smaller
// diagonal (compared as sorted lattice-node-id pairs).
CubeComplex::Shell make_shell(const CubeComplex& cc, int k) {
    const int n = cc.nodes_per_axis();
    const int lo = k - 1, hi = n - k;

    CubeComplex::Shell shell;
    shell.k = k;

    std::map<int, int> node_to_vertex;
    auto vertex = [&](int i, int j, int kk) {
        int node = cc.node_id(i, j, kk);
        auto it = node_to_vertex.find(node);
        if (it != node_to_vertex.end()) return it->second;
        int v = shell.surface.vertex_count();
        shell.surface.vertices.push_back(cc.nodes[node]);
        shell.vertex_to_node.push_back(node);
        node_to_vertex.emplace(node, v);
        return v;
    };

    // Quad (a, b, c, d) in cycle order with outward orientation.
    auto quad = [&](int a, int b, int c, int d) {
        int na = shell.vertex_to_node[a], nb = shell.vertex_to_node[b];
        int nc = shell.vertex_to_node[c], nd = shell.vertex_to_node[d];
        auto diag_ac = std::minmax(na, nc);
        auto diag_bd = std::minmax(nb, nd);
        if (diag_ac < diag_bd) {
            shell.surface.triangles.push_back({a, b, c});
            shell.surface.triangles.push_back({a, c, d});
        } else {
            shell.surface.triangles.push_back({b, c, d});
            shell.surface.triangles.push_back({b, d, a});
        }
    };

    // Six faces of the [lo, hi] sub-cube.  u, v sweep the in-face axes; quads
    // are oriented so their normals point away from the cube.
    for (int axis = 0; axis < 3; ++axis) {
        int ua = (axis + 1) % 3, va = (axis + 2) % 3;
        for (int side = 0; side < 2; ++side) {
            int w = side == 0 ? lo : hi;
            for (int u = lo; u < hi; ++u) {
                for (int v = lo; v < hi; ++v) {
                    int ijk[3], b[3], c[3], d[3];
                    ijk[axis] = w;
                    ijk[ua] = u;
                    ijk[va] = v;
                    b[axis] = w; b[ua] = u + 1; b[va] = v;
                    c[axis] = w; c[ua] = u + 1; c[va] = v + 1;
                    d[axis] = w; d[ua] = u;     d[va] = v + 1;
                    int va0 = vertex(ijk[0], ijk[1], ijk[2]);
                    int vb = vertex(b[0], b[1], b[2]);
                    int vc = vertex(c[0], c[1], c[2]);
                    int vd = vertex(d[0], d[1], d[2]);
                    if (side == 0)
                        quad(va0, vd, vc, vb);  // outward = -axis
                    else
                        quad(va0, vb, vc, vd);  // outward = +axis
                }
            }
        }
    }
    return shell;
}

}  // namespace

CubeComplex build_cube_shells(int N) {
    if (N < 1) throw std::invalid_argument("resolution N must be >= 1");
    CubeComplex cc;
    cc.resolution = N;
    const int n = 2 * N;
    const double h = 1.0 / (n - 1);

    cc.nodes.reserve(static_cast<std::size_t>(n) * n * n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) cc.nodes.push_back({i * h, j * h, k * h});
    cc.hexes = lattice_cells(n);

    cc.shells.reserve(N);
    for (int k = 1; k <= N; ++k) cc.shells.push_back(make_shell(cc, k));
    return cc;
}

}  // namespace hexcube
