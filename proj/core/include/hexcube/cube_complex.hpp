#pragma once

#include <vector>

#include "hexcube/hex_mesh.hpp"
#include "hexcube/tri_mesh.hpp"

namespace hexcube {

// The (2N)^3 node lattice of the unit cube together with its N nested shells.
// Shell k (k = 1..N) is the boundary of the cube after k-1 one-layer erosions;
// shell 1 is the outer boundary, shell N the innermost 2x2x2 block boundary.
// Every lattice node lies on exactly one shell.
struct CubeComplex {
    struct Shell {
        int k = 0;
        TriMesh surface;                 // deterministic triangulation of the shell quads
        std::vector<int> vertex_to_node; // surface vertex -> lattice node id
    };

    int resolution = 0;                  // N
    std::vector<Vec3> nodes;             // (2N)^3 positions in [0,1]^3, lattice order
    std::vector<std::array<int, 8>> hexes;
    std::vector<Shell> shells;           // shells[k-1] has index k

    int nodes_per_axis() const { return 2 * resolution; }
    int node_id(int i, int j, int k) const {
        int n = nodes_per_axis();
        return (k * n + j) * n + i;
    }
    // Shell index (1-based) of lattice node (i, j, k).
    int shell_of(int i, int j, int k) const;
};

CubeComplex build_cube_shells(int N);

}  // namespace hexcube
