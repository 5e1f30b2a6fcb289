#pragma once

#include <array>
#include <vector>

#include "hexcube/map_assembly.hpp"

namespace hexcube {

// Scalar per lattice cell of the unit cube ((2N-1)^3 cells, spacing 1/(2N-1)).
struct CellField {
    int cells_per_axis = 0;
    std::vector<double> values;

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * cells_per_axis + j) * cells_per_axis + i;
    }
    double mean() const;
};

// 3-vector per lattice node ((2N)^3 nodes).
struct NodeVectorField {
    int nodes_per_axis = 0;
    std::vector<Vec3> values;

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * nodes_per_axis + j) * nodes_per_axis + i;
    }
};

// Staggered face field: component a lives on faces orthogonal to axis a.
struct FaceField {
    int cells_per_axis = 0;
    std::array<std::vector<double>, 3> comp;

    std::size_t index(int axis, int i, int j, int k) const;
};

struct PotentialSolve {
    CellField p;
    FaceField velocity_faces;  // grad p, zero on boundary faces
    NodeVectorField v;         // face-averaged, fully zero at boundary nodes
    double residual = 0.0;     // relative residual of div(grad p) = rhs
};

struct VolumeFlowResult {
    VolumetricMap map;
    bool accepted = false;  // false: flow made the variance worse, input kept
    int retries = 0;
    double variance_before = 0.0;
    double variance_after = 0.0;
};

// grad: cells -> interior faces (boundary faces stay zero).
FaceField lattice_gradient(const CellField& p);
// div: faces -> cells; div(lattice_gradient(p)) is exactly the 7-point
// Neumann Laplacian.
CellField lattice_divergence(const FaceField& f);

// Per-cell Jacobian determinant |grad f| = image volume / cell volume (times
// the optional pulled-back model density), normalized to mean 1.  Throws
// InvertedCell when an image hexahedron has non-positive volume.
CellField jacobian_field(const VolumetricMap& map, const CellField* model_density = nullptr);

// Solves div v = rhs with v = grad p and homogeneous Neumann walls.  Boundary
// nodes keep zero normal velocity (faces slide within their plane, edges along
// their axis, corners stay fixed), so the flow maps the cube onto itself.
// Requires |mean(rhs)| <= 1e-9.
PotentialSolve solve_divergence_potential(const CellField& rhs);

// X_t = -v / ((1-t) |grad f| + t), with the Jacobian averaged cell-to-node.
NodeVectorField moser_velocity(const NodeVectorField& v, const CellField& jac, double t);

// One Moser pass: advects g on the cube by explicit Euler (fields interpolated
// at current positions each substep), boundary projected every substep, then
// resamples f at g^{-1}.  Step size halves on cell inversion (<= 3 retries).
// Mean-normalized volume variance never increases in an accepted result.
VolumeFlowResult integrate_volume_flow(const VolumetricMap& map, int steps = 20);

// Population variance of image cell volumes normalized to mean 1.
double map_volume_variance(const VolumetricMap& map);

}  // namespace hexcube
