#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "hexcube/tri_mesh.hpp"

namespace hexcube {

// Per-vertex positions on the unit sphere for a mapped shell.
struct SphereMap {
    std::shared_ptr<const TriMesh> source;
    std::vector<Vec3> positions;  // unit norm, one per source vertex
    int puncture = -1;            // triangle removed for the Dirichlet solve

    const TriMesh& mesh() const { return *source; }
};

// Sparse symmetric cotangent system D x = a, D y = b of the punctured
// Dirichlet problem.  Rows are stored in CSR form with sorted columns; a and b
// are dense with entries only at the puncture corners.
struct CotangentSystem {
    int size = 0;
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<double> val;
    std::vector<double> a, b;
    std::array<int, 3> puncture_corners{-1, -1, -1};  // A, B, C
    int puncture = -1;

    double coeff(int r, int c) const;
    double row_sum(int r) const;
    double max_abs_coeff() const;
    // y = D x
    void multiply(const std::vector<double>& x, std::vector<double>& y) const;
};

struct PlanarCoords {
    std::vector<double> x, y;
    double residual_x = 0.0, residual_y = 0.0;
};

// Puncture selection: with a hint, the triangle whose centroid is closest to
// it (ties to the lowest index); without one, the triangle with the highest
// centroid z (ties to the lowest index).
int select_puncture_triangle(const TriMesh& mesh, std::optional<Vec3> hint = std::nullopt);

// Cotangent weights over all triangles except the punctured one; the diagonal
// makes every row sum to zero.  Throws NumericalDegeneracy when a corner angle
// falls below 1e-4 rad.
CotangentSystem build_cotangent_system(const TriMesh& mesh, int puncture);

// Sparse symmetric solve of D x = a, D y = b to 1e-8 relative residual.  The
// constant nullspace is fixed deterministically (solution shifted to zero
// mean).  Throws SolverFailure.
PlanarCoords solve_planar_coordinates(const CotangentSystem& sys);

Vec3 inverse_stereographic_point(double x, double y);

// Lifts the planar solution to the unit sphere.  The plane is first recentered
// on the area-weighted centroid and rescaled so half the source area maps to
// each hemisphere (the Dirichlet solve leaves that Mobius freedom open); the
// puncture triangle's image surrounds the north pole.
SphereMap inverse_stereographic(std::shared_ptr<const TriMesh> source,
                                const PlanarCoords& planar, int puncture);

// Full chain: puncture selection, cotangent solve, projection to the sphere.
SphereMap conformal_to_sphere(std::shared_ptr<const TriMesh> source,
                              std::optional<Vec3> hint = std::nullopt);

// Signed spherical (geodesic) areas of all triangles under the map.
std::vector<double> spherical_triangle_areas(const SphereMap& map);

double total_signed_spherical_area(const SphereMap& map);

// Triangles whose signed spherical area disagrees with the sign of the total.
int flipped_spherical_triangle_count(const SphereMap& map);

// Relaxes the vertices of flipped triangles toward their one-ring centroid
// until the map is injective again.  Returns the remaining flip count (0 on
// success).  Discrete cotangent maps of irregular triangulations fold in
// isolated spots; this is the standard local repair.
int untangle_sphere_map(SphereMap& map, int max_rounds = 50);

// Rotates the map so its sphere directions best match the source directions
// about the source centroid (area-weighted Kabsch alignment).  Fixes all
// three rotational degrees of freedom by the source's own frame, so maps of
// like surfaces compose to near-identity correspondences; the puncture
// (chosen at the source's top) lands near the north pole.
void align_to_source_frame(SphereMap& map);

// Rotates the map about the z axis so that the area-weighted correlation
// between source x and image azimuth points at azimuth zero (the in-plane
// part of the frame alignment).
void align_azimuth(SphereMap& map);

}  // namespace hexcube
