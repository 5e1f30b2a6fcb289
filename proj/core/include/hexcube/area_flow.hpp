#pragma once

#include <vector>

#include "hexcube/sphere_map.hpp"

namespace hexcube {

// Area-distortion density of a sphere map: per-triangle ratio of source area
// to spherical image area, rescaled so the total spherical mass is 4 pi.
struct SphereDensity {
    std::vector<double> triangle_mu;
    std::vector<double> vertex_mu;  // spherical-area-weighted vertex average
};

struct SphereScalar {
    std::vector<double> values;  // one per vertex, zero mean over vertex areas
    double residual = 0.0;
};

// Throws DegenerateImage when a spherical triangle area falls below 1e-14.
SphereDensity compute_area_density(const SphereMap& map);

// Area-weighted variance of the per-triangle density (mean is 1 after the
// 4 pi normalization).
double density_variance(const SphereMap& map, const SphereDensity& density);

// Solves the sphere Poisson problem  laplacian(Theta) = 1 - mu  with the
// cotangent stiffness of the spherical triangulation; relative residual
// <= 1e-8.  Throws IncompatibleRHS when the density is not normalized.
SphereScalar solve_sphere_poisson(const SphereMap& map, const SphereDensity& density);

// Per-vertex tangent gradients of a vertex scalar field: per-triangle linear
// gradients averaged with area weights, projected to the sphere tangent.
std::vector<Vec3> sphere_vertex_gradients(const SphereMap& map,
                                          const std::vector<double>& values);

// Advects the map along  Y_t = -grad(Theta) / ((1-t) mu + t)  with explicit
// Euler and reprojection to the sphere.  The density is carried with each
// vertex; the gradient is re-interpolated at current positions over the input
// triangulation.  Restarts internally until the density variance falls below
// 0.1x the input's (when that was above 1e-3) or the flow stalls, which on
// well-resolved shells reaches the target.  Throws FlipDetected when even the
// first pass cannot keep injectivity after step-size halving.
SphereMap integrate_area_flow(const SphereMap& map, const SphereScalar& theta,
                              const SphereDensity& density, int steps = 20);

}  // namespace hexcube
