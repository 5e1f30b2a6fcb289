#include "hexcube/area_flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hexcube/errors.hpp"
#include "hexcube/sphere_locate.hpp"
#include "sparse_solve.hpp"

namespace hexcube {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

std::vector<double> vertex_masses(const SphereMap& map, const std::vector<double>& areas) {
    std::vector<double> mass(map.positions.size(), 0.0);
    const auto& tris = map.mesh().triangles;
    for (std::size_t t = 0; t < tris.size(); ++t)
        for (int v = 0; v < 3; ++v) mass[tris[t][v]] += std::abs(areas[t]) / 3.0;
    return mass;
}

}  // namespace

SphereDensity compute_area_density(const SphereMap& map) {
    const TriMesh& src = map.mesh();
    auto sph_areas = spherical_triangle_areas(map);

    SphereDensity density;
    density.triangle_mu.resize(src.triangle_count());
    double total_mass = 0.0;
    for (int t = 0; t < src.triangle_count(); ++t) {
        double img = std::abs(sph_areas[t]);
        if (img < 1e-14)
            throw DegenerateImage("spherical image of triangle " + std::to_string(t) +
                                  " has area " + std::to_string(img));
        density.triangle_mu[t] = src.triangle_area(t) / img;
        total_mass += density.triangle_mu[t] * img;
    }
    const double rescale = kFourPi / total_mass;
    for (double& mu : density.triangle_mu) mu *= rescale;

    density.vertex_mu.assign(src.vertex_count(), 0.0);
    std::vector<double> weight(src.vertex_count(), 0.0);
    for (int t = 0; t < src.triangle_count(); ++t) {
        double w = std::abs(sph_areas[t]);
        for (int v = 0; v < 3; ++v) {
            density.vertex_mu[src.triangles[t][v]] += w * density.triangle_mu[t];
            weight[src.triangles[t][v]] += w;
        }
    }
    for (int v = 0; v < src.vertex_count(); ++v) density.vertex_mu[v] /= weight[v];
    return density;
}

double density_variance(const SphereMap& map, const SphereDensity& density) {
    auto areas = spherical_triangle_areas(map);
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < density.triangle_mu.size(); ++t) {
        double w = std::abs(areas[t]);
        double d = density.triangle_mu[t] - 1.0;
        num += w * d * d;
        den += w;
    }
    return den > 0 ? num / den : 0.0;
}

SphereScalar solve_sphere_poisson(const SphereMap& map, const SphereDensity& density) {
    const TriMesh& srcmesh = map.mesh();
    const int n = static_cast<int>(map.positions.size());
    auto areas = spherical_triangle_areas(map);
    auto mass = vertex_masses(map, areas);

    double mean_defect = 0.0, total_mass = 0.0;
    for (int v = 0; v < n; ++v) {
        mean_defect += mass[v] * (1.0 - density.vertex_mu[v]);
        total_mass += mass[v];
    }
    if (std::abs(mean_defect / total_mass) > 1e-6)
        throw IncompatibleRHS("density mean " +
                              std::to_string(1.0 - mean_defect / total_mass) +
                              " != 1; normalize before solving");

    // Cotangent stiffness S of the spherical triangulation;  S Theta = M (mu-1)
    // is the weak form of  laplacian(Theta) = 1 - mu.
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(srcmesh.triangle_count() * 12);
    for (const auto& tri : srcmesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            int p = tri[e], q = tri[(e + 1) % 3], r = tri[(e + 2) % 3];
            double w = 0.5 * corner_cotangent(map.positions[r], map.positions[p],
                                              map.positions[q]);
            trips.emplace_back(p, q, -w);
            trips.emplace_back(q, p, -w);
            trips.emplace_back(p, p, w);
            trips.emplace_back(q, q, w);
        }
    }

    std::vector<double> rhs(n);
    double rhs_norm = 0.0;
    for (int v = 0; v < n; ++v) {
        rhs[v] = mass[v] * (density.vertex_mu[v] - 1.0);
        rhs_norm += rhs[v] * rhs[v];
    }
    rhs_norm = std::sqrt(rhs_norm);

    SphereScalar theta;
    if (rhs_norm == 0.0) {
        theta.values.assign(n, 0.0);
        return theta;
    }

    detail::PinnedSpdSolver solver(n, trips, 0);
    theta.values = solver.solve(rhs);

    // Zero mean over vertex areas.
    double mean = 0.0;
    for (int v = 0; v < n; ++v) mean += mass[v] * theta.values[v];
    mean /= total_mass;
    for (double& t : theta.values) t -= mean;

    // Residual against the stiffness form.
    Eigen::SparseMatrix<double> S(n, n);
    S.setFromTriplets(trips.begin(), trips.end());
    Eigen::Map<const Eigen::VectorXd> th(theta.values.data(), n);
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
    theta.residual = (S * th - b).norm() / rhs_norm;
    if (theta.residual > 1e-8)
        throw SolverFailure("sphere Poisson residual " + std::to_string(theta.residual));
    return theta;
}

std::vector<Vec3> sphere_vertex_gradients(const SphereMap& map,
                                          const std::vector<double>& values) {
    const TriMesh& srcmesh = map.mesh();
    std::vector<Vec3> grad(map.positions.size(), Vec3{0, 0, 0});
    std::vector<double> weight(map.positions.size(), 0.0);
    for (const auto& tri : srcmesh.triangles) {
        const Vec3& a = map.positions[tri[0]];
        const Vec3& b = map.positions[tri[1]];
        const Vec3& c = map.positions[tri[2]];
        Vec3 n = cross(b - a, c - a);
        double area2 = norm(n);
        if (area2 < 1e-300) continue;
        n = n / area2;
        // Linear hat gradients: grad(lambda_a) = n x (c - b) / (2 A).
        Vec3 ga = cross(n, c - b) / area2;
        Vec3 gb = cross(n, a - c) / area2;
        Vec3 gc = cross(n, b - a) / area2;
        Vec3 g = ga * values[tri[0]] + gb * values[tri[1]] + gc * values[tri[2]];
        double w = 0.5 * area2;
        for (int v = 0; v < 3; ++v) {
            grad[tri[v]] += g * w;
            weight[tri[v]] += w;
        }
    }
    for (std::size_t v = 0; v < grad.size(); ++v) {
        if (weight[v] > 0) grad[v] = grad[v] / weight[v];
        grad[v] -= map.positions[v] * dot(grad[v], map.positions[v]);  // tangent projection
    }
    return grad;
}

namespace {

// One Moser pass; returns false when a flip appeared that the local repair
// could not clear at this step count.
bool advect_once(const SphereMap& input, const std::vector<Vec3>& gradients,
                 const std::vector<double>& vertex_mu, int steps,
                 std::vector<Vec3>& positions) {
    const auto& tris = input.mesh().triangles;
    const int nv = static_cast<int>(input.positions.size());
    SphereLocator locator(input);

    // Hint triangle per vertex: first incident triangle.
    std::vector<int> hint(nv, 0);
    for (int t = static_cast<int>(tris.size()) - 1; t >= 0; --t)
        for (int v = 0; v < 3; ++v) hint[tris[t][v]] = t;

    positions = input.positions;
    const double dt = 1.0 / steps;
    for (int s = 0; s < steps; ++s) {
        double t = static_cast<double>(s) / steps;
        for (int v = 0; v < nv; ++v) {
            // Eulerian gradient at the current location; density carried with
            // the vertex.
            auto hit = locator.locate(positions[v], hint[v]);
            hint[v] = hit.triangle;
            const auto& tri = tris[hit.triangle];
            Vec3 g = gradients[tri[0]] * hit.bary[0] + gradients[tri[1]] * hit.bary[1] +
                     gradients[tri[2]] * hit.bary[2];
            g -= positions[v] * dot(g, positions[v]);
            double rho = (1.0 - t) * vertex_mu[v] + t;
            Vec3 y = -g / rho;
            if (norm2(y) == 0.0) continue;
            positions[v] = normalized(positions[v] + y * dt);
        }
        SphereMap probe{input.source, std::move(positions), input.puncture};
        int remaining = untangle_sphere_map(probe, 20);
        positions = std::move(probe.positions);
        if (remaining > 0) return false;
    }
    return true;
}

}  // namespace

SphereMap integrate_area_flow(const SphereMap& map, const SphereScalar& theta,
                              const SphereDensity& density, int steps) {
    if (steps < 1) throw ConfigError("area flow needs at least one step");
    const double var0 = density_variance(map, density);

    SphereMap current = map;
    SphereScalar th = theta;
    SphereDensity dens = density;
    double var = var0;

    // Restart until the variance target (a tenth of the input) is reached or
    // the flow stalls; coarse triangulations can stop short of the target.
    for (int pass = 0; pass < 12; ++pass) {
        auto gradients = sphere_vertex_gradients(current, th.values);
        double gmax = 0.0;
        for (const auto& g : gradients) gmax = std::max(gmax, norm2(g));
        if (gmax == 0.0) break;  // exact fixed point (mu uniform): map unchanged

        std::vector<Vec3> moved;
        bool ok = false;
        int sub = steps;
        for (int retry = 0; retry <= 3 && !ok; ++retry, sub *= 2)
            ok = advect_once(current, gradients, dens.vertex_mu, sub, moved);
        if (!ok) {
            if (pass > 0) break;  // keep the best injective iterate
            throw FlipDetected("area flow lost injectivity even at " + std::to_string(sub / 2) +
                               " substeps");
        }

        SphereMap next{current.source, std::move(moved), current.puncture};
        SphereDensity next_dens = compute_area_density(next);
        double next_var = density_variance(next, next_dens);
        if (next_var >= var * 0.99) break;  // stalled
        current = std::move(next);
        dens = std::move(next_dens);
        var = next_var;
        if (var0 <= 1e-3 || var <= 0.1 * var0) break;
        th = solve_sphere_poisson(current, dens);
    }
    return current;
}

}  // namespace hexcube
